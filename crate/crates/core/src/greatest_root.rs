//! The greatest root distribution θ(p, m, n) and its Tracy-Widom
//! approximation.
//!
//! θ(p, m, n) is the law of the largest eigenvalue of `(A + B)^{-1} B` for
//! independent `A ~ W_p(I, m)` and `B ~ W_p(I, n)`, `m >= p`. On the logit
//! scale `W = ln(θ / (1 - θ))` it is approximated by `μ + σ Z` with
//! `Z ~ F1`, where
//!
//! ```text
//! sin²(γ/2) = (min(p, n) - 1/2) / (m + n - 1)
//! sin²(φ/2) = (max(p, n) - 1/2) / (m + n - 1)
//! μ  = 2 ln tan((φ + γ) / 2)
//! σ³ = 16 / ((m + n - 1)² sin²(φ + γ) sin φ sin γ)
//! ```
//!
//! Three parameter conventions are in use: the (p, m, n) triple above,
//! the (s, m, n) "table" parameters of classical percentage-point tables,
//! and the (p, q, v) parameters printed by SAS. All three views are exact
//! conversions of one another.

use std::fmt;

use crate::error::{Error, Result};
use crate::special::{ln_beta_reg, BetaDist};
use crate::tw::{TracyWidom, TAIL_LIMIT};

/// Significance levels reported when the caller does not ask for others.
pub const DEFAULT_LEVELS: [f64; 3] = [0.90, 0.95, 0.99];

fn is_half_integer(x: f64) -> bool {
    (2.0 * x).fract() == 0.0
}

/// Parameters of θ(p, m, n): dimension, error degrees of freedom and
/// hypothesis degrees of freedom.
///
/// Non-integer degrees of freedom are accepted; they arise from
/// half-integer table parameters and the approximation is smooth in them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreatestRootParams {
    p: f64,
    m: f64,
    n: f64,
}

impl GreatestRootParams {
    pub fn new(p: f64, m: f64, n: f64) -> Result<Self> {
        if !(p.is_finite() && m.is_finite() && n.is_finite()) {
            return Err(Error::domain("greatest-root parameters must be finite"));
        }
        if p < 1.0 {
            return Err(Error::domain(format!("dimension p = {p} must be at least 1")));
        }
        if m < p {
            return Err(Error::domain(format!(
                "error degrees of freedom m = {m} must be at least the dimension p = {p}"
            )));
        }
        if n <= 0.0 {
            return Err(Error::domain(format!(
                "hypothesis degrees of freedom n = {n} must be positive"
            )));
        }
        Ok(Self { p, m, n })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    /// The triple with the same law: θ(p, m, n) = θ(n, m + n - p, p).
    pub fn dual(&self) -> Result<Self> {
        Self::new(self.n, self.m + self.n - self.p, self.p)
    }

    /// The representative with `p <= n`.
    pub fn normalized(&self) -> Self {
        if self.n < self.p {
            Self {
                p: self.n,
                m: self.m + self.n - self.p,
                n: self.p,
            }
        } else {
            *self
        }
    }

    /// Whether both Wishart degrees of freedom and the dimension are
    /// integers, as simulation requires.
    pub fn is_integral(&self) -> bool {
        self.p.fract() == 0.0 && self.m.fract() == 0.0 && self.n.fract() == 0.0
    }

    pub fn from_table(t: TableParams) -> Self {
        Self {
            p: t.s,
            m: t.s + 2.0 * t.n + 1.0,
            n: t.s + 2.0 * t.m + 1.0,
        }
    }

    /// Table view. For `n < p` the table parameters describe the dual
    /// triple, so `from_table(to_table(g)) == g.normalized()`.
    pub fn to_table(&self) -> TableParams {
        TableParams {
            s: self.p.min(self.n),
            m: ((self.n - self.p).abs() - 1.0) / 2.0,
            n: (self.m - self.p - 1.0) / 2.0,
        }
    }

    pub fn from_sas(sas: SasParams) -> Self {
        Self {
            p: sas.p,
            m: sas.v,
            n: sas.q,
        }
    }

    pub fn to_sas(&self) -> SasParams {
        SasParams {
            p: self.p,
            q: self.n,
            v: self.m,
        }
    }

    /// Hypothesis and error degrees of freedom of the F bound,
    /// `ν₁ = s + 2m + 1`, `ν₂ = s + 2n + 1` in table parameters.
    pub fn f_bound_df(&self) -> (f64, f64) {
        let t = self.to_table();
        (t.s + 2.0 * t.m + 1.0, t.s + 2.0 * t.n + 1.0)
    }
}

impl fmt::Display for GreatestRootParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "θ(p={}, m={}, n={})", self.p, self.m, self.n)
    }
}

/// Table parameters (s, m, n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableParams {
    pub s: f64,
    pub m: f64,
    pub n: f64,
}

impl TableParams {
    pub fn new(s: f64, m: f64, n: f64) -> Result<Self> {
        if !(s >= 1.0 && s.fract() == 0.0) {
            return Err(Error::domain(format!(
                "table parameter s = {s} must be a positive integer"
            )));
        }
        if !(m >= -0.5 && n >= -0.5) {
            return Err(Error::domain(format!(
                "table parameters m = {m}, n = {n} must be at least -1/2"
            )));
        }
        if !(is_half_integer(m) && is_half_integer(n)) {
            return Err(Error::domain(format!(
                "table parameters m = {m}, n = {n} must be multiples of 1/2"
            )));
        }
        Ok(Self { s, m, n })
    }

    /// `N = 2(s + m + n) + 1`, which equals `m + n - 1` in (p, m, n) terms.
    pub fn big_n(&self) -> f64 {
        2.0 * (self.s + self.m + self.n) + 1.0
    }
}

/// SAS parameters: rank of the response transform `p`, rank of the
/// hypothesis matrix `q`, and error degrees of freedom `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SasParams {
    pub p: f64,
    pub q: f64,
    pub v: f64,
}

impl SasParams {
    pub fn new(p: f64, q: f64, v: f64) -> Result<Self> {
        if !(p >= 1.0 && q >= 1.0) {
            return Err(Error::domain(format!("SAS ranks p = {p}, q = {q} must be at least 1")));
        }
        if v.is_nan() || v < p {
            return Err(Error::domain(format!("SAS error df v = {v} must be at least p = {p}")));
        }
        Ok(Self { p, q, v })
    }

    /// The (s, m, n) printed alongside SAS output.
    pub fn printed(&self) -> TableParams {
        TableParams {
            s: self.p.min(self.q),
            m: ((self.p - self.q).abs() - 1.0) / 2.0,
            n: (self.v - self.p - 1.0) / 2.0,
        }
    }
}

/// Centering and scaling for one parameter triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwConstants {
    pub gamma: f64,
    pub phi: f64,
    /// Logit-scale center.
    pub mu: f64,
    /// Logit-scale scale.
    pub sigma: f64,
    /// `m + n - 1`.
    pub big_n: f64,
}

impl TwConstants {
    pub fn new(g: &GreatestRootParams) -> Result<Self> {
        let g = g.normalized();
        let (lo, hi) = (g.p.min(g.n), g.p.max(g.n));
        let big_n = g.m + g.n - 1.0;
        if lo < 1.0 {
            return Err(Error::domain(format!(
                "min(p, n) = {lo} must be at least 1 for the angle γ to be defined"
            )));
        }
        let sin2_gamma = (lo - 0.5) / big_n;
        let sin2_phi = (hi - 0.5) / big_n;
        if sin2_phi.is_nan() || sin2_phi >= 1.0 {
            return Err(Error::domain(format!(
                "(max(p, n) - 1/2) / (m + n - 1) = {sin2_phi} must be below 1"
            )));
        }
        let gamma = 2.0 * sin2_gamma.sqrt().asin();
        let phi = 2.0 * sin2_phi.sqrt().asin();
        if (phi + gamma).is_nan() || phi + gamma >= std::f64::consts::PI {
            return Err(Error::domain("angles violate φ + γ < π"));
        }
        let mu = 2.0 * ((phi + gamma) / 2.0).tan().ln();
        let sum_sin = (phi + gamma).sin();
        let sigma = (16.0 / (big_n * big_n * sum_sin * sum_sin * phi.sin() * gamma.sin())).cbrt();
        Ok(Self {
            gamma,
            phi,
            mu,
            sigma,
            big_n,
        })
    }

    /// Standardized Tracy-Widom argument for an observed root.
    pub fn standardize(&self, theta: f64) -> f64 {
        ((theta / (1.0 - theta)).ln() - self.mu) / self.sigma
    }

    /// Inverse of [`standardize`](Self::standardize).
    pub fn unstandardize(&self, s: f64) -> f64 {
        let w = self.mu + s * self.sigma;
        1.0 / (1.0 + (-w).exp())
    }
}

pub fn tw_constants(g: &GreatestRootParams) -> Result<TwConstants> {
    TwConstants::new(g)
}

/// A probability carried together with its natural logarithm, so tiny
/// p-values keep their order of magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probability {
    pub value: f64,
    pub ln: f64,
}

impl Probability {
    pub fn from_ln(ln: f64) -> Self {
        Self { value: ln.exp(), ln }
    }

    pub fn log10(&self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }
}

fn check_theta(theta: f64) -> Result<f64> {
    if theta > 0.0 && theta < 1.0 {
        Ok(theta)
    } else {
        Err(Error::domain(format!(
            "root θ = {theta} must lie strictly between 0 and 1"
        )))
    }
}

/// Approximate `alpha` quantile of θ(p, m, n): `θ_α = e^{μ+f_α σ} / (1 + e^{μ+f_α σ})`.
pub fn quantile_approx(g: &GreatestRootParams, alpha: f64) -> Result<f64> {
    let c = TwConstants::new(g)?;
    let f_alpha = TracyWidom::F1.quantile(alpha)?;
    Ok(c.unstandardize(f_alpha))
}

/// Approximate critical value for an upper-tail level, `quantile_approx(1 - level)`
/// without rounding `1 - level`.
pub fn critical_value(g: &GreatestRootParams, level: f64) -> Result<f64> {
    let c = TwConstants::new(g)?;
    let f = TracyWidom::F1.upper_quantile(level)?;
    Ok(c.unstandardize(f))
}

/// Tracy-Widom p-value `1 - F1((logit θ - μ) / σ)`.
pub fn pvalue_tw(theta: f64, g: &GreatestRootParams) -> Result<Probability> {
    let theta = check_theta(theta)?;
    let c = TwConstants::new(g)?;
    let ln = TracyWidom::F1.ln_sf(c.standardize(theta))?;
    if ln < TAIL_LIMIT.ln() {
        return Err(Error::TailLimit { bound: TAIL_LIMIT });
    }
    Ok(Probability::from_ln(ln))
}

/// The F lower bound on the p-value, `1 - F_{ν₁,ν₂}(ν₂ θ / (ν₁ (1 - θ)))`.
/// Always anti-conservative.
pub fn pvalue_f_bound(theta: f64, g: &GreatestRootParams) -> Result<Probability> {
    let theta = check_theta(theta)?;
    let (nu1, nu2) = g.f_bound_df();
    // P(F > ν₂θ/(ν₁(1-θ))) = I_{1-θ}(ν₂/2, ν₁/2)
    Ok(Probability::from_ln(ln_beta_reg(
        0.5 * nu2,
        0.5 * nu1,
        1.0 - theta,
        theta,
    )))
}

/// Lower-tail p-value for the smallest root, using
/// θ̃(p, m, n) = 1 - θ(p, n, m) (error and hypothesis df swap).
pub fn smallest_root_pvalue(theta: f64, g: &GreatestRootParams) -> Result<Probability> {
    let theta = check_theta(theta)?;
    let swapped = GreatestRootParams::new(g.p, g.n, g.m)?;
    pvalue_tw(1.0 - theta, &swapped)
}

/// Lower-tail critical value of the smallest root at `level`:
/// `1 - quantile_approx(p, n, m; 1 - level)`.
pub fn smallest_root_critical_value(g: &GreatestRootParams, level: f64) -> Result<f64> {
    let swapped = GreatestRootParams::new(g.p, g.n, g.m)?;
    Ok(1.0 - critical_value(&swapped, level)?)
}

/// When `min(p, n) = 1` the greatest root is exactly Beta distributed:
/// θ(1, m, n) ~ Beta(n/2, m/2), and the n = 1 case follows by duality.
pub fn exact_beta_law(g: &GreatestRootParams) -> Result<BetaDist> {
    let g = g.normalized();
    if g.p != 1.0 {
        return Err(Error::domain(format!(
            "the exact Beta law needs min(p, n) = 1, got p = {}, n = {}",
            g.p, g.n
        )));
    }
    BetaDist::new(g.n / 2.0, g.m / 2.0)
}

pub fn beta_exact_quantile(g: &GreatestRootParams, alpha: f64) -> Result<f64> {
    exact_beta_law(g)?.quantile(alpha)
}

pub fn beta_exact_pvalue(theta: f64, g: &GreatestRootParams) -> Result<Probability> {
    let theta = check_theta(theta)?;
    Ok(Probability::from_ln(exact_beta_law(g)?.ln_sf(theta)))
}

/// Tracy-Widom p-value, or the tail limit it fell below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PValue {
    Estimate(Probability),
    BelowTailLimit { bound: f64 },
}

impl PValue {
    /// The value, with the tail limit standing in when below it.
    pub fn upper_estimate(&self) -> f64 {
        match self {
            PValue::Estimate(p) => p.value,
            PValue::BelowTailLimit { bound } => *bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValue {
    /// CDF level, e.g. 0.95 for a 5% test.
    pub alpha: f64,
    pub theta: f64,
}

/// Result of a largest-root test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestOutcome {
    /// Observed largest root θ₁.
    pub statistic: f64,
    /// All nonzero roots, descending.
    pub roots: Vec<f64>,
    /// Null distribution θ(p, m, n).
    pub params: GreatestRootParams,
    pub p_tw: PValue,
    /// F lower bound; anti-conservative.
    pub p_f_bound: Probability,
    /// Approximate critical values, increasing in `alpha`.
    pub critical_values: Vec<CriticalValue>,
    /// Set when the null law is a stochastic upper bound rather than the
    /// exact null, so the p-value is conservative by construction.
    pub conservative: bool,
}

impl TestOutcome {
    pub fn evaluate(statistic: f64, roots: Vec<f64>, params: GreatestRootParams, levels: &[f64]) -> Result<Self> {
        if !(0.0..=1.0).contains(&statistic) {
            return Err(Error::domain(format!("root θ = {statistic} outside [0, 1]")));
        }
        let (p_tw, p_f_bound) = if statistic == 0.0 {
            (PValue::Estimate(Probability::from_ln(0.0)), Probability::from_ln(0.0))
        } else if statistic == 1.0 {
            (
                PValue::BelowTailLimit { bound: TAIL_LIMIT },
                Probability::from_ln(f64::NEG_INFINITY),
            )
        } else {
            let p_tw = match pvalue_tw(statistic, &params) {
                Ok(p) => PValue::Estimate(p),
                Err(Error::TailLimit { bound }) => PValue::BelowTailLimit { bound },
                Err(e) => return Err(e),
            };
            (p_tw, pvalue_f_bound(statistic, &params)?)
        };
        let mut critical_values = Vec::with_capacity(levels.len());
        for &alpha in levels {
            critical_values.push(CriticalValue {
                alpha,
                theta: quantile_approx(&params, alpha)?,
            });
        }
        critical_values.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
        Ok(Self {
            statistic,
            roots,
            params,
            p_tw,
            p_f_bound,
            critical_values,
            conservative: false,
        })
    }

    pub fn table_view(&self) -> TableParams {
        self.params.to_table()
    }

    pub fn sas_view(&self) -> SasParams {
        self.params.to_sas()
    }
}
