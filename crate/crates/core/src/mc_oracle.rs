//! Monte Carlo sampling of the exact null distribution θ(p, m, n) and of
//! the test statistics built on it.
//!
//! Replication `i` draws from a ChaCha8 stream seeded with the configured
//! seed and positioned at stream `i`, so results are bit-identical for any
//! number of workers.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal, StudentT};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::greatest_root::{quantile_approx, GreatestRootParams};
use crate::linalg;
use crate::mv_tests::{self, DataMatrix, LinearHypothesis};

/// Environment variable read for the default worker count.
pub const WORKERS_ENV: &str = "ROYTW_WORKERS";

/// Worker count from `ROYTW_WORKERS`, falling back to the available
/// parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `draw` once per replication on its own substream, in parallel,
/// returning results in replication order.
pub fn replicate<T, F>(reps: usize, seed: u64, workers: usize, draw: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    let run = || {
        (0..reps)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                draw(&mut rng)
            })
            .collect::<Result<Vec<T>>>()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub reps: usize,
    pub seed: u64,
    pub workers: usize,
    pub params: GreatestRootParams,
}

impl SimConfig {
    /// Requires integer degrees of freedom.
    pub fn new(params: GreatestRootParams, reps: usize, seed: u64) -> Result<Self> {
        if reps == 0 {
            return Err(Error::domain("need at least one replication"));
        }
        if !params.is_integral() {
            return Err(Error::domain(format!(
                "simulation needs integer parameters, got {params}"
            )));
        }
        Ok(Self {
            reps,
            seed,
            workers: default_workers(),
            params,
        })
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}

/// Sampler for `W_p(I, df)`.
#[derive(Debug, Clone)]
pub struct WishartSampler {
    p: usize,
    df: usize,
    bartlett: Option<Vec<ChiSquared<f64>>>,
}

impl WishartSampler {
    /// Gram product of a `df x p` Gaussian matrix when `df <= 2p`, Bartlett
    /// decomposition otherwise.
    pub fn new(p: usize, df: usize) -> Result<Self> {
        if df > 2 * p {
            Self::bartlett(p, df)
        } else {
            Self::gram(p, df)
        }
    }

    pub fn gram(p: usize, df: usize) -> Result<Self> {
        if p == 0 || df == 0 {
            return Err(Error::domain(format!(
                "Wishart needs p >= 1 and df >= 1, got p = {p}, df = {df}"
            )));
        }
        Ok(Self { p, df, bartlett: None })
    }

    /// Bartlett sampler; needs `df >= p`.
    pub fn bartlett(p: usize, df: usize) -> Result<Self> {
        if p == 0 || df < p {
            return Err(Error::domain(format!(
                "Bartlett sampling needs df >= p >= 1, got p = {p}, df = {df}"
            )));
        }
        let chis = (0..p)
            .map(|i| ChiSquared::new((df - i) as f64).map_err(|e| Error::domain(e.to_string())))
            .collect::<Result<_>>()?;
        Ok(Self {
            p,
            df,
            bartlett: Some(chis),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<f64> {
        let p = self.p;
        match &self.bartlett {
            None => {
                let x = DMatrix::<f64>::from_fn(self.df, p, |_, _| rng.sample(StandardNormal));
                x.tr_mul(&x)
            }
            Some(chis) => {
                let mut l = DMatrix::<f64>::zeros(p, p);
                for i in 0..p {
                    l[(i, i)] = chis[i].sample(rng).sqrt();
                    for j in 0..i {
                        l[(i, j)] = rng.sample(StandardNormal);
                    }
                }
                &l * l.transpose()
            }
        }
    }
}

/// One draw from `W_p(I, df)`.
pub fn sample_wishart<R: Rng + ?Sized>(p: usize, df: usize, rng: &mut R) -> Result<DMatrix<f64>> {
    Ok(WishartSampler::new(p, df)?.sample(rng))
}

/// Sorted draws of a statistic with order-statistic summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDist {
    sorted: Vec<f64>,
    params: GreatestRootParams,
}

impl EmpiricalDist {
    pub fn new(mut sample: Vec<f64>, params: GreatestRootParams) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::domain("empty sample"));
        }
        if let Some(bad) = sample.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
            return Err(Error::domain(format!("sampled root {bad} outside (0, 1)")));
        }
        sample.sort_by(f64::total_cmp);
        Ok(Self { sorted: sample, params })
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn reps(&self) -> usize {
        self.sorted.len()
    }

    pub fn params(&self) -> GreatestRootParams {
        self.params
    }

    fn rank(&self, alpha: f64) -> usize {
        ((alpha * self.reps() as f64).ceil() as usize).clamp(1, self.reps())
    }

    /// Type-1 quantile: the order statistic of rank `ceil(alpha * reps)`.
    pub fn quantile(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain(format!("quantile level {alpha} outside (0, 1]")));
        }
        Ok(self.sorted[self.rank(alpha) - 1])
    }

    /// Standard error of [`quantile`](Self::quantile): half the width of the
    /// order-statistic band at ranks `reps * alpha ± sqrt(reps * alpha * (1 - alpha))`.
    pub fn quantile_se(&self, alpha: f64) -> Result<f64> {
        let q = self.quantile(alpha)?;
        let n = self.reps() as f64;
        let half = (n * alpha * (1.0 - alpha)).sqrt();
        let at = |r: f64| self.sorted[(r.round() as usize).clamp(1, self.reps()) - 1];
        let (lo, hi) = (at(n * alpha - half), at(n * alpha + half));
        Ok((0.5 * (hi - lo)).max(q * f64::EPSILON))
    }

    /// Fraction of draws `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.reps() as f64
    }

    /// Fraction of draws `>= x`, an estimate of the exact p-value.
    pub fn sf(&self, x: f64) -> f64 {
        (self.reps() - self.sorted.partition_point(|&v| v < x)) as f64 / self.reps() as f64
    }

    /// Binomial standard error of a proportion `prob` estimated from these draws.
    pub fn proportion_se(&self, prob: f64) -> f64 {
        (prob * (1.0 - prob) / self.reps() as f64).sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.reps() as f64
    }

    /// Kolmogorov-Smirnov distance to a continuous CDF.
    pub fn ks_distance(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let n = self.reps() as f64;
        self.sorted.iter().enumerate().fold(0.0_f64, |d, (i, &x)| {
            let f = cdf(x);
            d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
        })
    }

    /// Median and upper percentiles.
    pub fn summary(&self) -> Vec<(f64, f64)> {
        [0.5, 0.9, 0.95, 0.99]
            .iter()
            .map(|&a| (a, self.sorted[self.rank(a) - 1]))
            .collect()
    }
}

fn check_root(theta: f64) -> Result<f64> {
    if theta > 0.0 && theta < 1.0 {
        Ok(theta)
    } else {
        Err(Error::conditioning(
            "simulated (A + B)",
            format!("root {theta} outside (0, 1)"),
        ))
    }
}

fn root_sampler(params: &GreatestRootParams) -> Result<(usize, WishartSampler, WishartSampler)> {
    let p = params.p() as usize;
    Ok((
        p,
        WishartSampler::new(p, params.m() as usize)?,
        WishartSampler::new(p, params.n() as usize)?,
    ))
}

fn sample_roots(cfg: &SimConfig, pick: fn(&[f64]) -> f64) -> Result<Vec<f64>> {
    let (_, a_s, b_s) = root_sampler(&cfg.params)?;
    replicate(cfg.reps, cfg.seed, cfg.workers, |rng| {
        let a = a_s.sample(rng);
        let b = b_s.sample(rng);
        let t = &a + &b;
        let roots = linalg::relative_roots(&b, &t, "simulated A + B")?;
        check_root(pick(&roots))
    })
}

/// Draws of the largest eigenvalue of `(A + B)^{-1} B`.
pub fn sample_greatest_root(cfg: &SimConfig) -> Result<EmpiricalDist> {
    let draws = sample_roots(cfg, |r| r[0])?;
    EmpiricalDist::new(draws, cfg.params)
}

/// Draws of the smallest eigenvalue of `(A + B)^{-1} B`; needs `n >= p`.
pub fn sample_smallest_root(cfg: &SimConfig) -> Result<EmpiricalDist> {
    if cfg.params.n() < cfg.params.p() {
        return Err(Error::domain("the smallest root is zero when n < p"));
    }
    let draws = sample_roots(cfg, |r| r[r.len() - 1])?;
    EmpiricalDist::new(draws, cfg.params)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub alpha: f64,
    pub theta_tw: f64,
    pub theta_mc: f64,
    /// `theta_tw / theta_mc - 1`.
    pub rel_err: f64,
    /// Standard error of `theta_mc`.
    pub mc_se: f64,
}

impl ComparisonRow {
    /// Standard error of `rel_err` by the delta method.
    pub fn rel_err_se(&self) -> f64 {
        self.theta_tw * self.mc_se / (self.theta_mc * self.theta_mc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub params: GreatestRootParams,
    pub reps: usize,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub const CSV_HEADER: &'static str = "alpha,theta_tw,theta_mc,rel_err,mc_se";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e}",
                r.alpha, r.theta_tw, r.theta_mc, r.rel_err, r.mc_se
            );
        }
        out
    }
}

/// Approximate against simulated quantiles at each level.
pub fn compare_tw_vs_mc(cfg: &SimConfig, alphas: &[f64]) -> Result<Comparison> {
    let emp = sample_greatest_root(cfg)?;
    compare_with(&emp, alphas)
}

/// As [`compare_tw_vs_mc`], reusing an existing sample.
pub fn compare_with(emp: &EmpiricalDist, alphas: &[f64]) -> Result<Comparison> {
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let theta_tw = quantile_approx(&emp.params, alpha)?;
        let theta_mc = emp.quantile(alpha)?;
        rows.push(ComparisonRow {
            alpha,
            theta_tw,
            theta_mc,
            rel_err: theta_tw / theta_mc - 1.0,
            mc_se: emp.quantile_se(alpha)?,
        });
    }
    Ok(Comparison {
        params: emp.params,
        reps: emp.reps(),
        rows,
    })
}

/// Error law for simulated data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Noise {
    Gaussian,
    StudentT5,
    RandomSign,
}

impl Noise {
    fn matrix(self, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        match self {
            Noise::Gaussian => DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal)),
            Noise::StudentT5 => {
                let t = StudentT::new(5.0).expect("valid degrees of freedom");
                DMatrix::from_fn(rows, cols, |_, _| t.sample(rng))
            }
            Noise::RandomSign => DMatrix::from_fn(rows, cols, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 }),
        }
    }
}

/// A test run on data generated under its null hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub enum NullScenario {
    /// Independence of `p1` and `p2` variables on `n` observations.
    Independence { n: usize, p1: usize, p2: usize },
    /// Zero canonical correlation between `q` x-variables and `p`
    /// y-variables on `n` observations.
    Cca { n: usize, p: usize, q: usize },
    /// One-way MANOVA with the given group sizes.
    Manova { group_sizes: Vec<usize>, p: usize },
    /// Two covariance estimates on `n1` and `n2` degrees of freedom, each
    /// from a sample of `n_i + 1` centered observations.
    CovEquality { p: usize, n1: usize, n2: usize },
    /// Linear model with intercept and `covariates` regressors, testing
    /// that the last `tested` slopes vanish.
    Mlm {
        n: usize,
        p: usize,
        covariates: usize,
        tested: usize,
    },
}

impl NullScenario {
    fn statistic(&self, noise: Noise, rng: &mut ChaCha8Rng) -> Result<(f64, GreatestRootParams)> {
        let out = match self {
            NullScenario::Independence { n, p1, p2 } => {
                let data = DataMatrix::new(noise.matrix(*n, p1 + p2, rng))?;
                mv_tests::independence_test(&data, *p1, *p2)?
            }
            NullScenario::Cca { n, p, q } => {
                let x = DataMatrix::new(noise.matrix(*n, *q, rng))?;
                let y = DataMatrix::new(noise.matrix(*n, *p, rng))?;
                let r = mv_tests::cca(&x, &y)?;
                mv_tests::cca_null_test(r[0], *p, *q, *n)?
            }
            NullScenario::Manova { group_sizes, p } => {
                let n = group_sizes.iter().sum();
                let labels: Vec<String> = group_sizes
                    .iter()
                    .enumerate()
                    .flat_map(|(g, &c)| std::iter::repeat_n(g.to_string(), c))
                    .collect();
                let data = DataMatrix::new(noise.matrix(n, *p, rng))?.with_groups(labels)?;
                mv_tests::manova_one_way(&data)?
            }
            NullScenario::CovEquality { p, n1, n2 } => {
                let mut cov = |df: usize| {
                    let x = linalg::center_columns(&noise.matrix(df + 1, *p, rng));
                    x.tr_mul(&x) / df as f64
                };
                let (s1, s2) = (cov(*n1), cov(*n2));
                mv_tests::cov_equality_test(&s1, *n1 as f64, &s2, *n2 as f64)?
            }
            NullScenario::Mlm {
                n,
                p,
                covariates,
                tested,
            } => {
                let q = covariates + 1;
                let mut x = DMatrix::from_element(*n, q, 1.0);
                x.columns_mut(1, *covariates)
                    .copy_from(&noise.matrix(*n, *covariates, rng));
                let c1 = DMatrix::from_fn(*tested, q, |i, j| if j == q - tested + i { 1.0 } else { 0.0 });
                let y = DataMatrix::new(noise.matrix(*n, *p, rng))?;
                mv_tests::mlm_test(&y, &x, &LinearHypothesis::new(c1)?)?
            }
        };
        Ok((out.statistic, out.params))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionRate {
    /// Nominal size.
    pub level: f64,
    /// Tracy-Widom critical value used.
    pub critical_value: f64,
    pub rate: f64,
    /// Binomial standard error of `rate`.
    pub se: f64,
}

/// Empirical size of a largest-root test at its Tracy-Widom critical
/// values, one entry per nominal level.
pub fn null_rejection_rate(
    scenario: &NullScenario,
    noise: Noise,
    levels: &[f64],
    reps: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<RejectionRate>> {
    if reps == 0 {
        return Err(Error::domain("need at least one replication"));
    }
    let draws = replicate(reps, seed, workers, |rng| scenario.statistic(noise, rng))?;
    let params = draws[0].1;
    levels
        .iter()
        .map(|&level| {
            let critical_value = quantile_approx(&params, 1.0 - level)?;
            let hits = draws.iter().filter(|(s, _)| *s > critical_value).count();
            let rate = hits as f64 / reps as f64;
            Ok(RejectionRate {
                level,
                critical_value,
                rate,
                se: (level * (1.0 - level) / reps as f64).sqrt(),
            })
        })
        .collect()
}

/// Permutation p-value for the largest squared canonical correlation:
/// rows of `y` are shuffled against `x`, and the p-value is
/// `(1 + #{r²_perm >= r²_obs}) / (perms + 1)`.
pub fn permutation_pvalue(x: &DataMatrix, y: &DataMatrix, perms: usize, seed: u64, workers: usize) -> Result<f64> {
    let observed = mv_tests::cca(x, y)?[0];
    let n = y.nrows();
    let hits = replicate(perms, seed, workers, |rng| {
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let shuffled = DMatrix::from_fn(n, y.ncols(), |i, j| y.values()[(order[i], j)]);
        Ok(mv_tests::cca(x, &DataMatrix::new(shuffled)?)?[0] >= observed)
    })?;
    Ok((1 + hits.iter().filter(|&&h| h).count()) as f64 / (perms + 1) as f64)
}
