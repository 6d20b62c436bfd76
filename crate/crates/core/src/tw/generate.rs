//! Regenerates the embedded Tracy-Widom table.
//!
//! The Hastings-McLeod solution of Painlevé II, `q'' = s q + 2 q^3` with
//! `q(s) ~ Ai(s)` as `s -> +inf`, is integrated from `s = 26` down to the
//! left edge of the table with a Taylor-series method in double-double
//! arithmetic. Alongside `q` the integrator accumulates
//!
//! ```text
//! w(s) = ∫_s^∞ q(x) dx,   u(s) = ∫_s^∞ q(x)^2 dx,   v(s) = ∫_s^∞ x q(x)^2 dx
//! ```
//!
//! from which `ln F2(s) = -(v - s u)` and `ln F1(s) = (ln F2(s) - w) / 2`.
//!
//! Backward integration is stable for `s > 0` (errors along the Bi direction
//! decay), but the separatrix amplifies perturbations by roughly
//! `exp(0.94 |s|^{3/2})` on the negative axis, about 1e17 at `s = -12`. The
//! double-double carrier (~32 digits) keeps the table accurate to near
//! machine precision across the whole range.

use super::ddouble::{self, Dd};

/// Start of the backward integration. `Ai(26)^2 ~ 1e-78`, so replacing `q`
/// by `Ai` there is exact at double-double precision and the integrals
/// beyond it are negligible.
pub const START: f64 = 26.0;
/// Left edge of the table.
pub const GRID_LO: f64 = -12.0;
/// Right edge of the table.
pub const GRID_HI: f64 = 16.0;
/// Table spacing (exact in binary).
pub const GRID_STEP: f64 = 1.0 / 32.0;

const TAYLOR_ORDER: usize = 28;

/// One row of the table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub s: f64,
    pub q: f64,
    pub dq: f64,
    pub u: f64,
    pub log_f1: f64,
    pub log_sf1: f64,
    pub log_f2: f64,
    pub log_sf2: f64,
}

fn dd(x: f64) -> Dd {
    Dd::new(x)
}

/// `(Ai(x), Ai'(x))` for large positive `x` from the asymptotic series.
fn airy_large(x: f64) -> (Dd, Dd) {
    let xd = dd(x);
    let sqrt_x = xd.sqrt();
    let quarter = sqrt_x.sqrt();
    let zeta = (xd * sqrt_x).mul_f64(2.0).div_f64(3.0);
    let prefactor = (-zeta).exp() / ddouble::PI.sqrt().mul_f64(2.0);

    let mut u_k = dd(1.0);
    let mut zeta_pow = dd(1.0);
    let mut sum_ai = dd(1.0);
    let mut sum_aip = dd(1.0);
    for k in 1..60 {
        let kf = k as f64;
        u_k = u_k
            .mul_f64((6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0))
            .div_f64((2.0 * kf - 1.0) * 216.0 * kf);
        zeta_pow = zeta_pow * zeta;
        let term = u_k / zeta_pow;
        let v_term = -term.mul_f64(6.0 * kf + 1.0).div_f64(6.0 * kf - 1.0);
        if k % 2 == 1 {
            sum_ai = sum_ai - term;
            sum_aip = sum_aip - v_term;
        } else {
            sum_ai += term;
            sum_aip += v_term;
        }
        if term.hi.abs() < 1e-36 {
            break;
        }
    }
    (prefactor * sum_ai / quarter, -(prefactor * quarter * sum_aip))
}

/// Integration state at one abscissa.
#[derive(Clone, Copy)]
struct State {
    s: Dd,
    q: Dd,
    dq: Dd,
    w: Dd,
    u: Dd,
    v: Dd,
}

/// Advance by `h` (negative) with a Taylor polynomial of fixed order.
fn taylor_step(st: &State, h: f64) -> State {
    let n = TAYLOR_ORDER;
    let mut a = vec![dd(0.0); n + 1];
    let mut sq = vec![dd(0.0); n + 1];
    let mut cube = vec![dd(0.0); n + 1];
    a[0] = st.q;
    a[1] = st.dq;
    for k in 0..=n {
        let mut acc = dd(0.0);
        for i in 0..=k {
            acc += a[i] * a[k - i];
        }
        sq[k] = acc;
        let mut acc = dd(0.0);
        for i in 0..=k {
            acc += sq[i] * a[k - i];
        }
        cube[k] = acc;
        if k + 2 <= n {
            let prev = if k >= 1 { a[k - 1] } else { dd(0.0) };
            a[k + 2] = (st.s * a[k] + prev + cube[k].mul_f64(2.0)).div_f64(((k + 1) * (k + 2)) as f64);
        }
    }

    let hd = dd(h);
    let mut q = dd(0.0);
    let mut dq = dd(0.0);
    let mut int_q = dd(0.0);
    let mut int_q2 = dd(0.0);
    let mut int_xq2 = dd(0.0);
    let mut hp = dd(1.0);
    for k in 0..=n {
        // hp = h^k
        let hk1 = (hp * hd).div_f64((k + 1) as f64);
        q += a[k] * hp;
        if k < n {
            dq += (a[k + 1] * hp).mul_f64((k + 1) as f64);
        }
        int_q += a[k] * hk1;
        int_q2 += sq[k] * hk1;
        let xq2 = st.s * sq[k] + if k >= 1 { sq[k - 1] } else { dd(0.0) };
        int_xq2 += xq2 * hk1;
        hp = hp * hd;
    }
    // the h^(n+1) coefficient of x q^2
    int_xq2 += (sq[n] * hp * hd).div_f64((n + 2) as f64);

    State {
        s: st.s + hd,
        q,
        dq,
        // integrals over [s + h, s] with h < 0 are -∫_s^{s+h}
        w: st.w - int_q,
        u: st.u - int_q2,
        v: st.v - int_xq2,
    }
}

fn row_from_state(st: &State) -> GridRow {
    let log_f2_dd = -(st.v - st.s * st.u);
    let log_f1_dd = (log_f2_dd - st.w).mul_f64(0.5);
    let log_f1 = Dd::to_f64(log_f1_dd);
    let log_f2 = Dd::to_f64(log_f2_dd);
    GridRow {
        s: Dd::to_f64(st.s),
        q: Dd::to_f64(st.q),
        dq: Dd::to_f64(st.dq),
        u: Dd::to_f64(st.u),
        log_f1,
        log_sf1: (-log_f1.exp_m1()).ln(),
        log_f2,
        log_sf2: (-log_f2.exp_m1()).ln(),
    }
}

/// Integrates the Hastings-McLeod solution and returns the table rows in
/// increasing `s` on `[GRID_LO, GRID_HI]`.
pub fn generate() -> Vec<GridRow> {
    generate_with_step(GRID_STEP, 1)
}

/// `substeps` Taylor steps per table spacing; used to confirm step-size
/// convergence.
pub fn generate_with_step(step: f64, substeps: usize) -> Vec<GridRow> {
    let start = START;
    let (ai, aip) = airy_large(start);
    let mut st = State {
        s: dd(start),
        q: ai,
        dq: aip,
        w: dd(0.0),
        u: dd(0.0),
        v: dd(0.0),
    };
    let h = -step / substeps as f64;
    let n_total = ((start - GRID_LO) / step).round() as usize;
    let n_skip = ((start - GRID_HI) / step).round() as usize;
    let mut rows = Vec::with_capacity(n_total - n_skip + 1);
    for i in 0..=n_total {
        if i >= n_skip {
            rows.push(row_from_state(&st));
        }
        if i < n_total {
            for _ in 0..substeps {
                st = taylor_step(&st, h);
            }
        }
    }
    rows.reverse();
    rows
}

/// Serializes rows in the embedded text format.
pub fn render(rows: &[GridRow]) -> String {
    let mut out = String::new();
    out.push_str("# roytw tracy-widom table, format 1\n");
    out.push_str(&format!(
        "# hastings-mcleod painleve ii, double-double taylor (order {TAYLOR_ORDER}) from s = {START}\n"
    ));
    out.push_str(&format!("# range [{GRID_LO}, {GRID_HI}], step {GRID_STEP}\n"));
    out.push_str("# s q dq u log_f1 log_sf1 log_f2 log_sf2\n");
    for r in rows {
        out.push_str(&format!(
            "{:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e} {:.17e}\n",
            r.s, r.q, r.dq, r.u, r.log_f1, r.log_sf1, r.log_f2, r.log_sf2
        ));
    }
    out
}
