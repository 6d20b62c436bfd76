//! Greatest-root approximation against pinned constants (computed to 50
//! digits by `oracles/constants.py`), an independent F/Beta implementation
//! and the worked examples.

#![allow(clippy::excessive_precision)]

use roytw::greatest_root::{
    beta_exact_pvalue, beta_exact_quantile, critical_value, smallest_root_critical_value, PValue, DEFAULT_LEVELS,
};
use roytw::mc_oracle::sample_smallest_root;
use roytw::{
    pvalue_f_bound, pvalue_tw, quantile_approx, smallest_root_pvalue, tw_constants, Error, GreatestRootParams,
    SimConfig, TableParams, TestOutcome,
};
use statrs::distribution::{Beta, ContinuousCDF, FisherSnedecor};

fn mkb(p: f64, m: f64, n: f64) -> GreatestRootParams {
    GreatestRootParams::new(p, m, n).unwrap()
}

fn table(s: f64, m: f64, n: f64) -> GreatestRootParams {
    GreatestRootParams::from_table(TableParams::new(s, m, n).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// (p, m, n, gamma, phi, mu, sigma)
const PINNED: [(f64, f64, f64, f64, f64, f64, f64); 2] = [
    (
        4.0,
        42.0,
        5.0,
        0.558_924_169_402_507_62,
        0.636_219_318_135_752_16,
        -0.769_625_893_569_968_05,
        0.302_687_799_550_176_45,
    ),
    (
        2.0,
        7.0,
        2.0,
        0.895_664_793_857_864_97,
        0.895_664_793_857_864_97,
        0.444_685_821_261_445_68,
        0.755_295_514_462_842_12,
    ),
];

/// (p, m, n, mu, sigma)
const PINNED_MU_SIGMA: [(f64, f64, f64, f64, f64); 3] = [
    (2.0, 22.0, 2.0, -1.131_652_142_746_309_9, 0.551_963_857_533_407_44),
    (4.0, 132.0, 5.0, -2.052_840_498_436_553_5, 0.266_528_113_615_177_85),
    (4.0, 133.0, 4.0, -2.193_984_833_681_808_7, 0.288_037_782_490_551_33),
];

#[test]
fn constants_match_high_precision_evaluation() {
    for (p, m, n, gamma, phi, mu, sigma) in PINNED {
        let c = tw_constants(&mkb(p, m, n)).unwrap();
        assert!(rel(c.gamma, gamma) < 1e-13, "gamma {p} {m} {n}");
        assert!(rel(c.phi, phi) < 1e-13, "phi {p} {m} {n}");
        assert!(rel(c.mu, mu) < 1e-13, "mu {p} {m} {n}");
        assert!(rel(c.sigma, sigma) < 1e-13, "sigma {p} {m} {n}");
        assert_eq!(c.big_n, m + n - 1.0);
    }
    for (p, m, n, mu, sigma) in PINNED_MU_SIGMA {
        let c = tw_constants(&mkb(p, m, n)).unwrap();
        assert!(rel(c.mu, mu) < 1e-13 && rel(c.sigma, sigma) < 1e-13, "{p} {m} {n}");
    }
}

#[test]
fn rootstock_example() {
    let g = table(4.0, 0.0, 18.5);
    assert_eq!(g, mkb(4.0, 42.0, 5.0));
    assert!((quantile_approx(&g, 0.95).unwrap() - 0.384).abs() < 1e-3);
    let p_tw = pvalue_tw(0.652, &g).unwrap();
    assert!(rel(p_tw.value, 5.6e-5) < 0.05, "p_TW {}", p_tw.value);
    // the F bound with (5, 42) degrees of freedom, checked independently
    let p_f = pvalue_f_bound(0.652, &g).unwrap();
    let f = FisherSnedecor::new(5.0, 42.0).unwrap();
    let independent = f.sf(42.0 * 0.652 / (5.0 * 0.348));
    assert!(rel(p_f.value, independent) < 1e-10);
    assert!(p_f.value < p_tw.value);
}

#[test]
fn f_bound_matches_independent_f_distribution() {
    for (s, m, n) in [(2.0, -0.5, 2.0), (6.0, -0.5, 10.0), (2.0, 5.0, 10.0), (4.0, 0.0, 18.5)] {
        let g = table(s, m, n);
        let (nu1, nu2) = g.f_bound_df();
        let f = FisherSnedecor::new(nu1, nu2).unwrap();
        for theta in [0.2, 0.5, 0.7, 0.9] {
            let x = nu2 * theta / (nu1 * (1.0 - theta));
            let want = f.sf(x);
            let got = pvalue_f_bound(theta, &g).unwrap();
            assert!(
                rel(got.value, want) < 1e-9,
                "({s},{m},{n}) theta={theta}: {} vs {want}",
                got.value
            );
            assert!((got.ln - want.ln()).abs() < 1e-9 * want.ln().abs().max(1.0));
        }
    }
}

#[test]
fn f_bound_deep_tail_has_closed_form() {
    // nu1 = 2: P(F > x) = (1 + 2x/nu2)^(-nu2/2) = (1 - theta)^(nu2/2)
    let g = table(1.0, 0.0, 10.0);
    assert_eq!(g.f_bound_df(), (2.0, 22.0));
    for theta in [0.9, 0.99, 0.999, 0.999_9] {
        let exact = 11.0 * f64::ln(1.0 - theta);
        let got = pvalue_f_bound(theta, &g).unwrap();
        assert!((got.ln - exact).abs() < 1e-10 * exact.abs(), "theta {theta}");
    }
}

/// (s, m, n) and rows of (largest root, TW p-value, F p-value).
type Block = ((f64, f64, f64), [(f64, f64, f64); 8]);

#[allow(clippy::approx_constant)]
const TABLE1: [Block; 6] = [
    (
        (2.0, -0.5, 2.0),
        [
            (0.663, 0.119, 0.0223),
            (0.737, 0.066, 0.00933),
            (0.850, 0.0169, 0.00131),
            (0.881, 0.00927, 0.000573),
            (0.931, 0.00222, 8.49e-5),
            (0.968, 0.000251, 5.65e-6),
            (0.985, 2.38e-5, 3.81e-7),
            (0.993, 1.89e-6, 2.58e-8),
        ],
    ),
    (
        (6.0, -0.5, 2.0),
        [
            (0.918, 0.115, 2.23e-5),
            (0.938, 0.0598, 4.99e-6),
            (0.966, 0.0116, 1.92e-7),
            (0.973, 0.00545, 4.96e-8),
            (0.985, 0.000839, 2.3e-9),
            (0.993, 4.35e-5, 3.1e-11),
            (0.997, 1.64e-6, 4.38e-13),
            (0.999, f64::NAN, 6.33e-15),
        ],
    ),
    (
        (2.0, -0.5, 10.0),
        [
            (0.268, 0.117, 0.0278),
            (0.318, 0.0669, 0.0123),
            (0.418, 0.0214, 0.00199),
            (0.456, 0.0137, 0.000919),
            (0.533, 0.00522, 0.000157),
            (0.624, 0.00146, 1.31e-5),
            (0.696, 0.000443, 1.11e-6),
            (0.755, 0.000141, 9.59e-8),
        ],
    ),
    (
        (6.0, -0.5, 10.0),
        [
            (0.597, 0.11, 0.000206),
            (0.633, 0.0577, 6.49e-5),
            (0.698, 0.0134, 5.46e-6),
            (0.721, 0.00722, 1.99e-6),
            (0.766, 0.00172, 2.05e-7),
            (0.816, 0.000223, 8.97e-9),
            (0.854, 2.86e-5, 4.29e-10),
            (0.884, 3.57e-6, 2.17e-11),
        ],
    ),
    (
        (2.0, 5.0, 10.0),
        [
            (0.592, 0.112, 0.0234),
            (0.629, 0.0602, 0.0103),
            (0.697, 0.0149, 0.00164),
            (0.721, 0.00827, 0.000758),
            (0.767, 0.00215, 0.000129),
            (0.817, 0.000318, 1.07e-5),
            (0.855, 4.71e-5, 9.04e-7),
            (0.885, 6.88e-6, 7.79e-8),
        ],
    ),
    (
        (6.0, 5.0, 10.0),
        [
            (0.757, 0.108, 0.000117),
            (0.781, 0.0557, 3.63e-5),
            (0.823, 0.0119, 2.99e-6),
            (0.837, 0.00606, 1.08e-6),
            (0.864, 0.00125, 1.1e-7),
            (0.894, 0.000125, 4.75e-9),
            (0.917, 1.17e-5, 2.25e-10),
            (0.934, 1.03e-6, 1.13e-11),
        ],
    ),
];

/// The root printed to three decimals at which the approximation reproduces
/// the printed Tracy-Widom p-value.
fn implied_root(g: &GreatestRootParams, printed_tw: f64, near: f64) -> f64 {
    let (mut lo, mut hi) = (near - 0.01, (near + 0.01).min(1.0 - 1e-12));
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if pvalue_tw(mid, g).unwrap().value > printed_tw {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Half a unit in the third significant figure.
fn half_unit(v: f64) -> f64 {
    0.5 * 10f64.powf(v.log10().floor() - 2.0)
}

#[test]
fn table1_columns_are_mutually_consistent() {
    // The printed roots carry three decimals and the printed p-values three
    // significant figures. Each row must be reproducible by some root inside
    // the printed rounding interval, and the F bound at the root implied by
    // the TW column must match the printed F column.
    for ((s, m, n), rows) in TABLE1 {
        let g = table(s, m, n);
        for (theta, tw, f) in rows {
            if tw.is_nan() {
                continue;
            }
            let (tw_lo, tw_hi) = (tw - half_unit(tw), tw + half_unit(tw));
            let at_hi = pvalue_tw(theta + 5e-4, &g).unwrap().value;
            let at_lo = pvalue_tw(theta - 5e-4, &g).unwrap().value;
            assert!(
                at_hi <= tw_hi && at_lo >= tw_lo,
                "({s},{m},{n}) {theta}: [{at_hi}, {at_lo}] misses {tw}"
            );
            let star = implied_root(&g, tw, theta);
            let p_f = pvalue_f_bound(star, &g).unwrap().value;
            assert!(rel(p_f, f) < 0.01, "({s},{m},{n}) {theta}: F {p_f} vs {f}");
        }
    }
}

#[test]
fn table1_missing_entry_is_finite_here() {
    // The printed table has no TW value at θ = 0.999 for (6, -0.5, 2);
    // the standardized argument is about 8.1, inside our tabulated range.
    let g = table(6.0, -0.5, 2.0);
    let c = tw_constants(&g).unwrap();
    assert!((c.standardize(0.999) - 8.06).abs() < 0.05);
    let p = pvalue_tw(0.999, &g).unwrap();
    assert!(p.value > 1e-9 && p.value < 1e-8);
    // beyond the tail limit the error is typed
    assert!(matches!(pvalue_tw(1.0 - 1e-9, &g), Err(Error::TailLimit { .. })));
}

#[test]
fn worked_critical_values() {
    assert!((quantile_approx(&mkb(2.0, 22.0, 2.0), 0.95).unwrap() - 0.356).abs() < 1e-3);
    assert!((quantile_approx(&mkb(4.0, 133.0, 4.0), 0.99).unwrap() - 0.166).abs() < 1e-3);
    assert!((critical_value(&mkb(4.0, 42.0, 5.0), 0.05).unwrap() - 0.384).abs() < 1e-3);
}

#[test]
fn exact_beta_special_case() {
    let g = mkb(1.0, 10.0, 4.0);
    let median = beta_exact_quantile(&g, 0.5).unwrap();
    assert!((median - 0.264_449_983_295_659_96).abs() < 1e-12);
    let beta = Beta::new(2.0, 5.0).unwrap();
    for theta in [0.05, 0.3, 0.6, 0.95] {
        let want = beta.sf(theta);
        assert!(rel(beta_exact_pvalue(theta, &g).unwrap().value, want) < 1e-10);
    }
    for alpha in [0.1, 0.37, 0.9] {
        assert!((beta_exact_quantile(&mkb(1.0, 2.0, 2.0), alpha).unwrap() - alpha).abs() < 1e-12);
    }
}

#[test]
fn smallest_root_transform() {
    let g = mkb(2.0, 7.0, 7.0);
    let swapped = mkb(2.0, 7.0, 7.0);
    for x in [0.05, 0.2, 0.4] {
        assert_eq!(
            smallest_root_pvalue(x, &g).unwrap(),
            pvalue_tw(1.0 - x, &swapped).unwrap()
        );
    }
    let g = mkb(2.0, 7.0, 9.0);
    assert_eq!(
        smallest_root_pvalue(0.2, &g).unwrap(),
        pvalue_tw(0.8, &mkb(2.0, 9.0, 7.0)).unwrap()
    );
    let lower = smallest_root_critical_value(&mkb(2.0, 7.0, 2.0), 0.05).unwrap();
    assert_eq!(lower, 1.0 - critical_value(&mkb(2.0, 2.0, 7.0), 0.05).unwrap());
}

#[test]
fn smallest_root_against_simulation() {
    // lower 5% point of the smallest root of θ(2, 7, 7)
    let g = mkb(2.0, 7.0, 7.0);
    let emp = sample_smallest_root(&SimConfig::new(g, 100_000, 31).unwrap()).unwrap();
    let predicted = smallest_root_critical_value(&g, 0.05).unwrap();
    let simulated = emp.quantile(0.05).unwrap();
    let se = emp.quantile_se(0.05).unwrap();
    // TW relative error budget of 10% plus MC error
    assert!(
        (predicted - simulated).abs() <= 0.10 * simulated + 3.0 * se,
        "{predicted} vs {simulated}"
    );
}

#[test]
fn outcome_reports_every_view() {
    let out = TestOutcome::evaluate(0.652, vec![0.652, 0.2], table(4.0, 0.0, 18.5), &DEFAULT_LEVELS).unwrap();
    let t = out.table_view();
    assert_eq!((t.s, t.m, t.n), (4.0, 0.0, 18.5));
    let sas = out.sas_view();
    assert_eq!((sas.p, sas.q, sas.v), (4.0, 5.0, 42.0));
    assert!(matches!(out.p_tw, PValue::Estimate(p) if rel(p.value, 5.6e-5) < 0.05));
    assert!(out.p_f_bound.log10() < -7.0);
    assert_eq!(out.critical_values.len(), 3);
}
