//! Invariants of the approximation, the parameter conventions and the
//! canonical correlations.

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use roytw::mv_tests::canonical_correlations;
use roytw::{
    pvalue_tw, quantile_approx, smallest_root_pvalue, tw_cdf, tw_constants, tw_quantile, DataMatrix,
    GreatestRootParams, TwOrder,
};

/// Triples with integer p and half-integer m, n, inside the domain of the
/// approximation.
fn half_integer_triple() -> impl Strategy<Value = GreatestRootParams> {
    (1u32..40, 0u32..400, 2u32..200).prop_filter_map("outside domain", |(p, extra, n2)| {
        let p = f64::from(p);
        let g = GreatestRootParams::new(p, p + f64::from(extra) / 2.0, f64::from(n2) / 2.0).ok()?;
        tw_constants(&g).ok().map(|_| g)
    })
}

fn real_triple() -> impl Strategy<Value = GreatestRootParams> {
    (1.0f64..50.0, 0.0f64..300.0, 1.0f64..150.0).prop_filter_map("outside domain", |(p, extra, n)| {
        let g = GreatestRootParams::new(p, p + extra, n).ok()?;
        tw_constants(&g).ok().map(|_| g)
    })
}

fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

proptest! {
    #[test]
    fn scale_satisfies_cubic_identity(g in real_triple()) {
        let c = tw_constants(&g).unwrap();
        let lhs = c.sigma.powi(3) * c.big_n.powi(2) * (c.phi + c.gamma).sin().powi(2) * c.phi.sin() * c.gamma.sin();
        prop_assert!((lhs / 16.0 - 1.0).abs() < 1e-10, "{lhs}");
    }

    #[test]
    fn conventions_round_trip(g in half_integer_triple()) {
        let t = g.to_table();
        prop_assert_eq!(GreatestRootParams::from_table(t), g.normalized());
        prop_assert_eq!(GreatestRootParams::from_sas(g.to_sas()), g);
        let (nu1, nu2) = g.f_bound_df();
        prop_assert_eq!((nu1, nu2), (t.s + 2.0 * t.m + 1.0, t.s + 2.0 * t.n + 1.0));
    }

    #[test]
    fn duality_is_exact(g in half_integer_triple(), alpha in 0.01f64..0.99, theta in 0.01f64..0.99) {
        let d = g.dual().unwrap();
        prop_assert_eq!(tw_constants(&g).unwrap(), tw_constants(&d).unwrap());
        prop_assert_eq!(
            quantile_approx(&g, alpha).unwrap().to_bits(),
            quantile_approx(&d, alpha).unwrap().to_bits()
        );
        prop_assert_eq!(pvalue_tw(theta, &g).ok(), pvalue_tw(theta, &d).ok());
    }

    #[test]
    fn quantile_inverts_pvalue(g in real_triple(), k in 0usize..4) {
        let alpha = [0.1, 0.05, 0.01, 1e-4][k];
        let theta = quantile_approx(&g, 1.0 - alpha).unwrap();
        prop_assume!(theta < 1.0);
        let p = pvalue_tw(theta, &g).unwrap().value;
        prop_assert!((p - alpha).abs() < 1e-6 * alpha.max(1e-2), "{p} vs {alpha}");
    }

    #[test]
    fn quantile_is_monotone(g in real_triple(), a in 0.001f64..0.999, b in 0.001f64..0.999) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (qlo, qhi) = (quantile_approx(&g, lo).unwrap(), quantile_approx(&g, hi).unwrap());
        prop_assert!(0.0 < qlo && qlo <= qhi && qhi <= 1.0);
    }

    #[test]
    fn pvalue_is_monotone(g in real_triple(), a in 0.001f64..0.999, b in 0.001f64..0.999) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (plo, phi) = (pvalue_tw(lo, &g), pvalue_tw(hi, &g));
        if let (Ok(plo), Ok(phi)) = (plo, phi) {
            prop_assert!(plo.value >= phi.value && plo.ln >= phi.ln);
        }
    }

    #[test]
    fn tw_quantile_round_trips(e in -10.0f64..-0.3, order in prop_oneof![Just(TwOrder::One), Just(TwOrder::Two)]) {
        let alpha = 10f64.powf(e);
        let x = tw_quantile(alpha, order).unwrap();
        let back = tw_cdf(x, order).unwrap();
        prop_assert!((back / alpha - 1.0).abs() < 1e-8, "{alpha} -> {x} -> {back}");
        let upper = 1.0 - alpha;
        let x = tw_quantile(upper, order).unwrap();
        prop_assert!((tw_cdf(x, order).unwrap() - upper).abs() < 1e-12);
    }

    #[test]
    fn smallest_root_reflects_largest(g in half_integer_triple(), x in 0.01f64..0.99) {
        prop_assume!(g.n() >= g.p());
        let swapped = GreatestRootParams::new(g.p(), g.n(), g.m()).unwrap();
        prop_assert_eq!(smallest_root_pvalue(x, &g).ok(), pvalue_tw(1.0 - x, &swapped).ok());
    }

    #[test]
    fn canonical_correlations_interlace(seed in any::<u64>(), s in 1usize..3, p in 1usize..5, q in 3usize..7) {
        prop_assume!(s < p.min(q));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = p + q + 5;
        let x = gaussian(n, q, &mut rng);
        let y = DataMatrix::new(gaussian(n, p, &mut rng)).unwrap();
        let full = canonical_correlations(&DataMatrix::new(x.clone()).unwrap(), &y).unwrap();
        let reduced = canonical_correlations(&DataMatrix::new(x.columns(0, q - s).into_owned()).unwrap(), &y).unwrap();
        prop_assert!(full[s] <= reduced[0] + 1e-12, "{full:?} vs {reduced:?}");
        prop_assert!(full.iter().all(|r| (0.0..=1.0).contains(r)));
        prop_assert!(full.windows(2).all(|w| w[0] >= w[1]));
    }
}
