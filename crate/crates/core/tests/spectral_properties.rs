use std::f64::consts::PI;

use mhdnudge::spectral::{advect, random_divfree_field, Grid, SpectralScalar, SpectralVectorField};
use proptest::prelude::*;

fn grid() -> impl Strategy<Value = Grid> {
    prop_oneof![Just(16usize), Just(24), Just(32)].prop_map(|n| Grid::new(n).unwrap())
}

fn scalar_samples(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n * n)
}

/// Physical field with both divergence-free and gradient parts.
fn mixed_field(g: &Grid, seed: u64) -> SpectralVectorField {
    let a = random_divfree_field(g, seed, 1.0, 4).unwrap();
    let phi = SpectralScalar::from_fn(g, |x, y| {
        (2.0 * PI * (x + 2.0 * y)).sin() + 0.3 * (2.0 * PI * 3.0 * x).cos()
    });
    let grad = mhdnudge::spectral::gradient(&phi);
    SpectralVectorField::new(a.x().add(grad.x()).unwrap(), a.y().add(grad.y()).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval_matches_grid_mean_square((g, samples) in grid().prop_flat_map(|g| {
        let n = g.n();
        (Just(g), scalar_samples(n))
    })) {
        let (s, mean) = SpectralScalar::from_physical(&g, &samples).unwrap();
        let physical: f64 = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / samples.len() as f64;
        prop_assert!((s.l2_norm_sq() - physical).abs() <= 1e-12 * physical.max(1.0));
    }

    #[test]
    fn leray_projection_is_idempotent(g in grid(), seed in any::<u64>()) {
        let u = mixed_field(&g, seed);
        let p = u.leray_project();
        let pp = p.leray_project();
        prop_assert!(pp.sub(&p).unwrap().l2_norm() <= 1e-14 * p.l2_norm().max(1.0));
        prop_assert!(p.divergence().l2_norm() <= 1e-12);
    }

    #[test]
    fn leray_projection_is_self_adjoint(g in grid(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let u = mixed_field(&g, s1);
        let v = mixed_field(&g, s2);
        let a = u.leray_project().inner_product(&v).unwrap();
        let b = u.inner_product(&v.leray_project()).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn poincare_inequality(g in grid(), seed in any::<u64>(), decay in 0.0f64..3.0) {
        let kmax = g.dealias_cutoff();
        let u = random_divfree_field(&g, seed, decay, kmax).unwrap();
        prop_assert!(u.h1_seminorm() >= 2.0 * PI * u.l2_norm() * (1.0 - 1e-12));
    }

    #[test]
    fn advection_is_skew_symmetric(seed_u in any::<u64>(), seed_v in any::<u64>()) {
        let g = Grid::new(32).unwrap();
        let u = random_divfree_field(&g, seed_u, 1.0, 4).unwrap();
        let v = random_divfree_field(&g, seed_v, 1.0, 4).unwrap();
        let b = advect(&u, &v).unwrap().inner_product(&v).unwrap();
        prop_assert!(b.abs() <= 1e-12, "{}", b);
    }

    #[test]
    fn physical_round_trip_is_exact_for_mean_zero_fields(g in grid(), seed in any::<u64>()) {
        let u = random_divfree_field(&g, seed, 1.0, 3).unwrap();
        let [x, _] = u.to_physical();
        let (back, mean) = SpectralScalar::from_physical(&g, &x).unwrap();
        prop_assert!(mean.abs() <= 1e-14);
        prop_assert!(back.sub(u.x()).unwrap().l2_norm() <= 1e-14);
    }
}
