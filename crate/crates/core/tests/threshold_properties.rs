use mhdnudge::diagnostics::{theorem_thresholds, AnalysisConstants, TheoremId};
use mhdnudge::mhd::derive_elsasser_params;
use mhdnudge::observation::InterpolantConstants;
use proptest::prelude::*;

fn theorem() -> impl Strategy<Value = TheoremId> {
    prop::sample::select(TheoremId::ALL.to_vec())
}

fn constants_for(id: TheoremId) -> InterpolantConstants {
    if id.type_class() == 2 {
        InterpolantConstants::Type2 { c2: 0.3, c3: 0.01 }
    } else {
        InterpolantConstants::Type1 { c1: 0.2 }
    }
}

proptest! {
    #[test]
    fn mu_min_grows_with_grashof(
        id in theorem(),
        re in 0.5f64..20.0,
        rm in 0.5f64..20.0,
        g in 0.01f64..3.0,
        dg in 0.01f64..3.0,
    ) {
        let p = derive_elsasser_params(re, rm).unwrap();
        let k = AnalysisConstants::default();
        let c = Some(constants_for(id));
        let lo = theorem_thresholds(id, g, &p, &k, c, 0.1).unwrap();
        let hi = theorem_thresholds(id, g + dg, &p, &k, c, 0.1).unwrap();
        prop_assert!(hi.mu_min >= lo.mu_min, "{:?}: {} < {}", id, hi.mu_min, lo.mu_min);
        prop_assert!(lo.mu_min >= 0.0);
    }

    #[test]
    fn h_max_shrinks_with_gain(id in theorem(), mu in 0.1f64..1e4, factor in 1.0f64..100.0) {
        let p = derive_elsasser_params(5.0, 5.0).unwrap();
        let t = theorem_thresholds(id, 1.0, &p, &AnalysisConstants::default(), Some(constants_for(id)), 0.0).unwrap();
        prop_assert!(t.h_max_at(mu * factor) <= t.h_max_at(mu));
        let ratio = t.h_max_at(mu) / t.h_max_at(mu * factor);
        prop_assert!((ratio - factor.sqrt()).abs() <= 1e-9 * factor.sqrt());
    }

    #[test]
    fn full_observation_gain_is_quadratic_in_grashof(g in 0.01f64..100.0, s in 0.1f64..10.0) {
        let p = derive_elsasser_params(3.0, 7.0).unwrap();
        let k = AnalysisConstants::default();
        let c = Some(InterpolantConstants::Type1 { c1: 0.2 });
        let a = theorem_thresholds(TheoremId::ThmAll, g, &p, &k, c, 0.0).unwrap().mu_min;
        let b = theorem_thresholds(TheoremId::ThmAll, g * s, &p, &k, c, 0.0).unwrap().mu_min;
        prop_assert!((b / a - s * s).abs() <= 1e-10 * s * s);
    }

    #[test]
    fn margin_scales_chosen_gain(id in theorem(), margin in 0.0f64..2.0, g in 0.1f64..2.0) {
        let p = derive_elsasser_params(5.0, 5.0).unwrap();
        let t = theorem_thresholds(id, g, &p, &AnalysisConstants::default(), Some(constants_for(id)), margin).unwrap();
        if t.mu_min.is_finite() {
            prop_assert!((t.mu_chosen - t.mu_min * (1.0 + margin)).abs() <= 1e-12 * t.mu_chosen.max(1.0));
        }
    }
}
