//! Property tests of the invariants the numerics must respect.

use hypmt_core::functionals::{self, elementary_gap};
use hypmt_core::geometry::{self, make_context};
use hypmt_core::profiles::{self, ProfileDocument, RadialProfile};
use hypmt_core::verify;
use proptest::prelude::*;

/// Monotone profiles: sorted positive knots, sorted decreasing values, last 0.
fn profile_strategy() -> impl Strategy<Value = RadialProfile> {
    (1usize..12, 0.01f64..50.0, any::<u64>())
        .prop_map(|(m, support, seed)| profiles::random_profile(seed, m + 1, support, 1.0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_inverse_round_trip(n in 2u32..7, t in 1e-4f64..8.0) {
        let ctx = make_context(n).unwrap();
        let s = geometry::phi(&ctx, t).unwrap();
        let back = geometry::phi_inv(&ctx, s).unwrap();
        prop_assert!((back - t).abs() <= 1e-9 * t.max(1.0));
    }

    #[test]
    fn strong_comparison_holds(n in 2u32..5, v in profile_strategy()) {
        let ctx = make_context(n).unwrap();
        let weak = verify::check_comparison(&ctx, &v, false).unwrap();
        let strong = verify::check_comparison(&ctx, &v, true).unwrap();
        prop_assert!(strong.pass, "{strong:?}");
        // strong passing implies weak passing
        prop_assert!(weak.pass);
        prop_assert!(weak.slack >= strong.slack - strong.tolerance);
    }

    #[test]
    fn hardy_holds(n in 2u32..5, v in profile_strategy()) {
        let ctx = make_context(n).unwrap();
        prop_assert!(verify::check_hardy(&ctx, &v, Default::default()).unwrap().pass);
    }

    #[test]
    fn report_fields_are_non_negative(n in 2u32..5, v in profile_strategy()) {
        let ctx = make_context(n).unwrap();
        let r = functionals::energy_report(&ctx, &v).unwrap();
        prop_assert!(r.hyperbolic_energy >= 0.0);
        prop_assert!(r.euclidean_energy >= 0.0);
        prop_assert!(r.ln_norm >= 0.0);
        prop_assert!(r.extra_term >= 0.0);
        prop_assert!(r.quad_error_estimate >= 0.0);
    }

    #[test]
    fn energies_are_homogeneous(n in 2u32..5, v in profile_strategy(), c in 0.1f64..10.0) {
        let ctx = make_context(n).unwrap();
        let cv = v.scaled(c).unwrap();
        let k = c.powi(n as i32);
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-11 * a.abs().max(b.abs()).max(1e-300);
        prop_assert!(rel(functionals::euclidean_energy(&ctx, &cv), k * functionals::euclidean_energy(&ctx, &v)));
        prop_assert!(rel(functionals::extra_term(&ctx, &cv), k * functionals::extra_term(&ctx, &v)));
        prop_assert!(rel(
            functionals::hyperbolic_energy(&ctx, &cv).unwrap().value,
            k * functionals::hyperbolic_energy(&ctx, &v).unwrap().value
        ));
    }

    #[test]
    fn elementary_gap_is_non_negative(n in 2u32..9, b in 0.0f64..100.0, frac in 0.0f64..1.0) {
        let a = -100.0 + frac * (b + 100.0);
        let scale = a.abs().max(b).powi(n as i32);
        prop_assert!(elementary_gap(n, a, b) >= -1e-12 * scale);
    }

    #[test]
    fn realizations_are_equimeasurable(n in 2u32..5, v in profile_strategy(), frac in 0.01f64..0.99) {
        let ctx = make_context(n).unwrap();
        let level = frac * v.peak();
        let mu = profiles::distribution_function(&v, level).unwrap();
        let e = profiles::euclidean_realization(&ctx, &v);
        let r = e.superlevel_radius(&ctx, level);
        let vol = ctx.sigma() * r.powi(n as i32);
        prop_assert!((vol - mu).abs() <= 1e-9 * mu.max(1e-12), "{vol} vs {mu}");
    }

    #[test]
    fn lemma_f_non_negative(n in 3u32..9, t in 1e-6f64..20.0) {
        let ctx = make_context(n).unwrap();
        let v = verify::lemma_values(&ctx, t).unwrap();
        prop_assert!(v.f_hat >= 0.0, "n={n} t={t}: {}", v.f_hat);
        prop_assert!(v.g_hat.unwrap() > 0.0 && v.h_hat.unwrap() > 0.0);
    }

    #[test]
    fn profile_documents_round_trip(n in 2u32..6, v in profile_strategy()) {
        let doc = ProfileDocument::new(n, &v);
        let back = ProfileDocument::from_json(&doc.to_json()).unwrap();
        prop_assert_eq!(back, doc);
    }
}
