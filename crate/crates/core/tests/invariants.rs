//! Property-based invariants over random metrics, points and parameters.

use hermitian_curvature::catalog::{self, HopfClosedForms};
use hermitian_curvature::identities::{analyze, residuals};
use hermitian_curvature::integrate::{integrate, scalar_densities};
use hermitian_curvature::jets::evaluate_jet;
use hermitian_curvature::C64;
use proptest::prelude::*;

/// A point with `|z| ≤ r`, from `2n` raw coordinates in `[−1, 1]`.
fn in_ball(raw: &[f64], r: f64) -> Vec<C64> {
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    raw.chunks(2).map(|c| C64::new(c[0], c[1]) * (r / norm)).collect()
}

/// A point on the Hopf annulus at radius `rho ∈ [1, 2]`.
fn on_shell(raw: &[f64], rho: f64) -> Vec<C64> {
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
    raw.chunks(2).map(|c| C64::new(c[0], c[1]) * (rho / norm)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn identity_suite_on_random_metrics(
        n in 1usize..=4,
        seed in 0u64..10_000,
        raw in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        let spec = catalog::random_hermitian(n, seed).unwrap();
        let z = in_ball(&raw[..2 * n], 0.45);
        let g = analyze(&spec, &z).unwrap();
        for r in residuals(&g, 1e-8).unwrap() {
            prop_assert!(r.pass, "{} = {:e}", r.name, r.value);
        }
        for (name, form) in g.ricci.named() {
            prop_assert!(form.hermitian_defect() < 1e-12, "{name} not Hermitian");
        }
    }

    #[test]
    fn conformal_metrics_satisfy_suite(
        n in 2usize..=3,
        seed in 0u64..10_000,
        raw in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let spec = catalog::conformal_random(n, seed, 0.3).unwrap();
        let z = in_ball(&raw[..2 * n], 0.45);
        let g = analyze(&spec, &z).unwrap();
        for r in residuals(&g, 1e-8).unwrap() {
            prop_assert!(r.pass, "{} = {:e}", r.name, r.value);
        }
    }

    #[test]
    fn hopf_family_scalars_are_constant(
        n in 2usize..=4,
        lambda in -0.95f64..5.0,
        rho in 1.0f64..2.0,
        raw in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        prop_assume!(raw[..2 * n].iter().map(|x| x * x).sum::<f64>() > 1e-4);
        let spec = catalog::hopf_family(n, lambda).unwrap();
        let z = on_shell(&raw[..2 * n], rho);
        let g = analyze(&spec, &z).unwrap();
        let f = HopfClosedForms { n, lambda };
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-8 * b.abs().max(1.0);
        prop_assert!(close(g.scalars.s, f.scalar()));
        prop_assert!(close(g.scalars.s_c, f.s_chern()));
        prop_assert!(close(g.scalars.s_lc, f.s_lc()));
        prop_assert!(close(g.tp.norm_sq, f.torsion_norm_sq()));
        prop_assert!(close(g.dstar_norm_sq, f.dstar_norm_sq()));
    }

    #[test]
    fn light_scalars_agree_with_full_analysis(
        seed in 0u64..10_000,
        raw in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let spec = catalog::random_hermitian(3, seed).unwrap();
        let z = in_ball(&raw, 0.45);
        let g = analyze(&spec, &z).unwrap();
        let [s, s_c, s_r, s_h, s_lc, t] = scalar_densities(&evaluate_jet(&spec, &z).unwrap()).unwrap();
        let full = [g.scalars.s, g.scalars.s_c, g.scalars.s_r, g.scalars.s_h, g.scalars.s_lc, g.tp.norm_sq];
        for (a, b) in [s, s_c, s_r, s_h, s_lc, t].iter().zip(full) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn catalog_ids_round_trip(n in 2usize..=4, lambda in -0.9f64..3.0, seed in 0u64..100) {
        for spec in [
            catalog::hopf_family(n, lambda).unwrap(),
            catalog::random_hermitian(n, seed).unwrap(),
            catalog::product(&catalog::flat(1).unwrap(), &catalog::hopf(n).unwrap()),
        ] {
            let again = catalog::parse(&spec.id()).unwrap();
            prop_assert_eq!(again.id(), spec.id());
            prop_assert_eq!(again.dim(), spec.dim());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn integration_ignores_thread_count(seed in any::<u64>(), samples in 2u64..3000) {
        let spec = catalog::hopf_family(2, 0.5).unwrap();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                integrate(&spec, |_, _| Ok(1.0), samples, seed).unwrap()
            })
        };
        let (a, b) = (run(1), run(3));
        prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
        prop_assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }
}
