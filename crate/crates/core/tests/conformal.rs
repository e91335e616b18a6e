//! Transformation of the codifferentials under `ω ↦ e^f ω`.

use hermitian_curvature::catalog::{self, QuadraticWeight, Weight};
use hermitian_curvature::connection::{dbar_star_omega, del_dbar_star_omega};
use hermitian_curvature::forms::{Herm11, PQForm};
use hermitian_curvature::identities::analyze;
use hermitian_curvature::jets::{evaluate_jet, CMatrix, MetricSpec};
use hermitian_curvature::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

struct Case {
    n: usize,
    base: MetricSpec,
    conf: MetricSpec,
    weight: Arc<QuadraticWeight>,
    z: Vec<C64>,
}

fn cases() -> Vec<Case> {
    (0..6u64)
        .map(|k| {
            let n = 2 + (k % 3) as usize;
            let base = catalog::random_hermitian(n, 300 + k).unwrap();
            let weight = Arc::new(QuadraticWeight::random(n, 400 + k, 0.5));
            let conf = catalog::conformal(&base, weight.clone());
            let mut rng = ChaCha8Rng::seed_from_u64(500 + k);
            let z = base.model().sample_region().sample(&mut rng);
            Case { n, base, conf, weight, z }
        })
        .collect()
}

#[test]
fn dbar_star_picks_up_gradient_term() {
    for c in cases() {
        let lhs = dbar_star_omega(&evaluate_jet(&c.conf, &c.z).unwrap()).unwrap();
        let mut rhs = dbar_star_omega(&evaluate_jet(&c.base, &c.z).unwrap()).unwrap();
        let d = c.weight.jet(&c.z).d;
        let mut df = PQForm::zero(c.n, 1, 0).unwrap();
        for p in 0..c.n {
            df.set(&[p], &[], C64::new(0.0, (c.n - 1) as f64) * d[p]);
        }
        rhs.add_assign(&df);
        assert!(lhs.max_abs_diff(&rhs) < 1e-10, "{:e}", lhs.max_abs_diff(&rhs));
    }
}

#[test]
fn del_dbar_star_is_conformally_invariant() {
    for c in cases() {
        let a = del_dbar_star_omega(&c.conf, &c.z).unwrap();
        let b = del_dbar_star_omega(&c.base, &c.z).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10, "{:e}", a.max_abs_diff(&b));
    }
}

#[test]
fn codifferential_form_shifts_by_hessian() {
    // ∂̄∂̄*_f ω_f = ∂̄∂̄*ω − i(n−1)∂∂̄f, and the same for the conjugate term.
    for c in cases() {
        let a = analyze(&c.conf, &c.z).unwrap().codiff_half;
        let b = analyze(&c.base, &c.z).unwrap().codiff_half;
        let wj = c.weight.jet(&c.z);
        let hess = Herm11(CMatrix::from_fn(c.n, c.n, |i, j| wj.ddbar[[i, j]]));
        let expected = Herm11::combine(&[(1.0, &b), (-((c.n - 1) as f64), &hess)]);
        assert!(a.max_abs_diff(&expected) < 1e-10, "{:e}", a.max_abs_diff(&expected));
    }
}

#[test]
fn constant_weight_only_rescales() {
    let base = catalog::random_hermitian(3, 9).unwrap();
    let mut w = QuadraticWeight::zero(3);
    w.c0 = 0.7;
    let conf = catalog::conformal(&base, Arc::new(w));
    let z = vec![C64::new(0.1, 0.05), C64::new(-0.2, 0.1), C64::new(0.0, 0.15)];
    let a = analyze(&conf, &z).unwrap().scalars;
    let b = analyze(&base, &z).unwrap().scalars;
    let k = (-0.7f64).exp();
    assert!((a.s - k * b.s).abs() < 1e-10 * b.s.abs().max(1.0));
    assert!((a.s_c - k * b.s_c).abs() < 1e-10 * b.s_c.abs().max(1.0));
}
