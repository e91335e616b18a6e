//! Monte Carlo checks of global quantities on compact quotients.

use hermitian_curvature::catalog;
use hermitian_curvature::identities::analyze;
use hermitian_curvature::integrate::{
    check_identity, hopf_integrate, integrate, volume_oracle, Details, Identity,
};
use hermitian_curvature::Error;
use std::f64::consts::{LN_2, PI};

#[test]
fn hopf_volume_two_seeds_agree() {
    let spec = catalog::hopf(2).unwrap();
    let a = hopf_integrate(&spec, |_, _| Ok(1.0), 200_000, 1).unwrap();
    let b = hopf_integrate(&spec, |_, _| Ok(1.0), 200_000, 2).unwrap();
    let joint = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    assert!((a.value - b.value).abs() < 6.0 * joint);
    let oracle = 128.0 * PI * PI * LN_2;
    assert!((a.value - oracle).abs() < 3.0 * a.stderr);
}

#[test]
fn hopf_family_volume_oracle() {
    // det h̃ = 4ⁿ(1+λ)^{n−1}/r^{2n}.
    for (n, lambda) in [(2, 1.0), (3, -0.5)] {
        let spec = catalog::hopf_family(n, lambda).unwrap();
        let v = integrate(&spec, |_, _| Ok(1.0), 200_000, 3).unwrap();
        let oracle = volume_oracle(&spec).unwrap();
        assert!((v.value - oracle).abs() < 4.0 * v.stderr, "{} vs {oracle}", v.value);
    }
}

#[test]
fn chern_scalar_integral_is_half_the_volume() {
    // s_C = n(n−1)/4 = 1/2 for n = 2, so ∫s_C = 64π² ln 2.
    let spec = catalog::hopf(2).unwrap();
    let v = hopf_integrate(&spec, |s, z| Ok(analyze(s, z)?.scalars.s_c), 20_000, 4).unwrap();
    let vol = hopf_integrate(&spec, |_, _| Ok(1.0), 20_000, 4).unwrap();
    assert!((v.value - 0.5 * vol.value).abs() < 1e-9 * vol.value);
    assert!((v.value - 64.0 * PI * PI * LN_2).abs() < 3.0 * v.stderr);
}

#[test]
fn hopf_family_ddbar_identity() {
    let spec = catalog::hopf_family(3, 1.0).unwrap();
    let r = check_identity(&spec, Identity::DdbarOmega, 100_000, 5, 0.02).unwrap();
    assert!(r.pass && r.residual < 0.02, "{r:?}");
    assert!(r.lhs < 0.0, "non-Gauduchon Hopf metrics have ∫ i∂∂̄ω∧ω < 0");
}

#[test]
fn torsion_wedge_matches_norms() {
    for id in ["hopf:n=3", "hopf-family:n=4,lambda=0.3"] {
        let spec = catalog::parse(id).unwrap();
        let r = check_identity(&spec, Identity::TorsionWedge, 50_000, 6, 0.02).unwrap();
        assert!(r.pass, "{id}: {r:?}");
    }
}

#[test]
fn k_gauduchon_in_dimension_four() {
    let spec = catalog::hopf(4).unwrap();
    for k in 1..=3 {
        let r = check_identity(&spec, Identity::KGauduchon { k }, 20_000, 7, 0.02).unwrap();
        assert!(r.pass, "k={k}: {r:?}");
        let Some(Details::KGauduchon(d)) = r.details else { panic!() };
        assert_eq!(d.coefficient, (k * (3 - k)) as f64);
    }
}

#[test]
fn flat_torus_sides_vanish() {
    let spec = catalog::flat(3).unwrap();
    for id in [Identity::DdbarOmega, Identity::TorsionWedge, Identity::KGauduchon { k: 1 }] {
        let r = check_identity(&spec, id, 1000, 8, 0.02).unwrap();
        assert!(r.pass && r.lhs == 0.0 && r.rhs == 0.0, "{r:?}");
    }
}

#[test]
fn balanced_diagnostic_on_hopf_three() {
    // Not balanced. The integrated relation ∫s = 2∫s_C − ½∫|T|² still holds,
    // since ∫ tr_ω ½(∂∂* + ∂̄∂̄*)ω = ‖∂*ω‖² on any compact quotient.
    let spec = catalog::hopf(3).unwrap();
    let r = check_identity(&spec, Identity::BalancedDiagnostic, 20_000, 9, 0.02).unwrap();
    let Some(Details::Balanced(d)) = r.details else { panic!() };
    assert!(r.pass && !d.balanced && !d.kahler);
    assert!(d.gauduchon.holds);
}

#[test]
fn product_with_torus_has_a_domain() {
    let spec = catalog::parse("hopf:n=2*flat:n=1").unwrap();
    let v = integrate(&spec, |_, _| Ok(1.0), 50_000, 10).unwrap();
    let oracle = volume_oracle(&catalog::hopf(2).unwrap()).unwrap() * 2.0;
    assert!((v.value - oracle).abs() < 4.0 * v.stderr);
}

#[test]
fn domain_errors() {
    let spec = catalog::fubini_study(2).unwrap();
    assert!(matches!(integrate(&spec, |_, _| Ok(1.0), 10, 0), Err(Error::NoCompactDomain(_))));
    assert!(check_identity(&catalog::hopf(2).unwrap(), Identity::TorsionWedge, 10, 0, 0.02).is_err());
    assert!(check_identity(&catalog::random_hermitian(2, 0).unwrap(), Identity::Volume, 10, 0, 0.02).is_err());
}
