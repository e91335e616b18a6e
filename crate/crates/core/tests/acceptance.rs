//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.
//!
//! The lines go straight to the stderr handle so they show up in the output
//! of a plain `cargo test` run.

use hermitian_curvature::catalog::{self, HopfCanonicalForms, HopfClosedForms, QuadraticWeight, Weight};
use hermitian_curvature::connection::dbar_star_omega;
use hermitian_curvature::curvature::star_ricci;
use hermitian_curvature::forms::{Herm11, PQForm};
use hermitian_curvature::identities::{analyze, apply_j_real, verify};
use hermitian_curvature::integrate::{check_identity, Details, Identity, IdentityReport};
use hermitian_curvature::jets::{evaluate_jet, JetMode, MetricSpec};
use hermitian_curvature::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{LN_2, PI};
use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn points(spec: &MetricSpec, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let region = spec.model().sample_region();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| region.sample(&mut rng)).collect()
}

fn rel_close(x: f64, expected: f64, tol: f64) -> bool {
    (x - expected).abs() <= tol * expected.abs().max(1.0)
}

/// Every catalog entry, at a few dimensions.
fn catalog_ids() -> Vec<&'static str> {
    vec![
        "flat:n=2",
        "flat:n=3",
        "fubini-study:n=2",
        "fubini-study:n=3",
        "hopf:n=2",
        "hopf:n=3",
        "hopf:n=4",
        "hopf-family:n=2,lambda=-0.5",
        "hopf-family:n=3,lambda=0.7",
        "random:n=2,seed=1",
        "random:n=3,seed=2",
        "random:n=4,seed=3",
        "conformal:n=2,seed=5",
        "conformal:n=3,seed=4",
        "hopf-conformal:n=3,eps=0.5",
        "hopf:n=2*flat:n=1",
        "fubini-study:n=1*random:n=2,seed=7",
    ]
}

fn hopf_scalar_table() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 2..=4usize {
        let nf = n as f64;
        let expected = [
            ("s_R", (nf * nf - nf) / 8.0),
            ("s_H", (nf - 1.0) / 8.0),
            ("s", (2.0 * nf - 1.0) * (nf - 1.0) / 4.0),
            ("s_LC", (nf - 1.0) / 4.0),
            ("s_C", nf * (nf - 1.0) / 4.0),
        ];
        let spec = catalog::hopf(n).map_err(|e| e.to_string())?;
        for z in points(&spec, 100, n as u64) {
            let s = analyze(&spec, &z).map_err(|e| e.to_string())?.scalars;
            for ((name, e), v) in expected.iter().zip([s.s_r, s.s_h, s.s, s.s_lc, s.s_c]) {
                let r = (v - e).abs() / e.abs();
                worst = worst.max(r);
                if r > 1e-8 {
                    return Err(format!("n={n}: {name} = {v}, expected {e}"));
                }
            }
        }
    }
    let t = start.elapsed().as_secs_f64();
    if t >= 5.0 {
        return Err(format!("took {t:.2} s"));
    }
    Ok(format!("worst relative error {worst:.1e}, {t:.2} s"))
}

fn hopf_ricci_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=4usize {
        let spec = catalog::hopf(n).map_err(|e| e.to_string())?;
        let closed = HopfCanonicalForms { n };
        for z in points(&spec, 100, 10 + n as u64) {
            let g = analyze(&spec, &z).map_err(|e| e.to_string())?;
            let r = &g.ricci;
            let pairs: [(&str, &Herm11, Herm11); 6] = [
                ("Theta1", &r.chern1, closed.chern1(&z)),
                ("Theta2", &r.chern2, closed.chern2(&z)),
                ("r1", &r.lc1, closed.lc1(&z)),
                ("r2", &r.lc2, closed.lc2(&z)),
                ("Ric_H", &r.ric_h, closed.ric_h(&z)),
                ("Ric", &r.scr_ric, closed.scr_ric(&z)),
            ];
            for (name, a, b) in pairs {
                let d = a.max_abs_diff(&b);
                worst = worst.max(d);
                if d > 1e-8 {
                    return Err(format!("n={n}: {name} differs by {d:e} at {z:?}"));
                }
            }
        }
    }
    Ok(format!("worst component error {worst:.1e}"))
}

fn ricci_flat_member() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=4usize {
        let spec = catalog::hopf_family(n, -1.0 / n as f64).map_err(|e| e.to_string())?;
        for z in points(&spec, 50, 20 + n as u64) {
            let m = analyze(&spec, &z).map_err(|e| e.to_string())?.ricci.lc1.max_abs();
            worst = worst.max(m);
            if m >= 1e-8 {
                return Err(format!("n={n}: max |r1| = {m:e}"));
            }
        }
    }
    Ok(format!("max |r1| = {worst:.1e}"))
}

fn riemannian_scalar_of_family() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=4usize {
        let nf = n as f64;
        let formula = |l: f64| nf * (nf - 1.0) / (2.0 * (1.0 + l).powi(2)) * (l - (1.0 - 2.0 * nf) / (2.0 * nf));
        let s_at = |l: f64, z: &[C64]| -> Result<f64, String> {
            let spec = catalog::hopf_family(n, l).map_err(|e| e.to_string())?;
            Ok(analyze(&spec, z).map_err(|e| e.to_string())?.scalars.s)
        };
        let zero = (1.0 - 2.0 * nf) / (2.0 * nf);
        let peak = (1.0 - nf) / nf;
        let grid = [-0.9, -0.75, -1.0 / nf, zero, 0.0, 1.0, 10.0];
        let probe = catalog::hopf(n).map_err(|e| e.to_string())?;
        for z in points(&probe, 5, 30 + n as u64) {
            for l in grid {
                let s = s_at(l, &z)?;
                let e = formula(l);
                worst = worst.max((s - e).abs() / e.abs().max(1.0));
                if !rel_close(s, e, 1e-8) {
                    return Err(format!("n={n}, λ={l}: s = {s}, predicted {e}"));
                }
            }
            let (below, at, above) = (s_at(zero - 0.01, &z)?, s_at(zero, &z)?, s_at(zero + 0.01, &z)?);
            if !(below < 0.0 && above > 0.0 && at.abs() < 1e-8) {
                return Err(format!("n={n}: no sign change at λ={zero}: {below}, {at}, {above}"));
            }
            let max = nf * nf * (nf - 1.0) / 4.0;
            let top = s_at(peak, &z)?;
            if !rel_close(top, max, 1e-8) || s_at(peak - 0.01, &z)? >= top || s_at(peak + 0.01, &z)? >= top {
                return Err(format!("n={n}: s({peak}) = {top}, expected maximum {max}"));
            }
            if grid.iter().any(|&l| formula(l) > max + 1e-12) {
                return Err(format!("n={n}: grid value above the maximum"));
            }
        }
        let (zl, ml) = (HopfClosedForms::zero_scalar_lambda(n), HopfClosedForms::max_scalar(n));
        if (zl - zero).abs() > 1e-15 || (ml.0 - peak).abs() > 1e-15 {
            return Err(format!("n={n}: closed-form special values disagree"));
        }
    }
    Ok(format!("worst relative error {worst:.1e}"))
}

/// Relations of the identity suite that the criterion names explicitly.
const SUITE: [&str; 10] = [
    "lc_ricci_first",
    "lc_ricci_second",
    "hermitian_ricci",
    "chern_ricci_second",
    "riemannian_ricci_11",
    "torsion_norm_split",
    "scalar_riemannian_chern",
    "scalar_levi_civita",
    "scalar_hermitian",
    "scalar_riemannian_type",
];

fn residual_suite() -> Outcome {
    let mut worst = [0.0f64; 2];
    for id in catalog_ids() {
        for (k, mode) in [JetMode::Analytic, JetMode::Numeric].into_iter().enumerate() {
            let spec = catalog::parse(id).map_err(|e| e.to_string())?.with_mode(mode);
            let tol = mode.default_tolerance();
            let summary = verify(&spec, 100, 40, tol).map_err(|e| format!("{id}: {e}"))?;
            for name in SUITE {
                let row = summary.worst.iter().find(|r| r.name == name).ok_or(format!("{id}: no row {name}"))?;
                worst[k] = worst[k].max(row.value);
            }
            if let Some(bad) = summary.worst.iter().find(|r| !r.pass) {
                return Err(format!("{id} ({mode:?}): {} = {:e}", bad.name, bad.value));
            }
        }
    }
    Ok(format!("worst analytic {:.1e}, worst numeric {:.1e}", worst[0], worst[1]))
}

fn kahler_degeneration() -> Outcome {
    let mut worst: f64 = 0.0;
    for id in ["flat:n=2", "flat:n=3", "fubini-study:n=1", "fubini-study:n=2", "fubini-study:n=3"] {
        let spec = catalog::parse(id).map_err(|e| e.to_string())?;
        for z in points(&spec, 50, 50) {
            let g = analyze(&spec, &z).map_err(|e| e.to_string())?;
            let s = &g.scalars;
            let t = g.torsion.max_abs();
            let spread = g.ricci_spread();
            let scalars = [s.s - 2.0 * s.s_c, s.s_c - s.s_r, s.s_c - s.s_h, s.s_h - s.s_lc];
            let m = scalars.iter().fold(spread.max(t), |a, b| a.max(b.abs()));
            worst = worst.max(m);
            if t > 1e-12 || spread > 1e-10 || m > 1e-10 {
                return Err(format!("{id}: torsion {t:e}, Ricci spread {spread:e}, scalar gap {m:e}"));
            }
        }
    }
    Ok(format!("worst defect {worst:.1e}"))
}

fn appendix_star_ricci() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    for id in ["random:n=2,seed=11", "random:n=3,seed=12", "hopf:n=3", "conformal:n=2,seed=13", "hopf-family:n=2,lambda=1"] {
        let spec = catalog::parse(id).map_err(|e| e.to_string())?;
        for z in points(&spec, 10, 61) {
            let g = analyze(&spec, &z).map_err(|e| e.to_string())?;
            let s = &g.scalars;
            let scale = s.s_h.abs().max(s.s.abs()).max(1.0);
            let d1 = (s.s_star - 2.0 * s.s_h).abs() / scale;
            let d2 = (s.s - 4.0 * s.s_r + 2.0 * s.s_h).abs() / scale;
            let m = 2 * g.n();
            for _ in 0..5 {
                let x: Vec<f64> = (0..m).map(|_| rng.random::<f64>() - 0.5).collect();
                let y: Vec<f64> = (0..m).map(|_| rng.random::<f64>() - 0.5).collect();
                let a = star_ricci(&g.background, &x, &y).map_err(|e| e.to_string())?;
                let b = star_ricci(&g.background, &apply_j_real(&y), &apply_j_real(&x)).map_err(|e| e.to_string())?;
                let d3 = (a - b).abs() / a.abs().max(1.0);
                worst = worst.max(d1).max(d2).max(d3);
                if d1 > 1e-9 || d2 > 1e-9 || d3 > 1e-9 {
                    return Err(format!("{id}: s*-2s_H {d1:e}, s-4s_R+2s_H {d2:e}, Ric* symmetry {d3:e}"));
                }
            }
        }
    }
    Ok(format!("worst defect {worst:.1e}"))
}

fn run_identity(id: &str, identity: Identity, samples: u64) -> Result<IdentityReport, String> {
    let spec = catalog::parse(id).map_err(|e| e.to_string())?;
    check_identity(&spec, identity, samples, 2024, 0.02).map_err(|e| format!("{id}: {e}"))
}

fn global_integrals() -> Outcome {
    let samples = 1_000_000;
    let start = Instant::now();
    let vol = run_identity("hopf:n=2", Identity::Volume, samples)?;
    let t = start.elapsed().as_secs_f64();
    let oracle = 128.0 * PI * PI * LN_2;
    if (vol.rhs - oracle).abs() > 1e-9 || !vol.pass || (vol.lhs - oracle).abs() > 3.0 * vol.stderr_lhs || t >= 30.0 {
        return Err(format!("volume {} ± {} vs {oracle}, {t:.1} s", vol.lhs, vol.stderr_lhs));
    }
    let norms = run_identity("hopf:n=2", Identity::DdbarOmega, samples)?;
    if !norms.pass {
        return Err(format!("‖∂ω‖² − ‖∂*ω‖² = {} (residual {:e})", norms.rhs, norms.residual));
    }
    let mut kg = Vec::new();
    for k in [1, 2] {
        let r = run_identity("hopf:n=3", Identity::KGauduchon { k }, samples)?;
        if !r.pass {
            return Err(format!("k={k}: lhs {} rhs {} residual {:e}", r.lhs, r.rhs, r.residual));
        }
        if let Some(Details::KGauduchon(d)) = &r.details {
            let ratio = d.ratio.unwrap_or(f64::NAN);
            if (ratio - d.expected_ratio).abs() > 0.02 * d.expected_ratio.abs().max(1.0) {
                return Err(format!("k={k}: ratio to the torsion wedge {ratio}, expected {}", d.expected_ratio));
            }
        }
        kg.push(r.residual);
    }
    let hopf = run_identity("hopf:n=2", Identity::BalancedDiagnostic, samples)?;
    let Some(Details::Balanced(d)) = &hopf.details else { return Err("no balanced details".into()) };
    let ratio = d.ratio_c_lc.unwrap_or(f64::NAN);
    if !hopf.pass || d.balanced || d.kahler || (ratio - 2.0).abs() > 0.04 {
        return Err(format!("Hopf: balanced={} kahler={} ratio {ratio}", d.balanced, d.kahler));
    }
    let torus = run_identity("flat:n=2", Identity::BalancedDiagnostic, 100_000)?;
    let Some(Details::Balanced(dt)) = &torus.details else { return Err("no balanced details".into()) };
    if !torus.pass || !dt.balanced || !dt.kahler {
        return Err("flat torus is not certified Kähler and balanced".into());
    }
    Ok(format!(
        "volume {:.2} ± {:.2} in {t:.1} s; norm residual {:.1e}; k-Gauduchon residuals {:.1e}, {:.1e}; ratio {ratio:.4}",
        vol.lhs, vol.stderr_lhs, norms.residual, kg[0], kg[1]
    ))
}

fn conformal_law() -> Outcome {
    let mut worst: f64 = 0.0;
    for trial in 0..10u64 {
        let n = 2 + (trial % 3) as usize;
        let base = catalog::random_hermitian(n, 70 + trial).map_err(|e| e.to_string())?;
        let weight = Arc::new(QuadraticWeight::random(n, 80 + trial, 0.4));
        let conf = catalog::conformal(&base, weight.clone());
        let z = points(&base, 1, 90 + trial).remove(0);
        let lhs = dbar_star_omega(&evaluate_jet(&conf, &z).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let mut rhs = dbar_star_omega(&evaluate_jet(&base, &z).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let wj = weight.jet(&z);
        let mut df = PQForm::zero(n, 1, 0).map_err(|e| e.to_string())?;
        for p in 0..n {
            df.set(&[p], &[], C64::new(0.0, (n - 1) as f64) * wj.d[p]);
        }
        rhs.add_assign(&df);
        let d = lhs.max_abs_diff(&rhs) / lhs.max_abs().max(1.0);
        worst = worst.max(d);
        if d >= 1e-8 {
            return Err(format!("trial {trial}: residual {d:e}"));
        }
    }
    Ok(format!("worst residual {worst:.1e}"))
}

fn bianchi_and_symmetry() -> Outcome {
    let mut worst: f64 = 0.0;
    for id in catalog_ids() {
        let spec = catalog::parse(id).map_err(|e| e.to_string())?;
        let summary = verify(&spec, 100, 100, 1e-9).map_err(|e| format!("{id}: {e}"))?;
        for name in ["bianchi", "pair_symmetry"] {
            let row = summary.worst.iter().find(|r| r.name == name).ok_or(format!("{id}: no row {name}"))?;
            worst = worst.max(row.value);
            if !row.pass {
                return Err(format!("{id}: {name} = {:e}", row.value));
            }
        }
    }
    Ok(format!("worst residual {worst:.1e}"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("Hopf scalar table", hopf_scalar_table),
        ("Hopf Ricci forms", hopf_ricci_forms),
        ("Ricci-flat member of the Hopf family", ricci_flat_member),
        ("Riemannian scalar along the Hopf family", riemannian_scalar_of_family),
        ("pointwise identity suite", residual_suite),
        ("Kähler degeneration", kahler_degeneration),
        ("*-Ricci curvature", appendix_star_ricci),
        ("global integrals", global_integrals),
        ("conformal law", conformal_law),
        ("Bianchi identity and pair symmetry", bianchi_and_symmetry),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        let line = match &outcome {
            Ok(msg) => format!("PASS  {:>2}. {name}: {msg}", k + 1),
            Err(msg) => format!("FAIL  {:>2}. {name}: {msg}", k + 1),
        };
        let _ = writeln!(std::io::stderr(), "{line}");
        if outcome.is_err() {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
