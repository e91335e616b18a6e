//! Monte Carlo integration over compact fundamental domains and the global
//! identities that relate curvature integrals to norms of `∂ω` and `∂*ω`.
//!
//! Samples are uniform in Lebesgue measure on the domain (on the Hopf annulus
//! this is radial density `∝ r^{2n−1}` times the round sphere). Each sample is
//! weighted by the volume density `det(h)·2ⁿ` of `ωⁿ/n!`.
//!
//! Work is split into [`PARTITIONS`] fixed partitions. Partition `p` draws from
//! ChaCha8 stream `p` of the master seed, and partial sums are reduced in
//! partition order, so results do not depend on the thread count.

use crate::connection::{connection_jet, dstar_from_gamma, gamma_trace, torsion_products_with, torsion_with};
use crate::curvature::{curvature_set, tensor_scalars};
use crate::forms::{norm_sq_with, omega_power, top_density, wedge, FormField2, PQForm};
use crate::jets::{evaluate_jet, CMatrix, MetricJet2, MetricSpec, Region};
use crate::{Error, Result, C64, I};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{LN_2, PI};

pub const PARTITIONS: u64 = 64;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_TOLERANCE: f64 = 0.02;
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Clone, Copy, Default)]
struct Moments {
    sum: f64,
    sum_sq: f64,
}

/// Estimates `∫ f_k ωⁿ/n!` for every component `f_k` of the vector-valued
/// density `f`, all from the same samples.
pub fn integrate_many<F>(spec: &MetricSpec, width: usize, samples: u64, seed: u64, f: F) -> Result<Vec<IntegralEstimate>>
where
    F: Fn(&MetricSpec, &[C64]) -> Result<Vec<f64>> + Sync,
{
    let region = spec.model().compact_domain().ok_or_else(|| Error::NoCompactDomain(spec.id()))?;
    integrate_region(spec, &region, width, samples, seed, f)
}

fn integrate_region<F>(
    spec: &MetricSpec,
    region: &Region,
    width: usize,
    samples: u64,
    seed: u64,
    f: F,
) -> Result<Vec<IntegralEstimate>>
where
    F: Fn(&MetricSpec, &[C64]) -> Result<Vec<f64>> + Sync,
{
    if samples < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {samples}")));
    }
    let n = spec.dim();
    let two_n = 2f64.powi(n as i32);
    let partials: Vec<Result<Vec<Moments>>> = (0..PARTITIONS)
        .into_par_iter()
        .map(|p| {
            let (lo, hi) = (samples * p / PARTITIONS, samples * (p + 1) / PARTITIONS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(p);
            let mut acc = vec![Moments::default(); width];
            for index in lo..hi {
                let z = region.sample(&mut rng);
                let eval = || -> Result<Vec<f64>> {
                    let det = spec.model().metric(&z).determinant().re;
                    let v = f(spec, &z)?;
                    if v.len() != width {
                        return Err(Error::DimensionMismatch { expected: width, got: v.len() });
                    }
                    Ok(v.into_iter().map(|x| x * det * two_n).collect())
                };
                let v = eval().map_err(|e| Error::Sample { index, source: Box::new(e) })?;
                for (a, x) in acc.iter_mut().zip(v) {
                    if !x.is_finite() {
                        return Err(Error::Sample { index, source: Box::new(Error::NonFinite("integrand")) });
                    }
                    a.sum += x;
                    a.sum_sq += x * x;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![Moments::default(); width];
    for part in partials {
        for (t, m) in total.iter_mut().zip(part?) {
            t.sum += m.sum;
            t.sum_sq += m.sum_sq;
        }
    }
    let vol = region.lebesgue_volume();
    let nf = samples as f64;
    Ok(total
        .into_iter()
        .map(|m| {
            let mean = m.sum / nf;
            let var = ((m.sum_sq - m.sum * mean) / (nf - 1.0)).max(0.0);
            IntegralEstimate { value: vol * mean, stderr: vol * (var / nf).sqrt(), samples, seed }
        })
        .collect())
}

/// `∫ f ωⁿ/n!` over the compact domain of `spec`.
pub fn integrate<F>(spec: &MetricSpec, f: F, samples: u64, seed: u64) -> Result<IntegralEstimate>
where
    F: Fn(&MetricSpec, &[C64]) -> Result<f64> + Sync,
{
    Ok(integrate_many(spec, 1, samples, seed, |s, z| f(s, z).map(|x| vec![x]))?[0])
}

/// [`integrate`] restricted to metrics living on the Hopf annulus `1 ≤ |z| < 2`.
pub fn hopf_integrate<F>(spec: &MetricSpec, f: F, samples: u64, seed: u64) -> Result<IntegralEstimate>
where
    F: Fn(&MetricSpec, &[C64]) -> Result<f64> + Sync,
{
    match spec.model().compact_domain() {
        Some(Region::Annulus { inner, outer, .. }) if inner == 1.0 && outer == 2.0 => integrate(spec, f, samples, seed),
        _ => Err(Error::NoCompactDomain(spec.id())),
    }
}

/// Closed-form `∫ ωⁿ/n!` where one is known.
///
/// On the Hopf family `det h̃ = 4ⁿ(1+λ)^{n−1} r^{−2n}`, so the volume is
/// `8ⁿ (1+λ)^{n−1} Vol(S^{2n−1}) ln 2`. The flat unit cell has volume `2ⁿ`.
pub fn volume_oracle(spec: &MetricSpec) -> Option<f64> {
    let n = spec.dim() as i32;
    match spec.name.as_str() {
        "hopf" | "hopf-family" => {
            let lambda = spec.param("lambda").unwrap_or(0.0);
            let sphere = 2.0 * PI.powi(n) / (1..n).map(f64::from).product::<f64>();
            Some(8f64.powi(n) * (1.0 + lambda).powi(n - 1) * sphere * LN_2)
        }
        "flat" => Some(2f64.powi(n)),
        _ => None,
    }
}

// Pointwise densities, each relative to ωⁿ/n!.

fn real_density(top: &PQForm, h: &CMatrix, what: &'static str) -> Result<f64> {
    let d = top_density(top, h)?;
    if d.im.abs() > 1e-8 * d.re.abs().max(1.0) {
        return Err(Error::NonReal { what, imag: d.im });
    }
    Ok(d.re)
}

/// `|∂ω|²` and `|∂*ω|²`.
pub fn codiff_norms(jet: &MetricJet2) -> Result<(f64, f64)> {
    let conn = connection_jet(jet)?;
    let d_omega = FormField2::kahler(jet).del()?;
    let dstar = dstar_from_gamma(&gamma_trace(&conn.chr));
    Ok((norm_sq_with(&d_omega, &conn.hinv)?, norm_sq_with(&dstar, &conn.hinv)?))
}

/// Density of `i∂∂̄ω ∧ ω^{n−2}/(n−2)!`.
pub fn ddbar_omega_density(jet: &MetricJet2) -> Result<f64> {
    if jet.n < 2 {
        return Ok(0.0);
    }
    let top = wedge(&FormField2::kahler(jet).del_delbar()?, &omega_power(&jet.h, jet.n - 2)?)?.scale(I);
    real_density(&top, &jet.h, "i∂∂̄ω∧ω^{n−2}")
}

/// Density of `i∂ω ∧ ∂̄ω ∧ ω^{n−3}/(n−3)!`, for `n ≥ 3`.
pub fn torsion_wedge_density(jet: &MetricJet2) -> Result<f64> {
    let omega = FormField2::kahler(jet);
    let dd = wedge(&omega.del()?, &omega.delbar()?)?;
    let top = wedge(&dd, &omega_power(&jet.h, jet.n - 3)?)?.scale(I);
    real_density(&top, &jet.h, "i∂ω∧∂̄ω∧ω^{n−3}")
}

/// Density of `i ω^{n−k−1} ∧ ∂∂̄(ω^k)`, with undivided powers.
pub fn k_gauduchon_density(jet: &MetricJet2, k: usize) -> Result<f64> {
    let rest = jet.n - k - 1;
    let fact: f64 = (1..=rest).map(|m| m as f64).product();
    let ddbar = FormField2::kahler(jet).pow(k)?.del_delbar()?;
    let top = wedge(&omega_power(&jet.h, rest)?, &ddbar)?.scale(I * fact);
    real_density(&top, &jet.h, "iω^{n−k−1}∧∂∂̄ω^k")
}

/// `[s, s_C, s_R, s_H, s_LC, |T|²]`.
pub fn scalar_densities(jet: &MetricJet2) -> Result<[f64; 6]> {
    let conn = connection_jet(jet)?;
    let torsion = torsion_with(jet, &conn.hinv);
    let tp = torsion_products_with(jet, &conn.hinv, &torsion);
    let [s, s_r, s_h, s_lc, s_c] = tensor_scalars(&conn.hinv, &curvature_set(jet, &conn))?;
    Ok([s, s_c, s_r, s_h, s_lc, tp.norm_sq])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    /// `∫ ωⁿ/n!` against its closed form.
    Volume,
    /// `∫ i∂∂̄ω∧ω^{n−2}/(n−2)! = ‖∂ω‖² − ‖∂*ω‖²`.
    DdbarOmega,
    /// `∫ i∂ω∧∂̄ω∧ω^{n−3}/(n−3)! = ‖∂*ω‖² − ‖∂ω‖²`.
    TorsionWedge,
    /// `∫ iω^{n−k−1}∧∂∂̄ω^k = (n−3)! k(n−k−1)(‖∂ω‖² − ‖∂*ω‖²)`.
    KGauduchon { k: usize },
    /// Which of the Kähler and balanced integral criteria hold.
    BalancedDiagnostic,
}

impl Identity {
    pub const NAMES: [&'static str; 5] = ["volume", "ddbar-omega", "torsion-wedge", "k-gauduchon", "balanced-diagnostic"];

    /// `k` is only read by `k-gauduchon`.
    pub fn parse(name: &str, k: Option<usize>) -> Result<Self> {
        Ok(match name {
            "volume" => Identity::Volume,
            "ddbar-omega" => Identity::DdbarOmega,
            "torsion-wedge" => Identity::TorsionWedge,
            "k-gauduchon" => Identity::KGauduchon {
                k: k.ok_or_else(|| Error::InvalidParameter("k-gauduchon needs --k".into()))?,
            },
            "balanced-diagnostic" => Identity::BalancedDiagnostic,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown identity `{name}` (expected one of {})",
                    Identity::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Identity::Volume => "volume",
            Identity::DdbarOmega => "ddbar-omega",
            Identity::TorsionWedge => "torsion-wedge",
            Identity::KGauduchon { .. } => "k-gauduchon",
            Identity::BalancedDiagnostic => "balanced-diagnostic",
        }
    }
}

/// One equality between two totals, decided from the paired difference.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Equality {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
    pub stderr_diff: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Totals {
    pub s: IntegralEstimate,
    pub s_c: IntegralEstimate,
    pub s_r: IntegralEstimate,
    pub s_h: IntegralEstimate,
    pub s_lc: IntegralEstimate,
    pub torsion_norm_sq: IntegralEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalancedDetails {
    pub totals: Totals,
    /// Each of these holds iff the metric is Kähler.
    pub kahler_criteria: Vec<Equality>,
    /// Each of these holds iff the metric is balanced.
    pub balanced_criteria: Vec<Equality>,
    pub kahler: bool,
    pub balanced: bool,
    /// `∫s_C / ∫s_LC`, or null when `∫s_LC` vanishes.
    pub ratio_c_lc: Option<f64>,
    /// `∫s = 2∫s_C − ½∫|T|²`, expected for Gauduchon metrics.
    pub gauduchon: Equality,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KGauduchonDetails {
    pub k: usize,
    pub coefficient: f64,
    /// `∫ i∂ω∧∂̄ω∧ω^{n−3}/(n−3)!` from the same samples.
    pub torsion_wedge: IntegralEstimate,
    /// Ratio of the two left-hand sides, against `−(n−3)! k(n−k−1)`.
    pub ratio: Option<f64>,
    pub expected_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Details {
    Balanced(Box<BalancedDetails>),
    KGauduchon(KGauduchonDetails),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub schema_version: u32,
    pub metric: String,
    pub identity: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub stderr_lhs: f64,
    pub stderr_rhs: f64,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub samples: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Details>,
}

/// `|lhs − rhs| / max(|lhs|, |rhs|, scale)`, and `0` when everything vanishes.
pub fn relative_residual(lhs: f64, rhs: f64, scale: f64) -> f64 {
    let den = lhs.abs().max(rhs.abs()).max(scale.abs());
    let diff = (lhs - rhs).abs();
    if den == 0.0 {
        diff
    } else {
        diff / den
    }
}

/// Two totals agree when their paired difference is within three standard
/// errors, up to a rounding floor relative to `scale`.
fn equality(name: &'static str, a: IntegralEstimate, b: IntegralEstimate, d: IntegralEstimate, scale: f64) -> Equality {
    let holds = d.value.abs() <= 3.0 * d.stderr + 1e-9 * scale.max(1.0);
    Equality { name, lhs: a.value, rhs: b.value, diff: d.value, stderr_diff: d.stderr, holds }
}

fn difference(a: IntegralEstimate, b: IntegralEstimate) -> IntegralEstimate {
    IntegralEstimate { value: a.value - b.value, stderr: (a.stderr.powi(2) + b.stderr.powi(2)).sqrt(), ..a }
}

/// Runs one global identity with `samples` Monte Carlo samples.
///
/// Both sides are always computed from separate integrands; the identity
/// itself is never used to produce either side.
pub fn check_identity(spec: &MetricSpec, id: Identity, samples: u64, seed: u64, tol: f64) -> Result<IdentityReport> {
    let n = spec.dim();
    let mut report = IdentityReport {
        schema_version: SCHEMA_VERSION,
        metric: spec.id(),
        identity: id.name(),
        lhs: 0.0,
        rhs: 0.0,
        stderr_lhs: 0.0,
        stderr_rhs: 0.0,
        residual: 0.0,
        tol,
        pass: false,
        samples,
        seed,
        details: None,
    };
    // Sets lhs/rhs from estimates, with a residual scale for identities whose sides may vanish.
    let fill = |r: &mut IdentityReport, l: IntegralEstimate, rt: IntegralEstimate, scale: f64| {
        r.lhs = l.value;
        r.rhs = rt.value;
        r.stderr_lhs = l.stderr;
        r.stderr_rhs = rt.stderr;
        r.residual = relative_residual(l.value, rt.value, scale);
        r.pass = r.residual <= tol;
    };
    match id {
        Identity::Volume => {
            let oracle = volume_oracle(spec)
                .ok_or_else(|| Error::InvalidParameter(format!("no closed-form volume for `{}`", spec.id())))?;
            let v = integrate(spec, |_, _| Ok(1.0), samples, seed)?;
            report.lhs = v.value;
            report.rhs = oracle;
            report.stderr_lhs = v.stderr;
            report.residual = relative_residual(v.value, oracle, 0.0);
            report.pass = (v.value - oracle).abs() <= 3.0 * v.stderr;
        }
        Identity::DdbarOmega => {
            if n < 2 {
                return Err(Error::InvalidParameter("ddbar-omega needs n ≥ 2".into()));
            }
            let e = integrate_many(spec, 3, samples, seed, |s, z| {
                let jet = evaluate_jet(s, z)?;
                let (d, ds) = codiff_norms(&jet)?;
                Ok(vec![ddbar_omega_density(&jet)?, d, ds])
            })?;
            let rhs = difference(e[1], e[2]);
            fill(&mut report, e[0], rhs, e[1].value + e[2].value);
        }
        Identity::TorsionWedge => {
            if n < 3 {
                return Err(Error::InvalidParameter("torsion-wedge needs n ≥ 3".into()));
            }
            let e = integrate_many(spec, 3, samples, seed, |s, z| {
                let jet = evaluate_jet(s, z)?;
                let (d, ds) = codiff_norms(&jet)?;
                Ok(vec![torsion_wedge_density(&jet)?, ds, d])
            })?;
            let rhs = difference(e[1], e[2]);
            fill(&mut report, e[0], rhs, e[1].value + e[2].value);
        }
        Identity::KGauduchon { k } => {
            if n < 3 || k < 1 || k > n - 1 {
                return Err(Error::InvalidParameter(format!("k-gauduchon needs n ≥ 3 and 1 ≤ k ≤ n−1, got n={n}, k={k}")));
            }
            let coefficient = (1..=n - 3).map(|m| m as f64).product::<f64>() * (k * (n - k - 1)) as f64;
            let e = integrate_many(spec, 4, samples, seed, |s, z| {
                let jet = evaluate_jet(s, z)?;
                let (d, ds) = codiff_norms(&jet)?;
                Ok(vec![k_gauduchon_density(&jet, k)?, d, ds, torsion_wedge_density(&jet)?])
            })?;
            let norms = difference(e[1], e[2]);
            let rhs = IntegralEstimate { value: coefficient * norms.value, stderr: coefficient * norms.stderr, ..norms };
            fill(&mut report, e[0], rhs, coefficient.max(1.0) * (e[1].value + e[2].value));
            let ratio = (e[3].value != 0.0).then(|| e[0].value / e[3].value);
            report.details = Some(Details::KGauduchon(KGauduchonDetails {
                k,
                coefficient,
                torsion_wedge: e[3],
                ratio,
                expected_ratio: -coefficient,
            }));
        }
        Identity::BalancedDiagnostic => {
            // Totals first, then the paired differences so each equality gets its own error bar.
            let e = integrate_many(spec, 15, samples, seed, |sp, z| {
                let [s, sc, sr, sh, slc, t] = scalar_densities(&evaluate_jet(sp, z)?)?;
                Ok(vec![
                    s,
                    sc,
                    sr,
                    sh,
                    slc,
                    t,
                    s - 2.0 * sc,
                    sc - sr,
                    sc - sh,
                    sh - slc,
                    s - 2.0 * sr,
                    s - 2.0 * sh,
                    sc - slc,
                    sr - sh,
                    s - 2.0 * sc + 0.5 * t,
                ])
            })?;
            let totals = Totals { s: e[0], s_c: e[1], s_r: e[2], s_h: e[3], s_lc: e[4], torsion_norm_sq: e[5] };
            let scale = e[..6].iter().map(|x| x.value.abs()).fold(0.0, f64::max);
            let twice = |x: IntegralEstimate| IntegralEstimate { value: 2.0 * x.value, stderr: 2.0 * x.stderr, ..x };
            let kahler_criteria = vec![
                equality("s = 2 s_C", e[0], twice(e[1]), e[6], scale),
                equality("s_C = s_R", e[1], e[2], e[7], scale),
                equality("s_C = s_H", e[1], e[3], e[8], scale),
                equality("s_H = s_LC", e[3], e[4], e[9], scale),
            ];
            let balanced_criteria = vec![
                equality("s = 2 s_R", e[0], twice(e[2]), e[10], scale),
                equality("s = 2 s_H", e[0], twice(e[3]), e[11], scale),
                equality("s_C = s_LC", e[1], e[4], e[12], scale),
                equality("s_R = s_H", e[2], e[3], e[13], scale),
            ];
            let gauduchon_rhs = IntegralEstimate { value: 2.0 * e[1].value - 0.5 * e[5].value, ..e[1] };
            let gauduchon = equality("s = 2 s_C - |T|^2/2", e[0], gauduchon_rhs, e[14], scale);
            let all = |v: &[Equality]| v.iter().all(|q| q.holds);
            let none = |v: &[Equality]| v.iter().all(|q| !q.holds);
            let kahler = all(&kahler_criteria);
            let balanced = all(&balanced_criteria);
            // The criteria within each group are equivalent, and Kähler implies balanced.
            let consistent = (kahler || none(&kahler_criteria))
                && (balanced || none(&balanced_criteria))
                && (!kahler || balanced);
            report.lhs = e[1].value;
            report.rhs = e[4].value;
            report.stderr_lhs = e[1].stderr;
            report.stderr_rhs = e[4].stderr;
            report.residual = relative_residual(e[1].value, e[4].value, 0.0);
            report.pass = consistent;
            let ratio_c_lc = (e[4].value != 0.0).then(|| e[1].value / e[4].value);
            report.details = Some(Details::Balanced(Box::new(BalancedDetails {
                totals,
                kahler_criteria,
                balanced_criteria,
                kahler,
                balanced,
                ratio_c_lc,
                gauduchon,
            })));
        }
    }
    Ok(report)
}
