//! Metric specifications and their second-order jets.

use crate::tensor::Tensor;
use crate::{c, Error, Result, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use std::fmt;
use std::sync::Arc;

pub type CMatrix = DMatrix<C64>;

/// Smallest admissible eigenvalue of `h`, relative to the largest.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Step sizes for central differences; the two estimates are Richardson-combined.
pub const FD_STEPS: [f64; 2] = [1e-4, 5e-5];

/// Second-order jet of a Hermitian metric at one point.
///
/// `h[(i, j)] = h_{i j̄}`, `dh[[p, i, j]] = ∂_p h_{i j̄}`,
/// `ddbar_h[[p, q, i, j]] = ∂_p ∂_q̄ h_{i j̄}`, `dd_h[[p, q, i, j]] = ∂_p ∂_q h_{i j̄}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricJet2 {
    pub n: usize,
    pub h: CMatrix,
    pub dh: Tensor<3>,
    pub ddbar_h: Tensor<4>,
    pub dd_h: Tensor<4>,
}

impl MetricJet2 {
    pub fn flat(n: usize) -> Self {
        Self {
            n,
            h: CMatrix::identity(n, n),
            dh: Tensor::zeros(n),
            ddbar_h: Tensor::zeros(n),
            dd_h: Tensor::zeros(n),
        }
    }

    /// `∂_q̄ h_{i j̄} = conj(∂_q h_{j ī})`.
    #[inline]
    pub fn dbar_h(&self, q: usize, i: usize, j: usize) -> C64 {
        self.dh[[q, j, i]].conj()
    }

    /// `∂_p̄ ∂_q̄ h_{i j̄} = conj(∂_p ∂_q h_{j ī})`.
    #[inline]
    pub fn dbar_dbar_h(&self, p: usize, q: usize, i: usize, j: usize) -> C64 {
        self.dd_h[[p, q, j, i]].conj()
    }

    /// `∂_p̄ ∂_q h_{i j̄}`, i.e. `∂_q ∂_p̄ h_{i j̄}`.
    #[inline]
    pub fn dbar_d_h(&self, p: usize, q: usize, i: usize, j: usize) -> C64 {
        self.ddbar_h[[q, p, i, j]]
    }

    /// Largest violation of the symmetry invariants, relative to the jet size.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let scale = 1.0_f64
            .max(self.h.iter().map(|z| z.norm()).fold(0.0, f64::max))
            .max(self.ddbar_h.max_abs())
            .max(self.dd_h.max_abs());
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.h[(i, j)] - self.h[(j, i)].conj()).norm());
                for p in 0..n {
                    for q in 0..n {
                        let a = self.ddbar_h[[p, q, i, j]] - self.ddbar_h[[q, p, j, i]].conj();
                        let b = self.dd_h[[p, q, i, j]] - self.dd_h[[q, p, i, j]];
                        worst = worst.max(a.norm()).max(b.norm());
                    }
                }
            }
        }
        worst / scale
    }

    /// Checks finiteness, Hermitian symmetry and positive definiteness.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let finite = |m: &CMatrix| m.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite(&self.h) {
            return Err(Error::NonFinite("metric"));
        }
        if !self.dh.is_finite() || !self.ddbar_h.is_finite() || !self.dd_h.is_finite() {
            return Err(Error::NonFinite("metric derivatives"));
        }
        if self.symmetry_defect() > tol {
            return Err(Error::InvalidParameter(format!(
                "jet violates Hermitian symmetry by {:e}",
                self.symmetry_defect()
            )));
        }
        check_positive(&self.h)
    }
}

pub(crate) fn check_positive(h: &CMatrix) -> Result<()> {
    let eig = h.clone().symmetric_eigenvalues();
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max.is_nan() || max <= 0.0 || min < POSITIVITY_TOL * max {
        return Err(Error::NotPositiveDefinite { min, max });
    }
    Ok(())
}

/// `h^{i j̄}` in the transposed convention `Σ_l h^{i l̄} h_{k l̄} = δ_{ik}`.
///
/// As a matrix this is `(H⁻¹)ᵀ`, so `tr_ω α = Σ h^{i j̄} α_{i j̄}`.
pub fn inverse_metric(j: &MetricJet2) -> Result<CMatrix> {
    check_positive(&j.h)?;
    let inv = j.h.clone().try_inverse().ok_or(Error::NotPositiveDefinite { min: 0.0, max: 0.0 })?;
    Ok(inv.transpose())
}

/// Sampling or integration region in ℂⁿ, written in real coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// `inner ≤ |z| < outer` in ℂⁿ.
    Annulus { dim: usize, inner: f64, outer: f64 },
    /// `|z| < radius`.
    Ball { dim: usize, radius: f64 },
    /// Unit cell `[0,1)^{2n}` of the lattice `ℤ^{2n}`.
    Cell { dim: usize },
    Product(Vec<Region>),
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Annulus { dim, .. } | Region::Ball { dim, .. } | Region::Cell { dim } => *dim,
            Region::Product(f) => f.iter().map(Region::dim).sum(),
        }
    }

    /// Lebesgue volume in the `2n` real coordinates.
    pub fn lebesgue_volume(&self) -> f64 {
        let ball = |n: usize, r: f64| {
            let mut v = std::f64::consts::PI.powi(n as i32) * r.powi(2 * n as i32);
            for k in 2..=n {
                v /= k as f64;
            }
            v
        };
        match self {
            Region::Annulus { dim, inner, outer } => ball(*dim, *outer) - ball(*dim, *inner),
            Region::Ball { dim, radius } => ball(*dim, *radius),
            Region::Cell { .. } => 1.0,
            Region::Product(f) => f.iter().map(Region::lebesgue_volume).product(),
        }
    }

    /// Uniform sample with respect to Lebesgue measure.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.dim());
        self.sample_into(rng, &mut out);
        out
    }

    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<C64>) {
        match self {
            Region::Annulus { dim, inner, outer } => {
                let m = 2 * *dim as i32;
                let u: f64 = rng.random();
                let r = (inner.powi(m) + u * (outer.powi(m) - inner.powi(m))).powf(1.0 / m as f64);
                push_sphere(rng, *dim, r, out);
            }
            Region::Ball { dim, radius } => {
                let u: f64 = rng.random();
                let r = radius * u.powf(1.0 / (2 * *dim) as f64);
                push_sphere(rng, *dim, r, out);
            }
            Region::Cell { dim } => {
                for _ in 0..*dim {
                    out.push(C64::new(rng.random(), rng.random()));
                }
            }
            Region::Product(f) => f.iter().for_each(|r| r.sample_into(rng, out)),
        }
    }
}

fn push_sphere<R: Rng + ?Sized>(rng: &mut R, n: usize, r: f64, out: &mut Vec<C64>) {
    let g: Vec<f64> = (0..2 * n).map(|_| rng.sample(StandardNormal)).collect();
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    for k in 0..n {
        out.push(C64::new(g[2 * k], g[2 * k + 1]) * (r / norm));
    }
}

/// A Hermitian metric on a chart of ℂⁿ.
pub trait MetricModel: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// Chart predicate for user-supplied points.
    fn in_chart(&self, z: &[C64]) -> bool;

    /// The matrix `h_{i j̄}(z)`; must be exactly Hermitian.
    fn metric(&self, z: &[C64]) -> CMatrix;

    /// Closed-form jet, if the model has one.
    fn analytic_jet(&self, _z: &[C64]) -> Option<MetricJet2> {
        None
    }

    /// Region used to draw random test points.
    fn sample_region(&self) -> Region;

    /// Fundamental domain of a compact quotient, when there is one.
    fn compact_domain(&self) -> Option<Region> {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JetMode {
    Analytic,
    Numeric,
}

impl JetMode {
    /// Default residual tolerance for identity checks.
    pub fn default_tolerance(self) -> f64 {
        match self {
            JetMode::Analytic => 1e-8,
            JetMode::Numeric => 1e-4,
        }
    }
}

impl std::str::FromStr for JetMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(JetMode::Analytic),
            "numeric" => Ok(JetMode::Numeric),
            _ => Err(Error::InvalidParameter(format!("unknown jet mode `{s}`"))),
        }
    }
}

/// A named metric together with the way its jets are evaluated.
#[derive(Clone, Debug)]
pub struct MetricSpec {
    pub name: String,
    pub params: Vec<(String, f64)>,
    pub mode: JetMode,
    model: Arc<dyn MetricModel>,
}

impl MetricSpec {
    pub fn new(name: impl Into<String>, params: Vec<(String, f64)>, model: Arc<dyn MetricModel>) -> Self {
        Self { name: name.into(), params, mode: JetMode::Analytic, model }
    }

    pub fn with_mode(mut self, mode: JetMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn model(&self) -> &Arc<dyn MetricModel> {
        &self.model
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// Canonical string id, e.g. `hopf-family:n=2,lambda=-0.5`.
    pub fn id(&self) -> String {
        if self.params.is_empty() {
            return self.name.clone();
        }
        let p: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}:{}", self.name, p.join(","))
    }

    pub fn check_point(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: z.len() });
        }
        if z.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(Error::NonFinite("chart point"));
        }
        if !self.model.in_chart(z) {
            return Err(Error::OutsideChart { metric: self.id() });
        }
        Ok(())
    }
}

/// Evaluates the jet of `spec` at `z` in its jet mode and validates it.
pub fn evaluate_jet(spec: &MetricSpec, z: &[C64]) -> Result<MetricJet2> {
    spec.check_point(z)?;
    let jet = match spec.mode {
        JetMode::Analytic => spec.model.analytic_jet(z).ok_or_else(|| Error::NoAnalyticJet(spec.id()))?,
        JetMode::Numeric => numeric_jet(spec.model.as_ref(), z),
    };
    jet.validate(1e-9)?;
    Ok(jet)
}

fn richardson<T>(f: impl Fn(f64) -> T, combine: impl Fn(T, T) -> T) -> T {
    combine(f(FD_STEPS[0]), f(FD_STEPS[1]))
}

/// Real coordinate `a` of ℂⁿ: `a < n` is `x^a`, `a ≥ n` is `y^{a-n}`.
fn shift(z: &[C64], moves: &[(usize, f64)]) -> Vec<C64> {
    let n = z.len();
    let mut w = z.to_vec();
    for &(a, s) in moves {
        if a < n {
            w[a].re += s;
        } else {
            w[a - n].im += s;
        }
    }
    w
}

fn hermitian_part(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()) * c(0.5)
}

/// Real first partials `∂h/∂u^a` for the `2n` real coordinates.
fn real_gradient(model: &dyn MetricModel, z: &[C64]) -> Vec<CMatrix> {
    let n = z.len();
    let f = |w: Vec<C64>| hermitian_part(model.metric(&w));
    (0..2 * n)
        .map(|a| {
            richardson(
                |s| (f(shift(z, &[(a, s)])) - f(shift(z, &[(a, -s)]))) * c(0.5 / s),
                |d1, d2| (d2 * c(4.0) - d1) * c(1.0 / 3.0),
            )
        })
        .collect()
}

/// Wirtinger first derivatives from real ones: `∂_p = ½(∂_x − i∂_y)`.
fn wirtinger_first(n: usize, grad: &[CMatrix]) -> Tensor<3> {
    let mut dh = Tensor::zeros(n);
    for p in 0..n {
        for i in 0..n {
            for j in 0..n {
                dh[[p, i, j]] = (grad[p][(i, j)] - crate::I * grad[n + p][(i, j)]) * 0.5;
            }
        }
    }
    dh
}

/// Metric and first derivatives by central differences.
pub fn numeric_first_order(model: &dyn MetricModel, z: &[C64]) -> (CMatrix, Tensor<3>) {
    let h = hermitian_part(model.metric(z));
    (h, wirtinger_first(z.len(), &real_gradient(model, z)))
}

/// Full second-order jet by central differences in the real coordinates.
pub fn numeric_jet(model: &dyn MetricModel, z: &[C64]) -> MetricJet2 {
    let n = z.len();
    let m = 2 * n;
    let f = |w: Vec<C64>| hermitian_part(model.metric(&w));
    let h0 = f(z.to_vec());
    let dh = wirtinger_first(n, &real_gradient(model, z));

    // Real Hessian, one evaluation set per unordered pair so it is exactly symmetric.
    let mut hess: Vec<Option<CMatrix>> = vec![None; m * m];
    for a in 0..m {
        for b in a..m {
            let est = if a == b {
                richardson(
                    |s| (f(shift(z, &[(a, s)])) + f(shift(z, &[(a, -s)])) - &h0 * c(2.0)) * c(1.0 / (s * s)),
                    |d1, d2| (d2 * c(4.0) - d1) * c(1.0 / 3.0),
                )
            } else {
                richardson(
                    |s| {
                        (f(shift(z, &[(a, s), (b, s)])) - f(shift(z, &[(a, s), (b, -s)]))
                            - f(shift(z, &[(a, -s), (b, s)]))
                            + f(shift(z, &[(a, -s), (b, -s)])))
                            * c(0.25 / (s * s))
                    },
                    |d1, d2| (d2 * c(4.0) - d1) * c(1.0 / 3.0),
                )
            };
            hess[b * m + a] = Some(est.clone());
            hess[a * m + b] = Some(est);
        }
    }
    let hs = |a: usize, b: usize, i: usize, j: usize| hess[a * m + b].as_ref().unwrap()[(i, j)];
    let i_ = crate::I;
    let mut ddbar_h = Tensor::zeros(n);
    let mut dd_h = Tensor::zeros(n);
    for p in 0..n {
        for q in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let xx = hs(p, q, i, j);
                    let yy = hs(n + p, n + q, i, j);
                    let xy = hs(p, n + q, i, j);
                    let yx = hs(n + p, q, i, j);
                    ddbar_h[[p, q, i, j]] = (xx + yy + i_ * (xy - yx)) * 0.25;
                    dd_h[[p, q, i, j]] = (xx - yy - i_ * (xy + yx)) * 0.25;
                }
            }
        }
    }
    MetricJet2 { n, h: h0, dh, ddbar_h, dd_h }
}
