//! Built-in metrics with closed-form jets, plus conformal and product combinators.
//!
//! String ids have the form `name:key=value,...`; a product is written by
//! joining factor ids with `*`, e.g. `hopf-family:n=2,lambda=-0.75*flat:n=1`.

use crate::forms::Herm11;
use crate::jets::{CMatrix, MetricJet2, MetricModel, MetricSpec, Region};
use crate::tensor::Tensor;
use crate::{c, Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn norm_sq(z: &[C64]) -> f64 {
    z.iter().map(|w| w.norm_sqr()).sum()
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug)]
struct Flat {
    n: usize,
}

impl MetricModel for Flat {
    fn dim(&self) -> usize {
        self.n
    }
    fn in_chart(&self, _z: &[C64]) -> bool {
        true
    }
    fn metric(&self, _z: &[C64]) -> CMatrix {
        CMatrix::identity(self.n, self.n)
    }
    fn analytic_jet(&self, _z: &[C64]) -> Option<MetricJet2> {
        Some(MetricJet2::flat(self.n))
    }
    fn sample_region(&self) -> Region {
        Region::Ball { dim: self.n, radius: 1.0 }
    }
    fn compact_domain(&self) -> Option<Region> {
        Some(Region::Cell { dim: self.n })
    }
}

/// `h = δ/σ − z̄^i z^j/σ²` with `σ = 1 + |z|²`.
#[derive(Debug)]
struct FubiniStudy {
    n: usize,
}

impl MetricModel for FubiniStudy {
    fn dim(&self) -> usize {
        self.n
    }
    fn in_chart(&self, _z: &[C64]) -> bool {
        true
    }
    fn metric(&self, z: &[C64]) -> CMatrix {
        let s = 1.0 + norm_sq(z);
        CMatrix::from_fn(self.n, self.n, |i, j| c(delta(i, j) / s) - z[i].conj() * z[j] / (s * s))
    }
    fn analytic_jet(&self, z: &[C64]) -> Option<MetricJet2> {
        let n = self.n;
        let s = 1.0 + norm_sq(z);
        let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
        let zb: Vec<C64> = z.iter().map(|w| w.conj()).collect();
        let mut j = MetricJet2::flat(n);
        j.h = self.metric(z);
        for p in 0..n {
            for a in 0..n {
                for b in 0..n {
                    j.dh[[p, a, b]] = -zb[p] * delta(a, b) / s2 - zb[a] * delta(p, b) / s2
                        + zb[a] * z[b] * zb[p] * (2.0 / s3);
                    for q in 0..n {
                        j.ddbar_h[[p, q, a, b]] = c(-delta(a, b) * delta(p, q) / s2)
                            + zb[p] * z[q] * (2.0 * delta(a, b) / s3)
                            - c(delta(p, b) * delta(a, q) / s2)
                            + zb[a] * z[q] * (2.0 * delta(p, b) / s3)
                            + (z[b] * zb[p] * delta(a, q) + zb[a] * z[b] * delta(p, q)) * (2.0 / s3)
                            - zb[a] * z[b] * zb[p] * z[q] * (6.0 / s4);
                        j.dd_h[[p, q, a, b]] = zb[p] * zb[q] * (2.0 * delta(a, b) / s3)
                            + zb[a] * zb[q] * (2.0 * delta(p, b) / s3)
                            + zb[a] * zb[p] * (2.0 * delta(q, b) / s3)
                            - zb[a] * z[b] * zb[p] * zb[q] * (6.0 / s4);
                    }
                }
            }
        }
        Some(j)
    }
    fn sample_region(&self) -> Region {
        Region::Ball { dim: self.n, radius: 2.0 }
    }
}

/// `h̃ = (4/|z|²)((1+λ)δ_{ij} − λ z̄^i z^j/|z|²)` on `ℂⁿ∖{0}`; `λ = 0` is the
/// standard metric of the Hopf manifold `(ℂⁿ∖{0})/(z ~ z/2)`.
#[derive(Debug)]
struct HopfFamily {
    n: usize,
    lambda: f64,
    canonical: bool,
}

/// Chart of the Hopf models: the closed annulus `1 ≤ |z| ≤ 2` (with rounding slack).
fn in_hopf_chart(z: &[C64]) -> bool {
    let r = norm_sq(z).sqrt();
    (1.0 - 1e-12..=2.0 + 1e-12).contains(&r)
}

impl HopfFamily {
    fn canonical_jet(&self, z: &[C64]) -> MetricJet2 {
        // h = 4δ/r², written with the same operation order as the family at λ = 0.
        let n = self.n;
        let r2 = norm_sq(z);
        let (r4, r6) = (r2 * r2, r2 * r2 * r2);
        let a = 4.0;
        let zb: Vec<C64> = z.iter().map(|w| w.conj()).collect();
        let mut j = MetricJet2::flat(n);
        j.h = CMatrix::from_fn(n, n, |i, k| c(a * delta(i, k) / r2));
        for p in 0..n {
            for i in 0..n {
                for k in 0..n {
                    j.dh[[p, i, k]] = -zb[p] * (a * delta(i, k) / r4);
                    for q in 0..n {
                        j.ddbar_h[[p, q, i, k]] = -(c(delta(p, q) / r4) - zb[p] * z[q] * (2.0 / r6)) * (a * delta(i, k));
                        j.dd_h[[p, q, i, k]] = zb[p] * zb[q] * (2.0 * a * delta(i, k) / r6);
                    }
                }
            }
        }
        j
    }

    fn family_jet(&self, z: &[C64]) -> MetricJet2 {
        let n = self.n;
        let r2 = norm_sq(z);
        let (r4, r6, r8) = (r2 * r2, r2 * r2 * r2, r2 * r2 * r2 * r2);
        let a = 4.0 * (1.0 + self.lambda);
        let b = 4.0 * self.lambda;
        let zb: Vec<C64> = z.iter().map(|w| w.conj()).collect();
        let mut j = MetricJet2::flat(n);
        j.h = self.metric(z);
        for p in 0..n {
            for i in 0..n {
                for k in 0..n {
                    let base = -zb[p] * (a * delta(i, k) / r4);
                    let corr = zb[i] * (delta(p, k) / r4) - zb[i] * z[k] * zb[p] * (2.0 / r6);
                    j.dh[[p, i, k]] = base - corr * b;
                    for q in 0..n {
                        let base = -(c(delta(p, q) / r4) - zb[p] * z[q] * (2.0 / r6)) * (a * delta(i, k));
                        let corr = (c(delta(i, q) / r4) - zb[i] * z[q] * (2.0 / r6)) * delta(p, k)
                            - (z[k] * zb[p] * delta(i, q) + zb[i] * z[k] * delta(p, q)) * (2.0 / r6)
                            + zb[i] * z[k] * zb[p] * z[q] * (6.0 / r8);
                        j.ddbar_h[[p, q, i, k]] = base - corr * b;
                        let base = zb[p] * zb[q] * (2.0 * a * delta(i, k) / r6);
                        let corr = -zb[i] * zb[q] * (2.0 * delta(p, k) / r6) - zb[i] * zb[p] * (2.0 * delta(q, k) / r6)
                            + zb[i] * z[k] * zb[p] * zb[q] * (6.0 / r8);
                        j.dd_h[[p, q, i, k]] = base - corr * b;
                    }
                }
            }
        }
        j
    }
}

impl MetricModel for HopfFamily {
    fn dim(&self) -> usize {
        self.n
    }
    fn in_chart(&self, z: &[C64]) -> bool {
        in_hopf_chart(z)
    }
    fn metric(&self, z: &[C64]) -> CMatrix {
        let r2 = norm_sq(z);
        let (a, b) = (4.0 * (1.0 + self.lambda), 4.0 * self.lambda);
        CMatrix::from_fn(self.n, self.n, |i, k| c(a * delta(i, k) / r2) - z[i].conj() * z[k] * (b / (r2 * r2)))
    }
    fn analytic_jet(&self, z: &[C64]) -> Option<MetricJet2> {
        Some(if self.canonical { self.canonical_jet(z) } else { self.family_jet(z) })
    }
    fn sample_region(&self) -> Region {
        Region::Annulus { dim: self.n, inner: 1.0, outer: 2.0 }
    }
    fn compact_domain(&self) -> Option<Region> {
        Some(self.sample_region())
    }
}

/// Quadratic Hermitian metric
/// `h(z) = A + Σ z^p B_p + z̄^p B_p^† + Σ z^p z̄^q C_{pq} + Σ z^p z^q D_{pq} + z̄^p z̄^q D_{pq}^†`
/// with `C_{qp} = C_{pq}^†` and `D_{pq} = D_{qp}`. Generic, hence non-Kähler.
#[derive(Debug)]
struct RandomHermitian {
    n: usize,
    a: CMatrix,
    b: Vec<CMatrix>,
    c: Vec<CMatrix>,
    d: Vec<CMatrix>,
}

fn random_cmatrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * (2.0 * scale))
}

impl RandomHermitian {
    fn new(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0005_eed0_f4e7_u64);
        let x = random_cmatrix(&mut rng, n, 0.3);
        let a = CMatrix::identity(n, n) * c(2.0) + (&x + x.adjoint()) * c(0.5);
        let b = (0..n).map(|_| random_cmatrix(&mut rng, n, 0.25)).collect();
        let mut cm = vec![CMatrix::zeros(n, n); n * n];
        let mut dm = vec![CMatrix::zeros(n, n); n * n];
        for p in 0..n {
            for q in p..n {
                let g = random_cmatrix(&mut rng, n, 0.25);
                if p == q {
                    cm[p * n + p] = (&g + g.adjoint()) * c(0.5);
                } else {
                    cm[q * n + p] = g.adjoint();
                    cm[p * n + q] = g;
                }
                let e = random_cmatrix(&mut rng, n, 0.15);
                dm[p * n + q] = e.clone();
                dm[q * n + p] = e;
            }
        }
        Self { n, a, b, c: cm, d: dm }
    }
}

impl MetricModel for RandomHermitian {
    fn dim(&self) -> usize {
        self.n
    }
    fn in_chart(&self, z: &[C64]) -> bool {
        norm_sq(z) <= 0.25 + 1e-12
    }
    fn metric(&self, z: &[C64]) -> CMatrix {
        let n = self.n;
        let mut h = self.a.clone();
        for p in 0..n {
            h += &self.b[p] * z[p] + self.b[p].adjoint() * z[p].conj();
            for q in 0..n {
                h += &self.c[p * n + q] * (z[p] * z[q].conj());
                h += &self.d[p * n + q] * (z[p] * z[q]) + self.d[p * n + q].adjoint() * (z[p] * z[q]).conj();
            }
        }
        h
    }
    fn analytic_jet(&self, z: &[C64]) -> Option<MetricJet2> {
        let n = self.n;
        let mut j = MetricJet2::flat(n);
        j.h = self.metric(z);
        for p in 0..n {
            let mut dp = self.b[p].clone();
            for q in 0..n {
                dp += &self.c[p * n + q] * z[q].conj() + &self.d[p * n + q] * (z[q] * 2.0);
            }
            for a in 0..n {
                for b in 0..n {
                    j.dh[[p, a, b]] = dp[(a, b)];
                    for q in 0..n {
                        j.ddbar_h[[p, q, a, b]] = self.c[p * n + q][(a, b)];
                        j.dd_h[[p, q, a, b]] = self.d[p * n + q][(a, b)] * 2.0;
                    }
                }
            }
        }
        Some(j)
    }
    fn sample_region(&self) -> Region {
        Region::Ball { dim: self.n, radius: 0.5 }
    }
}

/// Second-order jet of a real function: `d[p] = ∂_p f`, `ddbar[[p, q]] = ∂_p ∂_q̄ f`,
/// `dd[[p, q]] = ∂_p ∂_q f`.
#[derive(Clone, Debug)]
pub struct WeightJet {
    pub f: f64,
    pub d: Vec<C64>,
    pub ddbar: Tensor<2>,
    pub dd: Tensor<2>,
}

/// A smooth real conformal weight `f` with closed-form derivatives.
pub trait Weight: Send + Sync + std::fmt::Debug {
    fn value(&self, z: &[C64]) -> f64;
    fn jet(&self, z: &[C64]) -> WeightJet;
    /// Whether `f` is invariant under `z ↦ z/2` (so `e^f ω` descends to the Hopf quotient).
    fn dilation_invariant(&self) -> bool {
        false
    }
}

/// `f = c₀ + Re(Σ a_p z^p) + Σ S_{pq} z^p z̄^q + Re(Σ Q_{pq} z^p z^q)`, `S` Hermitian, `Q` symmetric.
#[derive(Clone, Debug)]
pub struct QuadraticWeight {
    pub c0: f64,
    pub a: Vec<C64>,
    pub s: CMatrix,
    pub q: CMatrix,
}

impl QuadraticWeight {
    pub fn random(n: usize, seed: u64, scale: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf00d_u64);
        let a = (0..n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * (2.0 * scale)).collect();
        let s = random_cmatrix(&mut rng, n, scale);
        let q = random_cmatrix(&mut rng, n, scale);
        Self { c0: scale * (rng.random::<f64>() - 0.5), a, s: (&s + s.adjoint()) * c(0.5), q: (&q + q.transpose()) * c(0.5) }
    }

    pub fn zero(n: usize) -> Self {
        Self { c0: 0.0, a: vec![c(0.0); n], s: CMatrix::zeros(n, n), q: CMatrix::zeros(n, n) }
    }
}

impl Weight for QuadraticWeight {
    fn value(&self, z: &[C64]) -> f64 {
        let n = z.len();
        let mut f = self.c0;
        for p in 0..n {
            f += (self.a[p] * z[p]).re;
            for q in 0..n {
                f += (self.s[(p, q)] * z[p] * z[q].conj()).re + (self.q[(p, q)] * z[p] * z[q]).re;
            }
        }
        f
    }
    fn jet(&self, z: &[C64]) -> WeightJet {
        let n = z.len();
        let d = (0..n)
            .map(|p| self.a[p] * 0.5 + (0..n).map(|q| self.s[(p, q)] * z[q].conj() + self.q[(p, q)] * z[q]).sum::<C64>())
            .collect();
        WeightJet {
            f: self.value(z),
            d,
            ddbar: Tensor::from_fn(n, |[p, q]| self.s[(p, q)]),
            dd: Tensor::from_fn(n, |[p, q]| self.q[(p, q)]),
        }
    }
}

/// `f = ε · (Σ S_{ab} z^a z̄^b) / |z|²` with `S` Hermitian; homogeneous of degree 0.
#[derive(Clone, Debug)]
pub struct RatioWeight {
    pub eps: f64,
    pub s: CMatrix,
}

impl RatioWeight {
    /// `f = ε Re(z¹ z̄²)/|z|²`.
    pub fn hopf(n: usize, eps: f64) -> Self {
        let mut s = CMatrix::zeros(n, n);
        s[(0, 1)] = c(0.5);
        s[(1, 0)] = c(0.5);
        Self { eps, s }
    }
}

impl Weight for RatioWeight {
    fn value(&self, z: &[C64]) -> f64 {
        let n = z.len();
        let mut u = C64::default();
        for a in 0..n {
            for b in 0..n {
                u += self.s[(a, b)] * z[a] * z[b].conj();
            }
        }
        self.eps * u.re / norm_sq(z)
    }
    fn jet(&self, z: &[C64]) -> WeightJet {
        let n = z.len();
        let v = norm_sq(z);
        let (v2, v3) = (v * v, v * v * v);
        let mut u = C64::default();
        for a in 0..n {
            for b in 0..n {
                u += self.s[(a, b)] * z[a] * z[b].conj();
            }
        }
        let u = u.re;
        let up: Vec<C64> = (0..n).map(|p| (0..n).map(|b| self.s[(p, b)] * z[b].conj()).sum()).collect();
        let uqb: Vec<C64> = (0..n).map(|q| (0..n).map(|a| self.s[(a, q)] * z[a]).sum()).collect();
        let vp: Vec<C64> = z.iter().map(|w| w.conj()).collect();
        let vqb: Vec<C64> = z.to_vec();
        let e = self.eps;
        WeightJet {
            f: e * u / v,
            d: (0..n).map(|p| (up[p] / v - vp[p] * (u / v2)) * e).collect(),
            ddbar: Tensor::from_fn(n, |[p, q]| {
                (self.s[(p, q)] / v - up[p] * vqb[q] / v2 - uqb[q] * vp[p] / v2 - c(u * delta(p, q) / v2)
                    + vp[p] * vqb[q] * (2.0 * u / v3))
                    * e
            }),
            dd: Tensor::from_fn(n, |[p, q]| {
                (-(up[p] * vp[q]) / v2 - up[q] * vp[p] / v2 + vp[p] * vp[q] * (2.0 * u / v3)) * e
            }),
        }
    }
    fn dilation_invariant(&self) -> bool {
        true
    }
}

/// `e^f · base`.
#[derive(Debug)]
pub struct Conformal {
    pub base: Arc<dyn MetricModel>,
    pub weight: Arc<dyn Weight>,
}

impl MetricModel for Conformal {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn in_chart(&self, z: &[C64]) -> bool {
        self.base.in_chart(z)
    }
    fn metric(&self, z: &[C64]) -> CMatrix {
        self.base.metric(z) * c(self.weight.value(z).exp())
    }
    fn analytic_jet(&self, z: &[C64]) -> Option<MetricJet2> {
        let b = self.base.analytic_jet(z)?;
        let w = self.weight.jet(z);
        let n = b.n;
        let ef = w.f.exp();
        let mut j = MetricJet2::flat(n);
        j.h = &b.h * c(ef);
        for p in 0..n {
            for i in 0..n {
                for k in 0..n {
                    j.dh[[p, i, k]] = (w.d[p] * b.h[(i, k)] + b.dh[[p, i, k]]) * ef;
                    for q in 0..n {
                        let fqb = w.d[q].conj();
                        j.ddbar_h[[p, q, i, k]] = (fqb * w.d[p] * b.h[(i, k)]
                            + w.ddbar[[p, q]] * b.h[(i, k)]
                            + w.d[p] * b.dbar_h(q, i, k)
                            + fqb * b.dh[[p, i, k]]
                            + b.ddbar_h[[p, q, i, k]])
                            * ef;
                        j.dd_h[[p, q, i, k]] = (w.d[q] * w.d[p] * b.h[(i, k)]
                            + w.dd[[p, q]] * b.h[(i, k)]
                            + w.d[p] * b.dh[[q, i, k]]
                            + w.d[q] * b.dh[[p, i, k]]
                            + b.dd_h[[p, q, i, k]])
                            * ef;
                    }
                }
            }
        }
        Some(j)
    }
    fn sample_region(&self) -> Region {
        self.base.sample_region()
    }
    fn compact_domain(&self) -> Option<Region> {
        if self.weight.dilation_invariant() {
            self.base.compact_domain()
        } else {
            None
        }
    }
}

/// Block-diagonal metric on a product of charts.
#[derive(Debug)]
pub struct Product {
    pub factors: Vec<Arc<dyn MetricModel>>,
}

impl Product {
    fn split<'a>(&self, z: &'a [C64]) -> Vec<(usize, &'a [C64])> {
        let mut off = 0;
        self.factors
            .iter()
            .map(|f| {
                let d = f.dim();
                let part = (off, &z[off..off + d]);
                off += d;
                part
            })
            .collect()
    }
}

impl MetricModel for Product {
    fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim()).sum()
    }
    fn in_chart(&self, z: &[C64]) -> bool {
        self.split(z).iter().zip(&self.factors).all(|((_, w), f)| f.in_chart(w))
    }
    fn metric(&self, z: &[C64]) -> CMatrix {
        let n = self.dim();
        let mut h = CMatrix::zeros(n, n);
        for ((off, w), f) in self.split(z).into_iter().zip(&self.factors) {
            let d = f.dim();
            h.view_mut((off, off), (d, d)).copy_from(&f.metric(w));
        }
        h
    }
    fn analytic_jet(&self, z: &[C64]) -> Option<MetricJet2> {
        let n = self.dim();
        let mut j = MetricJet2::flat(n);
        j.h = CMatrix::zeros(n, n);
        for ((off, w), f) in self.split(z).into_iter().zip(&self.factors) {
            let fj = f.analytic_jet(w)?;
            let d = fj.n;
            for a in 0..d {
                for b in 0..d {
                    j.h[(off + a, off + b)] = fj.h[(a, b)];
                    for p in 0..d {
                        j.dh[[off + p, off + a, off + b]] = fj.dh[[p, a, b]];
                        for q in 0..d {
                            j.ddbar_h[[off + p, off + q, off + a, off + b]] = fj.ddbar_h[[p, q, a, b]];
                            j.dd_h[[off + p, off + q, off + a, off + b]] = fj.dd_h[[p, q, a, b]];
                        }
                    }
                }
            }
        }
        Some(j)
    }
    fn sample_region(&self) -> Region {
        Region::Product(self.factors.iter().map(|f| f.sample_region()).collect())
    }
    fn compact_domain(&self) -> Option<Region> {
        self.factors.iter().map(|f| f.compact_domain()).collect::<Option<Vec<_>>>().map(Region::Product)
    }
}

fn need_dim(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min || n > 8 {
        return Err(Error::InvalidParameter(format!("{what} needs {min} ≤ n ≤ 8, got n = {n}")));
    }
    Ok(())
}

fn p(k: &str, v: f64) -> (String, f64) {
    (k.to_string(), v)
}

pub fn flat(n: usize) -> Result<MetricSpec> {
    need_dim(n, 1, "flat")?;
    Ok(MetricSpec::new("flat", vec![p("n", n as f64)], Arc::new(Flat { n })))
}

pub fn fubini_study(n: usize) -> Result<MetricSpec> {
    need_dim(n, 1, "fubini-study")?;
    Ok(MetricSpec::new("fubini-study", vec![p("n", n as f64)], Arc::new(FubiniStudy { n })))
}

/// Standard metric `h = 4δ/|z|²` of the Hopf manifold.
pub fn hopf(n: usize) -> Result<MetricSpec> {
    need_dim(n, 2, "hopf")?;
    Ok(MetricSpec::new("hopf", vec![p("n", n as f64)], Arc::new(HopfFamily { n, lambda: 0.0, canonical: true })))
}

/// `ω̃ = ω₀ + 4λ i∂∂̄ log|z|²`, `λ > −1`.
pub fn hopf_family(n: usize, lambda: f64) -> Result<MetricSpec> {
    need_dim(n, 2, "hopf-family")?;
    if !lambda.is_finite() || lambda <= -1.0 {
        return Err(Error::InvalidParameter(format!("hopf-family needs lambda > -1, got {lambda}")));
    }
    Ok(MetricSpec::new(
        "hopf-family",
        vec![p("n", n as f64), p("lambda", lambda)],
        Arc::new(HopfFamily { n, lambda, canonical: false }),
    ))
}

/// A generic quadratic Hermitian metric on the ball `|z| ≤ 1/2`.
pub fn random_hermitian(n: usize, seed: u64) -> Result<MetricSpec> {
    need_dim(n, 1, "random")?;
    Ok(MetricSpec::new("random", vec![p("n", n as f64), p("seed", seed as f64)], Arc::new(RandomHermitian::new(n, seed))))
}

/// `e^f · spec`.
pub fn conformal(spec: &MetricSpec, weight: Arc<dyn Weight>) -> MetricSpec {
    let model = Arc::new(Conformal { base: spec.model().clone(), weight });
    MetricSpec::new(format!("conformal({})", spec.id()), vec![], model).with_mode(spec.mode)
}

/// `e^f · random(n, seed)` with a random quadratic weight of size `scale`.
pub fn conformal_random(n: usize, seed: u64, scale: f64) -> Result<MetricSpec> {
    let base = random_hermitian(n, seed)?;
    let w = Arc::new(QuadraticWeight::random(n, seed, scale));
    let model = Arc::new(Conformal { base: base.model().clone(), weight: w });
    Ok(MetricSpec::new("conformal", vec![p("n", n as f64), p("seed", seed as f64), p("scale", scale)], model))
}

/// `e^f · ω̃_λ` with the dilation-invariant weight `f = ε Re(z¹z̄²)/|z|²`.
pub fn hopf_conformal(n: usize, lambda: f64, eps: f64) -> Result<MetricSpec> {
    let base = hopf_family(n, lambda)?;
    let model = Arc::new(Conformal { base: base.model().clone(), weight: Arc::new(RatioWeight::hopf(n, eps)) });
    Ok(MetricSpec::new("hopf-conformal", vec![p("n", n as f64), p("lambda", lambda), p("eps", eps)], model))
}

/// Block-diagonal product metric.
pub fn product(a: &MetricSpec, b: &MetricSpec) -> MetricSpec {
    let model = Arc::new(Product { factors: vec![a.model().clone(), b.model().clone()] });
    MetricSpec::new(format!("{}*{}", a.id(), b.id()), vec![], model).with_mode(a.mode)
}

/// One line per catalog entry: id pattern and description.
pub fn entries() -> Vec<(&'static str, &'static str)> {
    vec![
        ("flat:n=N", "Euclidean metric; compact domain is the unit torus cell"),
        ("fubini-study:n=N", "Fubini-Study metric on the affine chart, potential log(1+|z|²)"),
        ("hopf:n=N", "standard Hopf metric 4δ/|z|², chart 1 ≤ |z| ≤ 2"),
        ("hopf-family:n=N,lambda=L", "ω₀ + 4λ i∂∂̄log|z|², λ > -1"),
        ("random:n=N,seed=S", "generic quadratic Hermitian metric on |z| ≤ 1/2"),
        ("conformal:n=N,seed=S[,scale=A]", "random conformal rescaling e^f of random:n=N,seed=S"),
        ("hopf-conformal:n=N,eps=E[,lambda=L]", "e^f ω̃_λ with f = ε Re(z¹z̄²)/|z|²"),
        ("A*B", "product of two entries"),
    ]
}

/// Parses a catalog id such as `hopf-family:n=3,lambda=-0.25` or `hopf:n=2*flat:n=1`.
pub fn parse(id: &str) -> Result<MetricSpec> {
    let id = id.trim();
    if let Some((a, b)) = id.split_once('*') {
        let left = parse(a)?;
        let right = parse(b)?;
        return Ok(product(&left, &right));
    }
    let bad = || Error::BadMetricId(id.to_string());
    let (name, rest) = id.split_once(':').unwrap_or((id, ""));
    let mut kv: Vec<(String, f64)> = Vec::new();
    for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(bad)?;
        let v: f64 = v.trim().parse().map_err(|_| bad())?;
        kv.push((k.trim().to_string(), v));
    }
    let get = |k: &str| kv.iter().find(|(key, _)| key == k).map(|(_, v)| *v);
    let allowed: &[&str] = match name {
        "flat" | "fubini-study" | "hopf" => &["n"],
        "hopf-family" => &["n", "lambda"],
        "random" => &["n", "seed"],
        "conformal" => &["n", "seed", "scale"],
        "hopf-conformal" => &["n", "eps", "lambda"],
        _ => return Err(bad()),
    };
    if let Some((k, _)) = kv.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return Err(Error::InvalidParameter(format!("unknown parameter `{k}` for `{name}`")));
    }
    let int = |k: &str| -> Result<usize> {
        let v = get(k).ok_or_else(|| Error::InvalidParameter(format!("`{name}` needs `{k}`")))?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::InvalidParameter(format!("`{k}` must be a non-negative integer")));
        }
        Ok(v as usize)
    };
    let real = |k: &str| get(k).ok_or_else(|| Error::InvalidParameter(format!("`{name}` needs `{k}`")));
    match name {
        "flat" => flat(int("n")?),
        "fubini-study" => fubini_study(int("n")?),
        "hopf" => hopf(int("n")?),
        "hopf-family" => hopf_family(int("n")?, real("lambda")?),
        "random" => random_hermitian(int("n")?, int("seed")? as u64),
        "conformal" => conformal_random(int("n")?, int("seed")? as u64, get("scale").unwrap_or(0.3)),
        "hopf-conformal" => hopf_conformal(int("n")?, get("lambda").unwrap_or(0.0), real("eps")?),
        _ => Err(bad()),
    }
}

/// Closed-form curvature quantities of the Hopf family `ω̃_λ`.
#[derive(Clone, Copy, Debug)]
pub struct HopfClosedForms {
    pub n: usize,
    pub lambda: f64,
}

impl HopfClosedForms {
    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `i∂∂̄ log|z|²`: `δ_{ij}/|z|² − z̄^i z^j/|z|⁴`.
    pub fn ddbar_log_r2(&self, z: &[C64]) -> Herm11 {
        let r2 = norm_sq(z);
        Herm11(CMatrix::from_fn(self.n, self.n, |i, j| c(delta(i, j) / r2) - z[i].conj() * z[j] / (r2 * r2)))
    }

    pub fn metric(&self, z: &[C64]) -> Herm11 {
        Herm11(HopfFamily { n: self.n, lambda: self.lambda, canonical: false }.metric(z))
    }

    /// `Θ^{(1)} = n i∂∂̄ log|z|²`, independent of λ.
    pub fn chern1(&self, z: &[C64]) -> Herm11 {
        Herm11::combine(&[(self.nf(), &self.ddbar_log_r2(z))])
    }

    /// `𝔯^{(1)} = (n − (n−1)/(1+λ)) i∂∂̄ log|z|²`.
    pub fn lc1(&self, z: &[C64]) -> Herm11 {
        let n = self.nf();
        Herm11::combine(&[(n - (n - 1.0) / (1.0 + self.lambda), &self.ddbar_log_r2(z))])
    }

    /// `½(∂∂*ω̃ + ∂̄∂̄*ω̃) = ((n−1)/(1+λ)) i∂∂̄ log|z|²`.
    pub fn codiff_half(&self, z: &[C64]) -> Herm11 {
        Herm11::combine(&[((self.nf() - 1.0) / (1.0 + self.lambda), &self.ddbar_log_r2(z))])
    }

    pub fn s_chern(&self) -> f64 {
        let n = self.nf();
        n * (n - 1.0) / (4.0 * (1.0 + self.lambda))
    }

    /// `tr_ω̃ 𝔯^{(1)}`.
    pub fn s_lc(&self) -> f64 {
        let n = self.nf();
        (n - (n - 1.0) / (1.0 + self.lambda)) * (n - 1.0) / (4.0 * (1.0 + self.lambda))
    }

    pub fn torsion_norm_sq(&self) -> f64 {
        (self.nf() - 1.0) / (2.0 * (1.0 + self.lambda).powi(2))
    }

    pub fn dstar_norm_sq(&self) -> f64 {
        (self.nf() - 1.0).powi(2) / (4.0 * (1.0 + self.lambda).powi(2))
    }

    /// `⟨∂∂*ω̃ + ∂̄∂̄*ω̃, ω̃⟩`.
    pub fn codiff_trace(&self) -> f64 {
        (self.nf() - 1.0).powi(2) / (2.0 * (1.0 + self.lambda).powi(2))
    }

    /// Riemannian scalar curvature `n(n−1)/(2(1+λ)²) · (λ − (1−2n)/(2n))`.
    pub fn scalar(&self) -> f64 {
        let n = self.nf();
        n * (n - 1.0) / (2.0 * (1.0 + self.lambda).powi(2)) * (self.lambda - (1.0 - 2.0 * n) / (2.0 * n))
    }

    /// λ at which the Riemannian scalar curvature vanishes.
    pub fn zero_scalar_lambda(n: usize) -> f64 {
        (1.0 - 2.0 * n as f64) / (2.0 * n as f64)
    }

    /// λ maximizing the Riemannian scalar curvature, and the maximum `n²(n−1)/4`.
    pub fn max_scalar(n: usize) -> (f64, f64) {
        let nf = n as f64;
        ((1.0 - nf) / nf, nf * nf * (nf - 1.0) / 4.0)
    }
}

/// Ricci forms and scalars of the standard Hopf metric (`λ = 0`).
#[derive(Clone, Copy, Debug)]
pub struct HopfCanonicalForms {
    pub n: usize,
}

impl HopfCanonicalForms {
    fn family(&self) -> HopfClosedForms {
        HopfClosedForms { n: self.n, lambda: 0.0 }
    }
    fn nf(&self) -> f64 {
        self.n as f64
    }
    pub fn chern1(&self, z: &[C64]) -> Herm11 {
        self.family().chern1(z)
    }
    /// `Θ^{(2)} = ((n−1)/4) ω_h`.
    pub fn chern2(&self, z: &[C64]) -> Herm11 {
        Herm11::combine(&[((self.nf() - 1.0) / 4.0, &self.family().metric(z))])
    }
    /// `𝔯^{(1)} = i∂∂̄ log|z|²`.
    pub fn lc1(&self, z: &[C64]) -> Herm11 {
        self.family().ddbar_log_r2(z)
    }
    /// `𝔯^{(2)} = ((4−n)/4) i∂∂̄ log|z|² + ((n−1)/16) ω_h`.
    pub fn lc2(&self, z: &[C64]) -> Herm11 {
        let f = self.family();
        Herm11::combine(&[((4.0 - self.nf()) / 4.0, &f.ddbar_log_r2(z)), ((self.nf() - 1.0) / 16.0, &f.metric(z))])
    }
    /// `Ric_H = ½ i∂∂̄ log|z|²`.
    pub fn ric_h(&self, z: &[C64]) -> Herm11 {
        Herm11::combine(&[(0.5, &self.family().ddbar_log_r2(z))])
    }
    /// `𝓡ic = ((n−1)/2) i∂∂̄ log|z|² + ((n−1)/8) ω_h`.
    pub fn scr_ric(&self, z: &[C64]) -> Herm11 {
        let f = self.family();
        let m = self.nf() - 1.0;
        Herm11::combine(&[(m / 2.0, &f.ddbar_log_r2(z)), (m / 8.0, &f.metric(z))])
    }
    /// `(s, s_R, s_H, s_LC, s_C)`.
    pub fn scalars(&self) -> [f64; 5] {
        let n = self.nf();
        [(2.0 * n - 1.0) * (n - 1.0) / 4.0, (n * n - n) / 8.0, (n - 1.0) / 8.0, (n - 1.0) / 4.0, n * (n - 1.0) / 4.0]
    }
}
