//! Chern, Levi-Civita and complexified Riemannian curvature, their Ricci
//! forms and scalar curvatures, and the `*`-Ricci curvature.

use crate::connection::ConnectionJet;
use crate::forms::{trace11_with, Herm11};
use crate::jets::{CMatrix, MetricJet2};
use crate::tensor::Tensor;
use crate::{Error, Result, C64, I};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvKind {
    Chern,
    LeviCivita,
    RiemannComplexified,
}

/// Rank-4 curvature tensor, `t[[i, j, k, l]] = X_{i j̄ k l̄}`.
#[derive(Clone, Debug)]
pub struct Curv4 {
    pub kind: CurvKind,
    pub t: Tensor<4>,
}

impl Curv4 {
    pub fn dim(&self) -> usize {
        self.t.dim()
    }

    /// `h^{k l̄} X_{i j̄ k l̄}`.
    pub fn ricci_first(&self, hinv: &CMatrix) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| {
            let mut acc = C64::default();
            for k in 0..n {
                for l in 0..n {
                    acc += hinv[(k, l)] * self.t[[i, j, k, l]];
                }
            }
            acc
        })
    }

    /// `h^{k l̄} X_{k l̄ i j̄}`.
    pub fn ricci_second(&self, hinv: &CMatrix) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| {
            let mut acc = C64::default();
            for k in 0..n {
                for l in 0..n {
                    acc += hinv[(k, l)] * self.t[[k, l, i, j]];
                }
            }
            acc
        })
    }

    /// `h^{i j̄} h^{k l̄} X_{i j̄ k l̄}`, before the realness check.
    pub fn full_trace(&self, hinv: &CMatrix) -> C64 {
        let r = self.ricci_first(hinv);
        r.iter().zip(hinv.iter()).map(|(a, b)| a * b).sum()
    }

    /// `max |X_{i j̄ k l̄} − conj(X_{j ī l k̄})|`.
    pub fn conjugation_defect(&self) -> f64 {
        let n = self.dim();
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        m = m.max((self.t[[i, j, k, l]] - self.t[[j, i, l, k]].conj()).norm());
                    }
                }
            }
        }
        m
    }

    /// `max |X_{i j̄ k l̄} − X_{k l̄ i j̄}|`.
    pub fn pair_symmetry_defect(&self) -> f64 {
        let n = self.dim();
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        m = m.max((self.t[[i, j, k, l]] - self.t[[k, l, i, j]]).norm());
                    }
                }
            }
        }
        m
    }
}

/// Accepts a (1,1) coefficient matrix as a real form if it is Hermitian to `1e-9` (relative).
pub fn real_form(m: CMatrix, what: &'static str) -> Result<Herm11> {
    let h = Herm11(m);
    let defect = h.hermitian_defect();
    if defect > 1e-9 * h.max_abs().max(1.0) {
        return Err(Error::NonReal { what, imag: defect });
    }
    Ok(h)
}

fn real_scalar(z: C64, scale: f64, what: &'static str) -> Result<f64> {
    if z.im.abs() > 1e-10 * scale.max(1.0) {
        return Err(Error::NonReal { what, imag: z.im });
    }
    Ok(z.re)
}

/// `Θ_{i j̄ k l̄} = −∂_i ∂_j̄ h_{k l̄} + h^{p q̄} ∂_j̄ h_{p l̄} ∂_i h_{k q̄}`.
pub fn chern_curvature_with(j: &MetricJet2, hinv: &CMatrix) -> Curv4 {
    let n = j.n;
    let t = Tensor::from_fn(n, |[i, jj, k, l]| {
        let mut acc = -j.ddbar_h[[i, jj, k, l]];
        for p in 0..n {
            for q in 0..n {
                acc += hinv[(p, q)] * j.dbar_h(jj, p, l) * j.dh[[i, k, q]];
            }
        }
        acc
    });
    Curv4 { kind: CurvKind::Chern, t }
}

pub fn chern_curvature(j: &MetricJet2) -> Result<Curv4> {
    Ok(chern_curvature_with(j, &crate::jets::inverse_metric(j)?))
}

/// `Θ^{(1)}_{i j̄} = −∂_i ∂_j̄ log det h`, differentiated through Jacobi's formula.
pub fn chern_ricci_log_det(j: &MetricJet2) -> Result<Herm11> {
    let n = j.n;
    crate::jets::check_positive(&j.h)?;
    let hi = j.h.clone().try_inverse().ok_or(Error::NotPositiveDefinite { min: 0.0, max: 0.0 })?;
    let di: Vec<CMatrix> = (0..n).map(|p| CMatrix::from_fn(n, n, |a, b| j.dh[[p, a, b]])).collect();
    let m = CMatrix::from_fn(n, n, |p, q| {
        let dq = CMatrix::from_fn(n, n, |a, b| j.dbar_h(q, a, b));
        let ddpq = CMatrix::from_fn(n, n, |a, b| j.ddbar_h[[p, q, a, b]]);
        -((&hi * ddpq).trace() - (&hi * dq * &hi * &di[p]).trace())
    });
    real_form(m, "Chern-Ricci form")
}

/// Lowered `𝔯_{i j̄ k l̄} = 𝔯^s_{i j̄ k} h_{s l̄}` with
/// `𝔯^ℓ_{i j̄ k} = −(∂_j̄ Γ^ℓ_{ik} − ∂_i Γ^ℓ_{j̄k} + Γ^s_{ik} Γ^ℓ_{j̄s} − Γ^s_{j̄k} Γ^ℓ_{si})`.
pub fn lc_curvature_from(j: &MetricJet2, cj: &ConnectionJet) -> Curv4 {
    let n = j.n;
    let g = &cj.chr.gamma;
    let gb = &cj.chr.gamma_bar;
    let mut up = Tensor::<4>::zeros(n);
    for i in 0..n {
        for jj in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut acc = cj.dbar_gamma[[jj, l, i, k]] - cj.d_gamma_bar[[i, l, jj, k]];
                    for s in 0..n {
                        acc += g[[s, i, k]] * gb[[l, jj, s]] - gb[[s, jj, k]] * g[[l, s, i]];
                    }
                    // up[[i, j, k, ℓ]] = 𝔯^ℓ_{i j̄ k}
                    up[[i, jj, k, l]] = -acc;
                }
            }
        }
    }
    Curv4 { kind: CurvKind::LeviCivita, t: lower_last(&up, &j.h) }
}

fn lower_last(up: &Tensor<4>, h: &CMatrix) -> Tensor<4> {
    let n = up.dim();
    Tensor::from_fn(n, |[i, jj, k, l]| (0..n).map(|s| up[[i, jj, k, s]] * h[(s, l)]).sum())
}

/// `R_{i j̄ k l̄} = 𝔯_{i j̄ k l̄} + h_{p l̄} Γ^p_{s̄ i} conj(Γ^s_{k̄ j})`.
pub fn riemann_complexified_from(j: &MetricJet2, cj: &ConnectionJet, lc: &Curv4) -> Curv4 {
    let n = j.n;
    let gb = &cj.chr.gamma_bar;
    let t = Tensor::from_fn(n, |[i, jj, k, l]| {
        let mut acc = lc.t[[i, jj, k, l]];
        for p in 0..n {
            for s in 0..n {
                acc += j.h[(p, l)] * gb[[p, s, i]] * gb[[s, k, jj]].conj();
            }
        }
        acc
    });
    Curv4 { kind: CurvKind::RiemannComplexified, t }
}

/// The six Ricci forms as real (1,1)-forms.
#[derive(Clone, Debug)]
pub struct RicciSet {
    pub scr_ric: Herm11,
    pub ric_h: Herm11,
    pub lc1: Herm11,
    pub lc2: Herm11,
    pub chern1: Herm11,
    pub chern2: Herm11,
}

impl RicciSet {
    pub fn named(&self) -> [(&'static str, &Herm11); 6] {
        [
            ("scr_ric", &self.scr_ric),
            ("ric_h", &self.ric_h),
            ("lc1", &self.lc1),
            ("lc2", &self.lc2),
            ("chern1", &self.chern1),
            ("chern2", &self.chern2),
        ]
    }
}

/// Riemannian, Riemannian-type, Hermitian, Levi-Civita, Chern and `*` scalar curvatures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalarSet {
    pub s: f64,
    pub s_r: f64,
    pub s_h: f64,
    pub s_lc: f64,
    pub s_c: f64,
    pub s_star: f64,
}

/// Chern, Levi-Civita and complexified Riemannian tensors at one point.
#[derive(Clone, Debug)]
pub struct CurvatureSet {
    pub chern: Curv4,
    pub lc: Curv4,
    pub riemann: Curv4,
}

pub fn curvature_set(j: &MetricJet2, cj: &ConnectionJet) -> CurvatureSet {
    let chern = chern_curvature_with(j, &cj.hinv);
    let lc = lc_curvature_from(j, cj);
    let riemann = riemann_complexified_from(j, cj, &lc);
    CurvatureSet { chern, lc, riemann }
}

/// `𝓡_{i j̄} = 2 h^{k l̄} R_{k j̄ i l̄} − R_{i j̄}`.
pub fn scr_ricci_matrix(r: &Curv4, hinv: &CMatrix) -> CMatrix {
    let n = r.dim();
    let ric_h = r.ricci_first(hinv);
    CMatrix::from_fn(n, n, |i, jj| {
        let mut acc = C64::default();
        for k in 0..n {
            for l in 0..n {
                acc += hinv[(k, l)] * r.t[[k, jj, i, l]];
            }
        }
        acc * 2.0 - ric_h[(i, jj)]
    })
}

/// Ricci forms; `chern1` is taken from `log det h`, the others are traces.
pub fn ricci_set(j: &MetricJet2, hinv: &CMatrix, cs: &CurvatureSet) -> Result<RicciSet> {
    Ok(RicciSet {
        scr_ric: real_form(scr_ricci_matrix(&cs.riemann, hinv), "Riemannian Ricci (1,1)-part")?,
        ric_h: real_form(cs.riemann.ricci_first(hinv), "Hermitian Ricci form")?,
        lc1: real_form(cs.lc.ricci_first(hinv), "first Levi-Civita Ricci form")?,
        lc2: real_form(cs.lc.ricci_second(hinv), "second Levi-Civita Ricci form")?,
        chern1: chern_ricci_log_det(j)?,
        chern2: real_form(cs.chern.ricci_second(hinv), "second Chern-Ricci form")?,
    })
}

/// `[s, s_R, s_H, s_LC, s_C]` straight from the tensors.
pub fn tensor_scalars(hinv: &CMatrix, cs: &CurvatureSet) -> Result<[f64; 5]> {
    let n = hinv.nrows();
    let r = &cs.riemann;
    let scale = r.t.max_abs() * hinv.iter().map(|z| z.norm()).fold(0.0, f64::max).powi(2) * (n * n) as f64;
    let mut s = C64::default();
    let mut s_r = C64::default();
    for i in 0..n {
        for jj in 0..n {
            for k in 0..n {
                for l in 0..n {
                    s += hinv[(i, jj)] * hinv[(k, l)] * (r.t[[i, l, k, jj]] * 2.0 - r.t[[i, jj, k, l]]);
                    s_r += hinv[(i, l)] * hinv[(k, jj)] * r.t[[i, jj, k, l]];
                }
            }
        }
    }
    Ok([
        real_scalar(s * 2.0, scale, "Riemannian scalar curvature")?,
        real_scalar(s_r, scale, "Riemannian-type scalar curvature")?,
        real_scalar(r.full_trace(hinv), scale, "Hermitian scalar curvature")?,
        real_scalar(cs.lc.full_trace(hinv), scale, "Levi-Civita scalar curvature")?,
        real_scalar(cs.chern.full_trace(hinv), scale, "Chern scalar curvature")?,
    ])
}

/// [`tensor_scalars`] plus `s_star` from the `*`-Ricci trace over a real basis
/// (see [`star_scalar`]).
pub fn scalar_set(hinv: &CMatrix, cs: &CurvatureSet, bg: &Background) -> Result<ScalarSet> {
    let [s, s_r, s_h, s_lc, s_c] = tensor_scalars(hinv, cs)?;
    Ok(ScalarSet { s, s_r, s_h, s_lc, s_c, s_star: star_scalar(bg)? })
}

/// Trace of a Ricci form against the metric.
pub fn trace(a: &Herm11, hinv: &CMatrix) -> Result<f64> {
    trace11_with(a, hinv)
}

/// Levi-Civita connection of the complex-bilinear extension of the Riemannian
/// metric to `T_ℂM`, in the frame `(∂_1, …, ∂_n, ∂_1̄, …, ∂_n̄)`.
///
/// Built from the jet with no reference to the Hermitian formulas, so it serves
/// as an independent reference for the complexified tensor.
/// `riem[[a, b, c, d]] = g(R(∂_a, ∂_b) ∂_c, ∂_d)` with `R(X,Y) = [∇_X, ∇_Y] − ∇_{[X,Y]}`.
#[derive(Clone, Debug)]
pub struct Background {
    pub n: usize,
    pub g: CMatrix,
    pub ginv: CMatrix,
    pub riem: Tensor<4>,
}

impl Background {
    pub fn from_jet(j: &MetricJet2) -> Result<Self> {
        let n = j.n;
        let m = 2 * n;
        // g_{AB} and its derivatives, via ∂_C h_{i j̄} and ∂_C ∂_D h_{i j̄}.
        let pair = |a: usize, b: usize| -> Option<(usize, usize)> {
            match (a < n, b < n) {
                (true, false) => Some((a, b - n)),
                (false, true) => Some((b, a - n)),
                _ => None,
            }
        };
        let d1 = |c: usize, i: usize, k: usize| if c < n { j.dh[[c, i, k]] } else { j.dbar_h(c - n, i, k) };
        let d2 = |c: usize, d: usize, i: usize, k: usize| match (c < n, d < n) {
            (true, true) => j.dd_h[[c, d, i, k]],
            (true, false) => j.ddbar_h[[c, d - n, i, k]],
            (false, true) => j.ddbar_h[[d, c - n, i, k]],
            (false, false) => j.dbar_dbar_h(c - n, d - n, i, k),
        };
        let g = CMatrix::from_fn(m, m, |a, b| pair(a, b).map_or(C64::default(), |(i, k)| j.h[(i, k)]));
        let dg = Tensor::<3>::from_fn(m, |[c, a, b]| pair(a, b).map_or(C64::default(), |(i, k)| d1(c, i, k)));
        let ddg = Tensor::<4>::from_fn(m, |[c, d, a, b]| pair(a, b).map_or(C64::default(), |(i, k)| d2(c, d, i, k)));
        let ginv = g.clone().try_inverse().ok_or(Error::NotPositiveDefinite { min: 0.0, max: 0.0 })?;
        // Γ_{D B C} = ½(∂_B g_{CD} + ∂_C g_{BD} − ∂_D g_{BC}) and its derivatives.
        let low = Tensor::<3>::from_fn(m, |[d, b, c]| (dg[[b, c, d]] + dg[[c, b, d]] - dg[[d, b, c]]) * 0.5);
        let gamma = Tensor::<3>::from_fn(m, |[a, b, c]| (0..m).map(|d| ginv[(a, d)] * low[[d, b, c]]).sum());
        // ∂_E g^{AD} = −g^{AP} ∂_E g_{PQ} g^{QD}
        let dginv: Vec<CMatrix> = (0..m)
            .map(|e| {
                let de = CMatrix::from_fn(m, m, |p, q| dg[[e, p, q]]);
                -(&ginv * de * &ginv)
            })
            .collect();
        let mut dgamma = Tensor::<4>::zeros(m);
        for e in 0..m {
            for a in 0..m {
                for b in 0..m {
                    for c in b..m {
                        let mut acc = C64::default();
                        for d in 0..m {
                            let dlow = (ddg[[e, b, c, d]] + ddg[[e, c, b, d]] - ddg[[e, d, b, c]]) * 0.5;
                            acc += dginv[e][(a, d)] * low[[d, b, c]] + ginv[(a, d)] * dlow;
                        }
                        dgamma[[e, a, b, c]] = acc;
                        dgamma[[e, a, c, b]] = acc;
                    }
                }
            }
        }
        // R(∂_A, ∂_B)∂_C = (∂_A Γ^E_{BC} − ∂_B Γ^E_{AC} + Γ^D_{BC} Γ^E_{AD} − Γ^D_{AC} Γ^E_{BD}) ∂_E
        let mut up = Tensor::<4>::zeros(m);
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for e in 0..m {
                        let mut acc = dgamma[[a, e, b, c]] - dgamma[[b, e, a, c]];
                        for d in 0..m {
                            acc += gamma[[d, b, c]] * gamma[[e, a, d]] - gamma[[d, a, c]] * gamma[[e, b, d]];
                        }
                        up[[a, b, c, e]] = acc;
                    }
                }
            }
        }
        let riem = Tensor::from_fn(m, |[a, b, c, d]| (0..m).map(|e| up[[a, b, c, e]] * g[(e, d)]).sum());
        Ok(Self { n, g, ginv, riem })
    }

    /// `R(u, v, w, x)` for vectors given in the complex frame.
    pub fn eval(&self, u: &[C64], v: &[C64], w: &[C64], x: &[C64]) -> C64 {
        let m = 2 * self.n;
        let mut acc = C64::default();
        for a in 0..m {
            if u[a] == C64::default() {
                continue;
            }
            for b in 0..m {
                if v[b] == C64::default() {
                    continue;
                }
                let ab = u[a] * v[b];
                for c in 0..m {
                    let abc = ab * w[c];
                    for d in 0..m {
                        acc += abc * x[d] * self.riem[[a, b, c, d]];
                    }
                }
            }
        }
        acc
    }

    /// `Ric_{BC} = g^{AD} R_{A B C D}`.
    pub fn ricci(&self) -> CMatrix {
        let m = 2 * self.n;
        CMatrix::from_fn(m, m, |b, c| {
            let mut acc = C64::default();
            for a in 0..m {
                for d in 0..m {
                    acc += self.ginv[(a, d)] * self.riem[[a, b, c, d]];
                }
            }
            acc
        })
    }

    pub fn scalar(&self) -> Result<f64> {
        let r = self.ricci();
        let s: C64 = r.iter().zip(self.ginv.iter()).map(|(a, b)| a * b).sum();
        real_scalar(s, r.iter().map(|z| z.norm()).fold(0.0, f64::max) * self.n as f64, "background scalar curvature")
    }

    /// `𝓡_{i j̄} = Ric(∂_i, ∂_j̄)`.
    pub fn ricci_11(&self) -> Result<Herm11> {
        let n = self.n;
        let r = self.ricci();
        real_form(CMatrix::from_fn(n, n, |i, jj| r[(i, n + jj)]), "background Ricci (1,1)-part")
    }

    /// `R_{a b c d}` with index types chosen by `bars` (true = antiholomorphic).
    pub fn component(&self, idx: [usize; 4], bars: [bool; 4]) -> C64 {
        let k = |t: usize| if bars[t] { idx[t] + self.n } else { idx[t] };
        self.riem[[k(0), k(1), k(2), k(3)]]
    }

    /// Real coordinate vectors `∂/∂x^a` (`a < n`) and `∂/∂y^a` in the complex frame.
    pub fn real_basis(&self) -> Vec<Vec<C64>> {
        let n = self.n;
        (0..2 * n)
            .map(|al| {
                let mut v = vec![C64::default(); 2 * n];
                if al < n {
                    v[al] = C64::new(1.0, 0.0);
                    v[al + n] = C64::new(1.0, 0.0);
                } else {
                    v[al - n] = I;
                    v[al] = -I;
                }
                v
            })
            .collect()
    }

    /// Real vector `(x^1..x^n, y^1..y^n)` written in the complex frame.
    pub fn complexify(&self, x: &[f64]) -> Vec<C64> {
        let n = self.n;
        let mut v = vec![C64::default(); 2 * n];
        for a in 0..n {
            v[a] = C64::new(x[a], x[n + a]);
            v[n + a] = C64::new(x[a], -x[n + a]);
        }
        v
    }

    /// Complex structure: `J∂_a = i∂_a`, `J∂_ā = −i∂_ā`.
    pub fn apply_j(&self, v: &[C64]) -> Vec<C64> {
        v.iter().enumerate().map(|(a, x)| if a < self.n { I * x } else { -I * x }).collect()
    }

    /// Gram matrix of the real coordinate basis.
    pub fn real_metric(&self) -> nalgebra::DMatrix<f64> {
        let basis = self.real_basis();
        let m = 2 * self.n;
        nalgebra::DMatrix::from_fn(m, m, |a, b| {
            let mut acc = C64::default();
            for p in 0..m {
                for q in 0..m {
                    acc += basis[a][p] * basis[b][q] * self.g[(p, q)];
                }
            }
            acc.re
        })
    }
}

/// `Ric*(X, Y) = Σ_{α,β} G^{αβ} R(e_α, X, JY, J e_β)` over the real coordinate basis.
pub fn star_ricci(bg: &Background, x: &[f64], y: &[f64]) -> Result<f64> {
    let xs = bg.complexify(x);
    let jy = bg.apply_j(&bg.complexify(y));
    let basis = bg.real_basis();
    let ginv = bg.real_metric().try_inverse().ok_or(Error::NotPositiveDefinite { min: 0.0, max: 0.0 })?;
    let m = 2 * bg.n;
    let mut acc = C64::default();
    for a in 0..m {
        for b in 0..m {
            acc += bg.eval(&basis[a], &xs, &jy, &bg.apply_j(&basis[b])) * ginv[(a, b)];
        }
    }
    real_scalar(acc, acc.norm(), "*-Ricci curvature")
}

/// The complex form `i h^{k l̄} R(∂_k, ∂_l̄, X, JY)` of the `*`-Ricci curvature.
pub fn star_ricci_complex(bg: &Background, hinv: &CMatrix, x: &[f64], y: &[f64]) -> C64 {
    let n = bg.n;
    let xs = bg.complexify(x);
    let jy = bg.apply_j(&bg.complexify(y));
    let mut acc = C64::default();
    for k in 0..n {
        for l in 0..n {
            let mut ek = vec![C64::default(); 2 * n];
            let mut el = vec![C64::default(); 2 * n];
            ek[k] = C64::new(1.0, 0.0);
            el[n + l] = C64::new(1.0, 0.0);
            acc += hinv[(k, l)] * bg.eval(&ek, &el, &xs, &jy);
        }
    }
    I * acc
}

/// `2n × 2n` matrix of `Ric*` on the real coordinate basis.
pub fn star_ricci_matrix(bg: &Background) -> Result<nalgebra::DMatrix<f64>> {
    let m = 2 * bg.n;
    let mut out = nalgebra::DMatrix::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            let mut x = vec![0.0; m];
            let mut y = vec![0.0; m];
            x[a] = 1.0;
            y[b] = 1.0;
            out[(a, b)] = star_ricci(bg, &x, &y)?;
        }
    }
    Ok(out)
}

/// `s* = Σ G^{αβ} Ric*(e_α, e_β)`.
pub fn star_scalar(bg: &Background) -> Result<f64> {
    let ginv = bg.real_metric().try_inverse().ok_or(Error::NotPositiveDefinite { min: 0.0, max: 0.0 })?;
    let rs = star_ricci_matrix(bg)?;
    Ok(rs.component_mul(&ginv).sum())
}

/// Residual of the first Bianchi identity `R_{i j̄ k l̄} + R_{i k l̄ j̄} + R_{i l̄ j̄ k} = 0`,
/// combining the Hermitian-route tensor with the mixed components of the background.
pub fn bianchi_defect(r: &Curv4, bg: &Background) -> f64 {
    let n = r.dim();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for jj in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mixed = bg.component([i, k, l, jj], [false, false, true, true]);
                    // R_{i l̄ j̄ k} = −R_{i l̄ k j̄}
                    let v = r.t[[i, jj, k, l]] + mixed - r.t[[i, l, k, jj]];
                    m = m.max(v.norm());
                }
            }
        }
    }
    m
}

/// `max |R_{i j̄ k l̄}(Hermitian route) − R_{i j̄ k l̄}(background)|`.
pub fn background_defect(r: &Curv4, bg: &Background) -> f64 {
    let n = r.dim();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for jj in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let b = bg.component([i, jj, k, l], [false, true, false, true]);
                    m = m.max((r.t[[i, jj, k, l]] - b).norm());
                }
            }
        }
    }
    m
}
