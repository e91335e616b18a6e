//! Christoffel symbols of the induced Levi-Civita connection on `T^{1,0}`,
//! torsion, the codifferentials of `ω` and the (1,1)-forms built from them.

use crate::forms::{Herm11, PQForm};
use crate::jets::{evaluate_jet, inverse_metric, numeric_first_order, CMatrix, JetMode, MetricJet2, MetricSpec, FD_STEPS};
use crate::tensor::Tensor;
use crate::{Result, C64, I};

/// `gamma[[k, i, j]] = Γ^k_{ij}`, `gamma_bar[[k, j, i]] = Γ^k_{j̄ i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffels {
    pub gamma: Tensor<3>,
    pub gamma_bar: Tensor<3>,
}

/// Christoffel symbols with their first derivatives.
///
/// Derivative index first: `dbar_gamma[[m, k, i, j]] = ∂_m̄ Γ^k_{ij}`,
/// `d_gamma[[m, k, i, j]] = ∂_m Γ^k_{ij}`, `d_gamma_bar[[m, k, j, i]] = ∂_m Γ^k_{j̄ i}`,
/// `dbar_gamma_bar[[m, k, j, i]] = ∂_m̄ Γ^k_{j̄ i}`.
#[derive(Clone, Debug)]
pub struct ConnectionJet {
    pub hinv: CMatrix,
    pub chr: Christoffels,
    pub dbar_gamma: Tensor<4>,
    pub d_gamma: Tensor<4>,
    pub d_gamma_bar: Tensor<4>,
    pub dbar_gamma_bar: Tensor<4>,
}

/// `∂_m h^{k l̄}` (`holo = true`) or `∂_m̄ h^{k l̄}`.
fn d_inverse(j: &MetricJet2, hinv: &CMatrix, holo: bool) -> Tensor<3> {
    let n = j.n;
    let mut out = Tensor::zeros(n);
    for m in 0..n {
        let dm = CMatrix::from_fn(n, n, |b, a| if holo { j.dh[[m, b, a]] } else { j.dbar_h(m, b, a) });
        // −h^{k ā} ∂h_{b ā} h^{b l̄}
        let prod = hinv * dm.transpose() * hinv;
        for k in 0..n {
            for l in 0..n {
                out[[m, k, l]] = -prod[(k, l)];
            }
        }
    }
    out
}

pub fn lc_christoffels(j: &MetricJet2) -> Result<Christoffels> {
    let hinv = inverse_metric(j)?;
    Ok(christoffels_with(j, &hinv))
}

fn christoffels_with(j: &MetricJet2, hinv: &CMatrix) -> Christoffels {
    let n = j.n;
    let mut gamma = Tensor::zeros(n);
    let mut gamma_bar = Tensor::zeros(n);
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                let mut g = C64::new(0.0, 0.0);
                let mut gb = C64::new(0.0, 0.0);
                for l in 0..n {
                    g += hinv[(k, l)] * (j.dh[[a, b, l]] + j.dh[[b, a, l]]);
                    // Γ^k_{ā b} = ½ h^{k l̄} (∂_ā h_{b l̄} − ∂_l̄ h_{b ā})
                    gb += hinv[(k, l)] * (j.dbar_h(a, b, l) - j.dbar_h(l, b, a));
                }
                gamma[[k, a, b]] = g * 0.5;
                gamma_bar[[k, a, b]] = gb * 0.5;
            }
        }
    }
    Christoffels { gamma, gamma_bar }
}

pub fn connection_jet(j: &MetricJet2) -> Result<ConnectionJet> {
    let n = j.n;
    let hinv = inverse_metric(j)?;
    let chr = christoffels_with(j, &hinv);
    let dhinv = d_inverse(j, &hinv, true);
    let dbhinv = d_inverse(j, &hinv, false);
    let mut dbar_gamma = Tensor::zeros(n);
    let mut d_gamma = Tensor::zeros(n);
    let mut d_gamma_bar = Tensor::zeros(n);
    let mut dbar_gamma_bar = Tensor::zeros(n);
    for m in 0..n {
        for k in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let (mut x1, mut x2, mut x3, mut x4) = (C64::default(), C64::default(), C64::default(), C64::default());
                    for l in 0..n {
                        let sym = j.dh[[a, b, l]] + j.dh[[b, a, l]];
                        let skew = j.dbar_h(a, b, l) - j.dbar_h(l, b, a);
                        x1 += dbhinv[[m, k, l]] * sym + hinv[(k, l)] * (j.ddbar_h[[a, m, b, l]] + j.ddbar_h[[b, m, a, l]]);
                        x2 += dhinv[[m, k, l]] * sym + hinv[(k, l)] * (j.dd_h[[m, a, b, l]] + j.dd_h[[m, b, a, l]]);
                        x3 += dhinv[[m, k, l]] * skew + hinv[(k, l)] * (j.ddbar_h[[m, a, b, l]] - j.ddbar_h[[m, l, b, a]]);
                        x4 += dbhinv[[m, k, l]] * skew
                            + hinv[(k, l)] * (j.dbar_dbar_h(m, a, b, l) - j.dbar_dbar_h(m, l, b, a));
                    }
                    dbar_gamma[[m, k, a, b]] = x1 * 0.5;
                    d_gamma[[m, k, a, b]] = x2 * 0.5;
                    d_gamma_bar[[m, k, a, b]] = x3 * 0.5;
                    dbar_gamma_bar[[m, k, a, b]] = x4 * 0.5;
                }
            }
        }
    }
    Ok(ConnectionJet { hinv, chr, dbar_gamma, d_gamma, d_gamma_bar, dbar_gamma_bar })
}

/// `t[[k, i, j]] = T^k_{ij} = h^{k l̄}(∂_i h_{j l̄} − ∂_j h_{i l̄})`.
#[derive(Clone, Debug, PartialEq)]
pub struct Torsion {
    pub t: Tensor<3>,
}

impl Torsion {
    pub fn max_abs(&self) -> f64 {
        self.t.max_abs()
    }
}

pub fn torsion(j: &MetricJet2) -> Result<Torsion> {
    let hinv = inverse_metric(j)?;
    Ok(torsion_with(j, &hinv))
}

pub fn torsion_with(j: &MetricJet2, hinv: &CMatrix) -> Torsion {
    let n = j.n;
    let mut t = Tensor::zeros(n);
    for k in 0..n {
        for a in 0..n {
            for b in (a + 1)..n {
                let v: C64 = (0..n).map(|l| hinv[(k, l)] * (j.dh[[a, b, l]] - j.dh[[b, a, l]])).sum();
                t[[k, a, b]] = v;
                t[[k, b, a]] = -v;
            }
        }
    }
    Torsion { t }
}

/// `T∘T̄`, `T⊡T̄` and `|T|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionProducts {
    pub circ: Herm11,
    pub boxdot: Herm11,
    pub norm_sq: f64,
}

/// `(T∘T̄)_{i j̄} = h^{p q̄} h^{s t̄} h_{k j̄} h_{i l̄} T^k_{sp} conj(T^l_{tq})`,
/// `(T⊡T̄)_{i j̄} = h^{p q̄} h_{k l̄} T^k_{ip} conj(T^l_{jq})`,
/// `|T|² = h^{i ā} h^{p q̄} h_{k l̄} T^k_{ip} conj(T^l_{aq})`.
pub fn torsion_products(j: &MetricJet2, t: &Torsion) -> Result<TorsionProducts> {
    let hinv = inverse_metric(j)?;
    Ok(torsion_products_with(j, &hinv, t))
}

pub fn torsion_products_with(j: &MetricJet2, hinv: &CMatrix, t: &Torsion) -> TorsionProducts {
    let n = j.n;
    let h = &j.h;
    // Lowered torsion T_{ip l̄} := h_{k l̄} T^k_{ip}.
    let low = Tensor::<3>::from_fn(n, |[i, p, l]| (0..n).map(|k| h[(k, l)] * t.t[[k, i, p]]).sum());
    let boxdot = CMatrix::from_fn(n, n, |i, jj| {
        let mut acc = C64::default();
        for p in 0..n {
            for q in 0..n {
                for l in 0..n {
                    acc += hinv[(p, q)] * low[[i, p, l]] * t.t[[l, jj, q]].conj();
                }
            }
        }
        acc
    });
    // M_{k l} = h^{p q̄} h^{s t̄} T^k_{sp} conj(T^l_{tq})
    let mut mkl = CMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            let mut acc = C64::default();
            for s in 0..n {
                for tt in 0..n {
                    for p in 0..n {
                        for q in 0..n {
                            acc += hinv[(p, q)] * hinv[(s, tt)] * t.t[[k, s, p]] * t.t[[l, tt, q]].conj();
                        }
                    }
                }
            }
            mkl[(k, l)] = acc;
        }
    }
    let circ = CMatrix::from_fn(n, n, |i, jj| {
        let mut acc = C64::default();
        for k in 0..n {
            for l in 0..n {
                acc += h[(k, jj)] * h[(i, l)] * mkl[(k, l)];
            }
        }
        acc
    });
    // Full tensor norm h^{i ā} h^{p q̄} h_{k l̄} T^k_{ip} conj(T^l_{aq}), independent of either trace.
    let mut norm = C64::default();
    for i in 0..n {
        for a in 0..n {
            for p in 0..n {
                for q in 0..n {
                    let w = hinv[(i, a)] * hinv[(p, q)];
                    for l in 0..n {
                        norm += w * low[[i, p, l]] * t.t[[l, a, q]].conj();
                    }
                }
            }
        }
    }
    let norm_sq = norm.re;
    TorsionProducts { circ: Herm11(circ), boxdot: Herm11(boxdot), norm_sq }
}

/// `γ_j = Γ^k_{j̄ k}`.
pub fn gamma_trace(chr: &Christoffels) -> Vec<C64> {
    let n = chr.gamma.dim();
    (0..n).map(|jj| (0..n).map(|k| chr.gamma_bar[[k, jj, k]]).sum()).collect()
}

/// `∂*ω = −2i Γ^k_{j̄ k} dz̄^j`.
pub fn dstar_omega(j: &MetricJet2) -> Result<PQForm> {
    Ok(dstar_from_gamma(&gamma_trace(&lc_christoffels(j)?)))
}

pub fn dstar_from_gamma(g: &[C64]) -> PQForm {
    let n = g.len();
    let mut f = PQForm::zero(n, 0, 1).unwrap();
    for (jj, v) in g.iter().enumerate() {
        f.set(&[], &[jj], -I * 2.0 * v);
    }
    f
}

/// `∂̄*ω = 2i conj(Γ^k_{ī k}) dz^i`, the conjugate of [`dstar_omega`].
pub fn dbar_star_omega(j: &MetricJet2) -> Result<PQForm> {
    Ok(dstar_omega(j)?.conj())
}

/// Derivatives of the trace field `γ_j` at a point: `d[[i, j]] = ∂_i γ_j`,
/// `dbar[[i, j]] = ∂_ī γ_j`.
#[derive(Clone, Debug)]
pub struct GammaTraceJet {
    pub gamma: Vec<C64>,
    pub d: Tensor<2>,
    pub dbar: Tensor<2>,
}

pub fn gamma_trace_jet(cj: &ConnectionJet) -> GammaTraceJet {
    let n = cj.hinv.nrows();
    let gamma = gamma_trace(&cj.chr);
    let d = Tensor::from_fn(n, |[i, jj]| (0..n).map(|k| cj.d_gamma_bar[[i, k, jj, k]]).sum());
    let dbar = Tensor::from_fn(n, |[i, jj]| (0..n).map(|k| cj.dbar_gamma_bar[[i, k, jj, k]]).sum());
    GammaTraceJet { gamma, d, dbar }
}

/// Same as [`gamma_trace_jet`], differentiating `γ` by central differences of
/// first-order numeric jets.
pub fn gamma_trace_jet_numeric(spec: &MetricSpec, z: &[C64]) -> Result<GammaTraceJet> {
    let model = spec.model().as_ref();
    let n = z.len();
    let gamma_at = |w: &[C64]| -> Result<Vec<C64>> {
        let (h, dh) = numeric_first_order(model, w);
        let j = MetricJet2 { n, h, dh, ddbar_h: Tensor::zeros(n), dd_h: Tensor::zeros(n) };
        Ok(gamma_trace(&lc_christoffels(&j)?))
    };
    let gamma = gamma_at(z)?;
    let mut dx = vec![vec![C64::default(); n]; 2 * n];
    for (a, row) in dx.iter_mut().enumerate() {
        let mut est = Vec::with_capacity(2);
        for s in FD_STEPS {
            let mut wp = z.to_vec();
            let mut wm = z.to_vec();
            if a < n {
                wp[a].re += s;
                wm[a].re -= s;
            } else {
                wp[a - n].im += s;
                wm[a - n].im -= s;
            }
            let gp = gamma_at(&wp)?;
            let gm = gamma_at(&wm)?;
            est.push(gp.iter().zip(&gm).map(|(x, y)| (x - y) / (2.0 * s)).collect::<Vec<_>>());
        }
        for jj in 0..n {
            row[jj] = (est[1][jj] * 4.0 - est[0][jj]) / 3.0;
        }
    }
    let d = Tensor::from_fn(n, |[i, jj]| (dx[i][jj] - I * dx[n + i][jj]) * 0.5);
    let dbar = Tensor::from_fn(n, |[i, jj]| (dx[i][jj] + I * dx[n + i][jj]) * 0.5);
    Ok(GammaTraceJet { gamma, d, dbar })
}

fn trace_jet(spec: &MetricSpec, z: &[C64]) -> Result<GammaTraceJet> {
    match spec.mode {
        JetMode::Analytic => Ok(gamma_trace_jet(&connection_jet(&evaluate_jet(spec, z)?)?)),
        JetMode::Numeric => {
            spec.check_point(z)?;
            gamma_trace_jet_numeric(spec, z)
        }
    }
}

/// `½(∂∂*ω + ∂̄∂̄*ω)` as a real (1,1)-form.
///
/// With `∂*ω = −2i γ_j dz̄^j` this is `α_{i j̄} = −(∂_i γ_j + conj(∂_j γ_i))`.
pub fn codiff_second_order(spec: &MetricSpec, z: &[C64]) -> Result<Herm11> {
    Ok(codiff_from_trace_jet(&trace_jet(spec, z)?))
}

pub fn codiff_from_trace_jet(g: &GammaTraceJet) -> Herm11 {
    let n = g.gamma.len();
    Herm11(CMatrix::from_fn(n, n, |i, jj| -(g.d[[i, jj]] + g.d[[jj, i]].conj())))
}

/// `∂∂̄*ω`, the (2,0)-form `Σ_{i,j} ∂_j g_i dz^j ∧ dz^i` with `g_i = 2i conj(γ_i)`.
pub fn del_dbar_star_omega(spec: &MetricSpec, z: &[C64]) -> Result<PQForm> {
    Ok(del_dbar_star_from_trace_jet(&trace_jet(spec, z)?))
}

pub fn del_dbar_star_from_trace_jet(g: &GammaTraceJet) -> PQForm {
    let n = g.gamma.len();
    let mut f = PQForm::zero(n, 2, 0).unwrap_or_else(|_| PQForm::zero(n, 0, 0).unwrap());
    if n < 2 {
        return f;
    }
    for a in 0..n {
        for b in (a + 1)..n {
            // coefficient of dz^a∧dz^b: ∂_a g_b − ∂_b g_a, ∂_a g_b = 2i conj(∂_ā γ_b)
            let v = (g.dbar[[a, b]].conj() - g.dbar[[b, a]].conj()) * (I * 2.0);
            f.set(&[a, b], &[], v);
        }
    }
    f
}

/// Raises the index of a (0,1)-form: `v^i = h^{i s̄} f_s̄`.
pub fn sharp(f: &PQForm, j: &MetricJet2) -> Result<Vec<C64>> {
    Ok(sharp_with(f, &inverse_metric(j)?))
}

pub fn sharp_with(f: &PQForm, hinv: &CMatrix) -> Vec<C64> {
    let n = f.dim();
    (0..n).map(|i| (0..n).map(|s| hinv[(i, s)] * f.get(&[], &[s])).sum()).collect()
}

/// Inverse of [`sharp`]: `f_s̄ = h_{i s̄} v^i`.
pub fn flat(v: &[C64], j: &MetricJet2) -> PQForm {
    let n = j.n;
    let mut f = PQForm::zero(n, 0, 1).unwrap();
    for s in 0..n {
        f.set(&[], &[s], (0..n).map(|i| j.h[(i, s)] * v[i]).sum());
    }
    f
}

/// `B_{i j̄} = h_{k j̄} T^k_{p i} v^p`, the plain coefficient of `dz^i ∧ dz̄^j` in `T(v)`.
pub fn torsion_apply_vector(t: &Torsion, v: &[C64], j: &MetricJet2) -> CMatrix {
    let n = j.n;
    CMatrix::from_fn(n, n, |i, jj| {
        let mut acc = C64::default();
        for k in 0..n {
            for p in 0..n {
                acc += j.h[(k, jj)] * t.t[[k, p, i]] * v[p];
            }
        }
        acc
    })
}

/// `½(β + β̄)` for `β = B_{i j̄} dz^i ∧ dz̄^j`, as a real (1,1)-form.
pub fn real_part_form(b: &CMatrix) -> Herm11 {
    Herm11((b - b.adjoint()) * (-I * 0.5))
}
