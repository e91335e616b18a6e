//! Pointwise exterior algebra of (p,q)-forms.
//!
//! A form stores one coefficient per pair of strictly increasing index sets
//! `(I, J)`, the coefficient of `dz^I ∧ dz̄^J`. With the `1/(p!q!)` expansion
//! over all index tuples this equals the fully antisymmetric component
//! `φ_{I J̄}`. Index sets are bitmasks.

use crate::jets::{CMatrix, MetricJet2};
use crate::{Error, Result, C64, I};
use std::sync::OnceLock;

const MAX_DIM: usize = 12;

struct Subsets {
    /// `by_size[k]` lists all k-subsets of `0..n` in lexicographic rank order.
    by_size: Vec<Vec<u32>>,
    /// Rank of a mask within its size class.
    rank: Vec<usize>,
}

fn subsets(n: usize) -> &'static Subsets {
    static TABLES: [OnceLock<Subsets>; MAX_DIM + 1] = [const { OnceLock::new() }; MAX_DIM + 1];
    assert!(n <= MAX_DIM, "dimension {n} too large for dense forms");
    TABLES[n].get_or_init(|| {
        let mut by_size = vec![Vec::new(); n + 1];
        for m in 0u32..(1u32 << n) {
            by_size[m.count_ones() as usize].push(m);
        }
        for v in by_size.iter_mut() {
            v.sort_by_key(|&m| lex_key(m, n));
        }
        let mut rank = vec![0; 1 << n];
        for v in &by_size {
            for (r, &m) in v.iter().enumerate() {
                rank[m as usize] = r;
            }
        }
        Subsets { by_size, rank }
    })
}

fn lex_key(m: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| m >> i & 1 == 1).collect()
}

/// `(-1)^{#{(a,b) : a ∈ A, b ∈ B, a > b}}`, the sign of `dz^A ∧ dz^B = ± dz^{A∪B}`.
#[inline]
fn merge_sign(a: u32, b: u32) -> f64 {
    let mut count = 0;
    let mut bb = b;
    while bb != 0 {
        let k = bb.trailing_zeros();
        count += (a >> (k + 1)).count_ones();
        bb &= bb - 1;
    }
    if count % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(-1)^{#{a ∈ A : a < k}}`.
#[inline]
fn insert_sign(k: usize, a: u32) -> f64 {
    if (a & ((1u32 << k) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PQForm {
    n: usize,
    p: usize,
    q: usize,
    coeffs: Vec<C64>,
}

impl PQForm {
    pub fn zero(n: usize, p: usize, q: usize) -> Result<Self> {
        if p > n || q > n {
            return Err(Error::DegreeOverflow { p, q, n });
        }
        let len = subsets(n).by_size[p].len() * subsets(n).by_size[q].len();
        Ok(Self { n, p, q, coeffs: vec![C64::new(0.0, 0.0); len] })
    }

    /// The constant function 1.
    pub fn one(n: usize) -> Self {
        let mut f = Self::zero(n, 0, 0).unwrap();
        f.coeffs[0] = C64::new(1.0, 0.0);
        f
    }

    /// `ω = i h_{i j̄} dz^i ∧ dz̄^j`.
    pub fn kahler_form(h: &CMatrix) -> Self {
        Herm11(h.clone()).to_form()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    fn ncols(&self) -> usize {
        subsets(self.n).by_size[self.q].len()
    }

    /// Coefficient for index lists in any order, with antisymmetry applied.
    pub fn get(&self, hol: &[usize], antihol: &[usize]) -> C64 {
        assert_eq!((hol.len(), antihol.len()), (self.p, self.q));
        match (sorted_mask(hol), sorted_mask(antihol)) {
            (Some((mi, si)), Some((mj, sj))) => self.get_mask(mi, mj) * (si * sj),
            _ => C64::new(0.0, 0.0),
        }
    }

    /// Sets the component for the given index lists (any order), keeping antisymmetry.
    pub fn set(&mut self, hol: &[usize], antihol: &[usize], v: C64) {
        assert_eq!((hol.len(), antihol.len()), (self.p, self.q));
        let (mi, si) = sorted_mask(hol).expect("repeated holomorphic index");
        let (mj, sj) = sorted_mask(antihol).expect("repeated antiholomorphic index");
        let k = self.slot(mi, mj);
        self.coeffs[k] = v * (si * sj);
    }

    #[inline]
    fn slot(&self, mi: u32, mj: u32) -> usize {
        let t = subsets(self.n);
        t.rank[mi as usize] * self.ncols() + t.rank[mj as usize]
    }

    #[inline]
    pub fn get_mask(&self, mi: u32, mj: u32) -> C64 {
        self.coeffs[self.slot(mi, mj)]
    }

    #[inline]
    fn add_mask(&mut self, mi: u32, mj: u32, v: C64) {
        let k = self.slot(mi, mj);
        self.coeffs[k] += v;
    }

    /// Iterates over `(I, J, coefficient)` with masks.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, C64)> + '_ {
        let t = subsets(self.n);
        let cols = &t.by_size[self.q];
        t.by_size[self.p]
            .iter()
            .flat_map(move |&mi| cols.iter().map(move |&mj| (mi, mj)))
            .zip(self.coeffs.iter())
            .map(|((mi, mj), &v)| (mi, mj, v))
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.bidegree(), other.bidegree());
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn scale(mut self, s: C64) -> Self {
        self.coeffs.iter_mut().for_each(|v| *v *= s);
        self
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!((self.n, self.p, self.q), (other.n, other.p, other.q));
        self.coeffs.iter_mut().zip(&other.coeffs).for_each(|(a, b)| *a += b);
    }

    pub fn add_scaled(&mut self, other: &Self, s: C64) {
        assert_eq!((self.n, self.p, self.q), (other.n, other.p, other.q));
        self.coeffs.iter_mut().zip(&other.coeffs).for_each(|(a, b)| *a += b * s);
    }

    /// Complex conjugate form, of bidegree `(q, p)`.
    pub fn conj(&self) -> Self {
        // conj(dz^I ∧ dz̄^J) = dz̄^I ∧ dz^J = (-1)^{pq} dz^J ∧ dz̄^I
        let sign = if (self.p * self.q).is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut out = Self::zero(self.n, self.q, self.p).unwrap();
        for (mi, mj, v) in self.terms() {
            out.add_mask(mj, mi, v.conj() * sign);
        }
        out
    }

    /// Coefficient of `dz^{1..n} ∧ dz̄^{1..n}` of a top-degree form.
    pub fn top_coefficient(&self) -> C64 {
        assert_eq!((self.p, self.q), (self.n, self.n));
        self.coeffs[0]
    }
}

fn sorted_mask(idx: &[usize]) -> Option<(u32, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v.iter().fold(0u32, |m, &i| m | 1 << i), sign))
}

/// `a ∧ b`.
pub fn wedge(a: &PQForm, b: &PQForm) -> Result<PQForm> {
    assert_eq!(a.n, b.n);
    let (p, q) = (a.p + b.p, a.q + b.q);
    let mut out = PQForm::zero(a.n, p, q)?;
    let cross = if (a.q * b.p).is_multiple_of(2) { 1.0 } else { -1.0 };
    for (i1, j1, x) in a.terms() {
        if x == C64::new(0.0, 0.0) {
            continue;
        }
        for (i2, j2, y) in b.terms() {
            if i1 & i2 != 0 || j1 & j2 != 0 {
                continue;
            }
            let s = cross * merge_sign(i1, i2) * merge_sign(j1, j2);
            out.add_mask(i1 | i2, j1 | j2, x * y * s);
        }
    }
    Ok(out)
}

/// `dz^k ∧ a` for one holomorphic differential.
pub fn dz_wedge(k: usize, a: &PQForm) -> Result<PQForm> {
    let mut out = PQForm::zero(a.n, a.p + 1, a.q)?;
    for (mi, mj, v) in a.terms() {
        if mi >> k & 1 == 0 {
            out.add_mask(mi | 1 << k, mj, v * insert_sign(k, mi));
        }
    }
    Ok(out)
}

/// `dz̄^k ∧ a`.
pub fn dzbar_wedge(k: usize, a: &PQForm) -> Result<PQForm> {
    let mut out = PQForm::zero(a.n, a.p, a.q + 1)?;
    let pass = if a.p.is_multiple_of(2) { 1.0 } else { -1.0 };
    for (mi, mj, v) in a.terms() {
        if mj >> k & 1 == 0 {
            out.add_mask(mi, mj | 1 << k, v * (pass * insert_sign(k, mj)));
        }
    }
    Ok(out)
}

/// Table of `det M[A, B]` over all pairs of k-subsets, `M[i][l] = h^{i l̄}`.
fn minors(m: &CMatrix, n: usize, k: usize) -> CMatrix {
    let sets = &subsets(n).by_size[k];
    let mut out = CMatrix::zeros(sets.len(), sets.len());
    for (r, &a) in sets.iter().enumerate() {
        let ra = lex_key(a, n);
        for (s, &b) in sets.iter().enumerate() {
            let cb = lex_key(b, n);
            let sub = CMatrix::from_fn(k, k, |x, y| m[(ra[x], cb[y])]);
            out[(r, s)] = if k == 0 { C64::new(1.0, 0.0) } else { sub.determinant() };
        }
    }
    out
}

/// Pointwise inner product of two (p,q)-forms with respect to `h`.
///
/// `⟨φ,ψ⟩ = (1/p!q!) Σ h^{i₁l̄₁}…h^{k₁j̄₁}… φ_{i…j̄…} conj(ψ_{l…k̄…})`.
pub fn inner_product_with(a: &PQForm, b: &PQForm, hinv: &CMatrix) -> Result<C64> {
    if (a.p, a.q) != (b.p, b.q) {
        return Err(Error::BidegreeMismatch(a.p, a.q, b.p, b.q));
    }
    let n = a.n;
    let mp = minors(hinv, n, a.p);
    let mq = minors(hinv, n, a.q);
    let rows = mp.nrows();
    let cols = mq.nrows();
    let psi = CMatrix::from_fn(rows, cols, |r, s| b.coeffs[r * cols + s].conj());
    let contracted = &mp * psi * &mq;
    Ok((0..rows).flat_map(|r| (0..cols).map(move |s| (r, s))).map(|(r, s)| a.coeffs[r * cols + s] * contracted[(r, s)]).sum())
}

pub fn inner_product(a: &PQForm, b: &PQForm, j: &MetricJet2) -> Result<C64> {
    inner_product_with(a, b, &crate::jets::inverse_metric(j)?)
}

/// Pointwise squared norm `⟨a, a⟩` (real, non-negative).
pub fn norm_sq_with(a: &PQForm, hinv: &CMatrix) -> Result<f64> {
    Ok(inner_product_with(a, a, hinv)?.re)
}

/// Lefschetz operator `L a = ω ∧ a`.
pub fn lefschetz_l(a: &PQForm, j: &MetricJet2) -> Result<PQForm> {
    wedge(&PQForm::kahler_form(&j.h), a)
}

/// Adjoint of `L`, by contraction with `h^{k l̄}`:
/// `(Λψ)_{I J̄} = −i (−1)^{|I|} Σ_{k,l} h^{k l̄} ψ_{(kI)(l̄J̄)}`.
pub fn lambda_contract_with(a: &PQForm, hinv: &CMatrix) -> Result<PQForm> {
    if a.p == 0 || a.q == 0 {
        return Err(Error::DegreeUnderflow { p: a.p, q: a.q });
    }
    let n = a.n;
    let mut out = PQForm::zero(n, a.p - 1, a.q - 1)?;
    let pre = if (a.p - 1).is_multiple_of(2) { -I } else { I };
    let t = subsets(n);
    for &mi in &t.by_size[a.p - 1] {
        for &mj in &t.by_size[a.q - 1] {
            let mut acc = C64::new(0.0, 0.0);
            for k in (0..n).filter(|&k| mi >> k & 1 == 0) {
                let sk = insert_sign(k, mi);
                for l in (0..n).filter(|&l| mj >> l & 1 == 0) {
                    acc += hinv[(k, l)] * a.get_mask(mi | 1 << k, mj | 1 << l) * (sk * insert_sign(l, mj));
                }
            }
            out.add_mask(mi, mj, acc * pre);
        }
    }
    Ok(out)
}

pub fn lambda_contract(a: &PQForm, j: &MetricJet2) -> Result<PQForm> {
    lambda_contract_with(a, &crate::jets::inverse_metric(j)?)
}

/// Real (1,1)-form `α = i α_{i j̄} dz^i ∧ dz̄^j`, stored as the Hermitian matrix `α_{i j̄}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Herm11(pub CMatrix);

impl Herm11 {
    pub fn zeros(n: usize) -> Self {
        Herm11(CMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn to_form(&self) -> PQForm {
        let n = self.dim();
        let mut f = PQForm::zero(n, 1, 1).unwrap();
        for i in 0..n {
            for j in 0..n {
                f.add_mask(1 << i, 1 << j, I * self.0[(i, j)]);
            }
        }
        f
    }

    pub fn from_form(f: &PQForm) -> Result<Self> {
        if f.bidegree() != (1, 1) {
            return Err(Error::BidegreeMismatch(f.p, f.q, 1, 1));
        }
        let n = f.n;
        Ok(Herm11(CMatrix::from_fn(n, n, |i, j| -I * f.get_mask(1 << i, 1 << j))))
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        (&self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Linear combination `Σ c_k α_k`.
    pub fn combine(terms: &[(f64, &Herm11)]) -> Herm11 {
        let n = terms[0].1.dim();
        let mut m = CMatrix::zeros(n, n);
        for (s, a) in terms {
            m += &a.0 * C64::new(*s, 0.0);
        }
        Herm11(m)
    }
}

/// `Σ h^{i j̄} α_{i j̄}`, complex, before the realness check.
pub fn trace11_complex(a: &Herm11, hinv: &CMatrix) -> C64 {
    a.0.iter().zip(hinv.iter()).map(|(x, y)| x * y).sum()
}

/// `tr_ω α = h^{i j̄} α_{i j̄}`; errors if the imaginary part exceeds `1e-10` (relative).
pub fn trace11_with(a: &Herm11, hinv: &CMatrix) -> Result<f64> {
    let t = trace11_complex(a, hinv);
    let scale = 1.0_f64.max(a.max_abs() * hinv.iter().map(|z| z.norm()).fold(0.0, f64::max));
    if t.im.abs() > 1e-10 * scale {
        return Err(Error::NonReal { what: "trace of a (1,1)-form", imag: t.im });
    }
    Ok(t.re)
}

pub fn trace11(a: &Herm11, j: &MetricJet2) -> Result<f64> {
    trace11_with(a, &crate::jets::inverse_metric(j)?)
}

/// A form-valued function known to second order at a point: value, `∂_p`,
/// `∂_q̄` and `∂_p ∂_q̄` of the coefficients.
#[derive(Clone, Debug)]
pub struct FormField2 {
    pub value: PQForm,
    pub d: Vec<PQForm>,
    pub dbar: Vec<PQForm>,
    pub ddbar: Vec<PQForm>,
}

impl FormField2 {
    /// The field `ω` built from a metric jet.
    pub fn kahler(j: &MetricJet2) -> Self {
        let n = j.n;
        let value = PQForm::kahler_form(&j.h);
        let from = |f: &dyn Fn(usize, usize) -> C64| PQForm::kahler_form(&CMatrix::from_fn(n, n, f));
        let d = (0..n).map(|p| from(&|a, b| j.dh[[p, a, b]])).collect();
        let dbar = (0..n).map(|q| from(&|a, b| j.dbar_h(q, a, b))).collect();
        let mut ddbar = Vec::with_capacity(n * n);
        for p in 0..n {
            for q in 0..n {
                ddbar.push(from(&|a, b| j.ddbar_h[[p, q, a, b]]));
            }
        }
        Self { value, d, dbar, ddbar }
    }

    pub fn constant(value: PQForm) -> Self {
        let n = value.dim();
        let (p, q) = value.bidegree();
        let z = PQForm::zero(n, p, q).unwrap();
        Self { d: vec![z.clone(); n], dbar: vec![z.clone(); n], ddbar: vec![z; n * n], value }
    }

    fn n(&self) -> usize {
        self.value.dim()
    }

    /// Product rule for coefficients of `a ∧ b`.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let n = self.n();
        let value = wedge(&self.value, &other.value)?;
        let mut d = Vec::with_capacity(n);
        let mut dbar = Vec::with_capacity(n);
        for p in 0..n {
            let mut x = wedge(&self.d[p], &other.value)?;
            x.add_assign(&wedge(&self.value, &other.d[p])?);
            d.push(x);
            let mut y = wedge(&self.dbar[p], &other.value)?;
            y.add_assign(&wedge(&self.value, &other.dbar[p])?);
            dbar.push(y);
        }
        let mut ddbar = Vec::with_capacity(n * n);
        for p in 0..n {
            for q in 0..n {
                let mut x = wedge(&self.ddbar[p * n + q], &other.value)?;
                x.add_assign(&wedge(&self.d[p], &other.dbar[q])?);
                x.add_assign(&wedge(&self.dbar[q], &other.d[p])?);
                x.add_assign(&wedge(&self.value, &other.ddbar[p * n + q])?);
                ddbar.push(x);
            }
        }
        Ok(Self { value, d, dbar, ddbar })
    }

    /// `∂φ = Σ dz^p ∧ ∂_p φ`.
    pub fn del(&self) -> Result<PQForm> {
        let (p, q) = self.value.bidegree();
        let mut out = PQForm::zero(self.n(), p + 1, q)?;
        for (k, f) in self.d.iter().enumerate() {
            out.add_assign(&dz_wedge(k, f)?);
        }
        Ok(out)
    }

    /// `∂̄φ = Σ dz̄^q ∧ ∂_q̄ φ`.
    pub fn delbar(&self) -> Result<PQForm> {
        let (p, q) = self.value.bidegree();
        let mut out = PQForm::zero(self.n(), p, q + 1)?;
        for (k, f) in self.dbar.iter().enumerate() {
            out.add_assign(&dzbar_wedge(k, f)?);
        }
        Ok(out)
    }

    /// `∂∂̄φ = Σ dz^p ∧ dz̄^q ∧ ∂_p ∂_q̄ φ`.
    pub fn del_delbar(&self) -> Result<PQForm> {
        let n = self.n();
        let (p, q) = self.value.bidegree();
        let mut out = PQForm::zero(n, p + 1, q + 1)?;
        for a in 0..n {
            for b in 0..n {
                out.add_assign(&dz_wedge(a, &dzbar_wedge(b, &self.ddbar[a * n + b])?)?);
            }
        }
        Ok(out)
    }

    /// `φ^k` with its derivatives.
    pub fn pow(&self, k: usize) -> Result<Self> {
        let n = self.n();
        let mut acc = Self::constant(PQForm::one(n));
        for _ in 0..k {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }
}

/// `ω^k / k!` at a point.
pub fn omega_power(h: &CMatrix, k: usize) -> Result<PQForm> {
    let n = h.nrows();
    let w = PQForm::kahler_form(h);
    let mut acc = PQForm::one(n);
    for m in 1..=k {
        acc = wedge(&acc, &w)?.scale(C64::new(1.0 / m as f64, 0.0));
    }
    Ok(acc)
}

/// Density of a top form with respect to `ωⁿ/n!`.
pub fn top_density(top: &PQForm, h: &CMatrix) -> Result<C64> {
    let vol = omega_power(h, h.nrows())?;
    Ok(top.top_coefficient() / vol.top_coefficient())
}
