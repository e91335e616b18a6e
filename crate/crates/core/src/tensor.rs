//! Dense complex arrays with a fixed number of indices, each running over `0..n`.

use crate::C64;
use std::ops::{Index, IndexMut};

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<const R: usize> {
    n: usize,
    data: Vec<C64>,
}

impl<const R: usize> Tensor<R> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::new(0.0, 0.0); n.pow(R as u32)] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut([usize; R]) -> C64) -> Self {
        let mut t = Self::zeros(n);
        for (flat, v) in t.data.iter_mut().enumerate() {
            let mut idx = [0usize; R];
            let mut rem = flat;
            for slot in idx.iter_mut().rev() {
                *slot = rem % n;
                rem /= n;
            }
            *v = f(idx);
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    fn offset(&self, idx: [usize; R]) -> usize {
        let mut o = 0;
        for i in idx {
            debug_assert!(i < self.n);
            o = o * self.n + i;
        }
        o
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<const R: usize> Index<[usize; R]> for Tensor<R> {
    type Output = C64;
    #[inline]
    fn index(&self, idx: [usize; R]) -> &C64 {
        &self.data[self.offset(idx)]
    }
}

impl<const R: usize> IndexMut<[usize; R]> for Tensor<R> {
    #[inline]
    fn index_mut(&mut self, idx: [usize; R]) -> &mut C64 {
        let o = self.offset(idx);
        &mut self.data[o]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_fn_is_row_major() {
        let t = Tensor::<3>::from_fn(3, |[a, b, c]| C64::new((9 * a + 3 * b + c) as f64, 0.0));
        for (k, v) in t.as_slice().iter().enumerate() {
            assert_eq!(v.re, k as f64);
        }
        assert_eq!(t[[2, 0, 1]].re, 19.0);
    }
}
