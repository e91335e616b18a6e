//! Numerical curvature engine for Hermitian metrics.
//!
//! A metric is described by a [`jets::MetricSpec`] on a coordinate chart of
//! ℂⁿ. Everything downstream (Christoffel symbols, torsion, the Chern,
//! Levi-Civita and complexified Riemannian curvature tensors, the six Ricci
//! forms and the scalar curvatures) is computed pointwise from the second
//! order jet of the metric in general holomorphic coordinates.
//!
//! Index convention: multi-index arrays are stored as
//! `[derivative indices..., form indices]`, so `dh[[p, i, j]]` is
//! `∂_p h_{i j̄}`. Antiholomorphic derivatives are never stored; they are
//! recovered by conjugation.

#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod connection;
pub mod curvature;
pub mod error;
pub mod forms;
pub mod identities;
pub mod integrate;
pub mod jets;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}
