//! Numerical toolkit for boundary orbits of forward compositions of
//! holomorphic maps: hyperbolic geometry, harmonic measure, multiprecision
//! boundary orbits, hyperbolic classification and Denjoy-Wolff experiments.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle;
pub mod classify;
pub mod error;
pub mod experiments;
pub mod harmonic;
pub mod hypgeo;
pub mod mapfab;
pub mod mp;

pub use error::{Error, Result};
