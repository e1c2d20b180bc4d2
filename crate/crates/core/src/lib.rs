//! Learning sparse governing equations of cyclic dynamical systems from a few
//! random bursts, via cyclic-permutation Legendre dictionaries and ℓ1 basis
//! pursuit solved by Douglas-Rachford splitting.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the common double-precision instantiations.

// `!(x > 0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dictionary;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Real;

pub type DataMatrix = dictionary::CyclicDataMatrix<f64>;
pub type Dictionary = dictionary::DictionaryMatrix<f64>;
pub type Coefficients = dictionary::CoefficientVector<f64>;
pub type Line = dynamics::State1D<f64>;
pub type Grid = dynamics::State2D<f64>;
pub type GridPair = dynamics::TwoComponentState<f64>;
