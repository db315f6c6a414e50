//! Numerics for Schrödinger operators `-Δ + Π|x_i|^{α_i}` and Dirichlet
//! Laplacians on hyperbolic-cross domains.
//!
//! Everything here is `no_std` + `alloc`; elementary functions go through
//! `libm` so results are bit-reproducible across platforms. File formats,
//! configuration and the command line live in the companion `hypercross-lab`
//! crate.
//!
//! Module map:
//! - [`spectral`]: exponent vectors, closed-form exponents and constants,
//!   scaling relations.
//! - [`discretize`]: finite-difference operators and eigensolvers.
//! - [`heat`]: heat traces and the sliced trace bounds.
//! - [`fk`]: Feynman–Kac Monte Carlo.
//! - [`tauberian`]: Karamata conversions, fits, spectral zeta values.
#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]
// `!(x > 0.0)` rejects NaN on purpose; dense kernels index by position.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod discretize;
pub mod error;
pub mod fk;
pub mod heat;
pub mod linalg;
pub mod numeric;
pub mod quad;
pub mod spectral;
pub mod special;
pub mod tauberian;

pub use error::{Error, Result};
