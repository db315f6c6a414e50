//! Exponent vectors, closed-form exponents and constants, and the two
//! spectral scaling relations.

mod exponents;
mod laws;
mod scaling;
mod spectrum;

pub use exponents::{abs_pow, dim_exponent, lemma_exponents, q_exponent, ExponentVector, ScalingExponents};
pub use laws::{
    simon_log_law, theorem_constant, AsymptoticLaw, Prefactor, Regime, Theorem, TheoremConstant,
};
pub use scaling::{scale_laplacian_spectrum, scale_potential_spectrum};
pub use spectrum::Spectrum;
