//! The free associative algebra on `x_0, x_1, ...` over an exact field, with
//! the shift derivation `D(x_i) = x_{i+1}`.

mod monomial;
mod poly;
mod scalar;

pub use monomial::{component_dimension, for_each_word, Monomial};
pub use poly::{poly_combine, FreePoly};
pub use scalar::{Field, Scalar};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("position {position} exceeds length {length}")]
    PositionOutOfRange { position: usize, length: usize },
    #[error("{coeffs} coefficients for {polys} polynomials")]
    LengthMismatch { coeffs: usize, polys: usize },
    #[error("{0} is not a supported prime")]
    NotPrime(u64),
    #[error("parse error: {0}")]
    Parse(String),
}
