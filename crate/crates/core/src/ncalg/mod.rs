//! Noncommutative polynomials with operator-valued coefficients and the
//! noncommutative derivative calculus.

mod derivative;
mod parse;
mod poly;
mod tensor;
mod word;

pub use derivative::{higher_derivative, partial_derivative, power_derivative_expansion};
pub use parse::{parse_complex, parse_poly, poly_from_json, poly_to_json, PolyJson, TermJson};
pub use poly::{CoeffAlgebra, NcPoly, ZERO_TOL};
pub use tensor::TensorPoly;
pub use word::{Alphabet, GenKind, Generator, Word};
