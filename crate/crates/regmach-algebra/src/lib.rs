//! Exact arithmetic substrate for register automata: rational scalars,
//! vectors and matrices, plus the group and monoid elements whose matrix
//! images serve as registers.

mod free;
mod growth;
mod heisenberg;
mod matrix;
mod polycyclic;
mod rational;

pub use free::{f2xf2_to_sl4z, freeword_mul, freeword_to_matrix, generator_matrix, FreeWord};
pub use growth::{growth_ball, growth_series, GeneratorSet, DEFAULT_BALL_CAP};
pub use heisenberg::{heis_mul, heis_to_matrix, HeisenbergElem};
pub use matrix::{mat_det, mat_inverse, mat_mul, vec_mat_mul, RMatrix, RVector};
pub use polycyclic::{poly_mul, PolycyclicElem};
pub use rational::BigRational;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not square: {rows} rows, a row of length {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("empty matrix or vector")]
    EmptyMatrix,
    #[error("singular matrix (det = {det})")]
    Singular { det: BigRational },
    #[error("word has rank {0}, expected rank 2")]
    Rank(usize),
    #[error("ball exceeds the element cap of {0}")]
    BallCap(usize),
}
