//! Exact rational arithmetic: scalars, dense univariate polynomials and
//! normalized rational functions.

mod json;
mod linalg;
mod poly;
mod ratfunc;

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use json::RatFuncJson;
pub use linalg::{nullspace, reconstruct_rational};
pub(crate) use poly::to_f64;
pub use poly::Poly;
pub use ratfunc::RatFunc;

/// Arbitrary-precision rational scalar (always reduced, positive denominator).
pub type Rational = num_rational::BigRational;

/// Shorthand for building a small rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Name of the indeterminate a polynomial is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    /// Tau-function variable `z`.
    #[serde(rename = "z")]
    Z,
    /// Anisotropy parameter `zeta`.
    #[serde(rename = "zeta")]
    Zeta,
    /// Normalized discriminant `Z`.
    #[serde(rename = "Z")]
    Disc,
    /// Uniformizing variable `s` of the Painleve solutions.
    #[serde(rename = "s")]
    S,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::Z => "z",
            Var::Zeta => "zeta",
            Var::Disc => "Z",
            Var::S => "s",
        })
    }
}

impl std::str::FromStr for Var {
    type Err = ExactError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "z" => Ok(Var::Z),
            "zeta" => Ok(Var::Zeta),
            "Z" => Ok(Var::Disc),
            "s" => Ok(Var::S),
            other => Err(ExactError::Parse(format!("unknown variable {other:?}"))),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("division left a nonzero remainder of degree {remainder_degree}")]
    NonzeroRemainder { remainder_degree: usize },
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("variable mismatch: {left} vs {right}")]
    VariableMismatch { left: Var, right: Var },
    #[error("denominator vanishes identically after composition")]
    IdenticallySingular,
    #[error("pole encountered at {at}")]
    PoleEncountered { at: String },
    #[error("no rational function with degrees up to {max_degree} fits the samples")]
    ReconstructionFailed { max_degree: usize },
    #[error("parse error: {0}")]
    Parse(String),
}
