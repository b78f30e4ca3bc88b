use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: {left} vs {right} variables")]
    ArityMismatch { left: usize, right: usize },

    #[error("polynomial is not divisible by the given divisor")]
    Indivisible,

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("cannot parse rational number from {0:?}")]
    ParseRational(String),

    #[error("unknown case id {0} (expected 1..=8)")]
    UnknownCase(u32),

    #[error("size {size} is not valid for case ({case_id}): {rule}")]
    InvalidSize {
        case_id: u32,
        size: u32,
        rule: &'static str,
    },

    #[error("result is not a polynomial in s times a power of f: {0}")]
    NotProportional(String),

    #[error("computed constant c = {0} is not positive")]
    NonPositiveConstant(Rational),

    #[error("only {found} rational roots (with multiplicity) for a polynomial of degree {degree}")]
    IncompleteRoots { degree: usize, found: usize },

    #[error("s = -1 is not a root of the computed b-function")]
    MissingTrivialRoot,

    #[error("operands belong to different presentations")]
    PresentationMismatch,

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("action leaves the stored window at weight {0}")]
    LeavesWindow(Rational),

    #[error("invalid window {min}:{max}")]
    InvalidWindow { min: i64, max: i64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
