use thiserror::Error;

use crate::rootsys::LieType;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported Lie type {family}{rank}")]
    UnsupportedType { family: char, rank: usize },

    #[error("cannot parse Lie type `{0}`")]
    BadTypeName(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("polynomial variable mismatch: {0} vs {1} variables")]
    VariableMismatch(usize, usize),

    #[error("elements are not Bruhat comparable ({y} is not below {w})")]
    NotComparable { y: String, w: String },

    #[error("KL table is incomplete or belongs to another type (wanted {0})")]
    IncompleteCache(LieType),

    #[error("{0} is not a minimal coset representative for the given parabolic")]
    InvalidCosetRepresentative(String),

    #[error("class involves simple {simple} of GK dimension {gk} > stratum {d}")]
    StratumViolation { simple: String, gk: usize, d: usize },

    #[error("GK dimension of the zero class is undefined")]
    ZeroClass,

    #[error("weight is not dominant: m-coordinates {0}")]
    NotDominant(String),

    #[error("quasi-polynomial fit failed: {0}")]
    FitFailure(String),

    #[error("weight lies on the wall of coroot {coroot}")]
    OnWall { coroot: String },

    #[error("phase of the zero charge is undefined")]
    ZeroCharge,

    #[error("assertion failed: {0}")]
    AssertionFailure(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
