use std::fmt;

use thiserror::Error;

/// A single broken invariant found while validating an instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DimensionMismatch { field: &'static str, expected: usize, got: usize },
    AlphaOutOfRange(f64),
    NegativeFirstStageCost(usize),
    NegativeNominalCost(usize),
    NegativeDeviation(usize),
    NegativeBudget(f64),
    NonFinite(&'static str),
    IndexOutOfRange { constraint: usize, index: usize },
    ZeroCoefficient { constraint: usize, index: usize },
    ExtraIndexOutOfRange { constraint: usize, index: usize },
    ZeroNotInV { constraint: usize },
    EmptyFeasibleSet,
    ZeroCardinality,
    CardinalityMismatch { expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch { field, expected, got } => {
                write!(f, "dimension mismatch: {field} has {got} entries, expected {expected}")
            }
            Violation::AlphaOutOfRange(a) => write!(f, "alpha {a} outside [0,1]"),
            Violation::NegativeFirstStageCost(i) => write!(f, "first-stage cost negative at {i}"),
            Violation::NegativeNominalCost(i) => write!(f, "nominal cost negative at {i}"),
            Violation::NegativeDeviation(i) => write!(f, "deviation negative at {i}"),
            Violation::NegativeBudget(g) => write!(f, "budget negative ({g})"),
            Violation::NonFinite(field) => write!(f, "non-finite value in {field}"),
            Violation::IndexOutOfRange { constraint, index } => {
                write!(f, "constraint {constraint}: variable index {index} out of range")
            }
            Violation::ZeroCoefficient { constraint, index } => {
                write!(f, "constraint {constraint}: explicit zero coefficient on {index}")
            }
            Violation::ExtraIndexOutOfRange { constraint, index } => {
                write!(f, "extra constraint {constraint}: deviation index {index} out of range")
            }
            Violation::ZeroNotInV { constraint } => {
                write!(f, "extra constraint {constraint} excludes delta = 0")
            }
            Violation::EmptyFeasibleSet => write!(f, "feasible set is empty"),
            Violation::ZeroCardinality => write!(f, "equal_cardinality must be positive"),
            Violation::CardinalityMismatch { expected, found } => write!(
                f,
                "equal_cardinality {expected} violated by a feasible point with {found} elements"
            ),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {}", join(.0))]
    Validation(Vec<Violation>),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("enumeration guard exceeded: n = {n} > {limit}")]
    Guard { n: usize, limit: usize },
    #[error("solver failure: {0}")]
    Solver(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
