use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A point does not belong to the space it is used with.
    PointOutsideSpace(String),
    NegativeRadius(f64),
    EmptySet(&'static str),
    InvalidRange {
        lo: f64,
        hi: f64,
    },
    /// Malformed input data (matrix shape, descriptor fields, ...).
    Format(String),
    InvalidModel(String),
    InvalidTolerance {
        eps_feas: f64,
        eps_eq: f64,
    },
    /// Input distances violate the triangle inequality.
    TriangleViolation {
        excess: f64,
    },
    NoGate,
    /// A step of a constructive argument found an empty intersection.
    Infeasible {
        step: &'static str,
        iteration: usize,
    },
    /// A guarantee that should hold under the stated hypotheses did not.
    Violation(String),
    IterationBudget {
        iterations: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PointOutsideSpace(msg) => write!(f, "point outside space: {msg}"),
            Error::NegativeRadius(r) => write!(f, "negative radius {r}"),
            Error::EmptySet(what) => write!(f, "empty {what}"),
            Error::InvalidRange { lo, hi } => write!(f, "invalid range [{lo}, {hi}]"),
            Error::Format(msg) => write!(f, "format error: {msg}"),
            Error::InvalidModel(msg) => write!(f, "invalid model: {msg}"),
            Error::InvalidTolerance { eps_feas, eps_eq } => {
                write!(f, "invalid tolerance: need 0 < eps_eq ({eps_eq}) <= eps_feas ({eps_feas})")
            }
            Error::TriangleViolation { excess } => {
                write!(f, "triangle inequality violated by {excess}")
            }
            Error::NoGate => f.write_str("point has no gate in the set"),
            Error::Infeasible { step, iteration } => {
                write!(f, "empty intersection at step `{step}` (iteration {iteration})")
            }
            Error::Violation(msg) => write!(f, "property violation: {msg}"),
            Error::IterationBudget { iterations } => {
                write!(f, "iteration budget exhausted after {iterations} iterations")
            }
        }
    }
}

impl core::error::Error for Error {}
