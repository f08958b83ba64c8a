use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vertex index or label that does not belong to the graph.
    UnknownVertex(usize),
    /// The graph (or the linear system built from it) is not connected.
    NotConnected,
    /// A graph with no edges or fewer than two vertices.
    EmptyGraph,
    /// Conductances must be finite and strictly positive.
    InvalidConductance { a: usize, b: usize, value: f64 },
    InvalidParameter { name: &'static str, reason: &'static str },
    /// A vertex function whose length does not match the graph.
    DimensionMismatch { expected: usize, found: usize },
    /// A field sample that is not pinned at the root.
    NotPinned { value: f64 },
    NonFinite { what: &'static str },
    /// `exp` of a gradient overflowed.
    Overflow { what: &'static str },
    /// Quadrature requested in more free coordinates than supported.
    DimensionTooLarge { free: usize, max: usize },
    /// A matrix that should be positive definite is not.
    NotPositiveDefinite,
    /// Incremental `ln D` drifted from a fresh factorization.
    FactorizationDrift { incremental: f64, fresh: f64, sweep: u64 },
    /// A chain hit a non-finite log-density; the offending state is kept.
    ChainAborted { sweep: u64, state: Vec<f64> },
    /// Deformation hypothesis `q² γ |∇v| ≤ 1/2` failed on an edge.
    HypothesisViolated { a: usize, b: usize, value: f64 },
    /// Iterative solver did not reach the requested residual.
    NoConvergence { iterations: usize, residual: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownVertex(v) => write!(f, "unknown vertex {v}"),
            Error::NotConnected => f.write_str("graph is not connected"),
            Error::EmptyGraph => f.write_str("graph needs at least two vertices and one edge"),
            Error::InvalidConductance { a, b, value } => {
                write!(f, "conductance of edge {a}-{b} must be finite and positive, got {value}")
            }
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "expected a vertex function of length {expected}, got {found}")
            }
            Error::NotPinned { value } => {
                write!(f, "field must vanish at the root, found u(root) = {value}")
            }
            Error::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Error::Overflow { what } => write!(f, "exponential overflow in {what}"),
            Error::DimensionTooLarge { free, max } => {
                write!(f, "{free} free coordinates exceed the quadrature limit of {max}")
            }
            Error::NotPositiveDefinite => f.write_str("matrix is not positive definite"),
            Error::FactorizationDrift { incremental, fresh, sweep } => write!(
                f,
                "ln D drifted at sweep {sweep}: incremental {incremental}, refactorized {fresh}"
            ),
            Error::ChainAborted { sweep, .. } => {
                write!(f, "chain aborted at sweep {sweep}: non-finite log-density")
            }
            Error::HypothesisViolated { a, b, value } => write!(
                f,
                "q²γ|∇v| = {value} exceeds 1/2 on edge {a}-{b}"
            ),
            Error::NoConvergence { iterations, residual } => write!(
                f,
                "solver stopped after {iterations} iterations at residual {residual:e}"
            ),
        }
    }
}

impl core::error::Error for Error {}
