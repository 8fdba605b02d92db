use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The edge list contains a directed cycle; the witness lists the
    /// vertices of one cycle in order.
    #[error("input graph contains a cycle: {0:?}")]
    CycleDetected(Vec<usize>),
    /// An edge endpoint is out of range.
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    InvalidVertex(usize, usize, usize),
    /// The same directed edge appears twice.
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    /// An edge from a vertex to itself.
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    /// Two parallel sequences (values/weights, labels, coordinates) have
    /// different lengths.
    #[error("length mismatch: {context} (expected {expected}, got {got})")]
    LengthMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    /// A weight is negative.
    #[error("negative weight {0} at index {1}")]
    NegativeWeight(i64, usize),
    /// An operation that divides by weight sums needs every weight positive.
    #[error("weight at index {0} must be positive for this operation")]
    ZeroWeight(usize),
    /// Weighted sums would not fit in the integer types used.
    #[error("instance magnitudes overflow the supported integer range")]
    Overflow,
    /// A box's lower corner exceeds its upper corner in some dimension.
    #[error("box {0} has a lower corner above its upper corner")]
    InvalidBox(usize),
    /// A two-value split was requested with its endpoints out of order.
    #[error("binary split needs increasing endpoints, got {0} then {1}")]
    InvalidSplit(i64, i64),
    /// Two points share every coordinate; strict domination cannot order
    /// them and the rendezvous construction would mis-relate them.
    #[error("duplicate point: indices {0} and {1} have identical coordinates")]
    DuplicatePoint(usize, usize),
    /// A comparator presented as a partial order failed a transitivity or
    /// antisymmetry spot check.
    #[error("comparator is not a partial order: witness {0:?}")]
    OrderViolation([usize; 3]),
    /// The anchor set handed to the isotonic extension contains a
    /// comparable pair whose values decrease (caller bug).
    #[error("anchor set is not value-isotonic: vertex {0} has a smaller-valued ancestor")]
    NotAntichain(usize),
    /// Post-solve verification of the flow/antichain extraction failed;
    /// indicates a solver bug, never expected on valid inputs.
    #[error("antichain extraction check failed: {0}")]
    ExtractionMismatch(&'static str),
    /// Exponent for the Lp metric must be finite and > 1.
    #[error("invalid exponent p = {0}; need finite p > 1")]
    InvalidP(f64),
    /// Grid spacing must be positive.
    #[error("invalid grid spacing delta = {0}; need delta > 0")]
    InvalidDelta(String),
    /// An exhaustive oracle refused an instance beyond its size guard.
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    /// A pipeline produced output that fails its own postcondition.
    #[error("internal invariant violated: {0}")]
    Internal(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
