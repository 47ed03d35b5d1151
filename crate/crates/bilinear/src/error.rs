use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// The variants track the failure classes the operations promise to report:
/// structural problems in a system description, index misuse, operations that
/// require a sign class the system does not have, and degeneracies discovered
/// mid-computation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A vector, matrix, or coefficient table does not match the declared dimension.
    #[error("dimension mismatch: {context} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    /// A coordinate index lies outside the valid range for the dimension.
    #[error("index out of range: {context} refers to coordinate {index}, but the dimension is {dim}")]
    IndexOutOfRange {
        context: &'static str,
        index: usize,
        dim: usize,
    },

    /// A seed or operator index does not exist in the system.
    #[error("no {kind} with index {index}: the system has {count}")]
    NoSuchComponent {
        kind: &'static str,
        index: usize,
        count: usize,
    },

    /// The system was declared nonnegative but contains a negative entry.
    #[error("negative entry in nonnegative system: {context} at coordinate {index} is {value}")]
    NegativeEntry {
        context: &'static str,
        index: usize,
        value: String,
    },

    /// The operation is only defined for nonnegative systems/matrices.
    #[error("{operation} requires nonnegative data: {context}")]
    SignsUnsupported {
        operation: &'static str,
        context: String,
    },

    /// An argument violates a precondition (zero power, α ≤ 0, empty seed list, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Every dimension is dead: no coordinate is ever positive.
    #[error("empty system: no live dimension remains")]
    EmptySystem,

    /// A requested coordinate is not live (never positive at any size).
    #[error("coordinate {index} is not live")]
    NotLive { index: usize },

    /// A supermultiplicativity check failed; the witness pair is (m, n), 1-based.
    #[error("sequence is not supermultiplicative: a[{m}+{n}] < a[{m}]·a[{n}]")]
    NotSupermultiplicative { m: usize, n: usize },

    /// A proposed certificate fails its defining inequality; the refusal names
    /// the first violated coordinate.
    #[error("certificate rejected: {condition} fails at coordinate {coordinate}: {detail}")]
    CertificateViolated {
        condition: &'static str,
        coordinate: usize,
        detail: String,
    },

    /// Exact linear solving hit a singular matrix.
    #[error("singular linear system: {0}")]
    SingularSystem(String),

    /// An iterative search exhausted its cap without meeting its goal.
    #[error("{operation} exhausted its cap of {cap} iterations")]
    CapExhausted { operation: &'static str, cap: usize },

    /// Failure to parse a scalar from its textual form.
    #[error("cannot parse {input:?} as an exact rational")]
    ScalarParse { input: String },
}

pub type Result<T> = std::result::Result<T, Error>;
