//! Error type shared by every module.

use alloc::string::String;

use crate::rational::Rational;

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by model validation and the solvers.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// The alphabet needs at least two symbols.
    #[error("alphabet must contain at least 2 symbols, found {0}")]
    TooFewSymbols(usize),
    /// The alphabet is too large for 16-bit symbol ids.
    #[error("alphabet of {0} symbols exceeds the supported maximum of 65536")]
    TooManySymbols(usize),
    /// The type set is empty.
    #[error("model must declare at least one sender type")]
    NoTypes,
    /// A symbol or type label appears twice.
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    /// A label is empty.
    #[error("labels must be non-empty")]
    EmptyLabel,
    /// The prior does not sum to one.
    #[error("prior is not normalized: values sum to {0}")]
    PriorNotNormalized(Rational),
    /// A prior value is negative.
    #[error("prior of type `{0}` is negative")]
    NegativePrior(String),
    /// The prior does not have one entry per type.
    #[error("prior has {found} entries for {expected} types")]
    PriorShape {
        /// Number of types.
        expected: usize,
        /// Number of prior entries supplied.
        found: usize,
    },
    /// A utility table is missing or has the wrong shape.
    #[error("missing utility entry for type `{type_label}`: {detail}")]
    MissingUtility {
        /// Type whose table is malformed.
        type_label: String,
        /// What is missing.
        detail: String,
    },
    /// Bringing all utilities to a common denominator overflowed.
    #[error("utility values are too large to place over a common denominator")]
    ScaleOverflow,
    /// Two sequences that must have equal length do not.
    #[error("sequence length mismatch: expected {expected}, found {found}")]
    LengthMismatch {
        /// Required length.
        expected: usize,
        /// Supplied length.
        found: usize,
    },
    /// A sequence letter is not a symbol of the alphabet.
    #[error("invalid symbol `{0}`")]
    InvalidSymbol(String),
    /// A type id or label is not part of the model.
    #[error("unknown sender type `{0}`")]
    UnknownType(String),
    /// The horizon must be at least one.
    #[error("horizon n must be at least 1")]
    ZeroHorizon,
    /// `|𝒳|ⁿ` exceeds the enumeration budget.
    #[error("enumeration budget exceeded: {alphabet}^{n} sequences > budget {budget}")]
    EnumerationBudget {
        /// Alphabet size.
        alphabet: usize,
        /// Horizon.
        n: usize,
        /// Budget that tripped.
        budget: usize,
    },
    /// A dense graph would exceed the graph budget.
    #[error("graph budget exceeded: {vertices} vertices > budget {budget}")]
    GraphBudget {
        /// Requested vertex count.
        vertices: usize,
        /// Budget that tripped.
        budget: usize,
    },
    /// Exact maximum independent set was requested on too large a graph.
    #[error("exact MIS budget exceeded: {vertices} vertices > budget {budget}")]
    MisBudget {
        /// Vertex count of the graph.
        vertices: usize,
        /// Budget that tripped.
        budget: usize,
    },
    /// Exhaustive questionnaire search was requested on too many sequences.
    #[error("exhaustive subset budget exceeded: {sequences} sequences > budget {budget}")]
    SubsetBudget {
        /// Number of sequences `|𝒳|ⁿ`.
        sequences: usize,
        /// Budget that tripped.
        budget: usize,
    },
    /// The exact solver tracks types in a 64-bit mask.
    #[error("exact search supports at most 64 sender types, model has {0}")]
    TooManyTypes(usize),
    /// A questionnaire must be nonempty.
    #[error("questionnaire must be nonempty")]
    EmptySet,
    /// A sequence id is outside `𝒳ⁿ`.
    #[error("sequence id {id} out of range for {count} sequences")]
    SequenceOutOfRange {
        /// Offending id.
        id: usize,
        /// Number of sequences at this horizon.
        count: usize,
    },
    /// The fallback of a canonical strategy must belong to its image.
    #[error("fallback sequence is not a member of the questionnaire")]
    FallbackNotMember,
    /// Graphs being combined have different horizons.
    #[error("graphs have mismatched horizons or vertex counts")]
    HorizonMismatch,
    /// Union over an empty list of graphs.
    #[error("union requires at least one graph")]
    EmptyGraphList,
    /// A closure step lowered the objective. Indicates a solver bug.
    #[error("closure step lowered the receiver objective")]
    ClosureRegressed,
}
