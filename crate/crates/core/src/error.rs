use thiserror::Error;

/// Which discount vector a config violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscountVector {
    Satisfaction,
    Dissatisfaction,
}

impl std::fmt::Display for DiscountVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiscountVector::Satisfaction => f.write_str("satisfaction discounts"),
            DiscountVector::Dissatisfaction => f.write_str("dissatisfaction discounts"),
        }
    }
}

/// A single problem found while validating input data.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Diagnostic {
    /// Dotted path to the offending field, e.g. `features[3].effort`.
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ArpError {
    #[error("{vector} must be strictly monotone; violated at index {index}")]
    MonotonicityViolation { vector: DiscountVector, index: usize },
    #[error("{vector}: {detail}")]
    BoundaryViolation {
        vector: DiscountVector,
        detail: String,
    },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("three-point estimate must satisfy 0 <= optimistic <= most likely <= pessimistic, got ({0}, {1}, {2})")]
    OrderingViolation(f64, f64, f64),
    #[error("missing response for feature {feature} from stakeholder {stakeholder}")]
    MissingResponse { feature: usize, stakeholder: u32 },
    #[error("every stakeholder has weight zero")]
    AllWeightsZero,
    #[error("pairwise matrix is not reciprocal at ({row}, {col})")]
    NonReciprocal { row: usize, col: usize },
    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("allocations for the {0} question sum to zero")]
    ZeroAllocation(&'static str),
    #[error("feature {0} has no attractive, one-dimensional, must-be or indifferent mass")]
    DegenerateFeature(usize),
    #[error("no A, O, M or I counts to compute product coefficients from")]
    DegenerateProduct,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("alpha must lie in the open interval (0, 1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("instance has no features")]
    EmptyInstance,
    #[error("instance too large for exhaustive enumeration: {0} assignments exceed the limit of {1}")]
    InstanceTooLarge(f64, u64),
    #[error("plans have identical objective values; no breakpoint exists")]
    DegeneratePair,
    #[error("feature {0} has zero effort, which a per-effort ranking factor cannot handle")]
    ZeroEffortWithRatioFactor(usize),
    #[error("plans do not belong to the same instance: {0}")]
    InstanceMismatch(String),
    #[error("operation requires a single release (K = 1), got K = {0}")]
    UnsupportedReleaseCount(usize),
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
    #[error("ranking table needs at least two raters and two subjects")]
    DegenerateTable,
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("dataset failed validation with {} problem(s)", .0.len())]
    Validation(Vec<Diagnostic>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ArpError {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            ArpError::MonotonicityViolation { .. } => "MONOTONICITY_VIOLATION",
            ArpError::BoundaryViolation { .. } => "BOUNDARY_VIOLATION",
            ArpError::LengthMismatch(_) => "LENGTH_MISMATCH",
            ArpError::InvalidValue(_) => "INVALID_VALUE",
            ArpError::OrderingViolation(..) => "ORDERING_VIOLATION",
            ArpError::MissingResponse { .. } => "MISSING_RESPONSE",
            ArpError::AllWeightsZero => "ALL_WEIGHTS_ZERO",
            ArpError::NonReciprocal { .. } => "NON_RECIPROCAL",
            ArpError::NoConvergence(_) => "NO_CONVERGENCE",
            ArpError::ZeroAllocation(_) => "ZERO_ALLOCATION",
            ArpError::DegenerateFeature(_) => "DEGENERATE_FEATURE",
            ArpError::DegenerateProduct => "DEGENERATE_PRODUCT",
            ArpError::IndexOutOfRange(_) => "INDEX_OUT_OF_RANGE",
            ArpError::AlphaOutOfRange(_) => "ALPHA_OUT_OF_RANGE",
            ArpError::EmptyInstance => "EMPTY_INSTANCE",
            ArpError::InstanceTooLarge(..) => "INSTANCE_TOO_LARGE",
            ArpError::DegeneratePair => "DEGENERATE_PAIR",
            ArpError::ZeroEffortWithRatioFactor(_) => "ZERO_EFFORT_WITH_RATIO_FACTOR",
            ArpError::InstanceMismatch(_) => "INSTANCE_MISMATCH",
            ArpError::UnsupportedReleaseCount(_) => "UNSUPPORTED_RELEASE_COUNT",
            ArpError::DivisionByZero(_) => "DIVISION_BY_ZERO",
            ArpError::DegenerateTable => "DEGENERATE_TABLE",
            ArpError::Parse { .. } => "PARSE_ERROR",
            ArpError::Validation(_) => "VALIDATION_ERROR",
            ArpError::Io(_) => "IO_ERROR",
        }
    }

    /// True for failures caused by the environment rather than by the input.
    pub fn is_runtime(&self) -> bool {
        matches!(self, ArpError::Io(_) | ArpError::NoConvergence(_))
    }
}

pub type Result<T, E = ArpError> = std::result::Result<T, E>;
