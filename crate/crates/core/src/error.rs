use thiserror::Error;

/// Failures of the jet kernel and the operators built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GermError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("base points differ: {left} vs {right}")]
    BaseMismatch { left: String, right: String },
    #[error("order {have} is insufficient, {need} required")]
    InsufficientOrder { have: usize, need: usize },
    #[error("axis {axis} is out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("duplicate base point {0} in jet tuple")]
    DuplicateBasePoint(String),
    #[error("germ f(a) = {0} is not zero")]
    ImplicitValueNonzero(String),
    #[error("the partial derivative along the last variable vanishes at the base point")]
    ImplicitDegenerate,
    #[error("the germ does not vanish identically on z_n = a_n (coefficient at {0})")]
    DivisionNotDefined(String),
    #[error("the germ is not invariant under the order-{m} rotation (coefficient at {alpha})")]
    NotDeramifiable { m: u32, alpha: String },
    #[error("invalid deramification index 0")]
    ZeroRamification,
    #[error("the jet is not a chart-0 blow-up (coefficient at {0})")]
    NotABlowDown(String),
    #[error("the jet must be based at the origin, found {0}")]
    NonZeroBase(String),
    #[error("germ `{name}` at {base} is not bound")]
    UnboundGerm { name: String, base: String },
    #[error("e^{value} is not a Gaussian rational")]
    NonGaussianExponential { value: String },
    #[error("not an implicit solution: {0}")]
    NotASolution(String),
    #[error("the linear relation fails at degree {0}")]
    RelationViolated(usize),
    #[error("no invertible row selection: rank {rank}, {need} required")]
    RankDeficient { rank: usize, need: usize },
    #[error("{0}")]
    Malformed(String),
}

impl GermError {
    /// Stable variant name, used by the CLI when reporting domain errors.
    pub fn name(&self) -> &'static str {
        match self {
            GermError::DimensionMismatch { .. } => "DimensionMismatch",
            GermError::BaseMismatch { .. } => "BaseMismatch",
            GermError::InsufficientOrder { .. } => "InsufficientOrder",
            GermError::AxisOutOfRange { .. } => "AxisOutOfRange",
            GermError::DuplicateBasePoint(_) => "DuplicateBasePoint",
            GermError::ImplicitValueNonzero(_) => "ImplicitValueNonzero",
            GermError::ImplicitDegenerate => "ImplicitDegenerate",
            GermError::DivisionNotDefined(_) => "DivisionNotDefined",
            GermError::NotDeramifiable { .. } => "NotDeramifiable",
            GermError::ZeroRamification => "ZeroRamification",
            GermError::NotABlowDown(_) => "NotABlowDown",
            GermError::NonZeroBase(_) => "NonZeroBase",
            GermError::UnboundGerm { .. } => "UnboundGerm",
            GermError::NonGaussianExponential { .. } => "NonGaussianExponential",
            GermError::NotASolution(_) => "NotASolution",
            GermError::RelationViolated(_) => "RelationViolated",
            GermError::RankDeficient { .. } => "RankDeficient",
            GermError::Malformed(_) => "Malformed",
        }
    }

    /// Whether the error is an operator being applied outside its domain, as opposed to a
    /// bookkeeping failure (missing input, wrong shape, too little order).
    pub fn is_domain_violation(&self) -> bool {
        matches!(
            self,
            GermError::ImplicitValueNonzero(_)
                | GermError::ImplicitDegenerate
                | GermError::DivisionNotDefined(_)
                | GermError::NotDeramifiable { .. }
                | GermError::BaseMismatch { .. }
                | GermError::NotABlowDown(_)
        )
    }
}

/// Failures reading the text and JSON formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed rational literal `{0}`")]
    MalformedRational(String),
    #[error("at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("at offset {pos}: unknown head `{head}`")]
    UnknownHead { pos: usize, head: String },
    #[error("at offset {pos}: `{head}` expects {expected}, found {found} argument(s)")]
    Arity {
        pos: usize,
        head: String,
        expected: String,
        found: usize,
    },
    #[error("invalid document: {0}")]
    Document(String),
}

impl ParseError {
    pub fn name(&self) -> &'static str {
        match self {
            ParseError::MalformedRational(_) => "MalformedRational",
            ParseError::Syntax { .. } => "Syntax",
            ParseError::UnknownHead { .. } => "UnknownHead",
            ParseError::Arity { .. } => "Arity",
            ParseError::Document(_) => "Document",
        }
    }
}

pub type Result<T, E = GermError> = std::result::Result<T, E>;
