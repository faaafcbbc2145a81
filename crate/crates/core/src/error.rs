use thiserror::Error;

pub type Result<T, E = AifsError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AifsError {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not expansive (min |eigenvalue| = {min_modulus:.6})")]
    NotExpansive { min_modulus: f64 },

    #[error("borderline expansivity: an eigenvalue has modulus within 1e-9 of 1 ({modulus:.12})")]
    Borderline { modulus: f64 },

    #[error("digit index {index} out of range for {len} digits")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("cardinality mismatch: |B| = {b}, |L| = {l}")]
    CardinalityMismatch { b: usize, l: usize },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("exactness unavailable: common denominator {q} exceeds cap {cap}")]
    ExactnessUnavailable { q: u128, cap: u64 },

    #[error("criterion inapplicable: {0}")]
    CriterionInapplicable(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("lattice rank deficient: attained rank {rank} of {dim}")]
    RankDeficient { rank: usize, dim: usize },

    #[error("not a certified Hadamard triple (unitarity defect {defect:.3e})")]
    NotCertified { defect: f64 },

    #[error("rejected cycle: {0}")]
    NotWbCycle(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl AifsError {
    /// Errors caused by exhausting a configured search or memory budget.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            AifsError::BudgetExceeded(_) | AifsError::ExactnessUnavailable { .. }
        )
    }
}
