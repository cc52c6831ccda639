use thiserror::Error;

/// Errors raised by the solver library.
///
/// Infeasibility of a solution is not an error: it is reported as data by
/// [`crate::model::validate`]. Likewise a failed reinsertion inside the
/// greedy packer is a normal outcome, see [`crate::toa::PackOutcome`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CbppError {
    #[error("item larger than bin: radius {radius} > bin radius {bin_radius}")]
    ItemLargerThanBin { radius: f64, bin_radius: f64 },

    #[error("unknown item id {0}")]
    UnknownItem(usize),

    #[error("empty solution")]
    EmptySolution,

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("empty bin cannot be perturbed")]
    EmptyBin,

    #[error("missing bin radius for n0 = {0}")]
    MissingBinRadius(u32),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("solver produced an infeasible solution for {instance}: {details}")]
    Infeasible { instance: String, details: String },
}

pub type Result<T> = std::result::Result<T, CbppError>;
