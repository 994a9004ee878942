use thiserror::Error;

use crate::population::{BenchmarkQuad, State};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid population spec: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid activation: {0}")]
    InvalidActivation(String),

    #[error("activation {index} is not valid at the state it is applied to: {reason}")]
    InvalidActivationAt { index: usize, reason: String },

    #[error("{what} index {index} out of range {lo}..={hi}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        lo: usize,
        hi: usize,
    },

    #[error("benchmark quad {0} is not in the admissible index set")]
    NotInOmega(BenchmarkQuad),

    #[error("pair (r, delta) = ({0}, {1}) is not acceptable")]
    NotAcceptable(usize, usize),

    #[error("{what}: {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u128,
    },

    #[error("state {0} is not a member of the set")]
    NotAMember(State),

    #[error("set is empty")]
    EmptySet,

    #[error("tempers violate the unit-separation assumption: {0}")]
    SeparationAssumption(String),

    #[error("theorem guards p + p' >= 1 and q + q' <= b + b' + 1 fail for {0}; use the proposition check")]
    TheoremGuards(BenchmarkQuad),

    #[error("analytic characterization does not support constant-strategy agents ({0} present)")]
    ConstantAgents(u32),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
