//! Best-response dynamics in well-mixed populations of coordinators and
//! anticoordinators: simulation, analytic characterization of positively
//! invariant sets and their stability, synchronous maps, and an exhaustive
//! transition-graph oracle.

#![allow(clippy::int_plus_one)]
pub mod dynamics;
pub mod error;
pub mod invariant;
pub mod oracle;
pub mod population;
pub mod report;
pub mod stability;
pub mod synchronous;

pub use dynamics::{Activation, SweepResult, Trajectory};
pub use error::{Error, Result};
pub use invariant::{ABounds, CandidateSet};
pub use population::{
    AgentClass, BenchmarkQuad, ClassBehavior, PayoffMatrix, PopulationDraft, PopulationSpec, Role,
    State, Strategy, Temper,
};
