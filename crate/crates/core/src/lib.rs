//! Joint bandwidth and power allocation for multi-user wireless networks.
//!
//! The library covers three allocation objectives (sum capacity, worst-user
//! capacity, total power) for networks with and without decode-and-forward
//! relaying, a minimum-bandwidth feasibility oracle, greedy and exhaustive
//! admission control, and a seeded Monte-Carlo experiment harness.

pub mod admission;
pub mod allocators;
pub mod bandwidth_min;
pub mod capacity;
pub mod model;
pub mod scenario;
pub mod simharness;
pub mod solver_core;

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("allocation has {got} entries but topology has {expected} users")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("power {power} is at or below the feasibility floor {floor} (need p > c/h)")]
    InfeasiblePower { power: f64, floor: f64 },
    #[error("instance infeasible: minimum total bandwidth {required} exceeds available {available}{phase}")]
    InfeasibleInstance {
        required: f64,
        available: f64,
        phase: String,
    },
    #[error("no strictly feasible starting point for the barrier solver")]
    InfeasibleStart,
    #[error("barrier solver numerical failure: {0}")]
    NumericalFailure(String),
    #[error("instance too large: {n} users exceeds the exhaustive-search cap {cap}")]
    InstanceTooLarge { n: usize, cap: usize },
    #[error("scenario file error: {0}")]
    Scenario(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
