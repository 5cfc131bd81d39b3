//! Unbiased estimation of repeatedly nested expectations.
//!
//! The [`read`] module holds the recursive randomized multilevel Monte Carlo
//! estimator, [`nmc`] the nested Monte Carlo baselines, [`problems`] the
//! built-in benchmark problems and [`runner`] the parallel repetition engine with
//! summary statistics, adaptive stopping and experiment sweeps.

pub mod estimator;
pub mod geometric;
pub mod nmc;
pub mod problem;
pub mod problems;
pub mod read;
pub mod rng;
pub mod runner;
pub mod schedule;
pub mod sums;
pub mod trajectory;

pub use estimator::{EstimateError, Estimator};
pub use geometric::{expected_pow2, geometric_pmf, sample_geometric, DomainError};
pub use nmc::{
    allocate_nmc1, allocate_nmc2, nmc_estimate, NmcAllocation, NmcError, NmcEstimator, NmcScheme,
};
pub use problem::{CostedEstimate, NestedProblem, SimulationError};
pub use read::{delta_antithetic, AntitheticTriple, NodeTrace, Observer, ReadEstimator};
pub use rng::{derive_seed, stream_rng, McRng};
pub use runner::{
    time_normalized_error, AdaptiveResult, RepRecord, RunError, RunResult, RunSummary, Runner,
    StoppingRule,
};
pub use schedule::{validate_schedule, GeometricSchedule, Regime, ScheduleError};
pub use sums::{split_odd_even, OddEvenSums};
pub use trajectory::Trajectory;
