//! The nested-expectation problem abstraction.
//!
//! A problem of depth `D` is a simulator for an `M`-dimensional process
//! `(y^(0), ..., y^(D))` together with functions `g_0, ..., g_D`. The target is
//!
//! ```text
//! gamma_D(y^(0:D-1)) = E[g_D(y^(0:D)) | y^(0:D-1)]
//! gamma_d(y^(0:d-1)) = E[g_d(y^(0:d), gamma_{d+1}(y^(0:d))) | y^(0:d-1)]
//! gamma_0            = E[g_0(y^(0), gamma_1(y^(0)))]
//! ```

use std::sync::Arc;
use thiserror::Error;

use crate::rng::McRng;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("simulator failed at depth {depth}: {message}")]
pub struct SimulationError {
    pub depth: usize,
    pub message: String,
}

/// A repeatedly nested expectation.
pub trait NestedProblem: Send + Sync {
    /// Nesting depth `D`.
    fn depth(&self) -> usize;

    /// Per-stage dimension `M`.
    fn dim(&self) -> usize;

    /// Draws `y^(d) ~ pi_d(. | history)` into `out`, where `d = history.len()`.
    /// An empty history draws from `pi_0`.
    fn simulate(
        &self,
        history: &Trajectory,
        rng: &mut McRng,
        out: &mut [f64],
    ) -> Result<(), SimulationError>;

    /// `g_d(path, z)` for `d < D`; `path` holds exactly `d + 1` stages.
    fn inner(&self, d: usize, path: &Trajectory, z: f64) -> f64;

    /// `g_D(path)`; `path` holds exactly `D + 1` stages.
    fn terminal(&self, path: &Trajectory) -> f64;

    /// Closed-form `gamma_0`, when one is known.
    fn ground_truth(&self) -> Option<f64> {
        None
    }
}

macro_rules! forward_problem {
    ($($ptr:ty),*) => {$(
        impl<P: NestedProblem + ?Sized> NestedProblem for $ptr {
            fn depth(&self) -> usize { (**self).depth() }
            fn dim(&self) -> usize { (**self).dim() }
            fn simulate(&self, h: &Trajectory, rng: &mut McRng, out: &mut [f64]) -> Result<(), SimulationError> {
                (**self).simulate(h, rng, out)
            }
            fn inner(&self, d: usize, path: &Trajectory, z: f64) -> f64 { (**self).inner(d, path, z) }
            fn terminal(&self, path: &Trajectory) -> f64 { (**self).terminal(path) }
            fn ground_truth(&self) -> Option<f64> { (**self).ground_truth() }
        }
    )*};
}

forward_problem!(&P, Box<P>, Arc<P>);

/// One estimator output with exact cost counters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostedEstimate {
    pub value: f64,
    /// Number of `g_D` evaluations.
    pub leaf_cost: u64,
    /// Number of simulator calls at all depths.
    pub sim_calls: u64,
}
