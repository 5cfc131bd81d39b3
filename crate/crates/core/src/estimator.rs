use thiserror::Error;

use crate::problem::{CostedEstimate, SimulationError};
use crate::rng::McRng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error("depth {depth}: sampled level {level} needs more than 2^63 child estimates")]
    LevelOverflow { depth: usize, level: u32 },
    #[error("history has {got} stages but depth {depth} needs exactly {depth} (problem depth {max_depth})")]
    HistoryMismatch {
        depth: usize,
        got: usize,
        max_depth: usize,
    },
}

/// Anything that produces one i.i.d. costed estimate per call from a stream.
pub trait Estimator: Sync {
    fn estimate(&self, rng: &mut McRng) -> Result<CostedEstimate, EstimateError>;

    /// Expected leaf cost per call, when known in closed form.
    fn expected_leaf_cost(&self) -> Option<f64> {
        None
    }
}

impl<E: Estimator + ?Sized> Estimator for &E {
    fn estimate(&self, rng: &mut McRng) -> Result<CostedEstimate, EstimateError> {
        (**self).estimate(rng)
    }

    fn expected_leaf_cost(&self) -> Option<f64> {
        (**self).expected_leaf_cost()
    }
}
