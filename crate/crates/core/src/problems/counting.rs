//! An instrumented affine problem for checking cost accounting.

use rand_distr::{Distribution, StandardNormal};
use std::sync::atomic::{AtomicU64, Ordering};

use crate::problem::{NestedProblem, SimulationError};
use crate::rng::McRng;
use crate::trajectory::Trajectory;

/// `y0 ~ N(1, s^2)`, `y_d = y_{d-1} + N(0, s^2)`, `g_d(y, z) = y_d + z/2`,
/// `g_D = y_D`. Every simulator call and every `g_D` evaluation bumps a counter.
///
/// The conditional expectations are `gamma_d = c_d y_{d-1}` with `c_D = 1` and
/// `c_d = 1 + c_{d+1}/2`, so `gamma_0 = c_0`. With `s = 0` the process is a
/// point mass at 1.
#[derive(Debug, Default)]
pub struct CountingProblem {
    depth: usize,
    noise: f64,
    sim_calls: AtomicU64,
    leaf_calls: AtomicU64,
}

pub fn counting_problem(depth: usize) -> CountingProblem {
    CountingProblem {
        depth,
        noise: 1.0,
        ..Default::default()
    }
}

impl CountingProblem {
    /// Same functions with a point-mass process.
    pub fn deterministic(depth: usize) -> Self {
        Self {
            depth,
            noise: 0.0,
            ..Default::default()
        }
    }

    pub fn sim_calls(&self) -> u64 {
        self.sim_calls.load(Ordering::Relaxed)
    }

    pub fn leaf_calls(&self) -> u64 {
        self.leaf_calls.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.sim_calls.store(0, Ordering::Relaxed);
        self.leaf_calls.store(0, Ordering::Relaxed);
    }
}

impl NestedProblem for CountingProblem {
    fn depth(&self) -> usize {
        self.depth
    }

    fn dim(&self) -> usize {
        1
    }

    fn simulate(
        &self,
        history: &Trajectory,
        rng: &mut McRng,
        out: &mut [f64],
    ) -> Result<(), SimulationError> {
        self.sim_calls.fetch_add(1, Ordering::Relaxed);
        let prev = history.last().map_or(1.0, |y| y[0]);
        let z: f64 = StandardNormal.sample(rng);
        out[0] = prev + self.noise * z;
        Ok(())
    }

    fn inner(&self, d: usize, path: &Trajectory, z: f64) -> f64 {
        path.stage(d)[0] + 0.5 * z
    }

    fn terminal(&self, path: &Trajectory) -> f64 {
        self.leaf_calls.fetch_add(1, Ordering::Relaxed);
        path.stage(self.depth)[0]
    }

    fn ground_truth(&self) -> Option<f64> {
        Some((0..self.depth).fold(1.0, |c, _| 1.0 + 0.5 * c))
    }
}
