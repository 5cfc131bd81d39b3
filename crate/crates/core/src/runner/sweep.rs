use serde::{Deserialize, Serialize};

use super::{RunError, Runner};
use crate::problem::NestedProblem;
use crate::read::ReadEstimator;
use crate::rng::derive_seed;
use crate::schedule::{GeometricSchedule, Regime, ScheduleError};

/// One `(r0, r1)` cell of a depth-2 schedule sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub r0: f64,
    pub r1: f64,
    pub mean: f64,
    pub sd: f64,
    /// `sqrt(expected leaf cost) * sd`.
    pub wn_sd: f64,
    /// The rates fall outside the LBS ranges.
    pub unvalidated: bool,
}

/// Runs `reps` READ calls for every `(r0, r1)` pair, `r0` varying slowest.
///
/// Pairs outside the LBS ranges still run, tagged `unvalidated`; rates at or
/// below 1/2 are an error since the expected cost is infinite there.
pub fn parameter_sweep<P: NestedProblem>(
    runner: &Runner,
    problem: &P,
    r0_grid: &[f64],
    r1_grid: &[f64],
    reps: u64,
    seed: u64,
) -> Result<Vec<SweepCell>, RunError> {
    if problem.depth() != 2 {
        return Err(RunError::NotDepthTwo(problem.depth()));
    }
    if r0_grid.is_empty() {
        return Err(RunError::EmptyGrid("r0"));
    }
    if r1_grid.is_empty() {
        return Err(RunError::EmptyGrid("r1"));
    }
    if reps < 2 {
        return Err(RunError::NoRepetitions);
    }
    let mut cells = Vec::with_capacity(r0_grid.len() * r1_grid.len());
    for (i, &r0) in r0_grid.iter().enumerate() {
        for (j, &r1) in r1_grid.iter().enumerate() {
            let rates = [r0, r1];
            let (schedule, unvalidated) =
                match GeometricSchedule::validate(2, &rates, Regime::Lbs, None) {
                    Ok(s) => (s, false),
                    Err(ScheduleError::OutOfRange { .. }) => {
                        (GeometricSchedule::unchecked(&rates)?, true)
                    }
                    Err(e) => return Err(e.into()),
                };
            let cost = schedule.expected_leaf_cost(0);
            let read = ReadEstimator::new(problem, schedule)?;
            let tag = (i * r1_grid.len() + j) as u64;
            let run = runner.run_fixed(&read, reps, derive_seed(seed, tag))?;
            let sd = run.summary.sd.expect("reps >= 2");
            cells.push(SweepCell {
                r0,
                r1,
                mean: run.summary.mean,
                sd,
                wn_sd: cost.sqrt() * sd,
                unvalidated,
            });
        }
    }
    Ok(cells)
}
