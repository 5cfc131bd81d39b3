//! Repetition engine.
//!
//! Repetition `i` always draws from stream `i` of the run's seed, and records
//! are kept in index order, so results do not depend on the worker count.

mod curve;
mod output;
mod stats;
mod sweep;

pub use curve::{fit_loglog_slope, mse_vs_cost_curve, CurveEstimator, CurvePoint};
pub use output::{write_curve_csv, write_records_csv, write_sweep_csv};
pub use stats::{normal_quantile, summarize, RepRecord, RunSummary, RunningStats};
pub use sweep::{parameter_sweep, SweepCell};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;
use thiserror::Error;

use crate::estimator::{EstimateError, Estimator};
use crate::nmc::NmcError;
use crate::rng::stream_rng;
use crate::schedule::ScheduleError;

/// Half-width multiplier of the default 95% interval.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("worker count must be positive")]
    NoWorkers,
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error("repetition count must be positive")]
    NoRepetitions,
    #[error("invalid stopping rule: {0}")]
    InvalidRule(&'static str),
    #[error("repetition {rep_index} failed after {} completed: {source}", completed.len())]
    Aborted {
        rep_index: u64,
        source: EstimateError,
        /// Successful records, flagged as partial by being returned here.
        completed: Vec<RepRecord>,
    },
    #[error("no ground truth or reference value for this problem")]
    MissingTruth,
    #[error("parameter sweeps need a depth-2 problem, got depth {0}")]
    NotDepthTwo(usize),
    #[error("empty {0} grid")]
    EmptyGrid(&'static str),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Nmc(#[from] NmcError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub summary: RunSummary,
    pub records: Vec<RepRecord>,
}

/// Adaptive stopping: extend until the interval is narrower than `2 epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub epsilon: f64,
    /// Two-sided tail mass, in percent.
    pub delta_pct: f64,
    pub min_reps: u64,
    pub max_reps: u64,
}

impl StoppingRule {
    pub fn validate(&self) -> Result<(), RunError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(RunError::InvalidRule("epsilon must be positive and finite"));
        }
        if !(self.delta_pct > 0.0 && self.delta_pct < 100.0) {
            return Err(RunError::InvalidRule("delta_pct must lie in (0, 100)"));
        }
        if self.min_reps < 2 {
            return Err(RunError::InvalidRule("min_reps must be at least 2"));
        }
        if self.max_reps < self.min_reps {
            return Err(RunError::InvalidRule("max_reps must be at least min_reps"));
        }
        Ok(())
    }

    /// Repetitions added per extension after the first `min_reps`.
    pub fn batch(&self) -> u64 {
        self.min_reps.max(1000)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveResult {
    pub summary: RunSummary,
    pub records: Vec<RepRecord>,
    pub converged: bool,
}

/// A fixed-size worker pool.
pub struct Runner {
    pool: rayon::ThreadPool,
    workers: usize,
}

impl Runner {
    pub fn new(workers: usize) -> Result<Self, RunError> {
        if workers == 0 {
            return Err(RunError::NoWorkers);
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| RunError::Pool(e.to_string()))?;
        Ok(Self { pool, workers })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Runs repetitions `start..end` of `seed`'s streams, in index order.
    pub fn run_range<E: Estimator>(
        &self,
        estimator: &E,
        seed: u64,
        start: u64,
        end: u64,
    ) -> Result<Vec<RepRecord>, RunError> {
        let one = |i: u64| {
            let mut rng = stream_rng(seed, i);
            estimator.estimate(&mut rng).map(|e| RepRecord {
                rep_index: i,
                value: e.value,
                leaf_cost: e.leaf_cost,
                sim_calls: e.sim_calls,
            })
        };
        let results: Vec<Result<RepRecord, EstimateError>> = if self.workers == 1 {
            (start..end).map(one).collect()
        } else {
            self.pool
                .install(|| (start..end).into_par_iter().map(one).collect())
        };
        let mut records = Vec::with_capacity(results.len());
        let mut failure = None;
        for (i, r) in (start..).zip(results) {
            match r {
                Ok(rec) => records.push(rec),
                Err(e) if failure.is_none() => failure = Some((i, e)),
                Err(_) => {}
            }
        }
        match failure {
            None => Ok(records),
            Some((rep_index, source)) => Err(RunError::Aborted {
                rep_index,
                source,
                completed: records,
            }),
        }
    }

    /// `n` independent repetitions with a 95% interval.
    pub fn run_fixed<E: Estimator>(
        &self,
        estimator: &E,
        n: u64,
        seed: u64,
    ) -> Result<RunResult, RunError> {
        if n == 0 {
            return Err(RunError::NoRepetitions);
        }
        let start = Instant::now();
        let records = self.run_range(estimator, seed, 0, n)?;
        let mut stats = RunningStats::new();
        records.iter().for_each(|r| stats.push(r));
        let summary = stats.summary(Z_95, start.elapsed().as_secs_f64());
        Ok(RunResult { summary, records })
    }

    /// Starts with `min_reps` repetitions and extends by [`StoppingRule::batch`]
    /// until the `(1 - delta)` interval is narrower than `2 epsilon` or
    /// `max_reps` is reached.
    pub fn run_adaptive<E: Estimator>(
        &self,
        estimator: &E,
        rule: &StoppingRule,
        seed: u64,
    ) -> Result<AdaptiveResult, RunError> {
        rule.validate()?;
        let z = normal_quantile(rule.delta_pct);
        let start = Instant::now();
        let mut stats = RunningStats::new();
        let mut records = Vec::new();
        let mut target = rule.min_reps;
        loop {
            let done = stats.n();
            let batch = self.run_range(estimator, seed, done, target)?;
            batch.iter().for_each(|r| stats.push(r));
            records.extend(batch);
            let summary = stats.summary(z, start.elapsed().as_secs_f64());
            let narrow = summary.ci_width().is_some_and(|w| w < 2.0 * rule.epsilon);
            if narrow || stats.n() >= rule.max_reps {
                return Ok(AdaptiveResult {
                    summary,
                    records,
                    converged: narrow,
                });
            }
            target = (stats.n() + rule.batch()).min(rule.max_reps);
        }
    }
}

/// `wall_time * (mean - truth)^2`.
pub fn time_normalized_error(summary: &RunSummary, truth: f64) -> f64 {
    summary.wall_time * (summary.mean - truth).powi(2)
}
