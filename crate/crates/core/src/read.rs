//! The recursive randomized-MLMC estimator.
//!
//! A call at depth `d < D` draws `y^(d)`, a level `N ~ Geo(r_d)`, and then
//! `2^N` independent child estimates of `gamma_{d+1}`. With `S`, `S_odd` and
//! `S_even` the full, odd-indexed and even-indexed child sums, it returns
//! `Delta_N / p_{r_d}(N)` where
//!
//! ```text
//! Delta_0 = g_d(y, R(1))
//! Delta_n = g_d(y, S / 2^n) - (g_d(y, S_odd / 2^{n-1}) + g_d(y, S_even / 2^{n-1})) / 2
//! ```
//!
//! At depth `D` a single `g_D` evaluation is returned. Children are evaluated
//! one after another from the same stream and only the two running half sums
//! are kept, so memory is `O(D)` whatever the realized levels.

use crate::estimator::{EstimateError, Estimator};
use crate::geometric::{pmf_unchecked, sample_with_log_q};
use crate::problem::{CostedEstimate, NestedProblem};
use crate::rng::McRng;
use crate::schedule::{GeometricSchedule, ScheduleError};
use crate::sums::OddEvenSums;
use crate::trajectory::Trajectory;

/// Level `n` together with the full-sample mean and, for `n >= 1`, the
/// odd-half and even-half means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntitheticTriple {
    pub level: u32,
    pub mean_all: f64,
    /// `(mean_odd, mean_even)`; `None` at level 0.
    pub halves: Option<(f64, f64)>,
}

impl AntitheticTriple {
    /// Level 0 with a single child value.
    pub fn single(value: f64) -> Self {
        Self {
            level: 0,
            mean_all: value,
            halves: None,
        }
    }

    /// Builds the triple from the running sums of `2^level` children.
    pub fn from_sums(level: u32, sums: &OddEvenSums) -> Self {
        debug_assert_eq!(sums.count(), 1u64 << level);
        if level == 0 {
            return Self::single(sums.total());
        }
        let half = 2f64.powi(level as i32 - 1);
        Self {
            level,
            mean_all: sums.total() / (2.0 * half),
            halves: Some((sums.odd() / half, sums.even() / half)),
        }
    }
}

/// `Delta_n` for a function of the last argument.
pub fn delta_antithetic<G: Fn(f64) -> f64>(g: G, triple: &AntitheticTriple) -> f64 {
    delta_parts(g, triple).0
}

/// `(Delta_n, g(mean_all))`.
fn delta_parts<G: Fn(f64) -> f64>(g: G, triple: &AntitheticTriple) -> (f64, f64) {
    let g_all = g(triple.mean_all);
    match triple.halves {
        None => (g_all, g_all),
        Some((odd, even)) => (g_all - 0.5 * (g(odd) + g(even)), g_all),
    }
}

/// What one internal node of the recursion computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeTrace {
    pub depth: usize,
    pub triple: AntitheticTriple,
    pub delta: f64,
    /// `g_d(history, mean_all)`, the scale for rounding checks.
    pub g_all: f64,
}

/// Receives a [`NodeTrace`] for every internal node, in completion order.
pub trait Observer {
    fn node(&mut self, trace: &NodeTrace);
}

impl Observer for () {
    #[inline]
    fn node(&mut self, _: &NodeTrace) {}
}

impl<F: FnMut(&NodeTrace)> Observer for F {
    fn node(&mut self, trace: &NodeTrace) {
        self(trace)
    }
}

/// A problem paired with a schedule of matching depth.
#[derive(Debug, Clone)]
pub struct ReadEstimator<P> {
    problem: P,
    schedule: GeometricSchedule,
}

impl<P: NestedProblem> ReadEstimator<P> {
    pub fn new(problem: P, schedule: GeometricSchedule) -> Result<Self, ScheduleError> {
        if schedule.depth() != problem.depth() {
            return Err(ScheduleError::LengthMismatch {
                expected: problem.depth(),
                got: schedule.depth(),
            });
        }
        Ok(Self { problem, schedule })
    }

    pub fn problem(&self) -> &P {
        &self.problem
    }

    pub fn schedule(&self) -> &GeometricSchedule {
        &self.schedule
    }

    /// One unbiased estimate of `gamma_d(history)`; `history` must hold `d` stages.
    pub fn estimate_gamma(
        &self,
        d: usize,
        history: &Trajectory,
        rng: &mut McRng,
    ) -> Result<CostedEstimate, EstimateError> {
        self.estimate_gamma_traced(d, history, rng, &mut ())
    }

    pub fn estimate_gamma_traced<O: Observer>(
        &self,
        d: usize,
        history: &Trajectory,
        rng: &mut McRng,
        observer: &mut O,
    ) -> Result<CostedEstimate, EstimateError> {
        let depth = self.problem.depth();
        if d > depth || history.len() != d || history.dim() != self.problem.dim() {
            return Err(EstimateError::HistoryMismatch {
                depth: d,
                got: history.len(),
                max_depth: depth,
            });
        }
        let mut path = Trajectory::with_capacity(self.problem.dim(), depth + 1);
        for stage in history.stages() {
            path.push_stage(stage);
        }
        let mut scratch = vec![0.0; self.problem.dim()];
        self.recurse(d, &mut path, &mut scratch, rng, observer)
    }

    /// One unbiased estimate of `gamma_0`.
    pub fn estimate_root(&self, rng: &mut McRng) -> Result<CostedEstimate, EstimateError> {
        self.estimate_gamma(0, &Trajectory::new(self.problem.dim()), rng)
    }

    pub fn estimate_root_traced<O: Observer>(
        &self,
        rng: &mut McRng,
        observer: &mut O,
    ) -> Result<CostedEstimate, EstimateError> {
        self.estimate_gamma_traced(0, &Trajectory::new(self.problem.dim()), rng, observer)
    }

    fn recurse<O: Observer>(
        &self,
        d: usize,
        path: &mut Trajectory,
        scratch: &mut [f64],
        rng: &mut McRng,
        observer: &mut O,
    ) -> Result<CostedEstimate, EstimateError> {
        self.problem.simulate(path, rng, scratch)?;
        path.push_stage(scratch);

        if d == self.problem.depth() {
            let value = self.problem.terminal(path);
            path.truncate(d);
            return Ok(CostedEstimate {
                value,
                leaf_cost: 1,
                sim_calls: 1,
            });
        }

        let level = sample_with_log_q(self.schedule.log_q(d), rng);
        if level >= 63 {
            return Err(EstimateError::LevelOverflow { depth: d, level });
        }
        let mut sums = OddEvenSums::new();
        let mut leaf_cost = 0;
        let mut sim_calls = 1;
        for _ in 0..(1u64 << level) {
            let child = self.recurse(d + 1, path, scratch, rng, observer)?;
            sums.push(child.value);
            leaf_cost += child.leaf_cost;
            sim_calls += child.sim_calls;
        }

        let triple = AntitheticTriple::from_sums(level, &sums);
        let problem = &self.problem;
        let (delta, g_all) = delta_parts(|z| problem.inner(d, path, z), &triple);
        observer.node(&NodeTrace {
            depth: d,
            triple,
            delta,
            g_all,
        });
        path.truncate(d);

        Ok(CostedEstimate {
            value: delta / pmf_unchecked(self.schedule.rate(d), level),
            leaf_cost,
            sim_calls,
        })
    }
}

impl<P: NestedProblem> Estimator for ReadEstimator<P> {
    fn estimate(&self, rng: &mut McRng) -> Result<CostedEstimate, EstimateError> {
        self.estimate_root(rng)
    }

    fn expected_leaf_cost(&self) -> Option<f64> {
        Some(self.schedule.expected_leaf_cost(0))
    }
}
