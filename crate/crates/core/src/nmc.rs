//! Nested Monte Carlo plug-in baselines.
//!
//! With counts `(N_0, ..., N_D)` the estimator samples `N_d` children of every
//! depth-`d` prefix and replaces each inner conditional expectation by the
//! sample average of its children:
//!
//! ```text
//! hat_gamma_D(h) = (1/N_D) sum_k g_D(h, y_k)
//! hat_gamma_d(h) = (1/N_d) sum_j g_d(h, y_j, hat_gamma_{d+1}(h, y_j))
//! ```

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::estimator::{EstimateError, Estimator};
use crate::problem::{CostedEstimate, NestedProblem};
use crate::rng::McRng;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NmcError {
    #[error("allocation has {got} counts but a depth-{depth} problem needs {}", depth + 1)]
    LengthMismatch { depth: usize, got: usize },
    #[error("count at depth {0} must be positive")]
    ZeroCount(usize),
    #[error("allocation cost overflows u64")]
    CostOverflow,
    #[error(transparent)]
    Estimate(#[from] EstimateError),
}

/// The two allocation rules compared against READ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NmcScheme {
    /// `N_0 = N_1 = ... = N_D`.
    Nmc1,
    /// `N_0 = N_1^2 = ... = N_D^2`.
    Nmc2,
}

impl NmcScheme {
    pub fn allocate(self, budget: u64, depth: usize) -> NmcAllocation {
        match self {
            NmcScheme::Nmc1 => allocate_nmc1(budget, depth),
            NmcScheme::Nmc2 => allocate_nmc2(budget, depth),
        }
    }
}

impl fmt::Display for NmcScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NmcScheme::Nmc1 => "nmc1",
            NmcScheme::Nmc2 => "nmc2",
        })
    }
}

/// Per-depth sample counts `(N_0, ..., N_D)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NmcAllocation {
    counts: Vec<u64>,
}

impl NmcAllocation {
    pub fn new(counts: Vec<u64>) -> Result<Self, NmcError> {
        if let Some(d) = counts.iter().position(|&c| c == 0) {
            return Err(NmcError::ZeroCount(d));
        }
        if counts.is_empty() {
            return Err(NmcError::LengthMismatch { depth: 0, got: 0 });
        }
        let alloc = Self { counts };
        alloc.checked_total().ok_or(NmcError::CostOverflow)?;
        Ok(alloc)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn depth(&self) -> usize {
        self.counts.len() - 1
    }

    fn checked_total(&self) -> Option<u64> {
        self.counts
            .iter()
            .try_fold(1u64, |acc, &c| acc.checked_mul(c))
    }

    /// Leaf evaluations per estimate: `prod N_d`.
    pub fn total_cost(&self) -> u64 {
        self.checked_total().expect("checked at construction")
    }

    /// Simulator calls per estimate: `N_0 + N_0 N_1 + ... + prod N_d`.
    pub fn sim_calls(&self) -> u64 {
        self.counts
            .iter()
            .scan(1u64, |acc, &c| {
                *acc *= c;
                Some(*acc)
            })
            .sum()
    }
}

fn rounded_root(budget: u64, degree: usize) -> u64 {
    let m = (budget.max(1) as f64).powf(1.0 / degree as f64).round();
    (m as u64).max(1)
}

/// Equal counts `round(budget^{1/(D+1)})` at every depth.
pub fn allocate_nmc1(budget: u64, depth: usize) -> NmcAllocation {
    let m = rounded_root(budget, depth + 1);
    NmcAllocation {
        counts: vec![m; depth + 1],
    }
}

/// `N_1 = ... = N_D = m`, `N_0 = m^2`, with `m = round(budget^{1/(D+2)})`.
pub fn allocate_nmc2(budget: u64, depth: usize) -> NmcAllocation {
    let m = rounded_root(budget, depth + 2);
    let mut counts = vec![m; depth + 1];
    counts[0] = m * m;
    NmcAllocation { counts }
}

/// One nested Monte Carlo estimate of `gamma_0`.
pub fn nmc_estimate<P: NestedProblem + ?Sized>(
    problem: &P,
    alloc: &NmcAllocation,
    rng: &mut McRng,
) -> Result<CostedEstimate, NmcError> {
    if alloc.counts.len() != problem.depth() + 1 {
        return Err(NmcError::LengthMismatch {
            depth: problem.depth(),
            got: alloc.counts.len(),
        });
    }
    Ok(run_nested(problem, alloc, rng)?)
}

fn run_nested<P: NestedProblem + ?Sized>(
    problem: &P,
    alloc: &NmcAllocation,
    rng: &mut McRng,
) -> Result<CostedEstimate, EstimateError> {
    let mut path = Trajectory::with_capacity(problem.dim(), problem.depth() + 1);
    let mut scratch = vec![0.0; problem.dim()];
    let value = nested_mean(problem, &alloc.counts, 0, &mut path, &mut scratch, rng)?;
    Ok(CostedEstimate {
        value,
        leaf_cost: alloc.total_cost(),
        sim_calls: alloc.sim_calls(),
    })
}

fn nested_mean<P: NestedProblem + ?Sized>(
    problem: &P,
    counts: &[u64],
    d: usize,
    path: &mut Trajectory,
    scratch: &mut [f64],
    rng: &mut McRng,
) -> Result<f64, EstimateError> {
    let n = counts[d];
    let mut sum = 0.0;
    for _ in 0..n {
        problem.simulate(path, rng, scratch)?;
        path.push_stage(scratch);
        sum += if d == problem.depth() {
            problem.terminal(path)
        } else {
            let inner = nested_mean(problem, counts, d + 1, path, scratch, rng)?;
            problem.inner(d, path, inner)
        };
        path.truncate(d);
    }
    Ok(sum / n as f64)
}

/// A problem with a fixed allocation, usable by the runner.
#[derive(Debug, Clone)]
pub struct NmcEstimator<P> {
    problem: P,
    alloc: NmcAllocation,
}

impl<P: NestedProblem> NmcEstimator<P> {
    pub fn new(problem: P, alloc: NmcAllocation) -> Result<Self, NmcError> {
        if alloc.counts.len() != problem.depth() + 1 {
            return Err(NmcError::LengthMismatch {
                depth: problem.depth(),
                got: alloc.counts.len(),
            });
        }
        Ok(Self { problem, alloc })
    }

    pub fn allocation(&self) -> &NmcAllocation {
        &self.alloc
    }
}

impl<P: NestedProblem> Estimator for NmcEstimator<P> {
    fn estimate(&self, rng: &mut McRng) -> Result<CostedEstimate, EstimateError> {
        run_nested(&self.problem, &self.alloc, rng)
    }

    fn expected_leaf_cost(&self) -> Option<f64> {
        Some(self.alloc.total_cost() as f64)
    }
}
