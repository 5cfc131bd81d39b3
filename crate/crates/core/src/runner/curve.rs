use serde::{Deserialize, Serialize};

use super::{RunError, Runner};
use crate::nmc::{NmcEstimator, NmcScheme};
use crate::problem::NestedProblem;
use crate::read::ReadEstimator;
use crate::rng::derive_seed;
use crate::schedule::GeometricSchedule;

/// Which estimator a cost curve is traced for.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveEstimator {
    /// The budget sets the number of averaged READ calls,
    /// `round(budget / expected cost)`.
    Read(GeometricSchedule),
    /// The budget sets the allocation `(N_0, ..., N_D)`.
    Nmc(NmcScheme),
}

impl CurveEstimator {
    pub fn label(&self) -> String {
        match self {
            CurveEstimator::Read(_) => "read".to_string(),
            CurveEstimator::Nmc(s) => s.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub estimator: String,
    pub budget: u64,
    pub mse: f64,
    /// Mean realized leaf cost of one replicate.
    pub mean_cost: f64,
}

/// Empirical MSE against `truth` at every budget, from `repetitions`
/// independent replicates per point.
pub fn mse_vs_cost_curve<P: NestedProblem>(
    runner: &Runner,
    problem: &P,
    estimator: &CurveEstimator,
    budgets: &[u64],
    repetitions: u64,
    seed: u64,
    truth: Option<f64>,
) -> Result<Vec<CurvePoint>, RunError> {
    let truth = truth
        .or_else(|| problem.ground_truth())
        .ok_or(RunError::MissingTruth)?;
    if budgets.is_empty() {
        return Err(RunError::EmptyGrid("budget"));
    }
    if repetitions == 0 {
        return Err(RunError::NoRepetitions);
    }
    let label = estimator.label();
    budgets
        .iter()
        .enumerate()
        .map(|(i, &budget)| {
            let point_seed = derive_seed(seed, i as u64);
            let (mse, mean_cost) = match estimator {
                CurveEstimator::Read(schedule) => {
                    let read = ReadEstimator::new(problem, schedule.clone())?;
                    let per =
                        ((budget as f64 / schedule.expected_leaf_cost(0)).round() as u64).max(1);
                    let run = runner.run_fixed(&read, per * repetitions, point_seed)?;
                    let sq: f64 = run
                        .records
                        .chunks(per as usize)
                        .map(|c| {
                            (c.iter().map(|r| r.value).sum::<f64>() / per as f64 - truth).powi(2)
                        })
                        .sum();
                    (
                        sq / repetitions as f64,
                        run.summary.total_leaf_cost as f64 / repetitions as f64,
                    )
                }
                CurveEstimator::Nmc(scheme) => {
                    let alloc = scheme.allocate(budget, problem.depth());
                    let cost = alloc.total_cost() as f64;
                    let nmc = NmcEstimator::new(problem, alloc)?;
                    let run = runner.run_fixed(&nmc, repetitions, point_seed)?;
                    let sq: f64 = run.records.iter().map(|r| (r.value - truth).powi(2)).sum();
                    (sq / repetitions as f64, cost)
                }
            };
            Ok(CurvePoint {
                estimator: label.clone(),
                budget,
                mse,
                mean_cost,
            })
        })
        .collect()
}

/// Least-squares slope of `log10 mse` against `log10 mean_cost`.
pub fn fit_loglog_slope(points: &[CurvePoint]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.mean_cost.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mse.log10()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
