use anyhow::{Context, Result};
use nested_read::runner::{
    fit_loglog_slope, mse_vs_cost_curve, parameter_sweep, write_curve_csv, write_records_csv,
    write_sweep_csv, CurveEstimator, CurvePoint, SweepCell,
};
use nested_read::{
    Estimator, GeometricSchedule, NestedProblem, NmcAllocation, NmcEstimator, ReadEstimator,
    RepRecord, RunError, RunSummary, Runner,
};
use serde::{Deserialize, Serialize};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::sync::Arc;

use crate::config::Effective;

/// Output of `estimate`, also written to `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub config: Effective,
    pub summary: RunSummary,
    /// `None` for fixed-size runs.
    pub converged: Option<bool>,
    pub truth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub config: Effective,
    pub slopes: Vec<Slope>,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slope {
    pub estimator: String,
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: Effective,
    pub cells: Vec<SweepCell>,
}

/// One pricing method: total leaf cost, wall time, estimate and its SE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceRow {
    pub method: String,
    pub cost: u64,
    pub time: f64,
    pub estimate: f64,
    pub se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceReport {
    pub config: Effective,
    pub converged: Option<bool>,
    pub rows: Vec<PriceRow>,
}

/// Whether the command finished its job; adaptive runs that hit the ceiling
/// report `false`.
pub struct Outcome {
    pub json: String,
    pub complete: bool,
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn out_dir(cfg: &Effective) -> Result<Option<&Path>> {
    match &cfg.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            Ok(Some(dir.as_path()))
        }
        None => Ok(None),
    }
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_records(dir: &Path, name: &str, records: &[RepRecord]) -> Result<()> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    write_records_csv(BufWriter::new(file), records)?;
    Ok(())
}

fn schedule_of(cfg: &Effective) -> Result<GeometricSchedule> {
    let echo = cfg.schedule.as_ref().context("no schedule resolved")?;
    Ok(nested_read::validate_schedule(
        echo.rates.len(),
        &echo.rates,
        echo.regime,
        echo.delta,
    )?)
}

/// The configured estimator as a trait object.
fn estimator(cfg: &Effective, problem: Arc<dyn NestedProblem>) -> Result<Box<dyn Estimator>> {
    Ok(match &cfg.allocation {
        Some(counts) => Box::new(NmcEstimator::new(
            problem,
            NmcAllocation::new(counts.clone())?,
        )?),
        None => Box::new(ReadEstimator::new(problem, schedule_of(cfg)?)?),
    })
}

struct Run {
    summary: RunSummary,
    records: Vec<RepRecord>,
    converged: Option<bool>,
}

/// Fixed or adaptive, as configured. If a repetition fails the completed
/// records are saved as `records.partial.csv` before the error is returned.
fn run(cfg: &Effective, runner: &Runner, est: &dyn Estimator, seed: u64) -> Result<Run> {
    let result = match (&cfg.stopping, cfg.reps) {
        (Some(rule), _) => runner.run_adaptive(&est, rule, seed).map(|r| Run {
            summary: r.summary,
            records: r.records,
            converged: Some(r.converged),
        }),
        (None, Some(n)) => runner.run_fixed(&est, n, seed).map(|r| Run {
            summary: r.summary,
            records: r.records,
            converged: None,
        }),
        (None, None) => anyhow::bail!("no run size resolved"),
    };
    match result {
        Ok(r) => Ok(r),
        Err(RunError::Aborted {
            rep_index,
            source,
            completed,
        }) => {
            if let Some(dir) = out_dir(cfg)? {
                write_records(dir, "records.partial.csv", &completed)?;
            }
            Err(anyhow::anyhow!(
                "repetition {rep_index} failed: {source} ({} completed)",
                completed.len()
            ))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn estimate(cfg: Effective) -> Result<Outcome> {
    let problem = cfg.problem.build()?;
    let truth = cfg.truth.or_else(|| problem.ground_truth());
    let runner = Runner::new(cfg.workers)?;
    let est = estimator(&cfg, problem)?;
    let r = run(&cfg, &runner, est.as_ref(), cfg.seed)?;
    let report = EstimateReport {
        summary: r.summary,
        converged: r.converged,
        truth,
        config: cfg,
    };
    let json = to_json(&report)?;
    if let Some(dir) = out_dir(&report.config)? {
        write_text(dir, "summary.json", &json)?;
        write_records(dir, "records.csv", &r.records)?;
    }
    Ok(Outcome {
        json,
        complete: report.converged.unwrap_or(true),
    })
}

pub fn compare(cfg: Effective) -> Result<Outcome> {
    let problem = cfg.problem.build()?;
    let runner = Runner::new(cfg.workers)?;
    let budgets = cfg.budget_grid.clone().context("no budget grid resolved")?;
    let reps = cfg.repetitions.context("no repetitions resolved")?;
    let estimators = [
        CurveEstimator::Read(schedule_of(&cfg)?),
        CurveEstimator::Nmc(nested_read::NmcScheme::Nmc1),
        CurveEstimator::Nmc(nested_read::NmcScheme::Nmc2),
    ];
    let mut points = Vec::new();
    let mut slopes = Vec::new();
    for (i, est) in estimators.iter().enumerate() {
        let seed = nested_read::derive_seed(cfg.seed, i as u64);
        let pts = mse_vs_cost_curve(&runner, &problem, est, &budgets, reps, seed, cfg.truth)?;
        slopes.push(Slope {
            estimator: est.label(),
            slope: fit_loglog_slope(&pts),
        });
        points.extend(pts);
    }
    let report = CompareReport {
        config: cfg,
        slopes,
        points,
    };
    let json = to_json(&report)?;
    if let Some(dir) = out_dir(&report.config)? {
        write_text(dir, "slopes.json", &json)?;
        let path = dir.join("curve.csv");
        let file = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        write_curve_csv(BufWriter::new(file), &report.points)?;
    }
    Ok(Outcome {
        json,
        complete: true,
    })
}

pub fn sweep(cfg: Effective) -> Result<Outcome> {
    let problem = cfg.problem.build()?;
    let runner = Runner::new(cfg.workers)?;
    let r0 = cfg.r0_grid.clone().context("no r0 grid resolved")?;
    let r1 = cfg.r1_grid.clone().context("no r1 grid resolved")?;
    let reps = cfg.reps.context("no reps resolved")?;
    let cells = parameter_sweep(&runner, &problem, &r0, &r1, reps, cfg.seed)?;
    let report = SweepReport { config: cfg, cells };
    let json = to_json(&report)?;
    if let Some(dir) = out_dir(&report.config)? {
        write_text(dir, "sweep.json", &json)?;
        let path = dir.join("sweep.csv");
        let file = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        write_sweep_csv(BufWriter::new(file), &report.cells)?;
    }
    Ok(Outcome {
        json,
        complete: true,
    })
}

fn row(method: String, s: &RunSummary) -> PriceRow {
    PriceRow {
        method,
        cost: s.total_leaf_cost,
        time: s.wall_time,
        estimate: s.mean,
        se: s.se,
    }
}

pub fn price(cfg: Effective) -> Result<Outcome> {
    let problem = cfg.problem.build()?;
    let runner = Runner::new(cfg.workers)?;
    let read = ReadEstimator::new(problem.clone(), schedule_of(&cfg)?)?;
    let r = run(&cfg, &runner, &read, cfg.seed)?;
    let mut rows = vec![row("read".into(), &r.summary)];
    for (i, scheme) in cfg.baselines.iter().enumerate() {
        let budget = cfg.budget.context("no budget resolved")?;
        let n = cfg.nmc_reps.context("no nmc reps resolved")?;
        let nmc = NmcEstimator::new(problem.clone(), scheme.allocate(budget, problem.depth()))?;
        let seed = nested_read::derive_seed(cfg.seed, i as u64 + 1);
        let s = runner.run_fixed(&nmc, n, seed)?.summary;
        rows.push(row(scheme.to_string(), &s));
    }
    let report = PriceReport {
        config: cfg,
        converged: r.converged,
        rows,
    };
    let json = to_json(&report)?;
    if let Some(dir) = out_dir(&report.config)? {
        write_text(dir, "price.json", &json)?;
        write_records(dir, "records.csv", &r.records)?;
    }
    Ok(Outcome {
        json,
        complete: report.converged.unwrap_or(true),
    })
}
