//! Option merging: flags override the config file, which overrides defaults.

use clap::{Args, ValueEnum};
use nested_read::problems::{GbmParams, HeavyTail, ProblemSpec};
use nested_read::{GeometricSchedule, NmcScheme, Regime, StoppingRule};
use serde::{Deserialize, Deserializer, Serialize};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

/// A bad option value; `field` is the flag (or config key) at fault.
#[derive(Debug, Error)]
#[error("invalid {field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

fn bad(field: &str, message: impl ToString) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Read,
    Nmc1,
    Nmc2,
}

impl EstimatorKind {
    pub fn scheme(self) -> Option<NmcScheme> {
        match self {
            EstimatorKind::Read => None,
            EstimatorKind::Nmc1 => Some(NmcScheme::Nmc1),
            EstimatorKind::Nmc2 => Some(NmcScheme::Nmc2),
        }
    }
}

/// A non-negative count; accepts `100000`, `1e5` or `1_000`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Count(pub u64);

impl FromStr for Count {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim().replace('_', "");
        if let Ok(n) = t.parse::<u64>() {
            return Ok(Count(n));
        }
        match t.parse::<f64>() {
            Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 => Ok(Count(x as u64)),
            _ => Err(format!("{s:?} is not a non-negative integer")),
        }
    }
}

impl<'de> Deserialize<'de> for Count {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Float(f64),
            Text(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Int(n) => return Ok(Count(n)),
            Raw::Float(x) => x.to_string(),
            Raw::Text(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A comma-separated list, or a TOML array in the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: std::fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<T>().map_err(|e| format!("{t:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}

impl<'de, T> Deserialize<'de> for List<T>
where
    T: FromStr + Deserialize<'de>,
    T::Err: std::fmt::Display,
{
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw<T> {
            Items(Vec<T>),
            Text(String),
        }
        match Raw::<T>::deserialize(d)? {
            Raw::Items(v) => Ok(List(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    match s {
        "lbs" => Ok(Regime::Lbs),
        "lbl" => Ok(Regime::Lbl),
        "unchecked" => Ok(Regime::Unchecked),
        _ => Err(format!("{s:?} is not one of lbs, lbl, unchecked")),
    }
}

fn parse_scheme(s: &str) -> Result<NmcScheme, String> {
    match s {
        "nmc1" => Ok(NmcScheme::Nmc1),
        "nmc2" => Ok(NmcScheme::Nmc2),
        _ => Err(format!("{s:?} is not one of nmc1, nmc2")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeName(pub NmcScheme);

impl FromStr for SchemeName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_scheme(s).map(SchemeName)
    }
}

impl<'de> Deserialize<'de> for SchemeName {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Every option, as given on the command line or in the config file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Options {
    /// Flat TOML file with the same keys as the long flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// gaussian-sine, heavy-tail, sigmoid or bermudan.
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorKind>,
    /// Geometric rates r_0,...,r_{D-1}.
    #[arg(long)]
    pub r: Option<List<f64>>,
    /// Rate validation regime: lbs, lbl or unchecked.
    #[arg(long, value_parser = parse_regime)]
    #[serde(default, deserialize_with = "regime_opt")]
    pub regime: Option<Regime>,
    /// Global delta of the lbl regime, in (0, 1/2).
    #[arg(long)]
    pub delta: Option<f64>,

    /// Fixed number of repetitions.
    #[arg(long)]
    pub reps: Option<Count>,
    /// Adaptive stopping: target interval half-width.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Adaptive stopping: confidence level in percent.
    #[arg(long)]
    pub conf: Option<f64>,
    #[arg(long)]
    pub min_reps: Option<Count>,
    #[arg(long)]
    pub max_reps: Option<Count>,

    /// Leaf budget of one NMC estimate.
    #[arg(long)]
    pub budget: Option<Count>,
    /// Budgets for `compare`.
    #[arg(long)]
    pub budget_grid: Option<List<Count>>,
    /// Independent replicates per budget for `compare`.
    #[arg(long)]
    pub repetitions: Option<Count>,
    #[arg(long)]
    pub r0_grid: Option<List<f64>>,
    #[arg(long)]
    pub r1_grid: Option<List<f64>>,
    /// Reference value when the problem has no closed form.
    #[arg(long)]
    pub truth: Option<f64>,
    /// NMC baselines for `price`.
    #[arg(long)]
    pub baselines: Option<List<SchemeName>>,
    /// Repetitions of each NMC baseline for `price`.
    #[arg(long)]
    pub nmc_reps: Option<Count>,

    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Directory for output files.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long)]
    pub df: Option<f64>,
    #[arg(long)]
    pub ncp: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub div: Option<f64>,
    #[arg(long)]
    pub strike: Option<f64>,
    /// One spot for every asset, or one per asset.
    #[arg(long)]
    pub spot: Option<List<f64>>,
    #[arg(long)]
    pub maturity: Option<f64>,
    /// Number of exercise intervals D.
    #[arg(long, visible_alias = "depth")]
    pub steps: Option<usize>,
    #[arg(long)]
    pub assets: Option<usize>,
}

fn regime_opt<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Regime>, D::Error> {
    let s = String::deserialize(d)?;
    parse_regime(&s).map(Some).map_err(serde::de::Error::custom)
}

macro_rules! overlay {
    ($flags:expr, $file:expr, $($f:ident),* $(,)?) => {
        Options { config: $flags.config, $($f: $flags.$f.or($file.$f)),* }
    };
}

/// Field-by-field `flags.or(file)`.
fn overlay(flags: Options, file: Options) -> Options {
    overlay!(
        flags,
        file,
        problem,
        estimator,
        r,
        regime,
        delta,
        reps,
        epsilon,
        conf,
        min_reps,
        max_reps,
        budget,
        budget_grid,
        repetitions,
        r0_grid,
        r1_grid,
        truth,
        baselines,
        nmc_reps,
        seed,
        workers,
        out,
        df,
        ncp,
        sigma,
        rate,
        div,
        strike,
        spot,
        maturity,
        steps,
        assets,
    )
}

impl Options {
    /// Reads `--config`, if any, underneath the flags.
    pub fn merged(self) -> Result<Options, ConfigError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        Ok(overlay(self, read_file(&path)?))
    }
}

fn read_file(path: &Path) -> Result<Options, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| bad("--config", format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| bad("--config", format!("{}: {e}", path.display())))
}

/// The schedule actually used, echoed into outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEcho {
    pub rates: Vec<f64>,
    pub regime: Regime,
    pub delta: Option<f64>,
    pub expected_leaf_cost: f64,
}

/// The fully resolved configuration of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Effective {
    pub command: String,
    pub problem: ProblemSpec,
    pub estimator: EstimatorKind,
    pub schedule: Option<ScheduleEcho>,
    pub allocation: Option<Vec<u64>>,
    pub budget: Option<u64>,
    pub reps: Option<u64>,
    pub stopping: Option<StoppingRule>,
    pub budget_grid: Option<Vec<u64>>,
    pub repetitions: Option<u64>,
    pub r0_grid: Option<Vec<f64>>,
    pub r1_grid: Option<Vec<f64>>,
    pub truth: Option<f64>,
    pub baselines: Vec<NmcScheme>,
    pub nmc_reps: Option<u64>,
    pub seed: u64,
    pub workers: usize,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_REPS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_BUDGETS: [u64; 3] = [10_000, 100_000, 1_000_000];
pub const DEFAULT_REPETITIONS: u64 = 20;

fn positive(field: &str, c: Option<Count>) -> Result<Option<u64>, ConfigError> {
    match c {
        Some(Count(0)) => Err(bad(field, "must be positive")),
        Some(Count(n)) => Ok(Some(n)),
        None => Ok(None),
    }
}

fn finite(field: &str, x: Option<f64>) -> Result<Option<f64>, ConfigError> {
    match x {
        Some(v) if !v.is_finite() => Err(bad(field, format!("{v} is not finite"))),
        other => Ok(other),
    }
}

impl Options {
    fn problem_spec(&self, default: &str) -> Result<ProblemSpec, ConfigError> {
        let name = self.problem.as_deref().unwrap_or(default);
        let mut spec = ProblemSpec::by_name(name).map_err(|e| bad("--problem", e))?;
        let only = |field: &str, set: bool, owner: &str| {
            if set {
                Err(bad(field, format!("applies only to the {owner} problem")))
            } else {
                Ok(())
            }
        };
        let gbm_set = self.sigma.is_some()
            || self.rate.is_some()
            || self.div.is_some()
            || self.strike.is_some()
            || self.spot.is_some()
            || self.maturity.is_some()
            || self.steps.is_some()
            || self.assets.is_some();
        match &mut spec {
            ProblemSpec::HeavyTail { df, ncp } => {
                only(
                    "--sigma/--rate/--div/--strike/--spot/--maturity/--steps/--assets",
                    gbm_set,
                    "bermudan",
                )?;
                *df = finite("--df", self.df)?.unwrap_or(HeavyTail::DEFAULT_DF);
                *ncp = finite("--ncp", self.ncp)?.unwrap_or(HeavyTail::DEFAULT_NCP);
            }
            ProblemSpec::Bermudan(p) => {
                only(
                    "--df/--ncp",
                    self.df.is_some() || self.ncp.is_some(),
                    "heavy-tail",
                )?;
                *p = self.gbm_params()?;
            }
            _ => {
                only(
                    "--df/--ncp",
                    self.df.is_some() || self.ncp.is_some(),
                    "heavy-tail",
                )?;
                only(
                    "--sigma/--rate/--div/--strike/--spot/--maturity/--steps/--assets",
                    gbm_set,
                    "bermudan",
                )?;
            }
        }
        spec.build().map_err(|e| bad("problem parameters", e))?;
        Ok(spec)
    }

    fn gbm_params(&self) -> Result<GbmParams, ConfigError> {
        let d = GbmParams::default();
        let spot = match (&self.spot, self.assets) {
            (Some(List(s)), Some(m)) if s.len() == 1 => vec![s[0]; m],
            (Some(List(s)), Some(m)) if s.len() != m => {
                return Err(bad("--spot", format!("{} values for {m} assets", s.len())))
            }
            (Some(List(s)), _) => s.clone(),
            (None, Some(m)) => vec![d.spot[0]; m],
            (None, None) => d.spot.clone(),
        };
        Ok(GbmParams {
            maturity: self.maturity.unwrap_or(d.maturity),
            steps: self.steps.unwrap_or(d.steps),
            sigma: self.sigma.unwrap_or(d.sigma),
            rate: self.rate.unwrap_or(d.rate),
            div: self.div.unwrap_or(d.div),
            strike: self.strike.unwrap_or(d.strike),
            spot,
        })
    }

    /// `(0.74, 0.6)` at depth 2, the LBS midpoints otherwise.
    fn schedule(&self, depth: usize) -> Result<GeometricSchedule, ConfigError> {
        let regime = self.regime.unwrap_or(Regime::Lbs);
        let rates = match &self.r {
            Some(List(r)) => r.clone(),
            None if depth == 2 => vec![0.74, 0.6],
            None => GeometricSchedule::lbs_midpoint(depth).rates().to_vec(),
        };
        let delta = finite("--delta", self.delta)?;
        nested_read::validate_schedule(depth, &rates, regime, delta).map_err(|e| {
            use nested_read::ScheduleError::*;
            let field = match e {
                MissingDelta | UnexpectedDelta | DeltaOutOfRange(_) => "--delta",
                _ => "--r",
            };
            bad(field, e)
        })
    }

    fn base(
        &self,
        command: &str,
        problem: ProblemSpec,
        estimator: EstimatorKind,
    ) -> Result<Effective, ConfigError> {
        let workers = match self.workers {
            Some(0) => return Err(bad("--workers", "must be positive")),
            Some(w) => w,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Ok(Effective {
            command: command.to_string(),
            problem,
            estimator,
            schedule: None,
            allocation: None,
            budget: None,
            reps: None,
            stopping: None,
            budget_grid: None,
            repetitions: None,
            r0_grid: None,
            r1_grid: None,
            truth: finite("--truth", self.truth)?,
            baselines: Vec::new(),
            nmc_reps: None,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            workers,
            out: self.out.clone(),
        })
    }

    fn echo(schedule: &GeometricSchedule) -> ScheduleEcho {
        ScheduleEcho {
            rates: schedule.rates().to_vec(),
            regime: schedule.regime(),
            delta: schedule.delta(),
            expected_leaf_cost: schedule.expected_leaf_cost(0),
        }
    }

    /// Either `reps` fixed repetitions or an adaptive rule, never both.
    fn run_size(&self) -> Result<(Option<u64>, Option<StoppingRule>), ConfigError> {
        let reps = positive("--reps", self.reps)?;
        let Some(epsilon) = self.epsilon else {
            for (f, set) in [
                ("--conf", self.conf.is_some()),
                ("--min-reps", self.min_reps.is_some()),
                ("--max-reps", self.max_reps.is_some()),
            ] {
                if set {
                    return Err(bad(f, "only used with --epsilon"));
                }
            }
            return Ok((Some(reps.unwrap_or(DEFAULT_REPS)), None));
        };
        if reps.is_some() {
            return Err(bad("--reps", "cannot be combined with --epsilon"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(bad("--epsilon", "must be positive and finite"));
        }
        let conf = self.conf.unwrap_or(95.0);
        if !(conf > 0.0 && conf < 100.0) {
            return Err(bad("--conf", "must be a percentage in (0, 100)"));
        }
        let min_reps = positive("--min-reps", self.min_reps)?.unwrap_or(1_000);
        if min_reps < 2 {
            return Err(bad("--min-reps", "must be at least 2"));
        }
        let max_reps = positive("--max-reps", self.max_reps)?.unwrap_or(100_000_000);
        if max_reps < min_reps {
            return Err(bad("--max-reps", "must be at least --min-reps"));
        }
        Ok((
            None,
            Some(StoppingRule {
                epsilon,
                delta_pct: 100.0 - conf,
                min_reps,
                max_reps,
            }),
        ))
    }

    pub fn for_estimate(&self) -> Result<Effective, ConfigError> {
        let problem = self.problem_spec("gaussian-sine")?;
        let estimator = self.estimator.unwrap_or(EstimatorKind::Read);
        let mut cfg = self.base("estimate", problem, estimator)?;
        (cfg.reps, cfg.stopping) = self.run_size()?;
        match estimator.scheme() {
            None => {
                if self.budget.is_some() {
                    return Err(bad("--budget", "only used by the nmc1 and nmc2 estimators"));
                }
                cfg.schedule = Some(Self::echo(&self.schedule(cfg.problem.depth())?));
            }
            Some(scheme) => {
                if self.r.is_some() {
                    return Err(bad("--r", "only used by the read estimator"));
                }
                let budget = positive("--budget", self.budget)?
                    .ok_or_else(|| bad("--budget", "required for nmc estimators"))?;
                let alloc = scheme.allocate(budget, cfg.problem.depth());
                cfg.budget = Some(budget);
                cfg.allocation = Some(alloc.counts().to_vec());
            }
        }
        Ok(cfg)
    }

    pub fn for_compare(&self) -> Result<Effective, ConfigError> {
        let problem = self.problem_spec("gaussian-sine")?;
        let mut cfg = self.base("compare", problem, EstimatorKind::Read)?;
        cfg.schedule = Some(Self::echo(&self.schedule(cfg.problem.depth())?));
        let grid: Vec<u64> = match &self.budget_grid {
            Some(List(g)) => g.iter().map(|c| c.0).collect(),
            None => DEFAULT_BUDGETS.to_vec(),
        };
        if grid.is_empty() {
            return Err(bad("--budget-grid", "is empty"));
        }
        if grid.contains(&0) {
            return Err(bad("--budget-grid", "budgets must be positive"));
        }
        cfg.budget_grid = Some(grid);
        cfg.repetitions =
            Some(positive("--repetitions", self.repetitions)?.unwrap_or(DEFAULT_REPETITIONS));
        if cfg.truth.is_none() {
            let built = cfg.problem.build().map_err(|e| bad("--problem", e))?;
            cfg.truth = Some(built.ground_truth().ok_or_else(|| {
                bad(
                    "--truth",
                    format!("required: {} has no closed-form value", cfg.problem.name()),
                )
            })?);
        }
        Ok(cfg)
    }

    pub fn for_sweep(&self) -> Result<Effective, ConfigError> {
        let problem = self.problem_spec("sigmoid")?;
        if problem.depth() != 2 {
            return Err(bad(
                "--problem",
                format!(
                    "sweeps need a depth-2 problem, {} has depth {}",
                    problem.name(),
                    problem.depth()
                ),
            ));
        }
        let mut cfg = self.base("sweep", problem, EstimatorKind::Read)?;
        let grid = |field: &str,
                    given: &Option<List<f64>>,
                    default: Vec<f64>|
         -> Result<Vec<f64>, ConfigError> {
            let g = given.as_ref().map_or(default, |l| l.0.clone());
            if g.is_empty() {
                return Err(bad(field, "is empty"));
            }
            if let Some(&r) = g.iter().find(|&&r| !(r > 0.5 && r < 1.0)) {
                return Err(bad(field, format!("rate {r} outside (1/2, 1)")));
            }
            Ok(g)
        };
        cfg.r0_grid = Some(grid(
            "--r0-grid",
            &self.r0_grid,
            (0..=10).map(|i| 0.6 + 0.014 * i as f64).collect(),
        )?);
        cfg.r1_grid = Some(grid(
            "--r1-grid",
            &self.r1_grid,
            (0..=10).map(|j| 0.55 + 0.005 * j as f64).collect(),
        )?);
        let reps = positive("--reps", self.reps)?.unwrap_or(DEFAULT_REPS);
        if reps < 2 {
            return Err(bad("--reps", "sweeps need at least 2 repetitions per cell"));
        }
        cfg.reps = Some(reps);
        Ok(cfg)
    }

    pub fn for_price(&self) -> Result<Effective, ConfigError> {
        let problem = self.problem_spec("bermudan")?;
        if !matches!(problem, ProblemSpec::Bermudan(_)) {
            return Err(bad("--problem", "price only handles the bermudan problem"));
        }
        let mut cfg = self.base("price", problem, EstimatorKind::Read)?;
        cfg.schedule = Some(Self::echo(&self.schedule(cfg.problem.depth())?));
        (cfg.reps, cfg.stopping) = self.run_size()?;
        cfg.baselines = self
            .baselines
            .as_ref()
            .map_or(Vec::new(), |l| l.0.iter().map(|s| s.0).collect());
        if !cfg.baselines.is_empty() {
            cfg.budget = Some(
                positive("--budget", self.budget)?
                    .ok_or_else(|| bad("--budget", "required with --baselines"))?,
            );
            cfg.nmc_reps = Some(positive("--nmc-reps", self.nmc_reps)?.unwrap_or(10));
        } else if self.budget.is_some() {
            return Err(bad("--budget", "only used with --baselines"));
        }
        Ok(cfg)
    }
}
