//! Built-in problems.

mod bermudan;
mod counting;
mod toy;

pub use bermudan::{bermudan_problem, Bermudan, GbmParams};
pub use counting::{counting_problem, CountingProblem};
pub use toy::{
    gaussian_sine_problem, heavy_tail_problem, sigmoid, sigmoid_problem, GaussianSine, HeavyTail,
    Sigmoid,
};

use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

use crate::problem::NestedProblem;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("invalid {field} = {value}: {reason}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("unknown problem {0:?} (expected gaussian-sine, heavy-tail, sigmoid or bermudan)")]
    Unknown(String),
}

/// A built-in problem selected by name, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum ProblemSpec {
    GaussianSine,
    HeavyTail { df: f64, ncp: f64 },
    Sigmoid,
    Bermudan(GbmParams),
}

impl ProblemSpec {
    /// Default parameters for a problem name.
    pub fn by_name(name: &str) -> Result<Self, ProblemError> {
        Ok(match name {
            "gaussian-sine" => ProblemSpec::GaussianSine,
            "heavy-tail" => ProblemSpec::HeavyTail {
                df: HeavyTail::DEFAULT_DF,
                ncp: HeavyTail::DEFAULT_NCP,
            },
            "sigmoid" => ProblemSpec::Sigmoid,
            "bermudan" => ProblemSpec::Bermudan(GbmParams::default()),
            other => return Err(ProblemError::Unknown(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::GaussianSine => "gaussian-sine",
            ProblemSpec::HeavyTail { .. } => "heavy-tail",
            ProblemSpec::Sigmoid => "sigmoid",
            ProblemSpec::Bermudan(_) => "bermudan",
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ProblemSpec::Bermudan(p) => p.steps,
            _ => 2,
        }
    }

    pub fn build(&self) -> Result<Arc<dyn NestedProblem>, ProblemError> {
        Ok(match self {
            ProblemSpec::GaussianSine => Arc::new(gaussian_sine_problem()),
            ProblemSpec::HeavyTail { df, ncp } => Arc::new(heavy_tail_problem(*df, *ncp)?),
            ProblemSpec::Sigmoid => Arc::new(sigmoid_problem()),
            ProblemSpec::Bermudan(p) => Arc::new(bermudan_problem(p.clone())?),
        })
    }
}
