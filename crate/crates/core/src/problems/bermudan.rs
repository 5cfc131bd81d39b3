//! Bermudan basket put on an `M`-asset geometric Brownian motion observed at
//! `D + 1` equally spaced dates `0, T/D, ..., T`.
//!
//! `g_D = U(y^(D))` and, for `d < D`, `g_d(y^(0:d), z) = max(U(y^(d)), e^{-rT/D} z)`
//! with `U(x) = max(K - mean(x), 0)`. The initial state is the spot vector.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::ProblemError;
use crate::problem::{NestedProblem, SimulationError};
use crate::rng::McRng;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    /// Horizon in years.
    pub maturity: f64,
    /// Number of exercise intervals `D`.
    pub steps: usize,
    pub sigma: f64,
    pub rate: f64,
    pub div: f64,
    pub strike: f64,
    /// One entry per asset.
    pub spot: Vec<f64>,
}

impl Default for GbmParams {
    fn default() -> Self {
        Self {
            maturity: 3.0,
            steps: 3,
            sigma: 0.2,
            rate: 0.05,
            div: 0.0,
            strike: 100.0,
            spot: vec![100.0; 5],
        }
    }
}

impl GbmParams {
    pub fn assets(&self) -> usize {
        self.spot.len()
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        let bad = |field, value, reason| {
            Err(ProblemError::InvalidParameter {
                field,
                value,
                reason,
            })
        };
        if !(self.maturity > 0.0 && self.maturity.is_finite()) {
            return bad("maturity", self.maturity, "must be positive");
        }
        if self.steps == 0 {
            return bad("steps", 0.0, "must be at least 1");
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad("sigma", self.sigma, "must be non-negative");
        }
        if !self.rate.is_finite() {
            return bad("rate", self.rate, "must be finite");
        }
        if !self.div.is_finite() {
            return bad("div", self.div, "must be finite");
        }
        if !(self.strike > 0.0 && self.strike.is_finite()) {
            return bad("strike", self.strike, "must be positive");
        }
        if self.spot.is_empty() {
            return bad("spot", 0.0, "needs at least one asset");
        }
        if let Some(&s) = self.spot.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
            return bad("spot", s, "entries must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bermudan {
    params: GbmParams,
    drift: f64,
    vol: f64,
    discount: f64,
}

pub fn bermudan_problem(params: GbmParams) -> Result<Bermudan, ProblemError> {
    params.validate()?;
    let h = params.maturity / params.steps as f64;
    Ok(Bermudan {
        drift: (params.rate - params.div - 0.5 * params.sigma * params.sigma) * h,
        vol: params.sigma * h.sqrt(),
        discount: (-params.rate * h).exp(),
        params,
    })
}

impl Bermudan {
    pub fn params(&self) -> &GbmParams {
        &self.params
    }

    /// Basket put payoff `max(K - mean(x), 0)`.
    pub fn payoff(&self, x: &[f64]) -> f64 {
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        (self.params.strike - mean).max(0.0)
    }

    /// Per-step discount factor `e^{-r T / D}`.
    pub fn discount(&self) -> f64 {
        self.discount
    }
}

impl NestedProblem for Bermudan {
    fn depth(&self) -> usize {
        self.params.steps
    }

    fn dim(&self) -> usize {
        self.params.assets()
    }

    fn simulate(
        &self,
        history: &Trajectory,
        rng: &mut McRng,
        out: &mut [f64],
    ) -> Result<(), SimulationError> {
        match history.last() {
            None => out.copy_from_slice(&self.params.spot),
            Some(prev) => {
                for (o, &s) in out.iter_mut().zip(prev) {
                    let z: f64 = StandardNormal.sample(rng);
                    *o = s * (self.drift + self.vol * z).exp();
                }
            }
        }
        Ok(())
    }

    fn inner(&self, d: usize, path: &Trajectory, z: f64) -> f64 {
        self.payoff(path.stage(d)).max(self.discount * z)
    }

    fn terminal(&self, path: &Trajectory) -> f64 {
        self.payoff(path.stage(self.params.steps))
    }
}
