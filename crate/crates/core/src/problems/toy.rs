//! The Gaussian-chain toy problems: sine functions with a known answer and a
//! heavy-tailed variant driven by noncentral-t increments.

use rand_distr::{ChiSquared, Distribution, StandardNormal};
use std::f64::consts::FRAC_PI_2;

use super::ProblemError;
use crate::problem::{NestedProblem, SimulationError};
use crate::rng::McRng;
use crate::trajectory::Trajectory;

fn sine_inner(d: usize, path: &Trajectory, z: f64) -> f64 {
    match d {
        0 => (path.stage(0)[0] + z).sin(),
        _ => (path.stage(1)[0] - z).sin(),
    }
}

/// `y0 ~ N(mu, 1)`, `y1 ~ N(y0, 1)`, `y2 ~ N(y1, 1)` with
/// `g0 = sin(y0 + z)`, `g1 = sin(y1 - z)`, `g2 = y2`.
///
/// The inner expectation of `g2` is `y1`, so `gamma_1` vanishes and
/// `gamma_0 = E[sin y0] = sin(mu) exp(-1/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSine {
    pub initial_mean: f64,
}

impl Default for GaussianSine {
    fn default() -> Self {
        Self {
            initial_mean: FRAC_PI_2,
        }
    }
}

pub fn gaussian_sine_problem() -> GaussianSine {
    GaussianSine::default()
}

impl NestedProblem for GaussianSine {
    fn depth(&self) -> usize {
        2
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
        let centre = history.last().map_or(self.initial_mean, |y| y[0]);
        let z: f64 = StandardNormal.sample(rng);
        out[0] = centre + z;
        Ok(())
    }

    fn inner(&self, d: usize, path: &Trajectory, z: f64) -> f64 {
        sine_inner(d, path, z)
    }

    fn terminal(&self, path: &Trajectory) -> f64 {
        path.stage(2)[0]
    }

    fn ground_truth(&self) -> Option<f64> {
        Some(self.initial_mean.sin() * (-0.5f64).exp())
    }
}

/// Same functions as [`GaussianSine`] over the chain `y_d = y_{d-1} + e_d`,
/// `y_0 = e_0`, with i.i.d. noncentral-t increments `e = (Z + ncp) / sqrt(V / df)`.
#[derive(Debug, Clone, Copy)]
pub struct HeavyTail {
    df: f64,
    ncp: f64,
    chi: ChiSquared<f64>,
}

impl HeavyTail {
    pub const DEFAULT_DF: f64 = 10.0;
    pub const DEFAULT_NCP: f64 = 0.5;

    pub fn df(&self) -> f64 {
        self.df
    }

    pub fn ncp(&self) -> f64 {
        self.ncp
    }

    fn increment(&self, rng: &mut McRng) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        let v = self.chi.sample(rng);
        (z + self.ncp) / (v / self.df).sqrt()
    }
}

pub fn heavy_tail_problem(df: f64, ncp: f64) -> Result<HeavyTail, ProblemError> {
    if !(df > 0.0 && df.is_finite()) {
        return Err(ProblemError::InvalidParameter {
            field: "df",
            value: df,
            reason: "must be positive and finite",
        });
    }
    if !ncp.is_finite() {
        return Err(ProblemError::InvalidParameter {
            field: "ncp",
            value: ncp,
            reason: "must be finite",
        });
    }
    let chi = ChiSquared::new(df).map_err(|_| ProblemError::InvalidParameter {
        field: "df",
        value: df,
        reason: "rejected by the chi-square sampler",
    })?;
    Ok(HeavyTail { df, ncp, chi })
}

impl NestedProblem for HeavyTail {
    fn depth(&self) -> usize {
        2
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
        let prev = history.last().map_or(0.0, |y| y[0]);
        out[0] = prev + self.increment(rng);
        Ok(())
    }

    fn inner(&self, d: usize, path: &Trajectory, z: f64) -> f64 {
        sine_inner(d, path, z)
    }

    fn terminal(&self, path: &Trajectory) -> f64 {
        path.stage(2)[0]
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Standard Gaussian chain with `g0 = s(y0 + z)`, `g1 = s(y1 + z)`,
/// `g2 = s(y2)` for the logistic sigmoid `s`. No closed form.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Sigmoid;

pub fn sigmoid_problem() -> Sigmoid {
    Sigmoid
}

impl NestedProblem for Sigmoid {
    fn depth(&self) -> usize {
        2
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
        let centre = history.last().map_or(0.0, |y| y[0]);
        let z: f64 = StandardNormal.sample(rng);
        out[0] = centre + z;
        Ok(())
    }

    fn inner(&self, d: usize, path: &Trajectory, z: f64) -> f64 {
        sigmoid(path.stage(d)[0] + z)
    }

    fn terminal(&self, path: &Trajectory) -> f64 {
        sigmoid(path.stage(2)[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn toy_truth() {
        let truth = gaussian_sine_problem().ground_truth().unwrap();
        assert!((truth - 0.6065306597126334).abs() < 1e-15);
    }

    #[test]
    fn sigmoid_is_stable_and_centred() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(2.0) + sigmoid(-2.0) - 1.0).abs() < 1e-15);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
    }

    #[test]
    fn heavy_tail_defaults_and_validation() {
        let p = heavy_tail_problem(HeavyTail::DEFAULT_DF, HeavyTail::DEFAULT_NCP).unwrap();
        assert_eq!((p.df(), p.ncp()), (10.0, 0.5));
        assert!(heavy_tail_problem(0.0, 0.5).is_err());
        assert!(heavy_tail_problem(-1.0, 0.5).is_err());
        assert!(heavy_tail_problem(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn heavy_tail_increment_mean() {
        // E[t] = ncp sqrt(df/2) Gamma((df-1)/2) / Gamma(df/2); at df = 10 the
        // Gamma ratio is (3.5 * 2.5 * 1.5 * 0.5 * sqrt(pi)) / 24.
        let ratio = 3.5 * 2.5 * 1.5 * 0.5 * std::f64::consts::PI.sqrt() / 24.0;
        let expected = 0.5 * 5f64.sqrt() * ratio;
        let p = heavy_tail_problem(10.0, 0.5).unwrap();
        let mut rng = stream_rng(3, 0);
        let n = 400_000;
        let xs: Vec<f64> = (0..n).map(|_| p.increment(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(
            (mean - expected).abs() < 4.0 * (var / n as f64).sqrt(),
            "{mean} vs {expected}"
        );
    }

    #[test]
    fn chain_structure() {
        let p = gaussian_sine_problem();
        let mut rng = stream_rng(1, 1);
        let mut path = Trajectory::new(1);
        let mut out = [0.0];
        for _ in 0..3 {
            p.simulate(&path, &mut rng, &mut out).unwrap();
            path.push_stage(&out);
        }
        assert_eq!(p.terminal(&path), path.stage(2)[0]);
        assert_eq!(p.inner(0, &path, 0.25), (path.stage(0)[0] + 0.25).sin());
        assert_eq!(p.inner(1, &path, 0.25), (path.stage(1)[0] - 0.25).sin());
    }
}
