//! Per-depth geometric rates `(r_0, ..., r_{D-1})` and their admissible ranges.
//!
//! Rates are parameterized as `r_d = 1 - 2^{-k_d}`. Under the
//! bounded-second-derivative regime (LBS) each `k_d` must lie in
//! `(1, 2^{d+1} / (2^{d+1} - 1))`; under the bounded-Lipschitz regime (LBL)
//! with global `delta` in `(0, 1/2)` it must lie in
//! `(1, (2^{d+2} - 3δ)/(2^{d+3} - 3δ) · (2^{d+1} - δ)/(2^d - δ))`.
//! All bounds are open.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::geometric::DomainError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Lbs,
    Lbl,
    Unchecked,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Lbs => "lbs",
            Regime::Lbl => "lbl",
            Regime::Unchecked => "unchecked",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("schedule has {got} rates but the problem depth is {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("delta is required for the lbl regime")]
    MissingDelta,
    #[error("delta is only meaningful for the lbl regime")]
    UnexpectedDelta,
    #[error("delta {0} outside the open interval (0, 1/2)")]
    DeltaOutOfRange(f64),
    #[error("depth {depth}: rate {rate}: {source}")]
    Rate {
        depth: usize,
        rate: f64,
        source: DomainError,
    },
    #[error(
        "depth {depth}: rate {rate} implies k = {k:.4}, outside the {regime} interval ({lower}, {upper:.6})"
    )]
    OutOfRange {
        depth: usize,
        rate: f64,
        k: f64,
        lower: f64,
        upper: f64,
        regime: Regime,
    },
}

/// `k = -log2(1 - r)`.
pub fn implied_k(rate: f64) -> f64 {
    -(1.0 - rate).log2()
}

/// `r = 1 - 2^{-k}`.
pub fn rate_from_k(k: f64) -> f64 {
    1.0 - (-k).exp2()
}

/// Open `k` interval for depth `d` under LBS.
pub fn lbs_k_interval(d: usize) -> (f64, f64) {
    let p = 2f64.powi(d as i32 + 1);
    (1.0, p / (p - 1.0))
}

/// Open `k` interval for depth `d` under LBL with global `delta`.
pub fn lbl_k_interval(d: usize, delta: f64) -> (f64, f64) {
    let p = |e: i32| 2f64.powi(e);
    let d = d as i32;
    let upper = ((p(d + 2) - 3.0 * delta) / (p(d + 3) - 3.0 * delta))
        * ((p(d + 1) - delta) / (p(d) - delta));
    (1.0, upper)
}

/// Validated geometric rates for depths `0..D`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometricSchedule {
    rates: Vec<f64>,
    regime: Regime,
    delta: Option<f64>,
    #[serde(skip)]
    log_q: Vec<f64>,
}

impl GeometricSchedule {
    /// Checks `rates` against `regime` for a problem of depth `depth`.
    ///
    /// Errors name the first offending depth together with its implied `k`
    /// and the admissible interval.
    pub fn validate(
        depth: usize,
        rates: &[f64],
        regime: Regime,
        delta: Option<f64>,
    ) -> Result<Self, ScheduleError> {
        if rates.len() != depth {
            return Err(ScheduleError::LengthMismatch {
                expected: depth,
                got: rates.len(),
            });
        }
        match (regime, delta) {
            (Regime::Lbl, None) => return Err(ScheduleError::MissingDelta),
            (Regime::Lbl, Some(dl)) if !(dl > 0.0 && dl < 0.5) => {
                return Err(ScheduleError::DeltaOutOfRange(dl))
            }
            (Regime::Lbs | Regime::Unchecked, Some(_)) => {
                return Err(ScheduleError::UnexpectedDelta)
            }
            _ => {}
        }
        for (d, &rate) in rates.iter().enumerate() {
            if !(rate > 0.5 && rate < 1.0) {
                return Err(ScheduleError::Rate {
                    depth: d,
                    rate,
                    source: DomainError::RateNotAboveHalf(rate),
                });
            }
            let interval = match regime {
                Regime::Lbs => lbs_k_interval(d),
                Regime::Lbl => lbl_k_interval(d, delta.unwrap_or_default()),
                Regime::Unchecked => continue,
            };
            let k = implied_k(rate);
            if !(k > interval.0 && k < interval.1) {
                return Err(ScheduleError::OutOfRange {
                    depth: d,
                    rate,
                    k,
                    lower: interval.0,
                    upper: interval.1,
                    regime,
                });
            }
        }
        Ok(Self {
            rates: rates.to_vec(),
            regime,
            delta,
            log_q: rates.iter().map(|r| (1.0 - r).ln()).collect(),
        })
    }

    /// Rates in `(1/2, 1)` with no regime check.
    pub fn unchecked(rates: &[f64]) -> Result<Self, ScheduleError> {
        Self::validate(rates.len(), rates, Regime::Unchecked, None)
    }

    /// The midpoint of every LBS interval in `k`-space.
    pub fn lbs_midpoint(depth: usize) -> Self {
        let rates: Vec<f64> = (0..depth)
            .map(|d| {
                let (lo, hi) = lbs_k_interval(d);
                rate_from_k(0.5 * (lo + hi))
            })
            .collect();
        Self::validate(depth, &rates, Regime::Lbs, None).expect("midpoints are interior")
    }

    pub fn depth(&self) -> usize {
        self.rates.len()
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn rate(&self, d: usize) -> f64 {
        self.rates[d]
    }

    pub(crate) fn log_q(&self, d: usize) -> f64 {
        self.log_q[d]
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn delta(&self) -> Option<f64> {
        self.delta
    }

    /// Expected number of leaf evaluations of one call started at `from_depth`:
    /// `prod_{k=from_depth}^{D-1} r_k / (2 r_k - 1)`, and `1` at `from_depth = D`.
    pub fn expected_leaf_cost(&self, from_depth: usize) -> f64 {
        assert!(
            from_depth <= self.depth(),
            "from_depth beyond schedule depth"
        );
        self.rates[from_depth..]
            .iter()
            .map(|&r| r / (2.0 * r - 1.0))
            .product()
    }
}

/// Free-function form of [`GeometricSchedule::validate`].
pub fn validate_schedule(
    depth: usize,
    rates: &[f64],
    regime: Regime,
    delta: Option<f64>,
) -> Result<GeometricSchedule, ScheduleError> {
    GeometricSchedule::validate(depth, rates, regime, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn toy_schedule_is_lbs_valid() {
        let s = validate_schedule(2, &[0.74, 0.6], Regime::Lbs, None).unwrap();
        assert!((implied_k(0.74) - 1.9434).abs() < 1e-4);
        assert!((implied_k(0.6) - 1.3219).abs() < 1e-4);
        assert_eq!(lbs_k_interval(0), (1.0, 2.0));
        assert!((lbs_k_interval(1).1 - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.regime(), Regime::Lbs);
    }

    #[test]
    fn rate_above_three_quarters_rejected_at_depth_zero() {
        match validate_schedule(1, &[0.76], Regime::Lbs, None) {
            Err(ScheduleError::OutOfRange {
                depth,
                k,
                lower,
                upper,
                ..
            }) => {
                assert_eq!(depth, 0);
                assert!((k - 2.0589).abs() < 1e-4);
                assert_eq!((lower, upper), (1.0, 2.0));
            }
            other => panic!("expected out-of-range, got {other:?}"),
        }
    }

    #[test]
    fn error_names_first_offending_depth() {
        let err = validate_schedule(3, &[0.7, 0.65, 0.9], Regime::Lbs, None).unwrap_err();
        assert!(
            matches!(err, ScheduleError::OutOfRange { depth: 1, .. }),
            "{err}"
        );
        let msg = validate_schedule(2, &[0.8, 0.8], Regime::Lbs, None)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("depth 0") && msg.contains("2.3219"), "{msg}");
    }

    #[test]
    fn lbl_interval_at_quarter_delta() {
        let (lo, hi) = lbl_k_interval(0, 0.25);
        assert_eq!(lo, 1.0);
        let expected = (3.25 / 7.25) * (1.75 / 0.75);
        assert!((hi - expected).abs() < 1e-15);
        assert!((hi - 1.045977).abs() < 1e-6);
    }

    #[test]
    fn lbl_requires_delta_in_range() {
        assert_eq!(
            validate_schedule(1, &[0.51], Regime::Lbl, None),
            Err(ScheduleError::MissingDelta)
        );
        assert!(validate_schedule(1, &[0.51], Regime::Lbl, Some(0.5)).is_err());
        assert!(validate_schedule(1, &[0.51], Regime::Lbs, Some(0.2)).is_err());
        assert!(validate_schedule(1, &[0.51], Regime::Lbl, Some(0.25)).is_ok());
    }

    #[test]
    fn length_must_match_depth() {
        assert!(matches!(
            validate_schedule(2, &[0.6], Regime::Lbs, None),
            Err(ScheduleError::LengthMismatch {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn unchecked_still_requires_finite_cost() {
        assert!(GeometricSchedule::unchecked(&[0.9, 0.8]).is_ok());
        assert!(GeometricSchedule::unchecked(&[0.5]).is_err());
    }

    #[test]
    fn expected_cost_values() {
        let s = validate_schedule(2, &[0.74, 0.6], Regime::Lbs, None).unwrap();
        let c = s.expected_leaf_cost(0);
        assert!((c - 37.0 / 8.0).abs() <= f64::EPSILON * 4.625, "{c}");
        assert_eq!(s.expected_leaf_cost(2), 1.0);
        let one = validate_schedule(1, &[0.6], Regime::Lbs, None).unwrap();
        assert!((one.expected_leaf_cost(0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn midpoint_schedule_is_valid() {
        for depth in 0..6 {
            let s = GeometricSchedule::lbs_midpoint(depth);
            assert_eq!(s.depth(), depth);
        }
    }

    proptest! {
        #[test]
        fn lbs_accepts_interior_and_rejects_outside(d in 0usize..6, side in 0usize..4) {
            let (lo, hi) = lbs_k_interval(d);
            let (k, ok) = match side {
                0 => (lo + 1e-9, true),
                1 => (hi - 1e-9, true),
                2 => (lo - 1e-9, false),
                _ => (hi + 1e-9, false),
            };
            let mut rates = GeometricSchedule::lbs_midpoint(d + 1).rates().to_vec();
            rates[d] = rate_from_k(k);
            prop_assert_eq!(validate_schedule(d + 1, &rates, Regime::Lbs, None).is_ok(), ok);
        }

        #[test]
        fn lbl_accepts_interior_and_rejects_outside(d in 0usize..5, delta in 0.05f64..0.49, side in 0usize..4) {
            let (lo, hi) = lbl_k_interval(d, delta);
            prop_assume!(hi - lo > 1e-6);
            let (k, ok) = match side {
                0 => (lo + 1e-9, true),
                1 => (hi - 1e-9, true),
                2 => (lo - 1e-9, false),
                _ => (hi + 1e-9, false),
            };
            let mut rates: Vec<f64> = (0..=d)
                .map(|j| { let (a, b) = lbl_k_interval(j, delta); rate_from_k(0.5 * (a + b)) })
                .collect();
            rates[d] = rate_from_k(k);
            prop_assert_eq!(validate_schedule(d + 1, &rates, Regime::Lbl, Some(delta)).is_ok(), ok);
        }

        #[test]
        fn expected_cost_is_monotone_in_start_depth(ks in proptest::collection::vec(0.01f64..0.99, 0..6)) {
            let rates: Vec<f64> = ks.iter().enumerate().map(|(d, t)| {
                let (lo, hi) = lbs_k_interval(d);
                rate_from_k(lo + t * (hi - lo))
            }).collect();
            let s = validate_schedule(rates.len(), &rates, Regime::Lbs, None).unwrap();
            let costs: Vec<f64> = (0..=s.depth()).map(|d| s.expected_leaf_cost(d)).collect();
            for w in costs.windows(2) {
                prop_assert!(w[0].is_finite() && w[0] >= w[1] && w[1] >= 1.0);
            }
        }
    }
}
