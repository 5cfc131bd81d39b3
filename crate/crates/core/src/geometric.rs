//! Geometric level distribution on `{0, 1, 2, ...}` with `P[N = n] = r (1 - r)^n`.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DomainError {
    #[error("rate {0} outside the open interval (0, 1)")]
    RateOutsideUnit(f64),
    #[error("rate {0} outside the open interval (1/2, 1); E[2^N] would be infinite")]
    RateNotAboveHalf(f64),
}

/// Probability mass `r (1 - r)^n`.
pub fn geometric_pmf(r: f64, n: u32) -> Result<f64, DomainError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(DomainError::RateOutsideUnit(r));
    }
    Ok(pmf_unchecked(r, n))
}

#[inline]
pub(crate) fn pmf_unchecked(r: f64, n: u32) -> f64 {
    r * (1.0 - r).powi(n as i32)
}

/// Draws `N ~ Geo(r)` by inversion: `floor(ln U / ln(1 - r))`.
pub fn sample_geometric<R: Rng + ?Sized>(r: f64, rng: &mut R) -> Result<u32, DomainError> {
    if !(r > 0.5 && r < 1.0) {
        return Err(DomainError::RateNotAboveHalf(r));
    }
    Ok(sample_with_log_q((1.0 - r).ln(), rng))
}

/// Inversion with a precomputed `ln(1 - r)`.
#[inline]
pub(crate) fn sample_with_log_q<R: Rng + ?Sized>(log_q: f64, rng: &mut R) -> u32 {
    // 1 - [0,1) is (0,1], so ln never sees zero.
    let u = 1.0 - rng.random::<f64>();
    let n = (u.ln() / log_q).floor();
    if n >= u32::MAX as f64 {
        u32::MAX
    } else {
        n as u32
    }
}

/// `E[2^N] = r / (2r - 1)` for `r > 1/2`.
pub fn expected_pow2(r: f64) -> Result<f64, DomainError> {
    if !(r > 0.5 && r < 1.0) {
        return Err(DomainError::RateNotAboveHalf(r));
    }
    Ok(r / (2.0 * r - 1.0))
}
