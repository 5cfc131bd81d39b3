//! Odd/even partial sums of a sequence of `2^n` child estimates.
//!
//! Odd-indexed (1-based) values go into one accumulator and even-indexed
//! values into another, each summed left to right. The full sum is formed as
//! `odd + even`, so `S = S_odd + S_even` holds bit-exactly.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("sequence length {0} is not a power of two >= 2")]
pub struct SplitError(pub usize);

/// Streaming odd/even accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OddEvenSums {
    odd: f64,
    even: f64,
    count: u64,
}

impl OddEvenSums {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the next value; its 1-based index is `count + 1`.
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        if self.count % 2 == 1 {
            self.odd += x;
        } else {
            self.even += x;
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn odd(&self) -> f64 {
        self.odd
    }

    pub fn even(&self) -> f64 {
        self.even
    }

    pub fn total(&self) -> f64 {
        self.odd + self.even
    }
}

/// `(S, S_odd, S_even)` for a sequence whose length is a power of two >= 2.
pub fn split_odd_even(values: &[f64]) -> Result<(f64, f64, f64), SplitError> {
    let n = values.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(SplitError(n));
    }
    let mut acc = OddEvenSums::new();
    values.iter().for_each(|&v| acc.push(v));
    Ok((acc.total(), acc.odd(), acc.even()))
}
