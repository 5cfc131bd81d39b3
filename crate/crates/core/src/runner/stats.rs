use serde::{Deserialize, Serialize};

/// Per-repetition output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub rep_index: u64,
    pub value: f64,
    pub leaf_cost: u64,
    pub sim_calls: u64,
}

/// Aggregate statistics over repetitions.
///
/// `sd`, `se`, the interval bounds and `work_normalized_sd` need at least two
/// repetitions and are `None` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub n: u64,
    pub mean: f64,
    pub sd: Option<f64>,
    pub se: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    /// Normal quantile used for the interval half-width `z * se`.
    pub z: f64,
    pub total_leaf_cost: u64,
    pub total_sim_calls: u64,
    pub mean_leaf_cost: f64,
    pub wall_time: f64,
    /// `sqrt(mean leaf cost per estimate) * sd`.
    pub work_normalized_sd: Option<f64>,
}

impl RunSummary {
    pub fn ci_width(&self) -> Option<f64> {
        Some(self.ci_high? - self.ci_low?)
    }

    pub fn contains(&self, x: f64) -> bool {
        matches!((self.ci_low, self.ci_high), (Some(lo), Some(hi)) if lo <= x && x <= hi)
    }
}

/// Welford accumulator over a record stream.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
    leaf: u64,
    sims: u64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, rec: &RepRecord) {
        self.n += 1;
        let delta = rec.value - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (rec.value - self.mean);
        self.leaf += rec.leaf_cost;
        self.sims += rec.sim_calls;
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> Option<f64> {
        (self.n >= 2).then(|| self.m2 / (self.n - 1) as f64)
    }

    pub fn summary(&self, z: f64, wall_time: f64) -> RunSummary {
        build_summary(
            self.n,
            self.mean,
            self.variance(),
            self.leaf,
            self.sims,
            z,
            wall_time,
        )
    }
}

/// Two-pass summary computed directly from the records.
pub fn summarize(records: &[RepRecord], z: f64, wall_time: f64) -> RunSummary {
    let n = records.len() as u64;
    assert!(n > 0, "cannot summarize an empty run");
    let mean = records.iter().map(|r| r.value).sum::<f64>() / n as f64;
    let var = (n >= 2).then(|| {
        records
            .iter()
            .map(|r| (r.value - mean).powi(2))
            .sum::<f64>()
            / (n - 1) as f64
    });
    let leaf = records.iter().map(|r| r.leaf_cost).sum();
    let sims = records.iter().map(|r| r.sim_calls).sum();
    build_summary(n, mean, var, leaf, sims, z, wall_time)
}

fn build_summary(
    n: u64,
    mean: f64,
    var: Option<f64>,
    leaf: u64,
    sims: u64,
    z: f64,
    wall_time: f64,
) -> RunSummary {
    let sd = var.map(|v| v.max(0.0).sqrt());
    let se = sd.map(|s| s / (n as f64).sqrt());
    let mean_leaf_cost = if n == 0 { 0.0 } else { leaf as f64 / n as f64 };
    RunSummary {
        n,
        mean,
        sd,
        se,
        ci_low: se.map(|e| mean - z * e),
        ci_high: se.map(|e| mean + z * e),
        z,
        total_leaf_cost: leaf,
        total_sim_calls: sims,
        mean_leaf_cost,
        wall_time,
        work_normalized_sd: sd.map(|s| mean_leaf_cost.sqrt() * s),
    }
}

/// Two-sided normal quantile for a tail mass of `delta_pct` percent.
pub fn normal_quantile(delta_pct: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::standard().inverse_cdf(1.0 - delta_pct / 200.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(i: u64, v: f64) -> RepRecord {
        RepRecord {
            rep_index: i,
            value: v,
            leaf_cost: 2 + i % 3,
            sim_calls: 5 + i % 7,
        }
    }

    #[test]
    fn single_record_has_no_spread() {
        let s = summarize(&[rec(0, 0.25)], 1.96, 0.0);
        assert_eq!(s.mean, 0.25);
        assert_eq!((s.sd, s.se, s.ci_low, s.ci_high), (None, None, None, None));
        assert!(!s.contains(0.25));
    }

    #[test]
    fn quantile() {
        assert!((normal_quantile(5.0) - 1.959964).abs() < 1e-6);
        assert!((normal_quantile(1.0) - 2.575829).abs() < 1e-6);
    }

    #[test]
    fn summary_fields() {
        let recs: Vec<_> = [1.0, 2.0, 3.0, 4.0]
            .iter()
            .enumerate()
            .map(|(i, &v)| rec(i as u64, v))
            .collect();
        let s = summarize(&recs, 1.96, 2.0);
        assert_eq!(s.mean, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((s.sd.unwrap() - sd).abs() < 1e-15);
        assert!((s.se.unwrap() - sd / 2.0).abs() < 1e-15);
        assert!(s.ci_low.unwrap() <= s.mean && s.mean <= s.ci_high.unwrap());
        assert_eq!(s.total_leaf_cost, 2 + 3 + 4 + 2);
        assert!((s.work_normalized_sd.unwrap() - (11.0f64 / 4.0).sqrt() * sd).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn streaming_matches_batch(values in proptest::collection::vec(-1e3f64..1e3, 2..400)) {
            let recs: Vec<_> = values.iter().enumerate().map(|(i, &v)| rec(i as u64, v)).collect();
            let mut acc = RunningStats::new();
            recs.iter().for_each(|r| acc.push(r));
            let a = acc.summary(1.96, 0.0);
            let b = summarize(&recs, 1.96, 0.0);
            let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(1e-300);
            prop_assert!(rel(a.mean, b.mean) < 1e-10 || (a.mean - b.mean).abs() < 1e-10);
            prop_assert!(rel(a.sd.unwrap(), b.sd.unwrap()) < 1e-10 || b.sd.unwrap() < 1e-12);
            prop_assert_eq!(a.total_leaf_cost, b.total_leaf_cost);
            prop_assert_eq!(a.total_sim_calls, b.total_sim_calls);
        }
    }
}
