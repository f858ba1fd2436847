//! Bootstrap confidence intervals for Monte-Carlo comparisons.

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed;

pub const DEFAULT_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn resampled_mean<R: Rng>(x: &[f64], rng: &mut R) -> f64 {
    (0..x.len())
        .map(|_| x[rng.random_range(0..x.len())])
        .sum::<f64>()
        / x.len() as f64
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Percentile bootstrap interval for `mean(b) - mean(a)`, resampling each
/// group independently.
pub fn bootstrap_mean_diff(
    a: &[f64],
    b: &[f64],
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<Interval> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("bootstrap needs non-empty samples".into()));
    }
    if !(level > 0.0 && level < 1.0) || resamples < 2 {
        return Err(Error::Domain(format!(
            "bad bootstrap settings: level {level}, {resamples} resamples"
        )));
    }
    let mut rng = seed::rng(&[seed, seed::label("bootstrap")]);
    let mut diffs: Vec<f64> = (0..resamples)
        .map(|_| resampled_mean(b, &mut rng) - resampled_mean(a, &mut rng))
        .collect();
    diffs.sort_by(f64::total_cmp);
    let tail = 0.5 * (1.0 - level);
    Ok(Interval {
        low: percentile(&diffs, tail),
        high: percentile(&diffs, 1.0 - tail),
    })
}

/// True unless some step from one group to the next is a significant
/// decrease (its interval lies entirely below zero).
pub fn non_decreasing(
    groups: &[Vec<f64>],
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<bool> {
    for (i, pair) in groups.windows(2).enumerate() {
        let ci = bootstrap_mean_diff(
            &pair[0],
            &pair[1],
            resamples,
            level,
            seed.wrapping_add(i as u64),
        )?;
        if ci.high < 0.0 {
            return Ok(false);
        }
    }
    Ok(true)
}
