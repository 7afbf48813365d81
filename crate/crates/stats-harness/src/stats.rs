//! Statistical comparators: empirical CDFs with censoring, the
//! Kolmogorov-Smirnov distance, total variation to a Poisson law, the
//! dispersion index, and Wilson score intervals.

use crate::StatsError;
use analytics::poisson_pmf;

/// One possibly-censored observation of a maximum: `Censored(level)` means
/// the true value is known to be at most `level` (no edge exceeded it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation {
    Observed(f64),
    Censored(f64),
}

impl Observation {
    fn level(&self) -> f64 {
        match *self {
            Observation::Observed(v) | Observation::Censored(v) => v,
        }
    }
}

/// Empirical CDF as a right-continuous step function over sorted support
/// points; censored samples contribute mass at their censoring level, so
/// evaluation is only exact at or above the largest censoring level.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
    /// Largest censoring level; evaluations below it would be biased.
    min_eval: f64,
}

/// Builds the empirical CDF of a censored sample.
pub fn ecdf(samples: &[Observation]) -> Result<Ecdf, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let mut sorted: Vec<f64> = samples.iter().map(Observation::level).collect();
    sorted.sort_by(f64::total_cmp);
    let min_eval = samples
        .iter()
        .filter_map(|o| match *o {
            Observation::Censored(l) => Some(l),
            Observation::Observed(_) => None,
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Ecdf { sorted, min_eval })
}

impl Ecdf {
    /// Fraction of the sample at or below `x`; exact for
    /// `x >= min_evaluable`.
    pub fn eval(&self, x: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v <= x);
        count as f64 / self.sorted.len() as f64
    }

    /// Smallest level at which the censored ECDF is exact.
    pub fn min_evaluable(&self) -> f64 {
        self.min_eval
    }
}

/// Sup-norm distance between the censored ECDF and a reference CDF,
/// evaluated only at observable levels (at or above every censoring level),
/// comparing both one-sided limits at each jump.
pub fn ks_distance(
    samples: &[Observation],
    cdf: impl Fn(f64) -> f64,
) -> Result<f64, StatsError> {
    let e = ecdf(samples)?;
    let n = e.sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in e.sorted.iter().enumerate() {
        if x < e.min_eval {
            continue;
        }
        let f = cdf(x);
        let hi = (i + 1) as f64 / n;
        // left limit of the ECDF, valid only if it does not dip below the
        // censoring frontier
        let lo = i as f64 / n;
        d = d.max((hi - f).abs());
        if x > e.min_eval {
            d = d.max((lo - f).abs());
        }
    }
    Ok(d)
}

/// KS distance for a fully observed sample.
pub fn ks_distance_uncensored(
    samples: &[f64],
    cdf: impl Fn(f64) -> f64,
) -> Result<f64, StatsError> {
    let obs: Vec<Observation> = samples.iter().map(|&v| Observation::Observed(v)).collect();
    ks_distance(&obs, cdf)
}

/// Total variation between the empirical pmf of `counts` and
/// `Poisson(mean)`: half the L1 distance over the observed support plus
/// half the Poisson mass beyond it (where the empirical pmf is zero).
pub fn empirical_tv_to_poisson(counts: &[u64], mean: f64) -> Result<f64, StatsError> {
    if counts.is_empty() {
        return Err(StatsError::EmptySample);
    }
    assert!(mean >= 0.0 && mean.is_finite());
    let max = *counts.iter().max().expect("non-empty") as usize;
    let mut pmf = vec![0.0f64; max + 1];
    let inv = 1.0 / counts.len() as f64;
    for &k in counts {
        pmf[k as usize] += inv;
    }
    let mut tv = 0.0f64;
    let mut poisson_head = 0.0f64;
    for (k, &p) in pmf.iter().enumerate() {
        let q = poisson_pmf(k as u64, mean);
        poisson_head += q;
        tv += (p - q).abs();
    }
    tv += (1.0 - poisson_head).max(0.0);
    Ok(0.5 * tv)
}

/// Two-sample total variation between empirical count pmfs.
pub fn empirical_tv_between(a: &[u64], b: &[u64]) -> Result<f64, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let max = *a.iter().chain(b).max().expect("non-empty") as usize;
    let mut diff = vec![0.0f64; max + 1];
    let (wa, wb) = (1.0 / a.len() as f64, 1.0 / b.len() as f64);
    for &k in a {
        diff[k as usize] += wa;
    }
    for &k in b {
        diff[k as usize] -= wb;
    }
    Ok(0.5 * diff.iter().map(|d| d.abs()).sum::<f64>())
}

/// Sample variance over sample mean.
pub fn dispersion_index(counts: &[u64]) -> Result<f64, StatsError> {
    if counts.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let n = counts.len() as f64;
    let mean = counts.iter().map(|&k| k as f64).sum::<f64>() / n;
    if mean == 0.0 {
        return Err(StatsError::ZeroMean);
    }
    let var = counts
        .iter()
        .map(|&k| (k as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    Ok(var / mean)
}

/// Sample mean and its standard error.
pub fn mean_and_se(samples: &[f64]) -> Result<(f64, f64), StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, (var / n).sqrt()))
}

/// Wilson score interval for a binomial proportion at critical value `z`
/// (e.g. 2.576 for 99%).
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials >= 1 && successes <= trials && z > 0.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // the interval always contains the point estimate; rounding can break
    // that at the degenerate proportions, so pin the closed endpoints
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}
