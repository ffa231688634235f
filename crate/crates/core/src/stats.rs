//! Aggregation statistics for paired benchmark trials.

use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal is valid")
}

fn logs(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InsufficientData("no values".into()));
    }
    values
        .iter()
        .map(|&v| {
            if v > 0.0 && v.is_finite() {
                Ok(v.ln())
            } else {
                Err(Error::InvalidValue(format!("geometric statistics need positive finite values, got {v}")))
            }
        })
        .collect()
}

pub fn geometric_mean(values: &[f64]) -> Result<f64> {
    let l = logs(values)?;
    Ok((l.iter().sum::<f64>() / l.len() as f64).exp())
}

/// `exp(SE(log r))`: the factor by which the geometric mean is uncertain.
pub fn multiplicative_standard_error(values: &[f64]) -> Result<f64> {
    let l = logs(values)?;
    if l.len() < 2 {
        return Err(Error::InsufficientData("standard error needs at least 2 values".into()));
    }
    let n = l.len() as f64;
    let mean = l.iter().sum::<f64>() / n;
    let var = l.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((var / n).sqrt().exp())
}

/// Linear-interpolated quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Percentile bootstrap interval for the geometric mean.
///
/// A single value yields the degenerate interval `(v, v)`.
pub fn bootstrap_ci_gm<R: Rng + ?Sized>(values: &[f64], resamples: usize, level: f64, rng: &mut R) -> Result<(f64, f64)> {
    let l = logs(values)?;
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidValue(format!("confidence level must lie in (0, 1), got {level}")));
    }
    if resamples < 1 {
        return Err(Error::InvalidValue("at least one bootstrap resample is needed".into()));
    }
    if l.len() == 1 {
        return Ok((values[0], values[0]));
    }
    let n = l.len();
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| l[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let tail = 0.5 * (1.0 - level);
    Ok((quantile_sorted(&means, tail).exp(), quantile_sorted(&means, 1.0 - tail).exp()))
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, level: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(Error::InvalidValue(format!("need 0 <= successes <= trials and trials >= 1, got {successes}/{trials}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidValue(format!("confidence level must lie in (0, 1), got {level}")));
    }
    let z = standard_normal().inverse_cdf(1.0 - 0.5 * (1.0 - level));
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Ok(((center - half).max(0.0), (center + half).min(1.0)))
}

/// One-sided Wilcoxon signed-rank p-value for `H1: a > b`.
///
/// Zero differences are dropped, tied magnitudes get midranks, and the normal
/// approximation uses a tie-corrected variance and a continuity correction.
pub fn wilcoxon_signed_rank_onesided(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(a.len(), b.len()));
    }
    let mut diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidValue("non-finite paired difference".into()));
    }
    if diffs.is_empty() {
        return Err(Error::Degenerate("all pairs are tied".into()));
    }
    if diffs.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "{} non-tied pairs; the normal approximation needs at least 10",
            diffs.len()
        )));
    }
    diffs.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    let n = diffs.len();
    let mut w_plus = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && diffs[j + 1].abs() == diffs[i].abs() {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        let midrank = 0.5 * ((i + 1) + (j + 1)) as f64;
        w_plus += diffs[i..=j].iter().filter(|d| **d > 0.0).count() as f64 * midrank;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let z = (w_plus - mean - 0.5) / var.sqrt();
    Ok(1.0 - standard_normal().cdf(z))
}

/// Ordinary least squares `y = slope * x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!("a fit with an error estimate needs 3 points, got {}", x.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Degenerate("all x values are equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr: (ssr / (n - 2.0) / sxx).sqrt(),
    })
}
