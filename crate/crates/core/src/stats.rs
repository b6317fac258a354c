//! Kolmogorov–Smirnov statistics and summary helpers.

use serde::Serialize;

use crate::error::{Error, Result};

/// Significance level of every distributional gate.
pub const KS_LEVEL: f64 = 0.05;

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    xs
}

/// One-sample statistic `sup_x |F_n(x) − F(x)|`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let xs = sorted(samples);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |acc, (i, &x)| {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        acc.max(above).max(below)
    })
}

/// Two-sample statistic `sup_x |F_n(x) − G_m(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (xs, ys) = (sorted(a), sorted(b));
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut worst = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        worst = worst.max((i as f64 / n - j as f64 / m).abs());
    }
    worst
}

/// Asymptotic Kolmogorov quantile `c(level) = √(−ln(level/2)/2)`.
pub fn kolmogorov_quantile(level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt()
}

pub fn ks_critical_one_sample(n: usize, level: f64) -> f64 {
    kolmogorov_quantile(level) / (n as f64).sqrt()
}

pub fn ks_critical_two_sample(n: usize, m: usize, level: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    kolmogorov_quantile(level) * ((n + m) / (n * m)).sqrt()
}

/// Sample mean and unbiased sample variance.
pub fn mean_variance(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    // shifted by the first sample so constant data gives exactly zero
    let shift = samples[0];
    let (sum, sum_sq) = samples.iter().fold((0.0, 0.0), |(s, q), &x| {
        let d = x - shift;
        (s + d, q + d * d)
    });
    let var = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
    Ok((mean, var))
}

/// Uniform-bin histogram on `[lo, hi]`; the right edge is closed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(samples: &[f64], bins: usize, lo: f64, hi: f64) -> Self {
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|k| lo + k as f64 * width).collect();
        let mut counts = vec![0u64; bins];
        for &x in samples {
            let k = (((x - lo) / width).floor() as isize).clamp(0, bins as isize - 1);
            counts[k as usize] += 1;
        }
        Self { edges, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// sup over every sample point of the gap between two step functions,
    /// by direct counting.
    fn brute_two_sample(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .chain(b)
            .map(|&x| {
                let fa = a.iter().filter(|&&v| v <= x).count() as f64 / a.len() as f64;
                let fb = b.iter().filter(|&&v| v <= x).count() as f64 / b.len() as f64;
                (fa - fb).abs()
            })
            .fold(0.0, f64::max)
    }

    fn brute_one_sample(a: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
        a.iter()
            .map(|&x| {
                let at = a.iter().filter(|&&v| v <= x).count() as f64 / a.len() as f64;
                let before = a.iter().filter(|&&v| v < x).count() as f64 / a.len() as f64;
                (at - cdf(x)).abs().max((before - cdf(x)).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn one_sample_matches_brute_force() {
        let xs = [0.91, 0.05, 0.33, 0.5, 0.72, 0.12, 0.64];
        assert_abs_diff_eq!(ks_one_sample(&xs, |x| x), brute_one_sample(&xs, |x| x), epsilon = 1e-15);
        assert_abs_diff_eq!(
            ks_one_sample(&xs, |x| x * x),
            brute_one_sample(&xs, |x| x * x),
            epsilon = 1e-15
        );
    }

    #[test]
    fn one_sample_single_point() {
        assert_abs_diff_eq!(ks_one_sample(&[0.25], |x| x), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn two_sample_matches_brute_force() {
        let a = [0.1, 0.4, 0.4, 0.8, 1.3, 2.0];
        let b = [0.05, 0.4, 0.9, 1.1];
        assert_abs_diff_eq!(ks_two_sample(&a, &b), brute_two_sample(&a, &b), epsilon = 1e-15);
        assert_eq!(ks_two_sample(&a, &a), 0.0);
        assert_eq!(ks_two_sample(&[0.0, 1.0], &[2.0, 3.0]), 1.0);
    }

    #[test]
    fn kolmogorov_quantiles() {
        assert_abs_diff_eq!(kolmogorov_quantile(0.05), 1.3581, epsilon = 1e-4);
        assert_abs_diff_eq!(kolmogorov_quantile(0.01), 1.6276, epsilon = 1e-4);
        assert_abs_diff_eq!(ks_critical_two_sample(100, 100, 0.05), 0.19206, epsilon = 1e-4);
        assert_abs_diff_eq!(ks_critical_one_sample(10_000, 0.05), 0.013581, epsilon = 1e-5);
    }

    #[test]
    fn mean_variance_basics() {
        let (m, v) = mean_variance(&[2.0, 2.0, 2.0]).unwrap();
        assert_eq!((m, v), (2.0, 0.0));
        let (m, v) = mean_variance(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(m, 2.5);
        assert_abs_diff_eq!(v, 5.0 / 3.0, epsilon = 1e-15);
        assert!(mean_variance(&[1.0]).is_err());
    }

    #[test]
    fn histogram_edges_and_counts() {
        let h = Histogram::new(&[0.0, 0.1, 0.5, 0.99, 1.0], 2, 0.0, 1.0);
        assert_eq!(h.edges, vec![0.0, 0.5, 1.0]);
        assert_eq!(h.counts, vec![2, 3]);
        assert_eq!(h.total(), 5);
    }
}
