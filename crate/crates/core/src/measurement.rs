//! Monte Carlo quadrature measurements on information clones.
//!
//! `M` source copies are each cloned into `N` copies carrying `α/√N`. Half
//! of the `MN` clones are measured in position and half in momentum; the
//! two sample means give the estimate `α_est = √N (y + i z)/√2` and the
//! measurement fidelity `F = exp(−|α − α_est|²)`.
//!
//! Every trial draws from its own ChaCha8 stream (`seed`, stream = trial
//! index), so sample streams do not depend on the worker count.

use std::io::{self, Write};

use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{self, Histogram, KS_LEVEL};

pub const DEFAULT_BINS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    InfoCloning,
    Gaussian,
}

/// Configuration of a measurement-fidelity experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityRun {
    pub alpha_true: Complex64,
    /// `M`, copies of the unknown state.
    pub sources: usize,
    /// `N`, clones made from each source copy.
    pub copies: usize,
    pub trials: usize,
    pub seed: u64,
    pub scheme: Scheme,
    /// Quadrature noise of Gaussian-cloner copies; ignored for information cloning.
    pub gaussian_noise: GaussianNoise,
    pub workers: usize,
}

/// Per-copy quadrature noise model for the Gaussian cloner.
///
/// `PrintedLaw` uses variance `(A+2)/A`, the width for which the fidelity
/// density is `c F^{c−1}` with `c = MN·A/(2(A+2))` and the mean is
/// `M²N²/(M²N²+2MN+4N−4)`. `Mixture` uses the marginal of the mixture state
/// itself, `(A+2)/(2A)`, for which the exponent doubles to `MN·A/(A+2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussianNoise {
    #[default]
    PrintedLaw,
    Mixture,
}

impl FidelityRun {
    pub fn new(
        alpha_true: Complex64,
        sources: usize,
        copies: usize,
        trials: usize,
        seed: u64,
        scheme: Scheme,
    ) -> Result<Self> {
        let run = Self {
            alpha_true,
            sources,
            copies,
            trials,
            seed,
            scheme,
            gaussian_noise: GaussianNoise::default(),
            workers: 1,
        };
        run.validate()?;
        Ok(run)
    }

    pub fn with_workers(mut self, workers: usize) -> Result<Self> {
        self.workers = workers;
        self.validate()?;
        Ok(self)
    }

    pub fn with_gaussian_noise(mut self, noise: GaussianNoise) -> Self {
        self.gaussian_noise = noise;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha_true.is_finite() {
            return Err(Error::InvalidArgument("alpha is not finite".into()));
        }
        if self.sources == 0 || self.copies == 0 {
            return Err(Error::InvalidArgument("M and N must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trial count must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidArgument("worker count must be at least 1".into()));
        }
        if self.scheme == Scheme::Gaussian && self.copies < 2 {
            return Err(Error::GaussianPerfectCopy);
        }
        let total = self.total_copies();
        if total < 2 || !total.is_multiple_of(2) {
            return Err(Error::OddMeasurementCount(total));
        }
        Ok(())
    }

    pub fn total_copies(&self) -> usize {
        self.sources * self.copies
    }

    /// Measurements per quadrature, `MN/2`.
    pub fn per_quadrature(&self) -> usize {
        self.total_copies() / 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelitySample {
    pub alpha_est: Complex64,
    pub fidelity: f64,
}

impl FidelitySample {
    pub fn new(alpha_true: Complex64, alpha_est: Complex64) -> Self {
        Self {
            alpha_est,
            fidelity: measurement_fidelity(alpha_true, alpha_est),
        }
    }
}

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Runs `trial` once per trial index, on `run.workers` threads, returning
/// samples in trial order.
pub(crate) fn run_trials<F>(run: &FidelityRun, trial: F) -> Result<Vec<FidelitySample>>
where
    F: Fn(&mut ChaCha8Rng) -> FidelitySample + Sync,
{
    let one = |i: usize| trial(&mut trial_rng(run.seed, i));
    if run.workers == 1 {
        return Ok((0..run.trials).map(one).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(run.workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| (0..run.trials).into_par_iter().map(one).collect()))
}

/// Position (or momentum) outcomes on a coherent state whose parameter has
/// the given real (or imaginary) part: normal with mean `√2·component` and
/// variance 1/2.
pub fn sample_quadrature<R: Rng + ?Sized>(component: f64, count: usize, rng: &mut R) -> Vec<f64> {
    let mean = std::f64::consts::SQRT_2 * component;
    let sd = std::f64::consts::FRAC_1_SQRT_2;
    (0..count)
        .map(|_| mean + sd * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

pub(crate) fn sample_mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// α_est = √N (y + i z) / √2
pub fn estimate_alpha(y_mean: f64, z_mean: f64, copies: usize) -> Complex64 {
    Complex64::new(y_mean, z_mean) * ((copies as f64).sqrt() / std::f64::consts::SQRT_2)
}

/// |⟨α|α_est⟩|² = exp(−|α − α_est|²)
pub fn measurement_fidelity(alpha_true: Complex64, alpha_est: Complex64) -> f64 {
    (-(alpha_true - alpha_est).norm_sqr()).exp()
}

pub fn run_info_trials(run: &FidelityRun) -> Result<Vec<FidelitySample>> {
    run.validate()?;
    if run.scheme != Scheme::InfoCloning {
        return Err(Error::InvalidArgument(
            "run is not configured for information cloning".into(),
        ));
    }
    let clone = run.alpha_true / (run.copies as f64).sqrt();
    let count = run.per_quadrature();
    run_trials(run, |rng| {
        let y = sample_mean(&sample_quadrature(clone.re, count, rng));
        let z = sample_mean(&sample_quadrature(clone.im, count, rng));
        FidelitySample::new(run.alpha_true, estimate_alpha(y, z, run.copies))
    })
}

/// Fidelity density `c F^{c−1}` on `[0, 1]`, CDF `F^c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityLaw {
    pub exponent: f64,
}

impl FidelityLaw {
    pub fn new(exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "fidelity exponent must be positive, got {exponent}"
            )));
        }
        Ok(Self { exponent })
    }

    pub fn pdf(&self, f: f64) -> f64 {
        if !(0.0..=1.0).contains(&f) {
            return 0.0;
        }
        self.exponent * f.powf(self.exponent - 1.0)
    }

    pub fn cdf(&self, f: f64) -> f64 {
        f.clamp(0.0, 1.0).powf(self.exponent)
    }

    pub fn mean(&self) -> f64 {
        self.exponent / (self.exponent + 1.0)
    }

    pub fn variance(&self) -> f64 {
        let c = self.exponent;
        c / (c + 2.0) - (c / (c + 1.0)).powi(2)
    }
}

/// `p(F) = M F^{M−1}`, uniform for a single source copy.
pub fn info_pdf(sources: usize) -> Result<FidelityLaw> {
    if sources == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    FidelityLaw::new(sources as f64)
}

/// M/(M+1), independent of the number of clones per source.
pub fn info_mean_fidelity(sources: usize) -> Result<f64> {
    Ok(info_pdf(sources)?.mean())
}

pub fn info_mean_exact(sources: usize) -> Result<Ratio<i64>> {
    if sources == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    let m = sources as i64;
    Ok(Ratio::new(m, m + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionSummary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub histogram: Histogram,
    pub ks_statistic: f64,
    /// One-sample KS critical value at the 5% level.
    pub ks_critical: f64,
}

impl DistributionSummary {
    pub fn ks_pass(&self) -> bool {
        self.ks_statistic < self.ks_critical
    }
}

pub fn summarize(samples: &[f64], reference_cdf: impl Fn(f64) -> f64) -> Result<DistributionSummary> {
    summarize_with_bins(samples, reference_cdf, DEFAULT_BINS)
}

pub fn summarize_with_bins(
    samples: &[f64],
    reference_cdf: impl Fn(f64) -> f64,
    bins: usize,
) -> Result<DistributionSummary> {
    if bins == 0 {
        return Err(Error::InvalidArgument("histogram needs at least one bin".into()));
    }
    let (mean, variance) = stats::mean_variance(samples)?;
    Ok(DistributionSummary {
        count: samples.len(),
        mean,
        variance,
        histogram: Histogram::new(samples, bins, 0.0, 1.0),
        ks_statistic: stats::ks_one_sample(samples, reference_cdf),
        ks_critical: stats::ks_critical_one_sample(samples.len(), KS_LEVEL),
    })
}

pub fn fidelities(samples: &[FidelitySample]) -> Vec<f64> {
    samples.iter().map(|s| s.fidelity).collect()
}

/// CSV with header `trial,re_est,im_est,F`.
pub fn write_samples_csv<W: Write>(samples: &[FidelitySample], mut out: W) -> io::Result<()> {
    writeln!(out, "trial,re_est,im_est,F")?;
    for (i, s) in samples.iter().enumerate() {
        writeln!(out, "{i},{},{},{}", s.alpha_est.re, s.alpha_est.im, s.fidelity)?;
    }
    Ok(())
}
