//! Reference statistics of the optimal Gaussian cloner.
//!
//! Each output copy is the Gaussian mixture
//! `∫ d²β (A/π) e^{−A|β|²} |α₀+β⟩⟨α₀+β|` with `A = MN/(N−1)`. Its quadrature
//! marginals are normal with mean `√2·α₀` and variance `(A+2)/(2A)`.
//!
//! The reference fidelity law is `p(F) = c F^{c−1}` with
//! `c = MN·A / (2(A+2)) = M²N² / (2(MN + 2N − 2))`. Sample means of the
//! mixture marginal give twice that exponent, so Monte Carlo runs default to
//! [`GaussianNoise::PrintedLaw`], which draws with variance `(A+2)/A` and
//! reproduces the reference law exactly; [`GaussianNoise::Mixture`] draws
//! from the marginal and is checked against [`mixture_pdf`].
//!
//! Copies are treated as independent draws from the single-copy marginal.

use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::measurement::{
    info_mean_exact, info_mean_fidelity, run_trials, sample_mean, FidelityLaw, FidelityRun, FidelitySample,
    GaussianNoise, Scheme,
};

fn check_counts(sources: usize, copies: usize) -> Result<()> {
    if sources == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    if copies < 2 {
        return Err(Error::GaussianPerfectCopy);
    }
    Ok(())
}

fn as_i64(x: usize) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::InvalidArgument(format!("{x} is too large")))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianCloneModel {
    pub sources: usize,
    pub copies: usize,
    pub amplification: f64,
}

impl GaussianCloneModel {
    pub fn new(sources: usize, copies: usize) -> Result<Self> {
        Ok(Self {
            sources,
            copies,
            amplification: amplification_a(sources, copies)?,
        })
    }

    pub fn fidelity_law(&self) -> Result<FidelityLaw> {
        gauss_pdf(self.sources, self.copies)
    }

    pub fn quadrature_variance(&self) -> f64 {
        (self.amplification + 2.0) / (2.0 * self.amplification)
    }
}

/// A = MN/(N−1)
pub fn amplification_a(sources: usize, copies: usize) -> Result<f64> {
    check_counts(sources, copies)?;
    Ok((sources * copies) as f64 / (copies - 1) as f64)
}

pub fn amplification_exact(sources: usize, copies: usize) -> Result<Ratio<i64>> {
    check_counts(sources, copies)?;
    let (m, n) = (as_i64(sources)?, as_i64(copies)?);
    Ok(Ratio::new(m * n, n - 1))
}

/// Optimal overlap fidelity of `n_in → m_out` cloning, `mn/(mn + m − n)`.
pub fn overlap_fidelity_gaussian(n_in: usize, m_out: usize) -> Result<f64> {
    let exact = overlap_fidelity_gaussian_exact(n_in, m_out)?;
    Ok(*exact.numer() as f64 / *exact.denom() as f64)
}

pub fn overlap_fidelity_gaussian_exact(n_in: usize, m_out: usize) -> Result<Ratio<i64>> {
    if n_in == 0 {
        return Err(Error::InvalidArgument("need at least one input copy".into()));
    }
    if m_out < n_in {
        return Err(Error::InvalidArgument(format!(
            "cannot clone {n_in} copies into fewer ({m_out}) copies"
        )));
    }
    let (n, m) = (as_i64(n_in)?, as_i64(m_out)?);
    Ok(Ratio::new(m * n, m * n + m - n))
}

impl GaussianNoise {
    pub fn quadrature_variance(self, amplification: f64) -> f64 {
        match self {
            GaussianNoise::PrintedLaw => (amplification + 2.0) / amplification,
            GaussianNoise::Mixture => (amplification + 2.0) / (2.0 * amplification),
        }
    }
}

/// Quadrature outcomes on one Gaussian-cloner copy: normal with mean
/// `√2·component` and the mixture-marginal variance `(A+2)/(2A)`.
pub fn gauss_quadrature_sampler<R: Rng + ?Sized>(
    component: f64,
    amplification: f64,
    count: usize,
    rng: &mut R,
) -> Vec<f64> {
    noisy_quadrature_sampler(
        component,
        GaussianNoise::Mixture.quadrature_variance(amplification),
        count,
        rng,
    )
}

fn noisy_quadrature_sampler<R: Rng + ?Sized>(component: f64, variance: f64, count: usize, rng: &mut R) -> Vec<f64> {
    let mean = std::f64::consts::SQRT_2 * component;
    let sd = variance.sqrt();
    (0..count)
        .map(|_| mean + sd * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// α_est = (y + i z)/√2, without the √N rescaling of information clones.
pub fn estimate_alpha_gauss(y_mean: f64, z_mean: f64) -> Complex64 {
    Complex64::new(y_mean, z_mean) / std::f64::consts::SQRT_2
}

pub fn run_gauss_trials(run: &FidelityRun) -> Result<Vec<FidelitySample>> {
    run.validate()?;
    if run.scheme != Scheme::Gaussian {
        return Err(Error::InvalidArgument(
            "run is not configured for the Gaussian cloner".into(),
        ));
    }
    let variance = run
        .gaussian_noise
        .quadrature_variance(amplification_a(run.sources, run.copies)?);
    let count = run.per_quadrature();
    let alpha = run.alpha_true;
    run_trials(run, |rng| {
        let y = sample_mean(&noisy_quadrature_sampler(alpha.re, variance, count, rng));
        let z = sample_mean(&noisy_quadrature_sampler(alpha.im, variance, count, rng));
        FidelitySample::new(alpha, estimate_alpha_gauss(y, z))
    })
}

/// Exponent `c = MN·A/(2(A+2))` of the fidelity law, via the amplification.
pub fn fidelity_exponent_exact(sources: usize, copies: usize) -> Result<Ratio<i64>> {
    let a = amplification_exact(sources, copies)?;
    let mn = Ratio::from_integer(as_i64(sources * copies)?);
    Ok(mn * a / (Ratio::from_integer(2) * (a + 2)))
}

/// `p(F) = c F^{c−1}` with `c = M²N²/(2(MN + 2N − 2))`.
pub fn gauss_pdf(sources: usize, copies: usize) -> Result<FidelityLaw> {
    check_counts(sources, copies)?;
    let (m, n) = (sources as f64, copies as f64);
    FidelityLaw::new(m * m * n * n / (2.0 * (m * n + 2.0 * n - 2.0)))
}

/// Fidelity law of sample means drawn from the mixture marginal,
/// exponent `MN·A/(A+2)`.
pub fn mixture_pdf(sources: usize, copies: usize) -> Result<FidelityLaw> {
    let a = amplification_a(sources, copies)?;
    FidelityLaw::new((sources * copies) as f64 * a / (a + 2.0))
}

/// The fidelity law matching a noise model.
pub fn noise_pdf(noise: GaussianNoise, sources: usize, copies: usize) -> Result<FidelityLaw> {
    match noise {
        GaussianNoise::PrintedLaw => gauss_pdf(sources, copies),
        GaussianNoise::Mixture => mixture_pdf(sources, copies),
    }
}

/// M²N²/(M²N² + 2MN + 4N − 4)
pub fn gauss_mean_fidelity(sources: usize, copies: usize) -> Result<f64> {
    let exact = gauss_mean_exact(sources, copies)?;
    Ok(*exact.numer() as f64 / *exact.denom() as f64)
}

pub fn gauss_mean_exact(sources: usize, copies: usize) -> Result<Ratio<i64>> {
    check_counts(sources, copies)?;
    let (m, n) = (as_i64(sources)?, as_i64(copies)?);
    let mn2 = m * m * n * n;
    Ok(Ratio::new(mn2, mn2 + 2 * m * n + 4 * n - 4))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub sources: usize,
    pub copies: usize,
    pub gauss_mean: f64,
    pub info_mean: f64,
    pub gauss_exact: Ratio<i64>,
    pub info_exact: Ratio<i64>,
}

/// Default comparison cases as (M, N).
pub const DEFAULT_CASES: [(usize, usize); 4] = [(1, 2), (1, 4), (2, 2), (2, 4)];

pub fn comparison_table(cases: &[(usize, usize)]) -> Result<Vec<ComparisonRow>> {
    cases
        .iter()
        .map(|&(sources, copies)| {
            Ok(ComparisonRow {
                sources,
                copies,
                gauss_mean: gauss_mean_fidelity(sources, copies)?,
                info_mean: info_mean_fidelity(sources)?,
                gauss_exact: gauss_mean_exact(sources, copies)?,
                info_exact: info_mean_exact(sources)?,
            })
        })
        .collect()
}
