//! Coherency-parameter description of the cloning network.
//!
//! A coupling unitary `exp(t (a† Σ κ_j b_j − a Σ κ_j* b_j†))` between a
//! source mode `a` and target modes `b_j` maps a product of coherent states
//! to another product of coherent states. The map acts linearly on the
//! vector of coherency parameters `(α, β_1, …, β_N)` through an
//! `(N+1)×(N+1)` unitary [`TransferMatrix`].
//!
//! Coupling `j` is stored as a strength `r_j ≥ 0` and a phase `δ_j`. The
//! first row of the transfer matrix carries `e^{−iδ_j}`, the first column
//! `e^{+iδ_j}`, i.e. target parameters enter the real ("tilde") frame as
//! `e^{−iδ_j} β_j`. [`crate::fock_oracle`] uses the matching operator
//! convention.

use std::f64::consts::{FRAC_PI_2, PI};

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

/// Coherency parameters of the source mode followed by the target modes.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentParams {
    entries: Vec<Complex64>,
}

impl CoherentParams {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidParams(format!(
                "need a source and at least one target mode, got {} entries",
                entries.len()
            )));
        }
        if let Some(i) = entries.iter().position(|z| !z.is_finite()) {
            return Err(Error::InvalidParams(format!("entry {i} is not finite")));
        }
        Ok(Self { entries })
    }

    /// Source `alpha` with all `targets` target modes in the vacuum.
    pub fn source_only(alpha: Complex64, targets: usize) -> Result<Self> {
        let mut entries = vec![Complex64::new(0.0, 0.0); targets + 1];
        entries[0] = alpha;
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn source(&self) -> Complex64 {
        self.entries[0]
    }

    pub fn targets(&self) -> &[Complex64] {
        &self.entries[1..]
    }

    /// Σ_a |entry_a|², the mean total excitation number of the product state.
    pub fn norm_sqr_sum(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    fn check_len(&self, expected: usize) -> Result<()> {
        if self.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: self.len(),
            });
        }
        Ok(())
    }
}

/// Coupling κ_j between the source and target mode `j`, as strength and phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub strength: f64,
    pub phase: f64,
}

impl Coupling {
    pub fn real(strength: f64) -> Self {
        Self { strength, phase: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloneNetworkConfig {
    couplings: Vec<Coupling>,
    time: f64,
}

impl CloneNetworkConfig {
    pub fn new(couplings: Vec<Coupling>, time: f64) -> Result<Self> {
        if couplings.is_empty() {
            return Err(Error::InvalidCoupling("no target modes".into()));
        }
        if !time.is_finite() {
            return Err(Error::InvalidCoupling("interaction time is not finite".into()));
        }
        for (j, c) in couplings.iter().enumerate() {
            if !c.strength.is_finite() || c.strength < 0.0 {
                return Err(Error::InvalidCoupling(format!(
                    "strength of coupling {j} must be finite and nonnegative, got {}",
                    c.strength
                )));
            }
            if !c.phase.is_finite() {
                return Err(Error::InvalidCoupling(format!("phase of coupling {j} is not finite")));
            }
        }
        if couplings.iter().all(|c| c.strength == 0.0) {
            return Err(Error::DegenerateCoupling);
        }
        Ok(Self { couplings, time })
    }

    /// Builds a config from parallel strength and phase lists. An empty
    /// phase list means all phases are zero.
    pub fn from_parts(strengths: &[f64], phases: &[f64], time: f64) -> Result<Self> {
        if !phases.is_empty() && phases.len() != strengths.len() {
            return Err(Error::DimensionMismatch {
                expected: strengths.len(),
                actual: phases.len(),
            });
        }
        let couplings = strengths
            .iter()
            .enumerate()
            .map(|(j, &strength)| Coupling {
                strength,
                phase: phases.get(j).copied().unwrap_or(0.0),
            })
            .collect();
        Self::new(couplings, time)
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn target_count(&self) -> usize {
        self.couplings.len()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.couplings.iter().map(|c| c.phase).collect()
    }

    pub fn with_time(&self, time: f64) -> Result<Self> {
        Self::new(self.couplings.clone(), time)
    }

    /// r = √(Σ r_j²).
    pub fn total_strength(&self) -> f64 {
        self.couplings
            .iter()
            .map(|c| c.strength * c.strength)
            .sum::<f64>()
            .sqrt()
    }

    /// The rotation angle r·t.
    pub fn angle(&self) -> f64 {
        self.total_strength() * self.time
    }

    pub fn is_phase_free(&self) -> bool {
        self.couplings.iter().all(|c| c.phase == 0.0)
    }
}

/// Unitary map on coherency parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    entries: Array2<Complex64>,
}

impl TransferMatrix {
    pub fn from_array(entries: Array2<Complex64>) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(Error::DimensionMismatch {
                expected: rows,
                actual: cols,
            });
        }
        Ok(Self { entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: linalg::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[[row, col]]
    }

    /// Matrix product `self · other`, i.e. `other` acts first.
    pub fn compose(&self, other: &TransferMatrix) -> Result<TransferMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(Self {
            entries: self.entries.dot(&other.entries),
        })
    }

    /// max |(U†U − I)_ij|
    pub fn unitarity_deviation(&self) -> f64 {
        linalg::unitarity_deviation(&self.entries)
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    pub fn max_abs_difference(&self, other: &TransferMatrix) -> f64 {
        linalg::max_abs_difference(&self.entries, &other.entries)
    }
}

/// `(sin θ, cos θ)` that is exact when θ lands on a multiple of π/2 up to
/// rounding of θ itself, so a quarter-turn network empties the source mode
/// exactly.
fn quarter_turn_sin_cos(theta: f64) -> (f64, f64) {
    let quarters = theta / FRAC_PI_2;
    let k = quarters.round();
    if (quarters - k).abs() <= 8.0 * f64::EPSILON * quarters.abs().max(1.0) {
        match (k as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        theta.sin_cos()
    }
}

/// Real transfer matrix for a network without coupling phases.
pub fn build_tilde_transfer(config: &CloneNetworkConfig) -> Result<TransferMatrix> {
    if !config.is_phase_free() {
        return Err(Error::NonZeroPhase);
    }
    Ok(build_transfer(config))
}

/// Transfer matrix of the coupling network:
///
/// ```text
/// U_11       = cos rt
/// U_1,k+1    =  (r_k/r) e^{−iδ_k} sin rt
/// U_k+1,1    = −(r_k/r) e^{+iδ_k} sin rt
/// U_j+1,k+1  = δ_jk − e^{i(δ_j−δ_k)} (r_j r_k / r²)(1 − cos rt)
/// ```
pub fn build_transfer(config: &CloneNetworkConfig) -> TransferMatrix {
    let n = config.target_count();
    let r = config.total_strength();
    let (sin, cos) = quarter_turn_sin_cos(config.angle());
    let ratios: Vec<f64> = config.couplings.iter().map(|c| c.strength / r).collect();
    let phases: Vec<Complex64> = config
        .couplings
        .iter()
        .map(|c| Complex64::from_polar(1.0, c.phase))
        .collect();

    let mut u = Array2::<Complex64>::zeros((n + 1, n + 1));
    u[[0, 0]] = Complex64::new(cos, 0.0);
    for k in 0..n {
        u[[0, k + 1]] = phases[k].conj() * (ratios[k] * sin);
        u[[k + 1, 0]] = phases[k] * (-ratios[k] * sin);
    }
    for j in 0..n {
        for k in 0..n {
            let delta = if j == k { 1.0 } else { 0.0 };
            let phase = phases[j] * phases[k].conj();
            u[[j + 1, k + 1]] = Complex64::new(delta, 0.0) - phase * (ratios[j] * ratios[k] * (1.0 - cos));
        }
    }
    TransferMatrix { entries: u }
}

/// entries(t)_a = Σ_b U_ab entries_b
pub fn apply_transfer(u: &TransferMatrix, params: &CoherentParams) -> Result<CoherentParams> {
    params.check_len(u.dim())?;
    let entries = u
        .entries
        .rows()
        .into_iter()
        .map(|row| row.iter().zip(&params.entries).map(|(m, x)| m * x).sum::<Complex64>())
        .collect();
    CoherentParams::new(entries)
}

/// Largest absolute deviation among the quadratic invariants of the network.
///
/// With weights `w_1 = 1`, `w_{k+1} = e^{−2iδ_k}` the checked quantities are
/// `Σ|x_a|²` and `Σ w_a x_a²`, and, when a second independent pair is given,
/// the bilinear forms `Σ w_a x_a y_a` and `Σ x_a* y_a`. All-zero phases give
/// the real-frame forms.
pub fn check_invariants(
    before: &CoherentParams,
    after: &CoherentParams,
    second_pair: Option<(&CoherentParams, &CoherentParams)>,
    phases: &[f64],
) -> Result<f64> {
    let dim = before.len();
    after.check_len(dim)?;
    if phases.len() + 1 != dim {
        return Err(Error::DimensionMismatch {
            expected: dim - 1,
            actual: phases.len(),
        });
    }
    let weights: Vec<Complex64> = std::iter::once(Complex64::new(1.0, 0.0))
        .chain(phases.iter().map(|&d| Complex64::from_polar(1.0, -2.0 * d)))
        .collect();

    let weighted = |x: &CoherentParams, y: &CoherentParams| -> Complex64 {
        weights
            .iter()
            .zip(x.entries.iter().zip(&y.entries))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    };
    let hermitian = |x: &CoherentParams, y: &CoherentParams| -> Complex64 {
        x.entries.iter().zip(&y.entries).map(|(a, b)| a.conj() * b).sum()
    };

    let mut deviation = (hermitian(before, before) - hermitian(after, after)).norm();
    deviation = deviation.max((weighted(before, before) - weighted(after, after)).norm());

    if let Some((before2, after2)) = second_pair {
        before2.check_len(dim)?;
        after2.check_len(dim)?;
        deviation = deviation.max((weighted(before, before2) - weighted(after, after2)).norm());
        deviation = deviation.max((hermitian(before, before2) - hermitian(after, after2)).norm());
    }
    Ok(deviation)
}

/// Equal real couplings `r_j = 1` with `rt = 3π/2`, so `sin rt = −1` and
/// `cos rt = 0`.
pub fn symmetric_clone_config(copies: usize) -> Result<CloneNetworkConfig> {
    if copies == 0 {
        return Err(Error::InvalidArgument("number of copies must be at least 1".into()));
    }
    let time = 3.0 * PI / (2.0 * (copies as f64).sqrt());
    CloneNetworkConfig::new(vec![Coupling::real(1.0); copies], time)
}

/// Multiplies each entry by `e^{iγ_a}`, the parameter-level action of the
/// phase rotation `e^{iγ a†a}`.
pub fn remove_phases(params: &CoherentParams, gammas: &[f64]) -> Result<CoherentParams> {
    if gammas.len() != params.len() {
        return Err(Error::DimensionMismatch {
            expected: params.len(),
            actual: gammas.len(),
        });
    }
    let entries = params
        .entries
        .iter()
        .zip(gammas)
        .map(|(z, &g)| {
            if g == 0.0 {
                *z
            } else {
                z * Complex64::from_polar(1.0, g)
            }
        })
        .collect();
    CoherentParams::new(entries)
}

/// Runs the symmetric network on `(α, 0, …, 0)` and strips the known phases
/// of the target coefficients. The result is `(0, α/√N, …, α/√N)`.
pub fn information_clone(alpha: Complex64, copies: usize) -> Result<CoherentParams> {
    let config = symmetric_clone_config(copies)?;
    let u = build_transfer(&config);
    let input = CoherentParams::source_only(alpha, copies)?;
    let output = apply_transfer(&u, &input)?;
    let gammas: Vec<f64> = std::iter::once(0.0)
        .chain((1..=copies).map(|k| -u.get(k, 0).arg()))
        .collect();
    remove_phases(&output, &gammas)
}

/// Overlap fidelity `|⟨α|α/√N⟩|² = exp(−|α|²(1 − 1/√N)²)` of one information
/// clone with the original state.
pub fn info_overlap_fidelity(alpha: Complex64, copies: usize) -> Result<f64> {
    if copies == 0 {
        return Err(Error::InvalidArgument("number of copies must be at least 1".into()));
    }
    let shrink = 1.0 - 1.0 / (copies as f64).sqrt();
    Ok((-alpha.norm_sqr() * shrink * shrink).exp())
}
