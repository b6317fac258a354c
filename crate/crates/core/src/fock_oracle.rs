//! Brute-force check of the coherency-parameter picture in a truncated
//! multimode Fock space.
//!
//! Each mode keeps the number states `|0⟩ … |d−1⟩`. Multimode amplitudes are
//! stored row-major over the occupation multi-index with the source mode
//! slowest: `index = Σ_m n_m d^(modes−1−m)`.
//!
//! The coupling generator conserves the total excitation number even after
//! truncation, so [`coupling_unitary`] exponentiates it one excitation
//! sector at a time.

use std::io::{self, Write};

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::phase_space::{apply_transfer, build_transfer, CloneNetworkConfig, CoherentParams};

/// Largest Poisson tail beyond the top level accepted for a coherent state.
pub const DEFAULT_TAIL_BOUND: f64 = 1e-10;
/// Largest multimode dimension `d^modes` the oracle will build.
pub const DEFAULT_DIMENSION_BUDGET: usize = 20_000;
pub const DEFAULT_LEVELS: usize = 16;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    modes: usize,
    levels: usize,
    amplitudes: Vec<Complex64>,
}

impl FockVector {
    pub fn new(modes: usize, levels: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = space_dimension(modes, levels).ok_or(Error::BudgetExceeded {
            dim: usize::MAX,
            budget: usize::MAX,
        })?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        Ok(Self {
            modes,
            levels,
            amplitudes,
        })
    }

    pub fn vacuum(modes: usize, levels: usize) -> Result<Self> {
        let dim = space_dimension(modes, levels).ok_or(Error::BudgetExceeded {
            dim: usize::MAX,
            budget: usize::MAX,
        })?;
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[0] = ONE;
        Self::new(modes, levels, amplitudes)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Occupation numbers `(n_source, n_1, …)` of basis state `index`.
    pub fn occupation(&self, index: usize) -> Vec<usize> {
        occupation(index, self.modes, self.levels)
    }

    /// ⟨Σ_m n_m⟩ for the (possibly unnormalized) vector.
    pub fn number_expectation(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, z)| z.norm_sqr() * self.occupation(i).iter().sum::<usize>() as f64)
            .sum()
    }

    /// CSV dump with header `index,n0,…,n{modes-1},re,im`, one row per basis
    /// state in storage order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "index")?;
        for m in 0..self.modes {
            write!(out, ",n{m}")?;
        }
        writeln!(out, ",re,im")?;
        for (i, z) in self.amplitudes.iter().enumerate() {
            write!(out, "{i}")?;
            for n in self.occupation(i) {
                write!(out, ",{n}")?;
            }
            writeln!(out, ",{:e},{:e}", z.re, z.im)?;
        }
        Ok(())
    }
}

fn space_dimension(modes: usize, levels: usize) -> Option<usize> {
    levels.checked_pow(u32::try_from(modes).ok()?)
}

fn occupation(mut index: usize, modes: usize, levels: usize) -> Vec<usize> {
    let mut occ = vec![0; modes];
    for slot in occ.iter_mut().rev() {
        *slot = index % levels;
        index /= levels;
    }
    occ
}

fn check_levels(levels: usize) -> Result<()> {
    if levels < 2 {
        return Err(Error::InvalidArgument(format!(
            "truncation must keep at least 2 levels, got {levels}"
        )));
    }
    Ok(())
}

/// Dense operator on a truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: Array2<Complex64>,
}

impl OperatorMatrix {
    pub fn from_array(entries: Array2<Complex64>) -> Self {
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: linalg::adjoint(&self.entries),
        }
    }

    pub fn product(&self, other: &OperatorMatrix) -> Self {
        Self {
            entries: self.entries.dot(&other.entries),
        }
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: v.dim(),
            });
        }
        let amplitudes = self
            .entries
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(&v.amplitudes).map(|(m, x)| m * x).sum())
            .collect();
        FockVector::new(v.modes, v.levels, amplitudes)
    }

    /// max |(U†U − I)_ij| over basis states where no mode sits on the top
    /// level of a `levels`-level truncation.
    pub fn interior_unitarity_deviation(&self, modes: usize, levels: usize) -> f64 {
        let gram = linalg::adjoint(&self.entries).dot(&self.entries);
        let interior: Vec<usize> = (0..self.dim())
            .filter(|&i| occupation(i, modes, levels).iter().all(|&n| n + 1 < levels))
            .collect();
        let mut worst = 0.0f64;
        for &i in &interior {
            for &j in &interior {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[[i, j]] - target).norm());
            }
        }
        worst
    }
}

/// Truncated annihilation and creation matrices on `levels` number states.
pub fn ladder_matrices(levels: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    check_levels(levels)?;
    let mut a = Array2::<Complex64>::zeros((levels, levels));
    for n in 1..levels {
        a[[n - 1, n]] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let a = OperatorMatrix::from_array(a);
    let a_dag = a.adjoint();
    Ok((a, a_dag))
}

/// P(n ≥ levels) for a Poisson distribution with the given mean.
pub fn poisson_tail(mean: f64, levels: usize) -> f64 {
    if mean == 0.0 {
        return if levels == 0 { 1.0 } else { 0.0 };
    }
    let mut term = (-mean).exp();
    for n in 1..=levels {
        term *= mean / n as f64;
    }
    let mut tail = 0.0;
    let mut n = levels;
    loop {
        tail += term;
        n += 1;
        term *= mean / n as f64;
        if (n as f64 > mean && term <= tail * 1e-17) || term < f64::MIN_POSITIVE {
            break;
        }
    }
    tail
}

/// Smallest truncation whose Poisson tail at `mean` is at most `bound`.
pub fn required_levels(mean: f64, bound: f64) -> usize {
    (2..)
        .find(|&d| poisson_tail(mean, d) <= bound)
        .expect("Poisson tail vanishes for large d")
}

pub fn coherent_state_vector(alpha: Complex64, levels: usize) -> Result<FockVector> {
    coherent_state_vector_with_tail(alpha, levels, DEFAULT_TAIL_BOUND)
}

/// Truncated coherent state `c_n = e^{−|α|²/2} αⁿ/√n!`, not renormalized.
pub fn coherent_state_vector_with_tail(alpha: Complex64, levels: usize, tail_bound: f64) -> Result<FockVector> {
    check_levels(levels)?;
    let mean = alpha.norm_sqr();
    let tail = poisson_tail(mean, levels);
    if tail > tail_bound {
        return Err(Error::Truncation {
            levels,
            tail,
            bound: tail_bound,
            required: required_levels(mean, tail_bound),
        });
    }
    let mut amplitudes = Vec::with_capacity(levels);
    let mut c = Complex64::new((-mean / 2.0).exp(), 0.0);
    amplitudes.push(c);
    for n in 1..levels {
        c = c * alpha / (n as f64).sqrt();
        amplitudes.push(c);
    }
    FockVector::new(1, levels, amplitudes)
}

/// `exp(α a† − α* a)` on the truncated single-mode space.
pub fn displacement_matrix(alpha: Complex64, levels: usize) -> Result<OperatorMatrix> {
    let (a, a_dag) = ladder_matrices(levels)?;
    let generator = a_dag.entries.mapv(|z| z * alpha) - a.entries.mapv(|z| z * alpha.conj());
    Ok(OperatorMatrix::from_array(linalg::expm(&generator)))
}

/// Tensor product of single-mode coherent states, source mode first.
pub fn product_coherent_state(params: &CoherentParams, levels: usize) -> Result<FockVector> {
    let modes = params.len();
    let dim = space_dimension(modes, levels).ok_or(Error::BudgetExceeded {
        dim: usize::MAX,
        budget: usize::MAX,
    })?;
    let factors = params
        .entries()
        .iter()
        .map(|&z| coherent_state_vector(z, levels))
        .collect::<Result<Vec<_>>>()?;
    let amplitudes = (0..dim)
        .map(|i| {
            occupation(i, modes, levels)
                .iter()
                .zip(&factors)
                .map(|(&n, f)| f.amplitudes[n])
                .product()
        })
        .collect();
    FockVector::new(modes, levels, amplitudes)
}

/// ⟨x|y⟩ = Σ x_i* y_i
pub fn overlap(x: &FockVector, y: &FockVector) -> Result<Complex64> {
    if x.modes != y.modes || x.levels != y.levels {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            actual: y.dim(),
        });
    }
    Ok(x.amplitudes.iter().zip(&y.amplitudes).map(|(a, b)| a.conj() * b).sum())
}

/// Block of an operator restricted to one total-excitation sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    pub excitations: usize,
    /// Storage indices of the sector's basis states, ascending.
    pub indices: Vec<usize>,
    pub block: Array2<Complex64>,
}

/// Operator that is block diagonal in total excitation number.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorOperator {
    modes: usize,
    levels: usize,
    sectors: Vec<Sector>,
}

impl SectorOperator {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn dim(&self) -> usize {
        self.sectors.iter().map(|s| s.indices.len()).sum()
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        if v.modes != self.modes || v.levels != self.levels {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: v.dim(),
            });
        }
        let mut out = vec![ZERO; v.dim()];
        for s in &self.sectors {
            for (row, &i) in s.block.rows().into_iter().zip(&s.indices) {
                out[i] = row.iter().zip(&s.indices).map(|(m, &j)| m * v.amplitudes[j]).sum();
            }
        }
        FockVector::new(self.modes, self.levels, out)
    }

    pub fn unitarity_deviation(&self) -> f64 {
        self.sectors
            .iter()
            .map(|s| linalg::unitarity_deviation(&s.block))
            .fold(0.0, f64::max)
    }

    /// max |G_ij + conj(G_ji)|; zero for an anti-Hermitian operator.
    pub fn anti_hermiticity_deviation(&self) -> f64 {
        self.sectors
            .iter()
            .flat_map(|s| {
                s.block
                    .indexed_iter()
                    .map(|((i, j), z)| (z + s.block[[j, i]].conj()).norm())
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> OperatorMatrix {
        let dim = self.dim();
        let mut m = Array2::<Complex64>::zeros((dim, dim));
        for s in &self.sectors {
            for (p, &i) in s.indices.iter().enumerate() {
                for (q, &j) in s.indices.iter().enumerate() {
                    m[[i, j]] = s.block[[p, q]];
                }
            }
        }
        OperatorMatrix::from_array(m)
    }

    fn map_blocks(&self, f: impl Fn(&Array2<Complex64>) -> Array2<Complex64> + Sync) -> Self {
        let sectors = self
            .sectors
            .par_iter()
            .map(|s| Sector {
                excitations: s.excitations,
                indices: s.indices.clone(),
                block: f(&s.block),
            })
            .collect();
        Self {
            modes: self.modes,
            levels: self.levels,
            sectors,
        }
    }
}

/// Generator `t (a† Σ_j κ_j b_j − a Σ_j κ_j* b_j†)` with `κ_j = r_j e^{−iδ_j}`,
/// the operator whose exponential realizes [`build_transfer`] on coherent
/// states.
pub fn coupling_generator(config: &CloneNetworkConfig, levels: usize, budget: usize) -> Result<SectorOperator> {
    check_levels(levels)?;
    let modes = config.target_count() + 1;
    let dim = match space_dimension(modes, levels) {
        Some(dim) if dim <= budget => dim,
        Some(dim) => return Err(Error::BudgetExceeded { dim, budget }),
        None => {
            return Err(Error::BudgetExceeded {
                dim: usize::MAX,
                budget,
            })
        }
    };
    let kappas: Vec<Complex64> = config
        .couplings()
        .iter()
        .map(|c| Complex64::from_polar(c.strength, -c.phase) * config.time())
        .collect();

    let max_excitations = modes * (levels - 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); max_excitations + 1];
    let mut position = vec![0usize; dim];
    for (i, slot) in position.iter_mut().enumerate() {
        let total: usize = occupation(i, modes, levels).iter().sum();
        *slot = members[total].len();
        members[total].push(i);
    }

    let stride = |mode: usize| levels.pow((modes - 1 - mode) as u32);
    let sectors = members
        .into_iter()
        .enumerate()
        .map(|(excitations, indices)| {
            let size = indices.len();
            let mut block = Array2::<Complex64>::zeros((size, size));
            for (col, &i) in indices.iter().enumerate() {
                let occ = occupation(i, modes, levels);
                let n_src = occ[0];
                for (j, kappa) in kappas.iter().enumerate() {
                    let n_tgt = occ[j + 1];
                    // κ_j a† b_j
                    if n_src + 1 < levels && n_tgt >= 1 {
                        let target = i + stride(0) - stride(j + 1);
                        let amp = ((n_src + 1) as f64 * n_tgt as f64).sqrt();
                        block[[position[target], col]] += kappa * amp;
                    }
                    // −κ_j* a b_j†
                    if n_src >= 1 && n_tgt + 1 < levels {
                        let target = i - stride(0) + stride(j + 1);
                        let amp = (n_src as f64 * (n_tgt + 1) as f64).sqrt();
                        block[[position[target], col]] -= kappa.conj() * amp;
                    }
                }
            }
            Sector {
                excitations,
                indices,
                block,
            }
        })
        .collect();
    Ok(SectorOperator { modes, levels, sectors })
}

pub fn coupling_unitary(config: &CloneNetworkConfig, levels: usize) -> Result<SectorOperator> {
    coupling_unitary_with_budget(config, levels, DEFAULT_DIMENSION_BUDGET)
}

/// Exponential of [`coupling_generator`], computed sector by sector.
pub fn coupling_unitary_with_budget(
    config: &CloneNetworkConfig,
    levels: usize,
    budget: usize,
) -> Result<SectorOperator> {
    let generator = coupling_generator(config, levels, budget)?;
    Ok(generator.map_blocks(linalg::expm))
}

pub fn verify_disentanglement(input: &CoherentParams, config: &CloneNetworkConfig, levels: usize) -> Result<f64> {
    verify_disentanglement_with_budget(input, config, levels, DEFAULT_DIMENSION_BUDGET)
}

/// `1 − |⟨ψ_expected|U|ψ_in⟩|²` where `U` is the exponentiated coupling and
/// `ψ_expected` the product state predicted by the transfer matrix.
pub fn verify_disentanglement_with_budget(
    input: &CoherentParams,
    config: &CloneNetworkConfig,
    levels: usize,
    budget: usize,
) -> Result<f64> {
    Ok(disentanglement_states(input, config, levels, budget)?.infidelity)
}

/// Evolved and predicted states from a disentanglement check.
#[derive(Debug, Clone)]
pub struct DisentanglementCheck {
    pub evolved: FockVector,
    pub predicted: FockVector,
    pub predicted_params: CoherentParams,
    pub infidelity: f64,
}

pub fn disentanglement_states(
    input: &CoherentParams,
    config: &CloneNetworkConfig,
    levels: usize,
    budget: usize,
) -> Result<DisentanglementCheck> {
    let modes = config.target_count() + 1;
    if input.len() != modes {
        return Err(Error::DimensionMismatch {
            expected: modes,
            actual: input.len(),
        });
    }
    let unitary = coupling_unitary_with_budget(config, levels, budget)?;
    let initial = product_coherent_state(input, levels)?;
    let evolved = unitary.apply(&initial)?;
    let predicted_params = apply_transfer(&build_transfer(config), input)?;
    let predicted = product_coherent_state(&predicted_params, levels)?;
    let fidelity = overlap(&predicted, &evolved)?.norm_sqr();
    Ok(DisentanglementCheck {
        evolved,
        predicted,
        predicted_params,
        infidelity: (1.0 - fidelity).max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::symmetric_clone_config;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
        let (ar, ac) = a.dim();
        let (br, bc) = b.dim();
        Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| a[[i / br, j / bc]] * b[[i % br, j % bc]])
    }

    /// Dense two-mode generator assembled from Kronecker products of the
    /// single-mode ladder matrices.
    fn dense_two_mode_generator(kappa: Complex64, time: f64, levels: usize) -> Array2<Complex64> {
        let (a, a_dag) = ladder_matrices(levels).unwrap();
        let forward = kron(a_dag.entries(), a.entries()).mapv(|z| z * kappa * time);
        let backward = kron(a.entries(), a_dag.entries()).mapv(|z| z * kappa.conj() * time);
        forward - backward
    }

    #[test]
    fn ladder_two_levels() {
        let (a, a_dag) = ladder_matrices(2).unwrap();
        assert_eq!(a.entries()[[0, 1]], c(1.0, 0.0));
        assert_eq!(a.entries().iter().filter(|z| z.norm() != 0.0).count(), 1);
        assert_eq!(a_dag.entries()[[1, 0]], c(1.0, 0.0));
        assert!(ladder_matrices(1).is_err());
    }

    #[test]
    fn truncated_commutator() {
        let (a, a_dag) = ladder_matrices(5).unwrap();
        let comm = a.product(&a_dag).entries() - a_dag.product(&a).entries();
        for i in 0..5 {
            for j in 0..5 {
                let expected = match (i == j, i) {
                    (true, 4) => -4.0,
                    (true, _) => 1.0,
                    _ => 0.0,
                };
                assert_abs_diff_eq!(comm[[i, j]].re, expected, epsilon = 1e-14);
                assert_eq!(comm[[i, j]].im, 0.0);
            }
        }
    }

    #[test]
    fn annihilator_kills_vacuum() {
        let (a, _) = ladder_matrices(6).unwrap();
        let out = a.apply(&FockVector::vacuum(1, 6).unwrap()).unwrap();
        assert!(out.amplitudes().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn poisson_tail_matches_direct_sum() {
        // P(n ≥ d) = 1 − Σ_{n<d} e^{−μ} μⁿ/n!, evaluated where cancellation is harmless
        for &(mean, d) in &[(1.0f64, 3usize), (2.5, 4), (0.3, 2), (4.0, 6)] {
            let mut head = 0.0;
            let mut term = (-mean).exp();
            for n in 0..d {
                if n > 0 {
                    term *= mean / n as f64;
                }
                head += term;
            }
            assert_abs_diff_eq!(poisson_tail(mean, d), 1.0 - head, epsilon = 1e-14);
        }
        assert_eq!(poisson_tail(0.0, 3), 0.0);
    }

    #[test]
    fn vacuum_coherent_state() {
        let v = coherent_state_vector(c(0.0, 0.0), 8).unwrap();
        assert_eq!(v.amplitudes()[0], c(1.0, 0.0));
        assert!(v.amplitudes()[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn coherent_norm_is_one_minus_tail() {
        let v = coherent_state_vector(c(1.0, 0.0), 25).unwrap();
        assert_abs_diff_eq!(v.norm_sqr(), 1.0, epsilon = 1e-12);
        let v = coherent_state_vector_with_tail(c(1.5, 0.5), 6, 1.0).unwrap();
        assert_abs_diff_eq!(v.norm_sqr(), 1.0 - poisson_tail(2.5, 6), epsilon = 1e-14);
    }

    #[test]
    fn truncation_error_hints_required_levels() {
        match coherent_state_vector(c(3.0, 0.0), 10) {
            Err(Error::Truncation { required, .. }) => {
                assert!(poisson_tail(9.0, required) <= DEFAULT_TAIL_BOUND);
                assert!(poisson_tail(9.0, required - 1) > DEFAULT_TAIL_BOUND);
                assert!(coherent_state_vector(c(3.0, 0.0), required).is_ok());
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn annihilator_expectation_is_alpha() {
        let alpha = c(0.7, -0.4);
        let (a, _) = ladder_matrices(30).unwrap();
        let v = coherent_state_vector(alpha, 30).unwrap();
        let expectation = overlap(&v, &a.apply(&v).unwrap()).unwrap();
        assert!((expectation - alpha).norm() < 1e-10);
    }

    #[test]
    fn zero_displacement_is_identity() {
        let d = displacement_matrix(c(0.0, 0.0), 7).unwrap();
        assert_eq!(linalg::max_deviation_from_identity(d.entries()), 0.0);
    }

    #[test]
    fn displacement_inverse_on_interior() {
        let alpha = c(0.8, 0.3);
        let d = displacement_matrix(alpha, 20).unwrap();
        let d_inv = displacement_matrix(-alpha, 20).unwrap();
        let prod = d.product(&d_inv);
        for i in 0..19 {
            for j in 0..19 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((prod.entries()[[i, j]] - target).norm() < 1e-9);
            }
        }
        assert!(d.interior_unitarity_deviation(1, 20) < 1e-9);
    }

    fn displacement_series_error(alpha: Complex64, levels: usize, keep: usize) -> f64 {
        let d = displacement_matrix(alpha, levels).unwrap();
        let displaced = d.apply(&FockVector::vacuum(1, levels).unwrap()).unwrap();
        let series = coherent_state_vector(alpha, levels).unwrap();
        displaced
            .amplitudes()
            .iter()
            .zip(series.amplitudes())
            .take(keep)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn displaced_vacuum_matches_series() {
        assert!(displacement_series_error(c(1.0, 0.0), 30, 30) < 1e-9);
        for &alpha in &[c(-0.6, 1.2), c(2.0, 0.0), c(0.0, -2.0), c(1.4, 1.4)] {
            // the top level is where truncation breaks the algebra
            for levels in [32, 40] {
                assert!(
                    displacement_series_error(alpha, levels, levels - 1) < 1e-9,
                    "alpha = {alpha}, d = {levels}"
                );
            }
            // at d = 30 and |α| = 2 the boundary error reaches 1e-9 two levels below the top
            assert!(displacement_series_error(alpha, 30, 28) < 1e-9, "alpha = {alpha}");
        }
    }

    #[test]
    fn product_state_vacuum_and_norm() {
        let zero = CoherentParams::new(vec![c(0.0, 0.0); 3]).unwrap();
        assert_eq!(
            product_coherent_state(&zero, 4).unwrap(),
            FockVector::vacuum(3, 4).unwrap()
        );

        let params = CoherentParams::new(vec![c(0.5, 0.2), c(-0.3, 0.0)]).unwrap();
        let v = product_coherent_state(&params, 16).unwrap();
        let expected: f64 = params
            .entries()
            .iter()
            .map(|z| 1.0 - poisson_tail(z.norm_sqr(), 16))
            .product();
        assert_abs_diff_eq!(v.norm_sqr(), expected, epsilon = 1e-14);
    }

    #[test]
    fn product_state_number_expectation() {
        let (alpha, beta) = (c(0.8, -0.1), c(0.2, 0.9));
        let levels = 20;
        let v = product_coherent_state(&CoherentParams::new(vec![alpha, beta]).unwrap(), levels).unwrap();
        // ⟨a†a + b†b⟩ via the ladder matrices on the two-mode space
        let (a, a_dag) = ladder_matrices(levels).unwrap();
        let num = a_dag.product(&a);
        let eye = linalg::identity(levels);
        let total = kron(num.entries(), &eye) + kron(&eye, num.entries());
        let nv = OperatorMatrix::from_array(total).apply(&v).unwrap();
        let expectation = overlap(&v, &nv).unwrap();
        assert!((expectation.re - (alpha.norm_sqr() + beta.norm_sqr())).abs() < 1e-9);
        assert_abs_diff_eq!(v.number_expectation(), expectation.re, epsilon = 1e-12);
    }

    #[test]
    fn overlap_basics() {
        let v = coherent_state_vector(c(0.4, -0.2), 12).unwrap();
        let self_overlap = overlap(&v, &v).unwrap();
        assert_abs_diff_eq!(self_overlap.re, v.norm_sqr(), epsilon = 1e-15);
        assert_eq!(self_overlap.im, 0.0);

        let mut e1 = vec![ZERO; 4];
        e1[1] = ONE;
        let e1 = FockVector::new(1, 4, e1).unwrap();
        assert_eq!(overlap(&FockVector::vacuum(1, 4).unwrap(), &e1).unwrap(), ZERO);
        assert!(overlap(&e1, &FockVector::vacuum(1, 5).unwrap()).is_err());
    }

    #[test]
    fn coherent_overlap_identity() {
        let pairs = [
            (c(0.3, 0.1), c(-0.5, 0.4)),
            (c(1.0, 0.0), c(0.5, 0.0)),
            (c(0.0, 1.0), c(0.9, -0.2)),
        ];
        for (a, b) in pairs {
            let va = coherent_state_vector(a, 30).unwrap();
            let vb = coherent_state_vector(b, 30).unwrap();
            let f = overlap(&va, &vb).unwrap().norm_sqr();
            assert_abs_diff_eq!(f, (-(a - b).norm_sqr()).exp(), epsilon = 1e-8);
        }
    }

    #[test]
    fn generator_is_exactly_anti_hermitian() {
        let cfg = CloneNetworkConfig::from_parts(&[0.7, 1.3], &[0.4, -2.1], 0.9).unwrap();
        let g = coupling_generator(&cfg, 6, DEFAULT_DIMENSION_BUDGET).unwrap();
        assert_eq!(g.anti_hermiticity_deviation(), 0.0);
        assert_eq!(g.dim(), 216);
    }

    #[test]
    fn generator_annihilates_vacuum() {
        let cfg = CloneNetworkConfig::from_parts(&[0.7, 1.3], &[0.4, -2.1], 0.9).unwrap();
        let u = coupling_unitary(&cfg, 6).unwrap();
        let vac = FockVector::vacuum(3, 6).unwrap();
        assert_eq!(u.apply(&vac).unwrap(), vac);
    }

    #[test]
    fn sector_exponential_matches_dense_exponential() {
        let (strength, phase, time, levels) = (1.3, 0.6, 0.8, 6);
        let cfg = CloneNetworkConfig::from_parts(&[strength], &[phase], time).unwrap();
        let sector = coupling_unitary(&cfg, levels).unwrap().to_dense();
        let kappa = Complex64::from_polar(strength, -phase);
        let dense = linalg::expm(&dense_two_mode_generator(kappa, time, levels));
        assert!(linalg::max_abs_difference(sector.entries(), &dense) < 1e-12);
    }

    #[test]
    fn zero_time_coupling_is_identity() {
        let cfg = CloneNetworkConfig::from_parts(&[1.0, 2.0], &[], 0.0).unwrap();
        let u = coupling_unitary(&cfg, 5).unwrap().to_dense();
        assert_eq!(linalg::max_deviation_from_identity(u.entries()), 0.0);
    }

    #[test]
    fn coupling_unitary_is_unitary() {
        let cfg = CloneNetworkConfig::from_parts(&[0.5, 1.5], &[1.0, -0.3], 2.2).unwrap();
        let u = coupling_unitary(&cfg, 10).unwrap();
        assert!(u.unitarity_deviation() < 1e-9);
        assert!(u.to_dense().interior_unitarity_deviation(3, 10) < 1e-9);
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = symmetric_clone_config(3).unwrap();
        assert_eq!(
            coupling_unitary(&cfg, 16).unwrap_err(),
            Error::BudgetExceeded {
                dim: 65536,
                budget: DEFAULT_DIMENSION_BUDGET
            }
        );
        assert!(coupling_unitary_with_budget(&cfg, 4, 100).is_err());
    }

    #[test]
    fn swap_moves_source_to_target() {
        let alpha = c(0.9, -0.3);
        let cfg = CloneNetworkConfig::from_parts(&[1.0], &[], FRAC_PI_2).unwrap();
        let u = coupling_unitary(&cfg, 20).unwrap();
        let input = CoherentParams::source_only(alpha, 1).unwrap();
        let evolved = u.apply(&product_coherent_state(&input, 20).unwrap()).unwrap();
        let expected = product_coherent_state(&CoherentParams::new(vec![ZERO, -alpha]).unwrap(), 20).unwrap();
        assert!(overlap(&expected, &evolved).unwrap().norm_sqr() >= 1.0 - 1e-6);
    }

    #[test]
    fn number_is_conserved() {
        let cfg = CloneNetworkConfig::from_parts(&[0.8, 0.4], &[0.3, 1.9], 1.7).unwrap();
        let input = CoherentParams::new(vec![c(0.6, 0.2), c(-0.4, 0.1), c(0.0, 0.5)]).unwrap();
        let v = product_coherent_state(&input, 14).unwrap();
        let evolved = coupling_unitary(&cfg, 14).unwrap().apply(&v).unwrap();
        assert_abs_diff_eq!(v.number_expectation(), evolved.number_expectation(), epsilon = 1e-8);
    }

    #[test]
    fn disentanglement_zero_time() {
        let cfg = CloneNetworkConfig::from_parts(&[1.0], &[0.5], 0.0).unwrap();
        let input = CoherentParams::new(vec![c(0.8, 0.0), c(0.0, 0.3)]).unwrap();
        assert_abs_diff_eq!(verify_disentanglement(&input, &cfg, 16).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn disentanglement_single_target_random_configs() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let input = CoherentParams::new(vec![c(0.8, 0.0), c(0.0, 0.3)]).unwrap();
        for _ in 0..10 {
            let cfg = CloneNetworkConfig::from_parts(
                &[rng.random_range(0.1..2.0)],
                &[rng.random_range(-PI..PI)],
                rng.random_range(-3.0..3.0),
            )
            .unwrap();
            let infidelity = verify_disentanglement(&input, &cfg, 20).unwrap();
            assert!(infidelity < 1e-6, "{cfg:?}: {infidelity:e}");
        }
    }

    #[test]
    fn disentanglement_symmetric_two_copies() {
        let input = CoherentParams::source_only(c(0.6, 0.0), 2).unwrap();
        let check = disentanglement_states(
            &input,
            &symmetric_clone_config(2).unwrap(),
            16,
            DEFAULT_DIMENSION_BUDGET,
        )
        .unwrap();
        for t in check.predicted_params.targets() {
            assert!((t - c(0.6 / 2f64.sqrt(), 0.0)).norm() < 1e-15);
        }
        assert!(check.infidelity < 1e-6);
    }

    #[test]
    fn csv_dump_layout() {
        let v = product_coherent_state(&CoherentParams::new(vec![c(0.5, 0.0), ZERO]).unwrap(), 2).unwrap_err();
        assert!(matches!(v, Error::Truncation { .. }));
        let v = FockVector::vacuum(2, 2).unwrap();
        let mut buf = Vec::new();
        v.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,n0,n1,re,im");
        assert_eq!(lines[1], "0,0,0,1e0,0e0");
        assert_eq!(lines[3], "2,1,0,0e0,0e0");
        assert_eq!(lines.len(), 5);
    }
}
