//! Small dense complex linear algebra helpers.

use ndarray::Array2;
use num_complex::Complex64;

/// Scaled matrices have 1-norm at most this before the Taylor step.
const TAYLOR_NORM_BOUND: f64 = 0.5;
/// Truncation error of the degree-18 Taylor polynomial at norm 0.5 is below
/// 0.5^19 / 19! ~ 1.6e-23 relative to the result.
const TAYLOR_DEGREE: usize = 18;

pub fn identity(dim: usize) -> Array2<Complex64> {
    Array2::from_diag_elem(dim, Complex64::new(1.0, 0.0))
}

pub fn adjoint(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

/// Maximum absolute column sum.
pub fn one_norm(m: &Array2<Complex64>) -> f64 {
    m.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entrywise |(M†M − I)_ij|.
pub fn unitarity_deviation(m: &Array2<Complex64>) -> f64 {
    let gram = adjoint(m).dot(m);
    max_deviation_from_identity(&gram)
}

pub fn max_deviation_from_identity(m: &Array2<Complex64>) -> f64 {
    m.indexed_iter()
        .map(|((i, j), z)| {
            let target = if i == j { 1.0 } else { 0.0 };
            (z - target).norm()
        })
        .fold(0.0, f64::max)
}

pub fn max_abs_difference(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a Taylor polynomial.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 0.5, the
/// degree-18 Taylor polynomial is evaluated by Horner's rule and the result
/// is squared `s` times.
pub fn expm(m: &Array2<Complex64>) -> Array2<Complex64> {
    let (rows, cols) = m.dim();
    assert_eq!(rows, cols, "expm needs a square matrix");
    let norm = one_norm(m);
    let squarings = if norm > TAYLOR_NORM_BOUND {
        (norm / TAYLOR_NORM_BOUND).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m.mapv(|z| z / 2f64.powi(squarings));

    let eye = identity(rows);
    let mut acc = &eye + &scaled.mapv(|z| z / TAYLOR_DEGREE as f64);
    for k in (1..TAYLOR_DEGREE).rev() {
        acc = &eye + &scaled.dot(&acc).mapv(|z| z / k as f64);
    }
    for _ in 0..squarings {
        acc = acc.dot(&acc);
    }
    acc
}
