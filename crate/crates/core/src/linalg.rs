//! Small dense complex linear-algebra helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// `max_ij |(M^dag M - I)_ij|`.
pub fn unitarity_residual(m: &DMatrix<Complex64>) -> f64 {
    let gram = m.adjoint() * m;
    let mut worst = 0.0_f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

// Columns with a residual norm below this after projection are treated as dependent.
const DEPENDENT: f64 = 1e-8;

/// Orthonormalizes `seeds` in order (modified Gram-Schmidt, two passes), keeping
/// the first `dim` independent vectors. Returns them as the columns of a square
/// matrix, or `None` if the seeds span fewer than `dim` directions.
///
/// A seed that is already unit-norm and first in line is kept bit-for-bit.
pub fn gram_schmidt_columns<I>(dim: usize, seeds: I) -> Option<DMatrix<Complex64>>
where
    I: IntoIterator<Item = DVector<Complex64>>,
{
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(dim);
    for seed in seeds {
        if basis.len() == dim {
            break;
        }
        debug_assert_eq!(seed.len(), dim);
        let mut v = seed;
        if basis.is_empty() && (v.norm() - 1.0).abs() < 1e-15 {
            basis.push(v);
            continue;
        }
        for _pass in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm > DEPENDENT {
            basis.push(v.unscale(norm));
        }
    }
    if basis.len() < dim {
        return None;
    }
    Some(DMatrix::from_columns(&basis))
}

/// Canonical basis vector `e_i` of length `dim`.
pub fn basis_vector(dim: usize, i: usize) -> DVector<Complex64> {
    let mut v = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    v[i] = Complex64::new(1.0, 0.0);
    v
}

/// Vector with i.i.d. standard complex Gaussian entries.
pub fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<Complex64> {
    DVector::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Random unitary obtained by orthonormalizing Gaussian columns.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    loop {
        let cols = (0..dim)
            .map(|_| gaussian_vector(dim, rng))
            .collect::<Vec<_>>();
        if let Some(u) = gram_schmidt_columns(dim, cols) {
            return u;
        }
    }
}
