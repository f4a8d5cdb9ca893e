//! Fock-space kernels: mode unitaries, occupation configurations and
//! multi-particle transition amplitudes for bosons (permanents) and fermions
//! (determinants).
//!
//! A mode unitary acts on creation operators column-wise,
//! `a†_j -> sum_k u[k][j] a†_k`, so a circuit built from stages `S1, S2, ...`
//! has total matrix `... * S2 * S1`.
//!
//! Fermionic basis states are always written with their creators in ascending
//! mode order, both for inputs and outputs. Under that convention the
//! amplitude is exactly the determinant of the selected submatrix.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::tolerance;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest matrix accepted by [`permanent`].
pub const MAX_PERMANENT_SIZE: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParticleStatistics {
    Boson,
    Fermion,
}

impl fmt::Display for ParticleStatistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParticleStatistics::Boson => f.write_str("boson"),
            ParticleStatistics::Fermion => f.write_str("fermion"),
        }
    }
}

/// A probability amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude(pub Complex64);

impl Amplitude {
    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn probability(self) -> f64 {
        self.0.norm_sqr()
    }
}

impl From<Complex64> for Amplitude {
    fn from(z: Complex64) -> Self {
        Amplitude(z)
    }
}

/// Square complex matrix describing a passive linear-optical element.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeUnitary {
    matrix: DMatrix<Complex64>,
}

impl ModeUnitary {
    /// Wraps a square matrix without checking unitarity.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NonSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        Ok(ModeUnitary { matrix })
    }

    /// Wraps a square matrix, rejecting it unless `max |M^dag M - I| <= 1e-12`.
    pub fn verified(matrix: DMatrix<Complex64>) -> Result<Self> {
        let u = Self::new(matrix)?;
        let residual = u.unitarity_residual();
        if residual > tolerance::UNITARITY {
            return Err(Error::NotUnitary { residual });
        }
        Ok(u)
    }

    /// Builds a matrix from row-major real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NonSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(rows[i][j], 0.0)
        }))
    }

    pub fn identity(dim: usize) -> Self {
        ModeUnitary {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    /// Single-mode phase `e^{i phase}` on `mode`, identity elsewhere.
    pub fn phase(dim: usize, mode: usize, phase: f64) -> Result<Self> {
        if mode >= dim {
            return Err(Error::IndexOutOfRange { index: mode, dim });
        }
        let mut u = Self::identity(dim);
        u.matrix[(mode, mode)] = Complex64::from_polar(1.0, phase);
        Ok(u)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        ModeUnitary {
            matrix: self.matrix.adjoint(),
        }
    }

    /// The stage `next` applied after `self`: returns `next * self`.
    pub fn then(&self, next: &ModeUnitary) -> Result<Self> {
        if next.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: next.dim(),
            });
        }
        Ok(ModeUnitary {
            matrix: &next.matrix * &self.matrix,
        })
    }

    /// Image of the single creator `a†_mode` as `(mode, coefficient)` pairs
    /// with non-zero coefficients.
    pub fn creator_image(&self, mode: usize) -> Vec<(usize, Complex64)> {
        self.matrix
            .column(mode)
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(k, c)| (k, *c))
            .collect()
    }

    pub fn unitarity_residual(&self) -> f64 {
        linalg::unitarity_residual(&self.matrix)
    }
}

impl Mul for &ModeUnitary {
    type Output = ModeUnitary;

    fn mul(self, rhs: &ModeUnitary) -> ModeUnitary {
        ModeUnitary {
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

/// Occupation numbers over an ordered list of modes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FockConfiguration {
    occupations: Vec<usize>,
}

impl FockConfiguration {
    pub fn new(occupations: Vec<usize>) -> Self {
        FockConfiguration { occupations }
    }

    /// One particle per listed mode; repeated modes stack.
    pub fn from_modes(dim: usize, modes: &[usize]) -> Result<Self> {
        let mut occupations = vec![0; dim];
        for &m in modes {
            if m >= dim {
                return Err(Error::IndexOutOfRange { index: m, dim });
            }
            occupations[m] += 1;
        }
        Ok(FockConfiguration { occupations })
    }

    pub fn occupations(&self) -> &[usize] {
        &self.occupations
    }

    pub fn dim(&self) -> usize {
        self.occupations.len()
    }

    pub fn particle_number(&self) -> usize {
        self.occupations.iter().sum()
    }

    /// Mode index of every particle, ascending, repeated per occupation.
    pub fn particle_modes(&self) -> Vec<usize> {
        self.occupations
            .iter()
            .enumerate()
            .flat_map(|(m, &n)| std::iter::repeat_n(m, n))
            .collect()
    }

    fn check_fermionic(&self) -> Result<()> {
        match self.occupations.iter().position(|&n| n > 1) {
            Some(mode) => Err(Error::FermionicOccupation {
                mode,
                count: self.occupations[mode],
            }),
            None => Ok(()),
        }
    }

    fn factorial_product(&self) -> f64 {
        self.occupations
            .iter()
            .map(|&n| (1..=n).map(|k| k as f64).product::<f64>())
            .product()
    }
}

impl fmt::Display for FockConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, n) in self.occupations.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str(">")
    }
}

fn check_square(m: &DMatrix<Complex64>) -> Result<usize> {
    if m.is_square() {
        Ok(m.nrows())
    } else {
        Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

/// Matrix permanent by Glynn's formula with Gray-code ordering, `O(2^(n-1) n)`.
pub fn permanent(m: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(ONE);
    }
    if n > MAX_PERMANENT_SIZE {
        return Err(Error::PermanentTooLarge(n));
    }
    // Column sums of delta_i * a_ij, all deltas starting at +1.
    let mut sums: Vec<Complex64> = (0..n).map(|j| m.column(j).sum()).collect();
    let mut negated = vec![false; n];
    let mut sign = 1.0;
    let mut total: Complex64 = sums.iter().product();
    for k in 1u64..(1u64 << (n - 1)) {
        let row = k.trailing_zeros() as usize + 1;
        let factor = if negated[row] { 2.0 } else { -2.0 };
        negated[row] = !negated[row];
        for (j, s) in sums.iter_mut().enumerate() {
            *s += m[(row, j)] * factor;
        }
        sign = -sign;
        total += sums.iter().product::<Complex64>() * sign;
    }
    Ok(total / (1u64 << (n - 1)) as f64)
}

/// Determinant by LU decomposition with partial pivoting.
pub fn determinant(m: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = check_square(m)?;
    let mut a = m.clone();
    let mut det = ONE;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm()))
            .unwrap_or(col);
        if a[(pivot, col)] == ZERO {
            return Ok(ZERO);
        }
        if pivot != col {
            a.swap_rows(pivot, col);
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for row in col + 1..n {
            let f = a[(row, col)] / p;
            if f == ZERO {
                continue;
            }
            for j in col + 1..n {
                let v = a[(col, j)];
                a[(row, j)] -= f * v;
            }
        }
    }
    Ok(det)
}

/// Evaluates single-configuration transition amplitudes.
///
/// [`StandardKernel`] is the production implementation; the trait exists so
/// that the check suite can be run against a deliberately broken kernel.
pub trait AmplitudeKernel: Sync {
    fn amplitude(
        &self,
        u: &ModeUnitary,
        input: &FockConfiguration,
        output: &FockConfiguration,
        stats: ParticleStatistics,
    ) -> Result<Amplitude>;
}

/// Permanent-based bosonic and determinant-based fermionic amplitudes.
#[derive(Debug, Clone, Copy, Default)]
pub struct StandardKernel;

impl AmplitudeKernel for StandardKernel {
    fn amplitude(
        &self,
        u: &ModeUnitary,
        input: &FockConfiguration,
        output: &FockConfiguration,
        stats: ParticleStatistics,
    ) -> Result<Amplitude> {
        transition_amplitude(u, input, output, stats)
    }
}

/// Checks dimensions and particle numbers, returns the `(rows, cols)` mode lists
/// selecting the transition submatrix.
pub(crate) fn transition_modes(
    u: &ModeUnitary,
    input: &FockConfiguration,
    output: &FockConfiguration,
    stats: ParticleStatistics,
) -> Result<(Vec<usize>, Vec<usize>)> {
    for c in [input, output] {
        if c.dim() != u.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                got: c.dim(),
            });
        }
    }
    let (n_in, n_out) = (input.particle_number(), output.particle_number());
    if n_in != n_out {
        return Err(Error::ParticleNumberMismatch {
            input: n_in,
            output: n_out,
        });
    }
    if stats == ParticleStatistics::Fermion {
        input.check_fermionic()?;
        output.check_fermionic()?;
    }
    Ok((output.particle_modes(), input.particle_modes()))
}

/// `<output| U |input>` for the given particle statistics.
///
/// Bosons: `perm(U_sub) / sqrt(prod n_i! prod m_j!)`, with input modes
/// repeated as columns and output modes repeated as rows. Fermions:
/// `det(U_sub)` with rows and columns in ascending mode order.
pub fn transition_amplitude(
    u: &ModeUnitary,
    input: &FockConfiguration,
    output: &FockConfiguration,
    stats: ParticleStatistics,
) -> Result<Amplitude> {
    let (rows, cols) = transition_modes(u, input, output, stats)?;
    let n = rows.len();
    let sub = DMatrix::from_fn(n, n, |r, c| u.entry(rows[r], cols[c]));
    let value = match stats {
        ParticleStatistics::Boson => {
            let norm = (input.factorial_product() * output.factorial_product()).sqrt();
            permanent(&sub)? / norm
        }
        ParticleStatistics::Fermion => determinant(&sub)?,
    };
    Ok(Amplitude(value))
}

/// Every configuration of `particles` particles over `dim` modes allowed by
/// the statistics, in lexicographic order of occupations.
pub fn enumerate_configurations(
    dim: usize,
    particles: usize,
    stats: ParticleStatistics,
) -> Vec<FockConfiguration> {
    fn fill(
        mode: usize,
        left: usize,
        cap: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<FockConfiguration>,
    ) {
        let dim = current.len();
        if mode == dim {
            if left == 0 {
                out.push(FockConfiguration::new(current.clone()));
            }
            return;
        }
        for n in (0..=left.min(cap)).rev() {
            current[mode] = n;
            fill(mode + 1, left - n, cap, current, out);
        }
        current[mode] = 0;
    }
    let cap = match stats {
        ParticleStatistics::Boson => particles,
        ParticleStatistics::Fermion => 1,
    };
    let mut out = Vec::new();
    if dim == 0 {
        if particles == 0 {
            out.push(FockConfiguration::new(Vec::new()));
        }
        return out;
    }
    fill(0, particles, cap, &mut vec![0; dim], &mut out);
    out.sort();
    out
}

/// Amplitudes of every output configuration admitted by `filter`.
///
/// Zero amplitudes are included, so the key set is exactly the filtered set.
pub fn output_distribution<F>(
    u: &ModeUnitary,
    input: &FockConfiguration,
    stats: ParticleStatistics,
    filter: F,
) -> Result<BTreeMap<FockConfiguration, Amplitude>>
where
    F: Fn(&FockConfiguration) -> bool,
{
    output_distribution_with(&StandardKernel, u, input, stats, filter)
}

/// [`output_distribution`] with an explicit amplitude kernel.
pub fn output_distribution_with<K, F>(
    kernel: &K,
    u: &ModeUnitary,
    input: &FockConfiguration,
    stats: ParticleStatistics,
    filter: F,
) -> Result<BTreeMap<FockConfiguration, Amplitude>>
where
    K: AmplitudeKernel + ?Sized,
    F: Fn(&FockConfiguration) -> bool,
{
    if input.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: input.dim(),
        });
    }
    if stats == ParticleStatistics::Fermion {
        input.check_fermionic()?;
    }
    let mut out = BTreeMap::new();
    for config in enumerate_configurations(u.dim(), input.particle_number(), stats) {
        if filter(&config) {
            let amp = kernel.amplitude(u, input, &config, stats)?;
            out.insert(config, amp);
        }
    }
    Ok(out)
}
