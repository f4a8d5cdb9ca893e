//! Brute-force reference evaluators.
//!
//! Nothing here shares code with the permanent/determinant kernels in
//! [`crate::fock`]: amplitudes are obtained by literally multiplying out
//! products of creation-operator superpositions, tracking bosonic
//! multiplicities and fermionic reordering signs term by term. Everything is
//! exponential and guarded by hard size limits.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{Amplitude, FockConfiguration, ModeUnitary, ParticleStatistics};

/// Largest particle number accepted by [`full_distribution`].
pub const MAX_PARTICLES: usize = 4;
/// Largest mode count accepted by [`full_distribution`].
pub const MAX_DIM: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A polynomial in creation operators acting on the vacuum.
///
/// Each key lists the modes of one monomial in ascending order (with
/// repetition for bosons). Fermionic monomials never repeat a mode.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPolynomial {
    stats: ParticleStatistics,
    terms: BTreeMap<Vec<usize>, Complex64>,
}

impl OperatorPolynomial {
    /// The vacuum, i.e. the constant polynomial 1.
    pub fn vacuum(stats: ParticleStatistics) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), Complex64::new(1.0, 0.0));
        OperatorPolynomial { stats, terms }
    }

    pub fn statistics(&self) -> ParticleStatistics {
        self.stats
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Complex64> {
        &self.terms
    }

    pub fn coefficient(&self, modes: &[usize]) -> Complex64 {
        self.terms.get(modes).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Right-multiplies by `sum_k c_k a†_k`.
    pub fn multiply_creator(&self, factor: &[(usize, Complex64)]) -> Self {
        let mut next: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
        for (monomial, &coef) in &self.terms {
            for &(mode, c) in factor {
                let pos = monomial.partition_point(|&m| m < mode);
                let sign = match self.stats {
                    ParticleStatistics::Boson => 1.0,
                    ParticleStatistics::Fermion => {
                        if monomial.get(pos) == Some(&mode) {
                            continue;
                        }
                        // Move the new creator left past every larger one.
                        if (monomial.len() - pos) % 2 == 0 {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                };
                let mut key = monomial.clone();
                key.insert(pos, mode);
                *next.entry(key).or_insert(ZERO) += coef * c * sign;
            }
        }
        next.retain(|_, c| *c != ZERO);
        OperatorPolynomial {
            stats: self.stats,
            terms: next,
        }
    }

    /// Coefficients of the normalized Fock basis states `|m_1, ..., m_dim>`.
    ///
    /// A bosonic monomial `prod (a†_k)^{m_k}` applied to the vacuum is
    /// `sqrt(prod m_k!)` times the normalized Fock state.
    pub fn to_fock(&self, dim: usize) -> Result<BTreeMap<FockConfiguration, Amplitude>> {
        let mut out = BTreeMap::new();
        for (monomial, &coef) in &self.terms {
            let config = FockConfiguration::from_modes(dim, monomial)?;
            let weight = match self.stats {
                ParticleStatistics::Boson => config
                    .occupations()
                    .iter()
                    .map(|&n| (1..=n).map(|k| k as f64).product::<f64>())
                    .product::<f64>()
                    .sqrt(),
                ParticleStatistics::Fermion => 1.0,
            };
            out.insert(config, Amplitude(coef * weight));
        }
        Ok(out)
    }
}

/// Multiplies out `factors[0] * factors[1] * ...`, each a single-creator
/// superposition given as `(mode, coefficient)` pairs.
pub fn expand_product(
    factors: &[Vec<(usize, Complex64)>],
    stats: ParticleStatistics,
) -> OperatorPolynomial {
    factors
        .iter()
        .fold(OperatorPolynomial::vacuum(stats), |poly, f| {
            poly.multiply_creator(f)
        })
}

/// Every reachable output amplitude of `u` acting on `input`, by explicit
/// operator expansion.
///
/// Refuses inputs with more than [`MAX_PARTICLES`] particles or more than
/// [`MAX_DIM`] modes.
pub fn full_distribution(
    u: &ModeUnitary,
    input: &FockConfiguration,
    stats: ParticleStatistics,
) -> Result<BTreeMap<FockConfiguration, Amplitude>> {
    let particles = input.particle_number();
    if particles > MAX_PARTICLES || u.dim() > MAX_DIM {
        return Err(Error::CostGuard {
            particles,
            dim: u.dim(),
            max_particles: MAX_PARTICLES,
            max_dim: MAX_DIM,
        });
    }
    if input.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: input.dim(),
        });
    }
    let mut input_norm = 1.0;
    for (mode, &n) in input.occupations().iter().enumerate() {
        if stats == ParticleStatistics::Fermion && n > 1 {
            return Err(Error::FermionicOccupation { mode, count: n });
        }
        input_norm *= (1..=n).map(|k| k as f64).product::<f64>();
    }
    let factors: Vec<_> = input
        .particle_modes()
        .into_iter()
        .map(|m| u.creator_image(m))
        .collect();
    let poly = expand_product(&factors, stats);
    let scale = 1.0 / input_norm.sqrt();
    let mut dist = poly.to_fock(u.dim())?;
    for amp in dist.values_mut() {
        amp.0 *= scale;
    }
    Ok(dist)
}

/// Whether `full_distribution` would accept this problem size.
pub fn within_cost_guard(particles: usize, dim: usize) -> bool {
    particles <= MAX_PARTICLES && dim <= MAX_DIM
}

fn permutation_sum(m: &DMatrix<Complex64>, signed: bool) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    fn walk(
        m: &DMatrix<Complex64>,
        row: usize,
        used: &mut [bool],
        parity: bool,
        signed: bool,
        acc: Complex64,
        total: &mut Complex64,
    ) {
        let n = used.len();
        if row == n {
            *total += if signed && parity { -acc } else { acc };
            return;
        }
        // Inversions added by picking column `col`: unused columns to its left.
        let mut smaller_unused = 0;
        for col in 0..n {
            if used[col] {
                continue;
            }
            used[col] = true;
            let p = parity ^ (smaller_unused % 2 == 1);
            walk(m, row + 1, used, p, signed, acc * m[(row, col)], total);
            used[col] = false;
            smaller_unused += 1;
        }
    }
    let mut total = ZERO;
    let mut used = vec![false; m.nrows()];
    walk(
        m,
        0,
        &mut used,
        false,
        signed,
        Complex64::new(1.0, 0.0),
        &mut total,
    );
    Ok(total)
}

/// Permanent as the plain sum over all `n!` permutations.
pub fn permanent_by_permutations(m: &DMatrix<Complex64>) -> Result<Complex64> {
    permutation_sum(m, false)
}

/// Determinant as the signed sum over all `n!` permutations.
pub fn determinant_by_permutations(m: &DMatrix<Complex64>) -> Result<Complex64> {
    permutation_sum(m, true)
}
