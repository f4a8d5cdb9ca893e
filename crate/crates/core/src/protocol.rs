//! Protocol simulation and post-selection onto the dual-rail qubit sector.

use std::fmt;

use crate::circuit::{build_layout, build_protocol_unitary, GCompletion, ProtocolParams};
use crate::error::{Error, Result};
use crate::fock::{AmplitudeKernel, FockConfiguration, StandardKernel};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

// Below this norm the reference amplitude is not used to fix the global phase.
const PHASE_REFERENCE_FLOOR: f64 = 1e-8;

/// Normalized state of the `N` output qubits after coincidence post-selection.
///
/// Amplitudes are indexed by basis string with qubit 1 as the most significant
/// bit; bit value 1 means "up" (particle in path `k`), 0 means "down"
/// (particle in path `k'`). The global phase is fixed so that the amplitude of
/// `|up, down, ..., down>` is real and non-negative whenever it is not
/// negligible, otherwise the largest amplitude is made real and positive.
///
/// If the coincidence probability is zero the amplitudes are all zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PostSelectedState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
    success_probability: f64,
}

impl PostSelectedState {
    /// Builds a state from unnormalized coincidence amplitudes.
    pub fn from_unnormalized(n_qubits: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1usize << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                got: amplitudes.len(),
            });
        }
        let success_probability: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if success_probability > 0.0 {
            let norm = success_probability.sqrt();
            for a in amplitudes.iter_mut() {
                *a /= norm;
            }
            let reference = 1usize << (n_qubits - 1);
            let pivot = if amplitudes[reference].norm() > PHASE_REFERENCE_FLOOR {
                reference
            } else {
                (0..amplitudes.len())
                    .max_by(|&i, &j| {
                        amplitudes[i]
                            .norm()
                            .total_cmp(&amplitudes[j].norm())
                            .then(j.cmp(&i))
                    })
                    .unwrap_or(0)
            };
            let phase = amplitudes[pivot] / amplitudes[pivot].norm();
            for a in amplitudes.iter_mut() {
                *a *= phase.conj();
            }
        }
        Ok(PostSelectedState {
            n_qubits,
            amplitudes,
            success_probability,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn success_probability(&self) -> f64 {
        self.success_probability
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude of a basis string such as `"100"`.
    pub fn amplitude(&self, bits: &str) -> Option<Complex64> {
        if bits.len() != self.n_qubits {
            return None;
        }
        usize::from_str_radix(bits, 2)
            .ok()
            .map(|i| self.amplitudes[i])
    }

    pub fn bitstring(&self, index: usize) -> String {
        format!("{index:0width$b}", width = self.n_qubits)
    }

    /// `(basis string, amplitude)` in index order.
    pub fn iter(&self) -> impl Iterator<Item = (String, Complex64)> + '_ {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| (self.bitstring(i), *a))
    }

    /// Index of the one-hot string with qubit `k` (1-based) up.
    pub fn one_hot_index(&self, k: usize) -> usize {
        1usize << (self.n_qubits - k)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

impl fmt::Display for PostSelectedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (bits, a) in self.iter().filter(|(_, a)| a.norm() > 1e-12) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)|{bits}>", a.re, a.im)?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// `W_N`: amplitude `1/sqrt(N)` on each one-hot string.
pub fn w_state(n: usize) -> Result<PostSelectedState> {
    if n < 2 {
        return Err(Error::TooFewQubits(n));
    }
    let mut amplitudes = vec![ZERO; 1 << n];
    let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    for k in 0..n {
        amplitudes[1 << k] = a;
    }
    Ok(PostSelectedState {
        n_qubits: n,
        amplitudes,
        success_probability: 1.0,
    })
}

/// `alpha = delta / sqrt(delta^2 + (N-1)^2 (1 - delta^2))`, the positive
/// choice equalizing all post-selected amplitudes.
pub fn balanced_alpha(n: usize, delta: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewQubits(n));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DegenerateParameter(format!(
            "balanced alpha needs 0 < delta < 1, got {delta}"
        )));
    }
    let d2 = delta * delta;
    let m = (n - 1) as f64;
    Ok(delta / (d2 + m * m * (1.0 - d2)).sqrt())
}

/// Coincidence configurations: one particle in `{k, k'}` for every qubit.
/// Entry `i` corresponds to basis string index `i`.
pub fn coincidence_configurations(n: usize) -> Result<Vec<FockConfiguration>> {
    let layout = build_layout(n)?;
    let pairs = (1..=n)
        .map(|k| layout.qubit_modes(k))
        .collect::<Result<Vec<_>>>()?;
    (0..1usize << n)
        .map(|index| {
            let modes: Vec<usize> = pairs
                .iter()
                .enumerate()
                .map(|(q, &(up, down))| {
                    if index >> (n - 1 - q) & 1 == 1 {
                        up
                    } else {
                        down
                    }
                })
                .collect();
            FockConfiguration::from_modes(layout.dim(), &modes)
        })
        .collect()
}

/// Simulates the protocol with the default Gram-Schmidt completion of `G`.
pub fn run_protocol(params: &ProtocolParams) -> Result<PostSelectedState> {
    run_protocol_with(
        &StandardKernel,
        params,
        &GCompletion::gram_schmidt(params.n_qubits)?,
    )
}

/// Simulates the protocol for a specific completion of `G`.
pub fn run_protocol_with_completion(
    params: &ProtocolParams,
    g: &GCompletion,
) -> Result<PostSelectedState> {
    run_protocol_with(&StandardKernel, params, g)
}

/// Full simulation: builds the circuit, evaluates the `2^N` coincidence
/// amplitudes of the input `a†_1 a†_2 ... a†_N |0>` and normalizes.
pub fn run_protocol_with<K: AmplitudeKernel + ?Sized>(
    kernel: &K,
    params: &ProtocolParams,
    g: &GCompletion,
) -> Result<PostSelectedState> {
    let n = params.n_qubits;
    let layout = build_layout(n)?;
    let u = build_protocol_unitary(params, g)?;
    let input = FockConfiguration::from_modes(layout.dim(), &layout.input_modes())?;
    let amplitudes = coincidence_configurations(n)?
        .iter()
        .map(|out| {
            kernel
                .amplitude(&u, &input, out, params.statistics)
                .map(|a| a.0)
        })
        .collect::<Result<Vec<_>>>()?;
    PostSelectedState::from_unnormalized(n, amplitudes)
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &PostSelectedState, b: &PostSelectedState) -> Result<f64> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::QubitMismatch(a.n_qubits, b.n_qubits));
    }
    let overlap: Complex64 = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(overlap.norm_sqr())
}
