//! Mode layout and staged construction of the `(3N-2)`-mode protocol unitary.
//!
//! Path labels: subsystem `A_1` owns `1`, `1'` and the auxiliary wires
//! `2'' .. (N-1)''`; subsystem `A_k` (k >= 2) owns `k` and `k'`. Qubit `B_k`
//! is the pair `{k, k'}`. The first input port of `G` is wire `1'`, which also
//! plays the role of `1''`, so the transform `G` acts on the ordered wires
//! `[1', 2'', ..., (N-1)'']`.
//!
//! Canonical indices:
//!
//! ```text
//! 1 -> 0    1' -> 1    k'' -> k          (k = 2..N-1)
//! k -> N + 2k - 4      k'  -> N + 2k - 3  (k = 2..N)
//! ```
//!
//! Qubit modes therefore appear in qubit order when sorted by index.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{ModeUnitary, ParticleStatistics};
use crate::linalg;
use crate::tolerance;

/// Symbolic path label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeLabel {
    /// Path `k`, the "up" rail of qubit `k`.
    Path(usize),
    /// Path `k'`, the "down" rail of qubit `k`.
    Bar(usize),
    /// Auxiliary path `k''` of subsystem `A_1`. `DoubleBar(1)` names the same
    /// wire as `Bar(1)`.
    DoubleBar(usize),
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeLabel::Path(k) => write!(f, "{k}"),
            ModeLabel::Bar(k) => write!(f, "{k}'"),
            ModeLabel::DoubleBar(k) => write!(f, "{k}''"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeLayout {
    n_qubits: usize,
}

impl ModeLayout {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of optical paths, `3N - 2`.
    pub fn dim(&self) -> usize {
        3 * self.n_qubits - 2
    }

    pub fn index(&self, label: ModeLabel) -> Result<usize> {
        let n = self.n_qubits;
        let bad = || Error::ParameterOutOfRange(format!("no path {label} for N = {n}"));
        match label {
            ModeLabel::Path(1) => Ok(0),
            ModeLabel::Bar(1) | ModeLabel::DoubleBar(1) => Ok(1),
            ModeLabel::DoubleBar(k) if (2..n).contains(&k) => Ok(k),
            ModeLabel::Path(k) if (2..=n).contains(&k) => Ok(n + 2 * k - 4),
            ModeLabel::Bar(k) if (2..=n).contains(&k) => Ok(n + 2 * k - 3),
            _ => Err(bad()),
        }
    }

    /// Inverse of [`index`](Self::index); wire 1 is reported as `Bar(1)`.
    pub fn label(&self, index: usize) -> Result<ModeLabel> {
        let n = self.n_qubits;
        match index {
            0 => Ok(ModeLabel::Path(1)),
            1 => Ok(ModeLabel::Bar(1)),
            i if i < n => Ok(ModeLabel::DoubleBar(i)),
            i if i < self.dim() => {
                let k = (i - n) / 2 + 2;
                if (i - n).is_multiple_of(2) {
                    Ok(ModeLabel::Path(k))
                } else {
                    Ok(ModeLabel::Bar(k))
                }
            }
            _ => Err(Error::IndexOutOfRange {
                index,
                dim: self.dim(),
            }),
        }
    }

    /// `(up, down)` = indices of `(k, k')` for qubit `k` in `1..=N`.
    pub fn qubit_modes(&self, k: usize) -> Result<(usize, usize)> {
        Ok((
            self.index(ModeLabel::Path(k))?,
            self.index(ModeLabel::Bar(k))?,
        ))
    }

    /// Ordered wires of the `G` transform: `[1', 2'', ..., (N-1)'']`.
    pub fn g_wires(&self) -> Vec<usize> {
        (1..self.n_qubits).collect()
    }

    /// Input modes `1, 2, ..., N`, one particle each.
    pub fn input_modes(&self) -> Vec<usize> {
        (1..=self.n_qubits)
            .map(|k| self.index(ModeLabel::Path(k)).expect("k in range"))
            .collect()
    }
}

/// Canonical layout for `n` qubits.
pub fn build_layout(n: usize) -> Result<ModeLayout> {
    if n < 2 {
        return Err(Error::TooFewQubits(n));
    }
    Ok(ModeLayout { n_qubits: n })
}

/// Real beam-splitter parameters and particle type of one protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub n_qubits: usize,
    pub delta: f64,
    pub alpha: f64,
    pub statistics: ParticleStatistics,
    /// Applies `e^{i pi}` on output path 1. Only has an effect for fermions.
    pub fermion_phase_correction: bool,
}

impl ProtocolParams {
    /// Parameters with the balanced `alpha(N, delta)` that makes all
    /// post-selected amplitudes equal. Phase correction is on for fermions.
    pub fn balanced(n_qubits: usize, delta: f64, statistics: ParticleStatistics) -> Result<Self> {
        let alpha = crate::protocol::balanced_alpha(n_qubits, delta)?;
        Self::with_alpha(n_qubits, delta, alpha, statistics)
    }

    /// Parameters with an explicit `alpha`.
    pub fn with_alpha(
        n_qubits: usize,
        delta: f64,
        alpha: f64,
        statistics: ParticleStatistics,
    ) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::TooFewQubits(n_qubits));
        }
        for (name, v) in [("delta", delta), ("alpha", alpha)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::ParameterOutOfRange(format!(
                    "{name} = {v} is outside [0, 1]"
                )));
            }
        }
        Ok(ProtocolParams {
            n_qubits,
            delta,
            alpha,
            statistics,
            fermion_phase_correction: statistics == ParticleStatistics::Fermion,
        })
    }

    pub fn with_phase_correction(mut self, on: bool) -> Self {
        self.fermion_phase_correction = on;
        self
    }

    pub fn beta(&self) -> f64 {
        (1.0 - self.alpha * self.alpha).max(0.0).sqrt()
    }

    pub fn epsilon(&self) -> f64 {
        (1.0 - self.delta * self.delta).max(0.0).sqrt()
    }

    fn applies_phase_correction(&self) -> bool {
        self.fermion_phase_correction && self.statistics == ParticleStatistics::Fermion
    }
}

/// The `(N-1) x (N-1)` unitary `G` whose first column is uniform.
///
/// Only the first column matters for the post-selected state; the remaining
/// columns are any unitary completion.
#[derive(Debug, Clone, PartialEq)]
pub struct GCompletion {
    matrix: DMatrix<Complex64>,
}

impl GCompletion {
    fn uniform_column(m: usize) -> DVector<Complex64> {
        DVector::from_element(m, Complex64::new(1.0 / (m as f64).sqrt(), 0.0))
    }

    /// Completion by Gram-Schmidt against the standard basis.
    pub fn gram_schmidt(n_qubits: usize) -> Result<Self> {
        let m = Self::size(n_qubits)?;
        let seeds = std::iter::once(Self::uniform_column(m))
            .chain((0..m).map(|i| linalg::basis_vector(m, i)));
        let matrix = linalg::gram_schmidt_columns(m, seeds).expect("standard basis spans");
        Self::from_matrix(n_qubits, matrix)
    }

    /// Completion from seeded Gaussian random vectors.
    pub fn randomized(n_qubits: usize, seed: u64) -> Result<Self> {
        let m = Self::size(n_qubits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let seeds = std::iter::once(Self::uniform_column(m)).chain(
                (1..m)
                    .map(|_| linalg::gaussian_vector(m, &mut rng))
                    .collect::<Vec<_>>(),
            );
            if let Some(matrix) = linalg::gram_schmidt_columns(m, seeds) {
                return Self::from_matrix(n_qubits, matrix);
            }
        }
    }

    /// Validates a caller-supplied completion.
    pub fn from_matrix(n_qubits: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let m = Self::size(n_qubits)?;
        if matrix.nrows() != m || matrix.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        let target = 1.0 / (m as f64).sqrt();
        if matrix
            .column(0)
            .iter()
            .any(|z| (z - Complex64::new(target, 0.0)).norm() > 1e-15)
        {
            return Err(Error::ParameterOutOfRange(
                "first column of G must be uniform 1/sqrt(N-1)".into(),
            ));
        }
        let residual = linalg::unitarity_residual(&matrix);
        if residual > tolerance::UNITARITY {
            return Err(Error::NotUnitary { residual });
        }
        Ok(GCompletion { matrix })
    }

    fn size(n_qubits: usize) -> Result<usize> {
        if n_qubits < 2 {
            return Err(Error::TooFewQubits(n_qubits));
        }
        Ok(n_qubits - 1)
    }

    pub fn n_qubits(&self) -> usize {
        self.matrix.nrows() + 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
}

/// Places `u` on `targets` (in order) inside a `dim`-mode identity.
pub fn embed_local(u: &ModeUnitary, targets: &[usize], dim: usize) -> Result<ModeUnitary> {
    if targets.len() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: targets.len(),
        });
    }
    let mut seen = vec![false; dim];
    for &t in targets {
        if t >= dim {
            return Err(Error::IndexOutOfRange { index: t, dim });
        }
        if std::mem::replace(&mut seen[t], true) {
            return Err(Error::DuplicateIndex(t));
        }
    }
    let mut m = DMatrix::identity(dim, dim);
    for (r, &tr) in targets.iter().enumerate() {
        for (c, &tc) in targets.iter().enumerate() {
            m[(tr, tc)] = u.entry(r, c);
        }
    }
    ModeUnitary::new(m)
}

fn real_2x2(a: f64, b: f64) -> ModeUnitary {
    ModeUnitary::from_real_rows(&[&[a, b], &[b, -a]]).expect("2x2")
}

/// `[[alpha, beta], [beta, -alpha]]` on `{1, 1'}`.
pub fn local_u(params: &ProtocolParams) -> ModeUnitary {
    real_2x2(params.alpha, params.beta())
}

/// `[[delta, eps], [eps, -delta]]` on each `{k, k'}`.
pub fn local_v(params: &ProtocolParams) -> ModeUnitary {
    real_2x2(params.delta, params.epsilon())
}

/// Destination of every path under the routing permutation.
fn sigma_destination(layout: &ModeLayout, label: ModeLabel) -> ModeLabel {
    let n = layout.n_qubits();
    match label {
        ModeLabel::Path(1) => ModeLabel::Path(1),
        ModeLabel::Bar(1) | ModeLabel::DoubleBar(1) => ModeLabel::Path(2),
        ModeLabel::DoubleBar(k) => ModeLabel::Path(k + 1),
        ModeLabel::Path(2) => ModeLabel::Bar(1),
        ModeLabel::Path(k) => {
            debug_assert!(k <= n);
            ModeLabel::DoubleBar(k - 1)
        }
        ModeLabel::Bar(k) => ModeLabel::Bar(k),
    }
}

/// Permutation matrix with `a†_j -> a†_sigma(j)`.
pub fn build_sigma(layout: &ModeLayout) -> ModeUnitary {
    let dim = layout.dim();
    let mut m = DMatrix::zeros(dim, dim);
    for src in 0..dim {
        let label = layout.label(src).expect("in range");
        let dst = layout
            .index(sigma_destination(layout, label))
            .expect("sigma maps onto the layout");
        m[(dst, src)] = Complex64::new(1.0, 0.0);
    }
    ModeUnitary::new(m).expect("square")
}

/// The individual stages of the protocol circuit, each already embedded in
/// the full mode space.
#[derive(Debug, Clone)]
pub struct ProtocolStages {
    pub layout: ModeLayout,
    /// `U` on `{1, 1'}` and `V` on every `{k, k'}`.
    pub local: ModeUnitary,
    /// `G` on `[1', 2'', ..., (N-1)'']`.
    pub g: ModeUnitary,
    pub sigma: ModeUnitary,
    /// `G^-1` on the same wires as `G`.
    pub g_inverse: ModeUnitary,
    /// Present for fermions with phase correction enabled.
    pub phase: Option<ModeUnitary>,
}

impl ProtocolStages {
    pub fn new(params: &ProtocolParams, g: &GCompletion) -> Result<Self> {
        let layout = build_layout(params.n_qubits)?;
        if g.n_qubits() != params.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: params.n_qubits - 1,
                got: g.matrix().nrows(),
            });
        }
        let dim = layout.dim();
        let mut local = embed_local(&local_u(params), &[0, 1], dim)?;
        let v = local_v(params);
        for k in 2..=params.n_qubits {
            let (up, down) = layout.qubit_modes(k)?;
            local = local.then(&embed_local(&v, &[up, down], dim)?)?;
        }
        let g_small = ModeUnitary::new(g.matrix().clone())?;
        let wires = layout.g_wires();
        let g_full = embed_local(&g_small, &wires, dim)?;
        let g_inverse = embed_local(&g_small.adjoint(), &wires, dim)?;
        let phase = if params.applies_phase_correction() {
            Some(ModeUnitary::phase(dim, 0, std::f64::consts::PI)?)
        } else {
            None
        };
        Ok(ProtocolStages {
            layout,
            local,
            g: g_full,
            sigma: build_sigma(&layout),
            g_inverse,
            phase,
        })
    }

    /// `[phase] * G^-1 * sigma * G * local`.
    pub fn compose(&self) -> Result<ModeUnitary> {
        let mut total = self
            .local
            .then(&self.g)?
            .then(&self.sigma)?
            .then(&self.g_inverse)?;
        if let Some(p) = &self.phase {
            total = total.then(p)?;
        }
        Ok(total)
    }
}

/// Full protocol matrix for `params` and the completion `g`.
pub fn build_protocol_unitary(params: &ProtocolParams, g: &GCompletion) -> Result<ModeUnitary> {
    ProtocolStages::new(params, g)?.compose()
}

/// JSON dump of a mode unitary: `entries` is row-major, each entry `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryDump {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl From<&ModeUnitary> for UnitaryDump {
    fn from(u: &ModeUnitary) -> Self {
        let dim = u.dim();
        UnitaryDump {
            dim,
            entries: (0..dim)
                .map(|r| {
                    (0..dim)
                        .map(|c| {
                            let z = u.entry(r, c);
                            [z.re, z.im]
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

impl UnitaryDump {
    pub fn to_unitary(&self) -> Result<ModeUnitary> {
        if self.entries.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: self.entries.len(),
            });
        }
        if let Some(row) = self.entries.iter().find(|r| r.len() != self.dim) {
            return Err(Error::NonSquare {
                rows: self.dim,
                cols: row.len(),
            });
        }
        ModeUnitary::new(DMatrix::from_fn(self.dim, self.dim, |r, c| {
            let [re, im] = self.entries[r][c];
            Complex64::new(re, im)
        }))
    }
}

pub fn write_unitary_json(u: &ModeUnitary, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &UnitaryDump::from(u))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_unitary_json(path: &Path) -> Result<ModeUnitary> {
    let dump: UnitaryDump = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    dump.to_unitary()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ParticleStatistics::Boson;

    fn params(n: usize, delta: f64) -> ProtocolParams {
        ProtocolParams::balanced(n, delta, Boson).unwrap()
    }

    #[test]
    fn layout_sizes() {
        assert!(matches!(build_layout(1), Err(Error::TooFewQubits(1))));
        for (n, dim) in [(2, 4), (3, 7), (5, 13)] {
            let layout = build_layout(n).unwrap();
            assert_eq!(layout.dim(), dim);
        }
        let two = build_layout(2).unwrap();
        assert!(two.index(ModeLabel::DoubleBar(2)).is_err());
        assert_eq!(two.qubit_modes(2).unwrap(), (2, 3));
    }

    #[test]
    fn layout_is_bijective() {
        for n in 2..=9 {
            let layout = build_layout(n).unwrap();
            let mut hit = vec![false; layout.dim()];
            let mut labels = vec![ModeLabel::Path(1), ModeLabel::Bar(1)];
            labels.extend((2..n).map(ModeLabel::DoubleBar));
            for k in 2..=n {
                labels.push(ModeLabel::Path(k));
                labels.push(ModeLabel::Bar(k));
            }
            assert_eq!(labels.len(), layout.dim());
            for l in labels {
                let i = layout.index(l).unwrap();
                assert!(!std::mem::replace(&mut hit[i], true));
                assert_eq!(layout.label(i).unwrap(), l);
            }
            // qubit modes are in qubit order
            let pairs: Vec<_> = (1..=n).map(|k| layout.qubit_modes(k).unwrap()).collect();
            assert!(pairs.windows(2).all(|w| w[0].1 < w[1].0));
        }
    }

    #[test]
    fn embed_identity_and_errors() {
        let id = ModeUnitary::identity(2);
        assert_eq!(
            embed_local(&id, &[3, 1], 5).unwrap(),
            ModeUnitary::identity(5)
        );
        assert!(matches!(
            embed_local(&id, &[1, 1], 5),
            Err(Error::DuplicateIndex(1))
        ));
        assert!(matches!(
            embed_local(&id, &[1, 5], 5),
            Err(Error::IndexOutOfRange { index: 5, dim: 5 })
        ));
        assert!(embed_local(&id, &[1], 5).is_err());
    }

    #[test]
    fn embed_u_acts_on_first_pair() {
        let p = params(2, std::f64::consts::FRAC_1_SQRT_2);
        let u = embed_local(&local_u(&p), &[0, 1], 4).unwrap();
        let image = u.creator_image(0);
        assert_eq!(image.len(), 2);
        assert_eq!(image[0], (0, Complex64::new(p.alpha, 0.0)));
        assert_eq!(image[1], (1, Complex64::new(p.beta(), 0.0)));
    }

    #[test]
    fn embed_preserves_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = ModeUnitary::new(linalg::random_unitary(3, &mut rng)).unwrap();
        let e = embed_local(&u, &[4, 0, 2], 6).unwrap();
        assert!(e.unitarity_residual() < 1e-13);
    }

    #[test]
    fn sigma_for_two_qubits() {
        let layout = build_layout(2).unwrap();
        let s = build_sigma(&layout);
        // 1' <-> 2, 1 and 2' fixed
        let expect = [0usize, 2, 1, 3];
        for (src, &dst) in expect.iter().enumerate() {
            assert_eq!(s.entry(dst, src), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn sigma_is_permutation_and_involution() {
        for n in 2..=8 {
            let s = build_sigma(&build_layout(n).unwrap());
            let m = s.matrix();
            for i in 0..m.nrows() {
                let row_ones = m.row(i).iter().filter(|z| z.re == 1.0).count();
                let col_ones = m.column(i).iter().filter(|z| z.re == 1.0).count();
                let nonzero = m.row(i).iter().filter(|z| z.norm() != 0.0).count();
                assert_eq!((row_ones, col_ones, nonzero), (1, 1, 1));
            }
        }
        // k'' <-> k+1 for k = 1..N-1, everything else fixed: sigma is its own inverse
        for n in 2..=8 {
            let s = build_sigma(&build_layout(n).unwrap());
            assert_eq!(&s * &s, ModeUnitary::identity(3 * n - 2));
        }
    }

    #[test]
    fn g_completions() {
        for n in 2..=9 {
            for g in [
                GCompletion::gram_schmidt(n).unwrap(),
                GCompletion::randomized(n, 99).unwrap(),
            ] {
                let m = g.matrix();
                assert!(linalg::unitarity_residual(m) < 1e-12);
                let target = 1.0 / ((n - 1) as f64).sqrt();
                assert!(m
                    .column(0)
                    .iter()
                    .all(|z| (z.re - target).abs() <= 1e-15 && z.im == 0.0));
            }
        }
        let two = GCompletion::gram_schmidt(2).unwrap();
        assert_eq!(two.matrix()[(0, 0)], Complex64::new(1.0, 0.0));
        assert!(GCompletion::from_matrix(3, DMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn g_spreads_one_bar_uniformly() {
        for n in 3..=7 {
            let p = params(n, 0.5);
            let stages = ProtocolStages::new(&p, &GCompletion::gram_schmidt(n).unwrap()).unwrap();
            let image = stages.g.creator_image(1);
            let amp = 1.0 / ((n - 1) as f64).sqrt();
            assert_eq!(image.len(), n - 1);
            for (k, (mode, c)) in image.into_iter().enumerate() {
                assert_eq!(mode, k + 1);
                assert!((c - Complex64::new(amp, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn v_acts_on_qubit_pairs() {
        let p = params(4, 0.3);
        let layout = build_layout(4).unwrap();
        let stages = ProtocolStages::new(&p, &GCompletion::gram_schmidt(4).unwrap()).unwrap();
        for k in 2..=4 {
            let (up, down) = layout.qubit_modes(k).unwrap();
            let image = stages.local.creator_image(up);
            assert_eq!(
                image,
                vec![
                    (up, Complex64::new(p.delta, 0.0)),
                    (down, Complex64::new(p.epsilon(), 0.0))
                ]
            );
        }
    }

    #[test]
    fn protocol_unitary_is_unitary() {
        for n in 2..=12 {
            for (delta, seed) in [(0.3, 1u64), (0.8, 2)] {
                let p = params(n, delta);
                for g in [
                    GCompletion::gram_schmidt(n).unwrap(),
                    GCompletion::randomized(n, seed).unwrap(),
                ] {
                    let m = build_protocol_unitary(&p, &g).unwrap();
                    assert_eq!(m.dim(), 3 * n - 2);
                    assert!(m.unitarity_residual() < tolerance::UNITARITY, "n={n}");
                }
            }
        }
    }

    #[test]
    fn mismatched_completion() {
        let p = params(4, 0.5);
        let g = GCompletion::gram_schmidt(3).unwrap();
        assert!(matches!(
            build_protocol_unitary(&p, &g),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn json_dump_round_trip() {
        let p = params(3, 0.6);
        let m = build_protocol_unitary(&p, &GCompletion::randomized(3, 5).unwrap()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        write_unitary_json(&m, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["dim"], 7);
        assert_eq!(v["entries"][0].as_array().unwrap().len(), 7);
        assert_eq!(v["entries"][0][0].as_array().unwrap().len(), 2);
        assert_eq!(read_unitary_json(&path).unwrap(), m);
    }
}
