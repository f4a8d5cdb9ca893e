use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not unitary: max |M^dag M - I| = {residual:e}")]
    NotUnitary { residual: f64 },

    #[error("permanent of a {0}x{0} matrix exceeds the supported size (25)")]
    PermanentTooLarge(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("particle number mismatch: input has {input}, output has {output}")]
    ParticleNumberMismatch { input: usize, output: usize },

    #[error("fermionic configuration has {count} particles in mode {mode}")]
    FermionicOccupation { mode: usize, count: usize },

    #[error("mode index {index} out of range for {dim} modes")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("mode index {0} listed more than once")]
    DuplicateIndex(usize),

    #[error("protocol needs at least 2 qubits, got {0}")]
    TooFewQubits(usize),

    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("states have different qubit counts: {0} vs {1}")]
    QubitMismatch(usize, usize),

    #[error("oracle refused: {particles} particles in {dim} modes exceeds the cost guard (<= {max_particles} particles, <= {max_dim} modes)")]
    CostGuard {
        particles: usize,
        dim: usize,
        max_particles: usize,
        max_dim: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
