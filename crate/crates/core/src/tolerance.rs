//! Numerical tolerances shared by the library, the check suite and the tests.

/// Entrywise agreement of amplitudes, fidelities and probabilities.
pub const AMPLITUDE: f64 = 1e-10;

/// `max |M^dag M - I|` for constructed mode unitaries.
pub const UNITARITY: f64 = 1e-12;

/// Boson versus fermion success probabilities.
pub const STATISTICS: f64 = 1e-12;

/// Closed-form optimum versus numerical maximizer.
pub const OPTIMUM: f64 = 1e-9;
