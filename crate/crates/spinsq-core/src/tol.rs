//! Central tolerance constants.
//!
//! All quantities handled by the crate are O(N^2) for at most 12 qubits, so
//! absolute tolerances are used throughout.

/// Maximum allowed Hermitian asymmetry `max|a_ij - conj(a_ji)|` of inputs.
pub const HERMITICITY: f64 = 1e-10;

/// Trace of a density operator must equal one within this bound.
pub const UNIT_TRACE: f64 = 1e-10;

/// Smallest admissible eigenvalue of a density operator.
pub const PSD: f64 = 1e-9;

/// Violation threshold for entanglement criteria: a margin below `-CRITERION`
/// counts as a violation.
pub const CRITERION: f64 = 1e-9;

/// Orthogonality defect allowed in rotation matrices, `max|O O^T - I|`.
pub const ORTHOGONALITY: f64 = 1e-9;

/// Relative reconstruction error bound for Hermitian eigendecompositions.
pub const EIG_RECONSTRUCTION: f64 = 1e-9;

/// Default width of the final bracket in critical-temperature bisection.
pub const TC_BISECTION: f64 = 1e-3;

/// Transverse mean-spin squared below which the original squeezing criterion
/// is reported as not applicable instead of dividing by it.
pub const SQUEEZING_DENOMINATOR: f64 = 1e-12;
