//! Numerical thresholds shared across the crate.
//!
//! Every comparison against a tolerance in library code goes through one of
//! these constants so that the test suites and the audit harness agree on
//! what "equal" means.

/// Trace preservation and complete positivity of Kraus channels.
pub const CHANNEL_TOL: f64 = 1e-9;

/// `‖Λ(I) − I‖_F` below this declares a channel unital.
pub const UNITAL_TOL: f64 = 1e-9;

/// Hermiticity check applied before any eigensolve.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// PSD check on density matrices (most negative admissible eigenvalue).
pub const PSD_TOL: f64 = 1e-9;

/// Trace normalisation of density matrices.
pub const TRACE_TOL: f64 = 1e-10;

/// Unit norm of pure-state vectors.
pub const NORM_TOL: f64 = 1e-12;

/// Jacobi sweeps stop once the off-diagonal Frobenius norm falls below this.
pub const JACOBI_OFF_TOL: f64 = 1e-13;

/// Eigenvalues closer than this are considered tied when ordering.
pub const EIGEN_TIE_TOL: f64 = 1e-12;

/// Eigenvalue gap below which eigenvectors are compared subspace-wise.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// `λ_max(J) ≤ ½ + EB_TOL` flags the entanglement-breaking regime.
pub const EB_TOL: f64 = 1e-12;

/// `|λ_schmidt − ½|` below this means maximally entangled.
pub const MES_TOL: f64 = 1e-7;

/// Alice-side marginal check for Choi states (`Tr_B = I/2`).
pub const MARGINAL_TOL: f64 = 1e-9;

/// Marginal precondition of the `λ_min(σ^Γ) + λ_max(σ) = ½` identity.
pub const PT_EXTREMES_MARGINAL_TOL: f64 = 1e-8;

/// A strict gap between `F(Λ)` and `F*(J)` must exceed this.
pub const STRICT_GAP: f64 = 1e-6;

/// Choi eigenvalues at or below this are dropped when extracting Kraus operators.
pub const KRAUS_RANK_CUTOFF: f64 = 1e-14;
