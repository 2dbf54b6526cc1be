//! Numerical tolerances used across the crate.
//!
//! Every threshold lives here so that a change in one place moves the whole
//! crate consistently. Values are chosen for 8x8-and-smaller double precision
//! matrices, where roundoff sits around 1e-15 and these limits leave two to
//! five orders of magnitude of headroom.

/// Largest anti-Hermitian part (max absolute entry of (M - M^dag)/2) a
/// density matrix may carry before validation rejects it.
pub const HERM_TOL: f64 = 1e-10;

/// Largest allowed |tr(rho) - 1| for a density matrix.
pub const TRACE_TOL: f64 = 1e-9;

/// Eigenvalues in [-PSD_TOL, 0) are treated as roundoff and clipped to zero
/// before logarithms and square roots; anything more negative is an error.
pub const PSD_TOL: f64 = 1e-10;

/// Jacobi eigensolver stops once the off-diagonal Frobenius mass drops below
/// EIG_TOL times the Frobenius norm of the input.
pub const EIG_TOL: f64 = 1e-13;

/// Sweep cap for the cyclic Jacobi iteration. Small Hermitian matrices
/// converge in well under ten sweeps; hitting this cap signals a defect.
pub const JACOBI_MAX_SWEEPS: usize = 60;

/// Discord values in (-DISCORD_CLAMP, 0) are reported as exactly zero; more
/// negative values indicate a broken measurement optimization and error out.
pub const DISCORD_CLAMP: f64 = 1e-9;

/// Measurement branches with probability below this contribute nothing to a
/// conditional entropy (the branch state is numerically undefined).
pub const BRANCH_EPS: f64 = 1e-14;
