//! Default tolerances and thresholds shared by the checks and reports.
//!
//! Callers can override each of these (the CLI exposes them in its config);
//! reports always echo the value that was actually used.

/// Analytic identities evaluated in f64 (trig closed forms, 4x4 solves).
pub const ANALYTIC: f64 = 1e-12;

/// Distance from the analytic optimum accepted for the CHSH optimizer.
pub const OPTIMIZER: f64 = 1e-6;

/// Stop coordinate-descent refinement once a sweep improves by less than this.
pub const REFINE_CONVERGENCE: f64 = 1e-9;

/// Absolute tolerance for Monte Carlo estimates at 10^6 trials per pair.
pub const MONTE_CARLO_ABS: f64 = 5e-3;

/// z-score above which an empirical deviation is flagged.
pub const Z_THRESHOLD: f64 = 3.0;

/// Minimum deviation that counts as "not invariant" in the SU(2) table.
pub const SU2_NON_INVARIANT: f64 = 1e-3;
