//! Two-party correlation models and the bounds they obey.
//!
//! The crate covers three families of behavior for a pair of binary
//! measurements with two settings per party:
//!
//! * local hidden-variable mixtures of deterministic strategies (CHSH ≤ 2),
//! * the four Bell basis states (CHSH ≤ 2√2),
//! * the PR box and its one-cell generalization (CHSH up to 4).
//!
//! [`quantum`] holds the closed-form Bell-state statistics and the linear
//! conservation solver that rebuilds them, [`models`] puts every family
//! behind [`CorrelationModel`], [`chsh`] evaluates and optimizes the CHSH
//! quantity, and [`ensemble`] samples reproducible Monte Carlo trial
//! ensembles and analyzes them.

pub mod chsh;
pub mod ensemble;
pub mod error;
pub mod models;
pub mod primitives;
pub mod quantum;
pub mod settings;
pub mod tolerances;

pub use chsh::{
    bound_ordering_report, chsh_value, classical_bound_bruteforce, optimize_chsh, BoundOrdering,
    ChshReport, ClassicalBound, OptimizeMode,
};
pub use ensemble::{
    chsh_estimate, conservation_violation_scan, count_conservation_violations, estimate_correlation,
    partition_analysis, plus_frequency, scan_ensemble, simulate_ensemble, ChshEstimate, CorrelationEstimate,
    Ensemble, EnsembleEnvelope, EnsembleRow, PartitionReport, ScanEntry, ScanReport, TrialRecord,
};
pub use error::{Error, Result};
pub use models::{
    conservation_deviation, generalized_pr_chsh, model_distribution, no_signaling_check,
    nprf_marginal_check, CorrelationModel, DeterministicStrategy, GeneralizedPrModel, LhvModel,
    ReplacedCell, TabulatedModel,
};
pub use primitives::{Angle, Outcome, Party};
pub use quantum::{
    bell_state_vector, conditional_average, correlation, joint_distribution, singlet_amplitudes,
    solve_conservation_state, su2_invariance_deviation, AmplitudeSet, Axis, BellLabel, BellState,
    JointDistribution, Parity, Realization, StateVector,
};
pub use settings::{ChshSettings, SettingLabel, SettingPair, Slot};
