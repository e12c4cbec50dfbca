//! No-signaling, equal-frequency marginal, and conservation checks.
//! Violations are reported as data; only malformed inputs are errors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{Outcome, Party};
use crate::quantum::{conditional_average, BellState};
use crate::settings::{ChshSettings, SettingLabel};

use super::CorrelationModel;

/// One marginal equality: `party`'s probability of `outcome` at its setting
/// `fixed`, compared across the other party's two settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalComparison {
    pub party: Party,
    pub fixed: String,
    pub outcome: Outcome,
    pub lhs: f64,
    pub rhs: f64,
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoSignalingReport {
    pub tolerance: f64,
    pub max_violation: f64,
    pub passed: bool,
    pub comparisons: Vec<MarginalComparison>,
}

pub fn no_signaling_check(
    model: &CorrelationModel,
    settings: &ChshSettings,
    tol: f64,
) -> Result<NoSignalingReport> {
    check_tolerance(tol)?;
    settings.validate()?;
    let mut comparisons = Vec::with_capacity(8);
    for (fixed, others) in [
        (settings.a, [settings.b, settings.b_prime]),
        (settings.a_prime, [settings.b, settings.b_prime]),
    ] {
        let lhs = model.distribution(&fixed, &others[0])?;
        let rhs = model.distribution(&fixed, &others[1])?;
        for o in Outcome::BOTH {
            comparisons.push(comparison(Party::Alice, &fixed, o, lhs.marginal(Party::Alice, o), rhs.marginal(Party::Alice, o)));
        }
    }
    for (fixed, others) in [
        (settings.b, [settings.a, settings.a_prime]),
        (settings.b_prime, [settings.a, settings.a_prime]),
    ] {
        let lhs = model.distribution(&others[0], &fixed)?;
        let rhs = model.distribution(&others[1], &fixed)?;
        for o in Outcome::BOTH {
            comparisons.push(comparison(Party::Bob, &fixed, o, lhs.marginal(Party::Bob, o), rhs.marginal(Party::Bob, o)));
        }
    }
    let max_violation = comparisons.iter().map(|c| c.violation).fold(0.0, f64::max);
    Ok(NoSignalingReport { tolerance: tol, max_violation, passed: max_violation <= tol, comparisons })
}

fn comparison(party: Party, fixed: &SettingLabel, outcome: Outcome, lhs: f64, rhs: f64) -> MarginalComparison {
    MarginalComparison { party, fixed: fixed.slot_name().to_string(), outcome, lhs, rhs, violation: (lhs - rhs).abs() }
}

fn check_tolerance(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NprfReport {
    pub tolerance: f64,
    pub max_deviation: f64,
    /// The single-party marginal farthest from 1/2.
    pub worst_marginal: f64,
    pub passed: bool,
}

/// Checks that each party sees `+1` and `−1` equally often at every
/// setting pair.
pub fn nprf_marginal_check(model: &CorrelationModel, settings: &ChshSettings, tol: f64) -> Result<NprfReport> {
    check_tolerance(tol)?;
    settings.validate()?;
    let mut worst_marginal = 0.5;
    for pair in settings.pairs() {
        let d = model.distribution(&pair.alice, &pair.bob)?;
        for party in [Party::Alice, Party::Bob] {
            for o in Outcome::BOTH {
                let m = d.marginal(party, o);
                if (m - 0.5).abs() > (worst_marginal - 0.5f64).abs() {
                    worst_marginal = m;
                }
            }
        }
    }
    let max_deviation = (worst_marginal - 0.5).abs();
    Ok(NprfReport { tolerance: tol, max_deviation, worst_marginal, passed: max_deviation <= tol })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    /// Per pair in CHSH order, the larger of the deviations for Alice's
    /// `+1` and `−1` partitions. `None` when neither partition occurs.
    pub per_pair: [Option<f64>; 4],
    pub max_deviation: f64,
    pub worst_pair: Option<usize>,
}

/// Compares the model's conditional averages (Bob's mean outcome given
/// each of Alice's outcomes) with the conservation targets of `state` at
/// the angles carried by `settings`.
pub fn conservation_deviation(
    model: &CorrelationModel,
    state: &BellState,
    settings: &ChshSettings,
) -> Result<ConservationReport> {
    settings.validate()?;
    let mut per_pair = [None; 4];
    for (slot, pair) in per_pair.iter_mut().zip(settings.pairs()) {
        let relative = pair.relative_angle().ok_or_else(|| Error::MissingAngle {
            label: pair.to_string(),
            model: "reference-state",
        })?;
        let d = model.distribution(&pair.alice, &pair.bob)?;
        *slot = Outcome::BOTH
            .iter()
            .filter_map(|&o| {
                let got = d.conditional_average(Party::Alice, o)?;
                Some((got - conditional_average(state, relative, o)).abs())
            })
            .reduce(f64::max);
    }
    let mut max_deviation = 0.0;
    let mut worst_pair = None;
    for (i, dev) in per_pair.iter().enumerate() {
        if let Some(dev) = *dev {
            if worst_pair.is_none() || dev > max_deviation {
                max_deviation = dev;
                worst_pair = Some(i);
            }
        }
    }
    Ok(ConservationReport { per_pair, max_deviation, worst_pair })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{DeterministicStrategy, GeneralizedPrModel, LhvModel, ReplacedCell, TabulatedModel};

    #[test]
    fn quantum_and_pr_do_not_signal() {
        let q = CorrelationModel::Quantum(BellState::singlet());
        let r = no_signaling_check(&q, &ChshSettings::from_angles(0.3, 1.9, -2.2, 0.01), 1e-12).unwrap();
        assert!(r.passed);
        assert_eq!(r.comparisons.len(), 8);
        let r = no_signaling_check(&CorrelationModel::Pr, &ChshSettings::discrete(), 1e-12).unwrap();
        assert!(r.max_violation < 1e-12);
    }

    #[test]
    fn hand_built_signaling_fixture_violates_by_one() {
        let m = CorrelationModel::Tabulated(TabulatedModel::signaling_fixture());
        let r = no_signaling_check(&m, &ChshSettings::discrete(), 1e-12).unwrap();
        assert!(!r.passed);
        assert_eq!(r.max_violation, 1.0);
    }

    #[test]
    fn nprf_examples() {
        let q = CorrelationModel::Quantum(BellState::photon_pair());
        assert!(nprf_marginal_check(&q, &ChshSettings::photon_optimal(), 1e-12).unwrap().passed);
        assert!(nprf_marginal_check(&CorrelationModel::Pr, &ChshSettings::discrete(), 1e-12).unwrap().passed);
        let biased = CorrelationModel::Lhv(LhvModel::deterministic(DeterministicStrategy::from_index(0)));
        let r = nprf_marginal_check(&biased, &ChshSettings::discrete(), 1e-12).unwrap();
        assert!(!r.passed);
        assert_eq!(r.worst_marginal, 1.0);
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(no_signaling_check(&CorrelationModel::Pr, &ChshSettings::discrete(), 0.0).is_err());
        assert!(nprf_marginal_check(&CorrelationModel::Pr, &ChshSettings::discrete(), -1.0).is_err());
    }

    #[test]
    fn conservation_examples() {
        let singlet = BellState::singlet();
        let q = CorrelationModel::Quantum(singlet);
        let r = conservation_deviation(&q, &singlet, &ChshSettings::singlet_optimal()).unwrap();
        assert!(r.max_deviation < 1e-12);

        let assignment = ChshSettings::pr_conservation_assignment(0.4);
        let r = conservation_deviation(&CorrelationModel::Pr, &singlet, &assignment).unwrap();
        assert!((r.max_deviation - 2.0).abs() < 1e-12);
        assert_eq!(r.worst_pair, Some(0));
        for dev in &r.per_pair[1..] {
            assert!(dev.unwrap() < 1e-12);
        }

        let gpr = GeneralizedPrModel::new(0.0, 0.5, ReplacedCell::First).unwrap();
        let r = conservation_deviation(&CorrelationModel::GeneralizedPr(gpr), &singlet, &assignment).unwrap();
        assert!(r.per_pair[0].unwrap() < 1e-12);
    }

    #[test]
    fn conservation_needs_angles() {
        let singlet = BellState::singlet();
        assert!(conservation_deviation(&CorrelationModel::Pr, &singlet, &ChshSettings::discrete()).is_err());
    }
}
