//! Exact analytic machinery for the four Bell basis states.
//!
//! Outcome probabilities depend only on the Hilbert-space angle between the
//! two measurement bases. A [`Realization`] maps the real-space setting
//! difference `α − β` onto that angle: spin-½ measurements use half the
//! difference, polarization measurements use it unchanged.

mod conservation;
mod state_vector;

use std::f64::consts::SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{Angle, Outcome, Party};

pub use conservation::{conservation_system, solve_conservation_state, ConservationSystem};
pub use state_vector::{bell_state_vector, su2_invariance_deviation, Axis, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellLabel {
    PsiMinus,
    PsiPlus,
    PhiPlus,
    PhiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PsiMinus,
        BellLabel::PsiPlus,
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
    ];

    /// Unlike states give opposite outcomes for equal settings; like states
    /// give equal outcomes.
    pub fn parity(self) -> Parity {
        match self {
            BellLabel::PsiMinus => Parity::Unlike,
            BellLabel::PsiPlus | BellLabel::PhiPlus | BellLabel::PhiMinus => Parity::Like,
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellLabel::PsiMinus => "psi_minus",
            BellLabel::PsiPlus => "psi_plus",
            BellLabel::PhiPlus => "phi_plus",
            BellLabel::PhiMinus => "phi_minus",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Unlike,
    Like,
}

/// Physical realization of the measured two-outcome observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Realization {
    /// Stern-Gerlach spin-½ measurements: Hilbert angle = (α − β) / 2.
    SpinHalf,
    /// Polarizer measurements: Hilbert angle = α − β.
    Photon,
}

impl Realization {
    pub fn angle_factor(self) -> f64 {
        match self {
            Realization::SpinHalf => 0.5,
            Realization::Photon => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BellState {
    pub label: BellLabel,
    pub realization: Realization,
}

impl BellState {
    pub fn new(label: BellLabel, realization: Realization) -> Self {
        BellState { label, realization }
    }

    /// The spin-½ singlet `ψ−`.
    pub fn singlet() -> Self {
        Self::new(BellLabel::PsiMinus, Realization::SpinHalf)
    }

    /// The photon state `φ+` with perfectly correlated co-aligned polarizers.
    pub fn photon_pair() -> Self {
        Self::new(BellLabel::PhiPlus, Realization::Photon)
    }

    pub fn parity(&self) -> Parity {
        self.label.parity()
    }

    pub fn angle_factor(&self) -> f64 {
        self.realization.angle_factor()
    }

    /// Hilbert-space angle between the measurement bases for real-space
    /// settings `alpha` and `beta`.
    pub fn hilbert_angle(&self, alpha: Angle, beta: Angle) -> Angle {
        (alpha - beta).scale(self.angle_factor())
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = match self.realization {
            Realization::SpinHalf => "spin_half",
            Realization::Photon => "photon",
        };
        write!(f, "{}/{}", self.label, r)
    }
}

/// Probabilities of the four outcome pairs `(Alice, Bob)` for one setting pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointDistribution {
    pub pp: f64,
    pub pm: f64,
    pub mp: f64,
    pub mm: f64,
}

impl JointDistribution {
    /// Builds a distribution, rejecting negative cells or a total that
    /// differs from 1 by more than `1e-12`.
    pub fn new(pp: f64, pm: f64, mp: f64, mm: f64) -> Result<Self> {
        let d = JointDistribution { pp, pm, mp, mm };
        d.validate(crate::tolerances::ANALYTIC)?;
        Ok(d)
    }

    pub fn uniform() -> Self {
        JointDistribution { pp: 0.25, pm: 0.25, mp: 0.25, mm: 0.25 }
    }

    /// All probability on a single outcome pair.
    pub fn certain(alice: Outcome, bob: Outcome) -> Self {
        let mut d = JointDistribution { pp: 0.0, pm: 0.0, mp: 0.0, mm: 0.0 };
        *d.cell_mut(alice, bob) = 1.0;
        d
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let cells = self.cells();
        if let Some(bad) = cells.iter().find(|p| !p.is_finite() || **p < -tol || **p > 1.0 + tol) {
            return Err(Error::InvalidDistribution(format!("cell probability {bad} outside [0, 1]")));
        }
        let total: f64 = cells.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidDistribution(format!("cells sum to {total}, not 1")));
        }
        Ok(())
    }

    /// Cells in the order `(+,+), (+,−), (−,+), (−,−)`.
    pub fn cells(&self) -> [f64; 4] {
        [self.pp, self.pm, self.mp, self.mm]
    }

    pub fn prob(&self, alice: Outcome, bob: Outcome) -> f64 {
        match (alice, bob) {
            (Outcome::Plus, Outcome::Plus) => self.pp,
            (Outcome::Plus, Outcome::Minus) => self.pm,
            (Outcome::Minus, Outcome::Plus) => self.mp,
            (Outcome::Minus, Outcome::Minus) => self.mm,
        }
    }

    fn cell_mut(&mut self, alice: Outcome, bob: Outcome) -> &mut f64 {
        match (alice, bob) {
            (Outcome::Plus, Outcome::Plus) => &mut self.pp,
            (Outcome::Plus, Outcome::Minus) => &mut self.pm,
            (Outcome::Minus, Outcome::Plus) => &mut self.mp,
            (Outcome::Minus, Outcome::Minus) => &mut self.mm,
        }
    }

    pub fn marginal(&self, party: Party, outcome: Outcome) -> f64 {
        Outcome::BOTH
            .iter()
            .map(|&other| match party {
                Party::Alice => self.prob(outcome, other),
                Party::Bob => self.prob(other, outcome),
            })
            .sum()
    }

    /// Expected product of outcomes.
    pub fn correlation(&self) -> f64 {
        self.pp - self.pm - self.mp + self.mm
    }

    /// Average of the other party's outcome over trials where `party`
    /// obtained `given`. `None` when that outcome never occurs.
    pub fn conditional_average(&self, party: Party, given: Outcome) -> Option<f64> {
        let weight = self.marginal(party, given);
        if weight <= 0.0 {
            return None;
        }
        let sum: f64 = Outcome::BOTH
            .iter()
            .map(|&other| {
                let p = match party {
                    Party::Alice => self.prob(given, other),
                    Party::Bob => self.prob(other, given),
                };
                p * other.value()
            })
            .sum();
        Some(sum / weight)
    }

    pub fn max_abs_diff(&self, other: &JointDistribution) -> f64 {
        self.cells()
            .iter()
            .zip(other.cells())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Expected product of outcomes, `P(++) − P(+−) − P(−+) + P(−−)`.
pub fn correlation(dist: &JointDistribution) -> f64 {
    dist.correlation()
}

/// Path-integral amplitudes for the spin-½ singlet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSet {
    pub uu: Complex64,
    pub ud: Complex64,
    pub du: Complex64,
    pub dd: Complex64,
}

impl AmplitudeSet {
    /// `|A|²` for each outcome pair, `u` mapped to `+1`.
    pub fn probabilities(&self) -> JointDistribution {
        JointDistribution {
            pp: self.uu.norm_sqr(),
            pm: self.ud.norm_sqr(),
            mp: self.du.norm_sqr(),
            mm: self.dd.norm_sqr(),
        }
    }
}

pub fn singlet_amplitudes(alpha: Angle, beta: Angle) -> AmplitudeSet {
    let ea = Complex64::from_polar(1.0, alpha.radians());
    let eb = Complex64::from_polar(1.0, beta.radians());
    let scale = 1.0 / (2.0 * SQRT_2);
    let ud = (ea + eb) * scale;
    let uu = (ea - eb) * scale;
    AmplitudeSet { uu, ud, du: -ud, dd: -uu }
}

/// Closed-form distribution for a state of the given parity at Hilbert
/// angle `theta`: the conserved outcome relation has total probability
/// `cos²θ`, the other `sin²θ`, each split evenly.
pub fn joint_distribution_hilbert(parity: Parity, theta: Angle) -> JointDistribution {
    let t = theta.radians();
    let keep = 0.5 * t.cos().powi(2);
    let flip = 0.5 * t.sin().powi(2);
    match parity {
        Parity::Unlike => JointDistribution { pp: flip, pm: keep, mp: keep, mm: flip },
        Parity::Like => JointDistribution { pp: keep, pm: flip, mp: flip, mm: keep },
    }
}

pub fn joint_distribution(state: &BellState, alpha: Angle, beta: Angle) -> JointDistribution {
    joint_distribution_hilbert(state.parity(), state.hilbert_angle(alpha, beta))
}

/// Conservation target for the other party's average outcome, given one
/// party's `outcome`, with the bases separated by Hilbert angle `theta`.
pub fn conditional_average_hilbert(parity: Parity, theta: Angle, outcome: Outcome) -> f64 {
    let t = theta.radians();
    let like = t.cos().powi(2) - t.sin().powi(2);
    match parity {
        Parity::Unlike => -like * outcome.value(),
        Parity::Like => like * outcome.value(),
    }
}

/// Conservation target for Bob's average outcome given Alice's `outcome`
/// when the real-space settings differ by `relative` (`α − β`).
///
/// For the singlet this is `−cos(α − β)` for Alice's `+1` results; for the
/// photon state it is `cos²(α − β) − sin²(α − β)`. The state is symmetric
/// under exchanging the parties, so the same target applies to Alice's
/// average given Bob's outcome.
pub fn conditional_average(state: &BellState, relative: Angle, outcome: Outcome) -> f64 {
    conditional_average_hilbert(state.parity(), relative.scale(state.angle_factor()), outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

    const TOL: f64 = 1e-12;

    fn a(r: f64) -> Angle {
        Angle::from_radians(r)
    }

    #[test]
    fn parity_table() {
        assert_eq!(BellLabel::PsiMinus.parity(), Parity::Unlike);
        for l in [BellLabel::PsiPlus, BellLabel::PhiPlus, BellLabel::PhiMinus] {
            assert_eq!(l.parity(), Parity::Like);
        }
        assert_eq!(Realization::SpinHalf.angle_factor(), 0.5);
        assert_eq!(Realization::Photon.angle_factor(), 1.0);
    }

    #[test]
    fn singlet_amplitude_examples() {
        let amp = singlet_amplitudes(a(0.0), a(0.0));
        assert!((amp.ud - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < TOL);
        assert!(amp.uu.norm() < TOL);

        let amp = singlet_amplitudes(a(0.0), a(PI));
        assert!(amp.ud.norm() < TOL);
        assert!((amp.uu.norm() - FRAC_1_SQRT_2).abs() < TOL);

        // Hand arithmetic: e^{iπ/3} + 1 = (3/2, √3/2), |·|² = 3, /8.
        let amp = singlet_amplitudes(a(FRAC_PI_3), a(0.0));
        assert!((amp.ud.norm_sqr() - 3.0 / 8.0).abs() < TOL);
        assert!((amp.ud.norm_sqr() - FRAC_PI_6.cos().powi(2) / 2.0).abs() < TOL);
        assert_eq!(amp.du, -amp.ud);
        assert_eq!(amp.dd, -amp.uu);
    }

    #[test]
    fn joint_distribution_examples() {
        let singlet = BellState::singlet();
        let d = joint_distribution(&singlet, a(0.4), a(0.4));
        assert_eq!((d.pp, d.pm, d.mp, d.mm), (0.0, 0.5, 0.5, 0.0));

        let d = joint_distribution(&BellState::photon_pair(), a(1.1), a(1.1));
        assert_eq!((d.pp, d.pm, d.mp, d.mm), (0.5, 0.0, 0.0, 0.5));

        let d = joint_distribution(&singlet, a(FRAC_PI_2 + 0.3), a(0.3));
        for p in d.cells() {
            assert!((p - 0.25).abs() < TOL);
        }
    }

    #[test]
    fn correlation_examples() {
        assert_eq!(correlation(&JointDistribution::uniform()), 0.0);
        let (al, be) = (a(0.9), a(-0.35));
        let c = correlation(&joint_distribution(&BellState::singlet(), al, be));
        assert!((c + (0.9f64 + 0.35).cos()).abs() < TOL);
        let c = correlation(&joint_distribution(&BellState::photon_pair(), al, be));
        assert!((c - (2.0 * (0.9f64 + 0.35)).cos()).abs() < TOL);
    }

    #[test]
    fn conditional_average_examples() {
        let singlet = BellState::singlet();
        assert!((conditional_average(&singlet, a(0.0), Outcome::Plus) + 1.0).abs() < TOL);
        assert!(conditional_average(&singlet, a(FRAC_PI_2), Outcome::Plus).abs() < TOL);
        let photon = BellState::photon_pair();
        assert!(conditional_average(&photon, a(FRAC_PI_4), Outcome::Minus).abs() < TOL);
        // Same value from the distribution's own conditional sum.
        let d = joint_distribution(&photon, a(FRAC_PI_4), a(0.0));
        assert!(d.conditional_average(Party::Alice, Outcome::Minus).unwrap().abs() < TOL);
    }

    #[test]
    fn distribution_validation() {
        assert!(JointDistribution::new(0.5, 0.5, 0.0, 0.0).is_ok());
        assert!(JointDistribution::new(0.5, 0.5, 0.1, 0.0).is_err());
        assert!(JointDistribution::new(1.1, -0.1, 0.0, 0.0).is_err());
        assert!(JointDistribution::new(f64::NAN, 0.5, 0.5, 0.0).is_err());
        let c = JointDistribution::certain(Outcome::Minus, Outcome::Plus);
        assert_eq!(c.cells(), [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(c.conditional_average(Party::Alice, Outcome::Plus), None);
        assert_eq!(c.conditional_average(Party::Bob, Outcome::Plus), Some(-1.0));
    }
}
