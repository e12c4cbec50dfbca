use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{Outcome, Party};
use crate::quantum::JointDistribution;
use crate::settings::{SettingLabel, Slot};
use crate::tolerances;

/// An instruction set: a fixed outcome for each of a party's two settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    /// Indexed by [`Slot::index`].
    pub alice: [Outcome; 2],
    pub bob: [Outcome; 2],
}

impl DeterministicStrategy {
    /// All 16 strategies, lexicographic over
    /// `(alice(a), alice(a′), bob(b), bob(b′))` with `+1` before `−1`.
    pub fn all() -> [DeterministicStrategy; 16] {
        std::array::from_fn(Self::from_index)
    }

    pub fn from_index(index: usize) -> Self {
        assert!(index < 16, "strategy index {index} out of range");
        let bit = |shift: usize| {
            if index >> shift & 1 == 0 {
                Outcome::Plus
            } else {
                Outcome::Minus
            }
        };
        DeterministicStrategy { alice: [bit(3), bit(2)], bob: [bit(1), bit(0)] }
    }

    pub fn index(&self) -> usize {
        let b = |o: Outcome| usize::from(o == Outcome::Minus);
        b(self.alice[0]) << 3 | b(self.alice[1]) << 2 | b(self.bob[0]) << 1 | b(self.bob[1])
    }

    pub fn outcome(&self, party: Party, slot: Slot) -> Outcome {
        match party {
            Party::Alice => self.alice[slot.index()],
            Party::Bob => self.bob[slot.index()],
        }
    }
}

/// Local hidden-variable model: a convex mixture of the 16 deterministic
/// strategies, indexed as in [`DeterministicStrategy::all`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LhvRepr", into = "LhvRepr")]
pub struct LhvModel {
    weights: [f64; 16],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LhvRepr {
    weights: Vec<f64>,
}

impl TryFrom<LhvRepr> for LhvModel {
    type Error = Error;
    fn try_from(r: LhvRepr) -> Result<Self> {
        let weights: [f64; 16] = r.weights.try_into().map_err(|w: Vec<f64>| {
            Error::InvalidModel(format!("LHV model needs 16 weights, got {}", w.len()))
        })?;
        LhvModel::new(weights)
    }
}

impl From<LhvModel> for LhvRepr {
    fn from(m: LhvModel) -> Self {
        LhvRepr { weights: m.weights.to_vec() }
    }
}

impl LhvModel {
    pub fn new(weights: [f64; 16]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidModel("LHV weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tolerances::ANALYTIC {
            return Err(Error::InvalidModel(format!("LHV weights sum to {total}, not 1")));
        }
        Ok(LhvModel { weights })
    }

    pub fn deterministic(strategy: DeterministicStrategy) -> Self {
        let mut weights = [0.0; 16];
        weights[strategy.index()] = 1.0;
        LhvModel { weights }
    }

    /// Normalizes arbitrary nonnegative scores into a weight vector.
    pub fn from_scores(scores: [f64; 16]) -> Result<Self> {
        let total: f64 = scores.iter().sum();
        if total.is_nan() || total <= 0.0 || scores.iter().any(|s| *s < 0.0 || !s.is_finite()) {
            return Err(Error::InvalidModel("scores must be nonnegative with positive sum".into()));
        }
        let mut weights = scores.map(|s| s / total);
        // Push the rounding residue onto the largest weight.
        let residue = 1.0 - weights.iter().sum::<f64>();
        let (imax, _) = weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        weights[imax] += residue;
        LhvModel::new(weights)
    }

    pub fn weights(&self) -> &[f64; 16] {
        &self.weights
    }

    pub fn distribution(&self, a: &SettingLabel, b: &SettingLabel) -> JointDistribution {
        let mut cells = [0.0; 4];
        for (strategy, w) in DeterministicStrategy::all().iter().zip(self.weights) {
            let oa = strategy.outcome(Party::Alice, a.slot);
            let ob = strategy.outcome(Party::Bob, b.slot);
            let idx = 2 * usize::from(oa == Outcome::Minus) + usize::from(ob == Outcome::Minus);
            cells[idx] += w;
        }
        JointDistribution { pp: cells[0], pm: cells[1], mp: cells[2], mm: cells[3] }
    }
}
