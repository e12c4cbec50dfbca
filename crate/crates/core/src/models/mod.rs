//! A uniform interface over the correlation models: quantum Bell states,
//! local hidden-variable mixtures, the PR box, its one-cell generalization,
//! and explicitly tabulated behaviors.

mod checks;
mod eigenbasis;
mod lhv;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{Outcome, Party};
use crate::quantum::{joint_distribution, BellState, JointDistribution};
use crate::settings::{SettingLabel, Slot};
use crate::tolerances;

pub use checks::{
    conservation_deviation, no_signaling_check, nprf_marginal_check, ConservationReport,
    MarginalComparison, NoSignalingReport, NprfReport,
};
pub use eigenbasis::{pr_eigenbasis_contradiction, EigenbasisReport};
pub use lhv::{DeterministicStrategy, LhvModel};

/// Which PR cell the generalized family replaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplacedCell {
    /// `(a, b)`
    First,
    /// `(a′, b′)`
    Fourth,
}

impl ReplacedCell {
    fn slots(self) -> (Slot, Slot) {
        match self {
            ReplacedCell::First => (Slot::Unprimed, Slot::Unprimed),
            ReplacedCell::Fourth => (Slot::Primed, Slot::Primed),
        }
    }
}

/// PR box with one cell replaced by `P(++) = P(−−) = c`, `P(+−) = P(−+) = e`.
///
/// No-signaling against the untouched cells forces the two like-outcome
/// entries to agree and the two unlike-outcome entries to agree, so the
/// family has the single free parameter `c = 1/2 − e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeneralizedPrRepr", into = "GeneralizedPrRepr")]
pub struct GeneralizedPrModel {
    c: f64,
    e: f64,
    replaced_cell: ReplacedCell,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneralizedPrRepr {
    c: f64,
    e: f64,
    replaced_cell: ReplacedCell,
}

impl TryFrom<GeneralizedPrRepr> for GeneralizedPrModel {
    type Error = Error;
    fn try_from(r: GeneralizedPrRepr) -> Result<Self> {
        GeneralizedPrModel::new(r.c, r.e, r.replaced_cell)
    }
}

impl From<GeneralizedPrModel> for GeneralizedPrRepr {
    fn from(m: GeneralizedPrModel) -> Self {
        GeneralizedPrRepr { c: m.c, e: m.e, replaced_cell: m.replaced_cell }
    }
}

impl GeneralizedPrModel {
    pub fn new(c: f64, e: f64, replaced_cell: ReplacedCell) -> Result<Self> {
        if !(c >= 0.0 && e >= 0.0) {
            return Err(Error::InvalidModel(format!("c = {c} and e = {e} must be nonnegative")));
        }
        if (2.0 * c + 2.0 * e - 1.0).abs() > tolerances::ANALYTIC {
            return Err(Error::InvalidModel(format!("2c + 2e = {} must equal 1", 2.0 * c + 2.0 * e)));
        }
        Ok(GeneralizedPrModel { c, e, replaced_cell })
    }

    /// `e = 1/2 − c`
    pub fn from_c(c: f64, replaced_cell: ReplacedCell) -> Result<Self> {
        Self::new(c, 0.5 - c, replaced_cell)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn e(&self) -> f64 {
        self.e
    }

    pub fn replaced_cell(&self) -> ReplacedCell {
        self.replaced_cell
    }

    fn distribution(&self, a: Slot, b: Slot) -> JointDistribution {
        if (a, b) == self.replaced_cell.slots() {
            JointDistribution { pp: self.c, pm: self.e, mp: self.e, mm: self.c }
        } else {
            pr_distribution(a, b)
        }
    }
}

/// CHSH value of the generalized PR family in closed form:
/// `3 + 2c − 2e` when the first cell is replaced, `3 − 2c + 2e` for the fourth.
pub fn generalized_pr_chsh(model: &GeneralizedPrModel) -> f64 {
    let cell = 2.0 * model.c - 2.0 * model.e;
    match model.replaced_cell {
        ReplacedCell::First => 3.0 + cell,
        ReplacedCell::Fourth => 3.0 - cell,
    }
}

fn pr_distribution(a: Slot, b: Slot) -> JointDistribution {
    if (a, b) == (Slot::Primed, Slot::Primed) {
        JointDistribution { pp: 0.0, pm: 0.5, mp: 0.5, mm: 0.0 }
    } else {
        JointDistribution { pp: 0.5, pm: 0.0, mp: 0.0, mm: 0.5 }
    }
}

/// Arbitrary per-setting-pair distributions, indexed by slot. Used for
/// fixtures, including deliberately signaling ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TabulatedRepr", into = "TabulatedRepr")]
pub struct TabulatedModel {
    cells: [[JointDistribution; 2]; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TabulatedRepr {
    ab: JointDistribution,
    ab_prime: JointDistribution,
    a_prime_b: JointDistribution,
    a_prime_b_prime: JointDistribution,
}

impl TryFrom<TabulatedRepr> for TabulatedModel {
    type Error = Error;
    fn try_from(r: TabulatedRepr) -> Result<Self> {
        TabulatedModel::new([[r.ab, r.ab_prime], [r.a_prime_b, r.a_prime_b_prime]])
    }
}

impl From<TabulatedModel> for TabulatedRepr {
    fn from(m: TabulatedModel) -> Self {
        let [[ab, ab_prime], [a_prime_b, a_prime_b_prime]] = m.cells;
        TabulatedRepr { ab, ab_prime, a_prime_b, a_prime_b_prime }
    }
}

impl TabulatedModel {
    /// `cells[alice_slot][bob_slot]`
    pub fn new(cells: [[JointDistribution; 2]; 2]) -> Result<Self> {
        for d in cells.iter().flatten() {
            d.validate(tolerances::ANALYTIC)?;
        }
        Ok(TabulatedModel { cells })
    }

    /// Alice's outcome depends on Bob's setting: `(+,+)` with certainty at
    /// `(a, b)` and `(−,−)` at `(a, b′)`.
    pub fn signaling_fixture() -> Self {
        let pp = JointDistribution::certain(Outcome::Plus, Outcome::Plus);
        let mm = JointDistribution::certain(Outcome::Minus, Outcome::Minus);
        TabulatedModel { cells: [[pp, mm], [JointDistribution::uniform(); 2]] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CorrelationModel {
    Quantum(BellState),
    Lhv(LhvModel),
    Pr,
    GeneralizedPr(GeneralizedPrModel),
    Tabulated(TabulatedModel),
}

impl CorrelationModel {
    pub fn kind(&self) -> &'static str {
        match self {
            CorrelationModel::Quantum(_) => "quantum",
            CorrelationModel::Lhv(_) => "lhv",
            CorrelationModel::Pr => "pr",
            CorrelationModel::GeneralizedPr(_) => "generalized_pr",
            CorrelationModel::Tabulated(_) => "tabulated",
        }
    }

    /// Only quantum models read setting angles.
    pub fn is_angle_parameterized(&self) -> bool {
        matches!(self, CorrelationModel::Quantum(_))
    }

    pub fn distribution(&self, a: &SettingLabel, b: &SettingLabel) -> Result<JointDistribution> {
        if a.party != Party::Alice {
            return Err(Error::WrongParty { label: a.to_string(), expected: Party::Alice });
        }
        if b.party != Party::Bob {
            return Err(Error::WrongParty { label: b.to_string(), expected: Party::Bob });
        }
        Ok(match self {
            CorrelationModel::Quantum(state) => {
                let angle_of = |l: &SettingLabel| {
                    l.angle.ok_or_else(|| Error::MissingAngle { label: l.to_string(), model: self.kind() })
                };
                joint_distribution(state, angle_of(a)?, angle_of(b)?)
            }
            CorrelationModel::Lhv(m) => m.distribution(a, b),
            CorrelationModel::Pr => pr_distribution(a.slot, b.slot),
            CorrelationModel::GeneralizedPr(m) => m.distribution(a.slot, b.slot),
            CorrelationModel::Tabulated(m) => m.cells[a.slot.index()][b.slot.index()],
        })
    }
}

pub fn model_distribution(
    model: &CorrelationModel,
    a: &SettingLabel,
    b: &SettingLabel,
) -> Result<JointDistribution> {
    model.distribution(a, b)
}
