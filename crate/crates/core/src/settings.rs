//! Measurement-setting labels and the four-setting CHSH configuration.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::{format_f64, Angle, Party};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Unprimed,
    Primed,
}

impl Slot {
    pub fn index(self) -> usize {
        match self {
            Slot::Unprimed => 0,
            Slot::Primed => 1,
        }
    }
}

/// One party's setting: `a`, `a′`, `b` or `b′`, optionally with an angle.
///
/// Text form is the slot name (`a`, `a'`, `b`, `b'`), followed by
/// `@<radians>` when an angle is attached, e.g. `a'@-7.8539816339744828e-1`.
/// Discrete models read only the slot and ignore any angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SettingLabel {
    pub party: Party,
    pub slot: Slot,
    pub angle: Option<Angle>,
}

impl SettingLabel {
    pub const fn new(party: Party, slot: Slot) -> Self {
        SettingLabel { party, slot, angle: None }
    }

    pub const fn a() -> Self {
        Self::new(Party::Alice, Slot::Unprimed)
    }

    pub const fn a_prime() -> Self {
        Self::new(Party::Alice, Slot::Primed)
    }

    pub const fn b() -> Self {
        Self::new(Party::Bob, Slot::Unprimed)
    }

    pub const fn b_prime() -> Self {
        Self::new(Party::Bob, Slot::Primed)
    }

    pub fn at(mut self, radians: f64) -> Self {
        self.angle = Some(Angle::from_radians(radians));
        self
    }

    pub fn slot_name(&self) -> &'static str {
        match (self.party, self.slot) {
            (Party::Alice, Slot::Unprimed) => "a",
            (Party::Alice, Slot::Primed) => "a'",
            (Party::Bob, Slot::Unprimed) => "b",
            (Party::Bob, Slot::Primed) => "b'",
        }
    }
}

impl fmt::Display for SettingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slot_name())?;
        if let Some(angle) = self.angle {
            write!(f, "@{}", format_f64(angle.radians()))?;
        }
        Ok(())
    }
}

impl FromStr for SettingLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, angle) = match s.split_once('@') {
            Some((name, angle)) => {
                let r: f64 = angle
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad angle in setting `{s}`")))?;
                if !r.is_finite() {
                    return Err(Error::Parse(format!("non-finite angle in setting `{s}`")));
                }
                (name, Some(Angle::from_radians(r)))
            }
            None => (s, None),
        };
        let base = match name.trim() {
            "a" => SettingLabel::a(),
            "a'" => SettingLabel::a_prime(),
            "b" => SettingLabel::b(),
            "b'" => SettingLabel::b_prime(),
            other => return Err(Error::Parse(format!("unknown setting slot `{other}`"))),
        };
        Ok(SettingLabel { angle, ..base })
    }
}

impl From<SettingLabel> for String {
    fn from(l: SettingLabel) -> String {
        l.to_string()
    }
}

impl TryFrom<String> for SettingLabel {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// An (Alice setting, Bob setting) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingPair {
    pub alice: SettingLabel,
    pub bob: SettingLabel,
}

impl SettingPair {
    pub fn new(alice: SettingLabel, bob: SettingLabel) -> Self {
        SettingPair { alice, bob }
    }

    /// Real-space difference `α − β`, when both settings carry angles.
    pub fn relative_angle(&self) -> Option<Angle> {
        Some(self.alice.angle? - self.bob.angle?)
    }
}

impl fmt::Display for SettingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alice, self.bob)
    }
}

/// The four settings entering `E(a,b) + E(a,b′) + E(a′,b) − E(a′,b′)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshSettings {
    pub a: SettingLabel,
    pub a_prime: SettingLabel,
    pub b: SettingLabel,
    pub b_prime: SettingLabel,
}

impl ChshSettings {
    /// Slot-only settings for the discrete (PR, LHV, tabulated) models.
    pub fn discrete() -> Self {
        ChshSettings {
            a: SettingLabel::a(),
            a_prime: SettingLabel::a_prime(),
            b: SettingLabel::b(),
            b_prime: SettingLabel::b_prime(),
        }
    }

    pub fn from_angles(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Self {
        ChshSettings {
            a: SettingLabel::a().at(a),
            a_prime: SettingLabel::a_prime().at(a_prime),
            b: SettingLabel::b().at(b),
            b_prime: SettingLabel::b_prime().at(b_prime),
        }
    }

    /// `a = π/4, a′ = −π/4, b = 0, b′ = π/2`: minimizes the singlet CHSH
    /// value at `−2√2`.
    pub fn singlet_optimal() -> Self {
        Self::from_angles(FRAC_PI_4, -FRAC_PI_4, 0.0, FRAC_PI_2)
    }

    /// `a = π/8, a′ = −π/8, b = 0, b′ = π/4`: maximizes the photon-state
    /// CHSH value at `+2√2`.
    pub fn photon_optimal() -> Self {
        Self::from_angles(FRAC_PI_8, -FRAC_PI_8, 0.0, FRAC_PI_4)
    }

    /// Angles that make the last three PR cells consistent with singlet
    /// conservation: `a′ = b′ = base`, `b = π + b′`, `a = π + a′`.
    pub fn pr_conservation_assignment(base: f64) -> Self {
        Self::from_angles(PI + base, base, PI + base, base)
    }

    /// Pairs in CHSH order: `(a,b), (a,b′), (a′,b), (a′,b′)`.
    pub fn pairs(&self) -> [SettingPair; 4] {
        [
            SettingPair::new(self.a, self.b),
            SettingPair::new(self.a, self.b_prime),
            SettingPair::new(self.a_prime, self.b),
            SettingPair::new(self.a_prime, self.b_prime),
        ]
    }

    pub fn has_angles(&self) -> bool {
        [self.a, self.a_prime, self.b, self.b_prime].iter().all(|l| l.angle.is_some())
    }

    pub fn with_offset(&self, offset: f64) -> Self {
        let shift = |l: SettingLabel| SettingLabel {
            angle: l.angle.map(|a| a + Angle::from_radians(offset)),
            ..l
        };
        ChshSettings {
            a: shift(self.a),
            a_prime: shift(self.a_prime),
            b: shift(self.b),
            b_prime: shift(self.b_prime),
        }
    }

    /// Checks that each field holds its own slot and any angle is finite.
    pub fn validate(&self) -> Result<()> {
        let expected = [
            (self.a, SettingLabel::a()),
            (self.a_prime, SettingLabel::a_prime()),
            (self.b, SettingLabel::b()),
            (self.b_prime, SettingLabel::b_prime()),
        ];
        for (got, want) in expected {
            if (got.party, got.slot) != (want.party, want.slot) {
                return Err(Error::InvalidSettings(format!(
                    "expected slot {} but found {}",
                    want.slot_name(),
                    got.slot_name()
                )));
            }
            if got.angle.is_some_and(|a| !a.is_finite()) {
                return Err(Error::InvalidSettings(format!("non-finite angle for {}", got.slot_name())));
            }
        }
        Ok(())
    }
}
