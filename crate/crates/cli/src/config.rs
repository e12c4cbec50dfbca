//! Experiment configuration: JSON on disk, overridden by flags, echoed
//! back in every report in its fully resolved form.

use std::path::{Path, PathBuf};

use bellscope_core::tolerances;
use bellscope_core::{BellState, ChshSettings, CorrelationModel, OptimizeMode, Realization};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl AngleSettings {
    pub fn to_chsh(self) -> ChshSettings {
        ChshSettings::from_angles(self.a, self.a_prime, self.b, self.b_prime)
    }

    fn from_chsh(s: &ChshSettings) -> Self {
        let r = |l: bellscope_core::SettingLabel| l.angle.map_or(0.0, |a| a.radians());
        AngleSettings { a: r(s.a), a_prime: r(s.a_prime), b: r(s.b), b_prime: r(s.b_prime) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    /// `None` evaluates the configured settings instead of optimizing.
    pub mode: Option<OptimizeMode>,
    pub grid_points: usize,
    pub refine_iters: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            mode: None,
            grid_points: bellscope_core::chsh::DEFAULT_GRID_POINTS,
            refine_iters: bellscope_core::chsh::DEFAULT_REFINE_ITERS,
        }
    }
}

/// Real-space angle sweep `α − β` from `start` to `end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub points: usize,
    pub start: f64,
    pub end: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { points: 721, start: 0.0, end: std::f64::consts::TAU }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub points: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig { points: 101 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub analytic: f64,
    pub optimizer: f64,
    pub monte_carlo: f64,
    pub z_threshold: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            analytic: tolerances::ANALYTIC,
            optimizer: tolerances::OPTIMIZER,
            monte_carlo: tolerances::MONTE_CARLO_ABS,
            z_threshold: tolerances::Z_THRESHOLD,
        }
    }
}

/// The resolved configuration every command runs from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: CorrelationModel,
    /// Reference state for conservation targets.
    pub state: BellState,
    pub settings: AngleSettings,
    pub optimizer: OptimizerConfig,
    pub scan: ScanConfig,
    pub spectrum: SpectrumConfig,
    pub n_per_pair: usize,
    pub seed: u64,
    pub output: OutputConfig,
    pub tolerances: ToleranceConfig,
}

/// On-disk form: everything optional except that unknown keys are errors.
/// The model is kept raw so a bad descriptor maps to a model error.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawConfig {
    model: Option<serde_json::Value>,
    state: Option<BellState>,
    settings: Option<AngleSettings>,
    optimizer: OptimizerConfig,
    scan: ScanConfig,
    spectrum: SpectrumConfig,
    n_per_pair: Option<usize>,
    seed: Option<u64>,
    output: OutputConfig,
    tolerances: ToleranceConfig,
}

pub const DEFAULT_N_PER_PAIR: usize = 100_000;

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub optimize: Option<OptimizeMode>,
    pub grid: Option<usize>,
    pub n: Option<usize>,
}

/// Which grid `--grid` resizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridTarget {
    Optimizer,
    Scan,
    Spectrum,
    None,
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                Self::from_json(&text).map_err(|e| match e {
                    CliError::Config(m) => CliError::Config(format!("{}: {m}", p.display())),
                    other => other,
                })
            }
            None => Self::resolve(RawConfig::default()),
        }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Self::resolve(raw)
    }

    fn resolve(raw: RawConfig) -> CliResult<Self> {
        let model = match raw.model {
            Some(v) => serde_json::from_value(v).map_err(|e| CliError::Model(format!("invalid model descriptor: {e}")))?,
            None => CorrelationModel::Quantum(BellState::singlet()),
        };
        let state = raw.state.unwrap_or(match &model {
            CorrelationModel::Quantum(s) => *s,
            _ => BellState::singlet(),
        });
        let settings = raw.settings.unwrap_or_else(|| AngleSettings::from_chsh(&default_settings(&model)));
        let cfg = ExperimentConfig {
            model,
            state,
            settings,
            optimizer: raw.optimizer,
            scan: raw.scan,
            spectrum: raw.spectrum,
            n_per_pair: raw.n_per_pair.unwrap_or(DEFAULT_N_PER_PAIR),
            seed: raw.seed.unwrap_or(0),
            output: raw.output,
            tolerances: raw.tolerances,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides, grid: GridTarget) -> CliResult<()> {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(d) = &o.out {
            self.output.dir = Some(d.clone());
        }
        if let Some(m) = o.optimize {
            self.optimizer.mode = Some(m);
        }
        if let Some(n) = o.n {
            self.n_per_pair = n;
        }
        if let Some(g) = o.grid {
            match grid {
                GridTarget::Optimizer => self.optimizer.grid_points = g,
                GridTarget::Scan => self.scan.points = g,
                GridTarget::Spectrum => self.spectrum.points = g,
                GridTarget::None => return Err(CliError::Config("--grid has no effect on this command".into())),
            }
        }
        self.validate()
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        let s = self.settings;
        if ![s.a, s.a_prime, s.b, s.b_prime].iter().all(|x| x.is_finite()) {
            return bad("settings angles must be finite".into());
        }
        if self.optimizer.grid_points < 8 {
            return bad(format!("optimizer.grid_points must be at least 8, got {}", self.optimizer.grid_points));
        }
        if self.scan.points < 2 {
            return bad(format!("scan.points must be at least 2, got {}", self.scan.points));
        }
        if !(self.scan.start.is_finite() && self.scan.end.is_finite()) {
            return bad("scan.start and scan.end must be finite".into());
        }
        if self.spectrum.points < 2 {
            return bad(format!("spectrum.points must be at least 2, got {}", self.spectrum.points));
        }
        if self.n_per_pair == 0 {
            return bad("n_per_pair must be at least 1".into());
        }
        let t = self.tolerances;
        for (name, v) in [
            ("analytic", t.analytic),
            ("optimizer", t.optimizer),
            ("monte_carlo", t.monte_carlo),
            ("z_threshold", t.z_threshold),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("tolerances.{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }

    pub fn chsh_settings(&self) -> ChshSettings {
        self.settings.to_chsh()
    }

    pub fn require_out_dir(&self) -> CliResult<&Path> {
        self.output
            .dir
            .as_deref()
            .ok_or_else(|| CliError::Config("an output directory is required (--out or output.dir)".into()))
    }
}

/// Settings used when the config gives none: the Tsirelson-optimal angles
/// for quantum models, otherwise the PR conservation assignment.
pub fn default_settings(model: &CorrelationModel) -> ChshSettings {
    match model {
        CorrelationModel::Quantum(s) if s.realization == Realization::Photon => ChshSettings::photon_optimal(),
        CorrelationModel::Quantum(_) => ChshSettings::singlet_optimal(),
        _ => ChshSettings::pr_conservation_assignment(0.0),
    }
}
