//! CHSH evaluation and the three bounds: 2 for local hidden variables,
//! 2√2 for Bell states, 4 for the PR box.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{CorrelationModel, DeterministicStrategy, LhvModel};
use crate::quantum::BellState;
use crate::settings::ChshSettings;
use crate::tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshReport {
    pub value: f64,
    /// `E(a,b), E(a,b′), E(a′,b), E(a′,b′)`
    pub correlations: [f64; 4],
    pub settings: ChshSettings,
}

impl ChshReport {
    pub fn from_correlations(correlations: [f64; 4], settings: ChshSettings) -> Self {
        let [ab, abp, apb, apbp] = correlations;
        ChshReport { value: ab + abp + apb - apbp, correlations, settings }
    }
}

pub fn chsh_value(model: &CorrelationModel, settings: &ChshSettings) -> Result<ChshReport> {
    settings.validate()?;
    let mut correlations = [0.0; 4];
    for (c, pair) in correlations.iter_mut().zip(settings.pairs()) {
        *c = model.distribution(&pair.alice, &pair.bob)?.correlation();
    }
    Ok(ChshReport::from_correlations(correlations, *settings))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalBound {
    /// CHSH value of each deterministic strategy, in enumeration order.
    pub strategy_values: [f64; 16],
    pub max_abs: f64,
}

/// Evaluates every deterministic strategy. Any LHV model is a convex
/// mixture of these, so its CHSH value is bounded by their extremes.
pub fn classical_bound_bruteforce() -> ClassicalBound {
    let settings = ChshSettings::discrete();
    let strategy_values = DeterministicStrategy::all().map(|s| {
        chsh_value(&CorrelationModel::Lhv(LhvModel::deterministic(s)), &settings)
            .expect("discrete settings are valid for LHV models")
            .value
    });
    let max_abs = strategy_values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    ClassicalBound { strategy_values, max_abs }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OptimizeMode {
    #[serde(rename = "min")]
    Minimize,
    #[serde(rename = "max")]
    Maximize,
}

impl OptimizeMode {
    fn sign(self) -> f64 {
        match self {
            OptimizeMode::Minimize => -1.0,
            OptimizeMode::Maximize => 1.0,
        }
    }
}

/// Searches `[0, 2π)^4` for the settings extremizing the CHSH value:
/// an exhaustive grid with `grid_points` per axis, then up to
/// `refine_iters` sweeps of coordinate-wise golden-section refinement.
///
/// The result is bit-identical for fixed arguments regardless of how many
/// threads evaluate the grid.
pub fn optimize_chsh(
    model: &CorrelationModel,
    mode: OptimizeMode,
    grid_points: usize,
    refine_iters: usize,
) -> Result<ChshReport> {
    if !model.is_angle_parameterized() {
        return Err(Error::NotAngleParameterized(model.kind()));
    }
    if grid_points < 8 {
        return Err(Error::InvalidArgument(format!("grid_points must be at least 8, got {grid_points}")));
    }
    let cells = grid_points
        .checked_pow(4)
        .filter(|c| *c <= 1 << 28)
        .ok_or_else(|| Error::InvalidArgument(format!("grid of {grid_points}^4 points is too large")))?;

    let objective = |x: &[f64; 4]| -> f64 {
        let s = ChshSettings::from_angles(x[0], x[1], x[2], x[3]);
        mode.sign() * chsh_value(model, &s).map(|r| r.value).unwrap_or(f64::NEG_INFINITY)
    };
    let step = TAU / grid_points as f64;
    let point = |i: usize| -> [f64; 4] {
        let mut x = [0.0; 4];
        let mut rest = i;
        for xi in x.iter_mut().rev() {
            *xi = (rest % grid_points) as f64 * step;
            rest /= grid_points;
        }
        x
    };

    let values: Vec<f64> = (0..cells).into_par_iter().map(|i| objective(&point(i))).collect();
    let (best_index, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });

    let mut best = point(best_index);
    let mut best_val = values[best_index];
    for _ in 0..refine_iters {
        let before = best_val;
        for k in 0..4 {
            let along = |t: f64| {
                let mut x = best;
                x[k] = t;
                objective(&x)
            };
            let t = golden_max(&along, best[k] - step, best[k] + step);
            let v = along(t);
            if v > best_val {
                best[k] = t;
                best_val = v;
            }
        }
        if best_val - before < tolerances::REFINE_CONVERGENCE {
            break;
        }
    }
    chsh_value(model, &ChshSettings::from_angles(best[0], best[1], best[2], best[3]))
}

fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundOrdering {
    pub classical: f64,
    pub quantum: f64,
    pub pr: f64,
    pub strictly_ordered: bool,
}

/// Default optimizer resolution used for the quantum bound.
pub const DEFAULT_GRID_POINTS: usize = 16;
pub const DEFAULT_REFINE_ITERS: usize = 50;

pub fn bound_ordering_report() -> BoundOrdering {
    let classical = classical_bound_bruteforce().max_abs;
    let singlet = CorrelationModel::Quantum(BellState::singlet());
    let quantum = optimize_chsh(&singlet, OptimizeMode::Minimize, DEFAULT_GRID_POINTS, DEFAULT_REFINE_ITERS)
        .expect("the singlet model is angle-parameterized")
        .value
        .abs();
    let pr = chsh_value(&CorrelationModel::Pr, &ChshSettings::discrete())
        .expect("discrete settings are valid for the PR model")
        .value;
    BoundOrdering { classical, quantum, pr, strictly_ordered: classical < quantum && quantum < pr }
}
