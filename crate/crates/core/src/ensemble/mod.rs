//! Seeded Monte Carlo trial ensembles and their statistical analysis.
//!
//! Each scheduled setting pair gets `n` trials drawn by inverse-CDF sampling
//! from the model's joint distribution. Draws come from counter-based
//! streams (see [`rng`]), so an ensemble depends only on its seed, model and
//! schedule, never on thread count.

pub mod io;
pub mod rng;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::CorrelationModel;
use crate::primitives::{Outcome, Party};
use crate::quantum::{conditional_average, joint_distribution, BellState, JointDistribution};
use crate::settings::{ChshSettings, SettingPair};

pub use io::{EnsembleEnvelope, EnsembleRow};

const CHUNK: usize = 1 << 14;

/// A single trial; its settings are `schedule[pair]` of the owning ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub index: u64,
    pub pair: u32,
    pub alice: Outcome,
    pub bob: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    seed: u64,
    model: CorrelationModel,
    schedule: Vec<SettingPair>,
    trials: Vec<TrialRecord>,
}

impl Ensemble {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn model(&self) -> &CorrelationModel {
        &self.model
    }

    pub fn schedule(&self) -> &[SettingPair] {
        &self.schedule
    }

    pub fn trials(&self) -> &[TrialRecord] {
        &self.trials
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    pub fn settings_of(&self, trial: &TrialRecord) -> SettingPair {
        self.schedule[trial.pair as usize]
    }

    pub fn rows(&self) -> impl Iterator<Item = EnsembleRow> + '_ {
        self.trials.iter().map(|t| {
            let s = self.settings_of(t);
            EnsembleRow {
                index: t.index,
                alice_setting: s.alice,
                bob_setting: s.bob,
                alice_outcome: t.alice,
                bob_outcome: t.bob,
            }
        })
    }

    /// Rebuilds an ensemble from exported rows. The schedule lists distinct
    /// setting pairs in order of first appearance.
    pub fn from_rows(seed: u64, model: CorrelationModel, rows: &[EnsembleRow]) -> Result<Self> {
        let mut schedule: Vec<SettingPair> = Vec::new();
        let mut trials = Vec::with_capacity(rows.len());
        for row in rows {
            let pair = SettingPair::new(row.alice_setting, row.bob_setting);
            if pair.alice.party != Party::Alice || pair.bob.party != Party::Bob {
                return Err(Error::Parse(format!("row {} has settings {pair} in the wrong columns", row.index)));
            }
            let idx = match schedule.iter().position(|p| *p == pair) {
                Some(i) => i,
                None => {
                    schedule.push(pair);
                    schedule.len() - 1
                }
            };
            trials.push(TrialRecord {
                index: row.index,
                pair: idx as u32,
                alice: row.alice_outcome,
                bob: row.bob_outcome,
            });
        }
        Ok(Ensemble { seed, model, schedule, trials })
    }

    /// Builds an ensemble from hand-entered trials, e.g. worked examples.
    pub fn from_trials(seed: u64, model: CorrelationModel, schedule: Vec<SettingPair>, trials: Vec<TrialRecord>) -> Result<Self> {
        if let Some(t) = trials.iter().find(|t| t.pair as usize >= schedule.len()) {
            return Err(Error::InvalidArgument(format!("trial {} refers to unscheduled pair {}", t.index, t.pair)));
        }
        Ok(Ensemble { seed, model, schedule, trials })
    }

    fn matching(&self, pair: &SettingPair) -> Result<impl Iterator<Item = &TrialRecord> + '_> {
        let ids: Vec<u32> = (0..self.schedule.len() as u32)
            .filter(|&i| self.schedule[i as usize] == *pair)
            .collect();
        if ids.is_empty() {
            return Err(Error::EmptySelection(pair.to_string()));
        }
        Ok(self.trials.iter().filter(move |t| ids.contains(&t.pair)))
    }
}

fn sample(dist: &JointDistribution, u: f64) -> (Outcome, Outcome) {
    const CELLS: [(Outcome, Outcome); 4] = [
        (Outcome::Plus, Outcome::Plus),
        (Outcome::Plus, Outcome::Minus),
        (Outcome::Minus, Outcome::Plus),
        (Outcome::Minus, Outcome::Minus),
    ];
    let probs = dist.cells();
    let mut acc = 0.0;
    let mut last = CELLS[0];
    for (cell, p) in CELLS.iter().zip(probs) {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = *cell;
        if u < acc {
            return *cell;
        }
    }
    // Rounding left the cumulative sum just below 1; zero-probability
    // cells are never selected.
    last
}

pub fn simulate_ensemble(
    model: &CorrelationModel,
    schedule: &[SettingPair],
    n_per_pair: usize,
    seed: u64,
) -> Result<Ensemble> {
    if n_per_pair == 0 {
        return Err(Error::InvalidArgument("n_per_pair must be at least 1".into()));
    }
    let dists = schedule
        .iter()
        .map(|p| model.distribution(&p.alice, &p.bob))
        .collect::<Result<Vec<_>>>()?;
    let filler = TrialRecord { index: 0, pair: 0, alice: Outcome::Plus, bob: Outcome::Plus };
    let mut trials = vec![filler; schedule.len() * n_per_pair];
    for (p, (dist, block)) in dists.iter().zip(trials.chunks_mut(n_per_pair)).enumerate() {
        block.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let first = c * CHUNK;
            let mut us = vec![0.0; chunk.len()];
            rng::fill_uniforms(seed, p as u64, first as u64, &mut us);
            for (k, (t, u)) in chunk.iter_mut().zip(us).enumerate() {
                let (alice, bob) = sample(dist, u);
                *t = TrialRecord {
                    index: (p * n_per_pair + first + k) as u64,
                    pair: p as u32,
                    alice,
                    bob,
                };
            }
        });
    }
    Ok(Ensemble { seed, model: model.clone(), schedule: schedule.to_vec(), trials })
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }

    /// Unbiased sample standard deviation over √n; zero for a single sample.
    fn stderr(&self) -> Option<f64> {
        let mean = self.mean()?;
        if self.n < 2 {
            return Some(0.0);
        }
        let n = self.n as f64;
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        Some((var / n).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub n: u64,
}

/// Sample mean of `alice · bob` over trials at `pair`.
pub fn estimate_correlation(ensemble: &Ensemble, pair: &SettingPair) -> Result<CorrelationEstimate> {
    let mut m = Moments::default();
    for t in ensemble.matching(pair)? {
        m.push(t.alice.value() * t.bob.value());
    }
    match (m.mean(), m.stderr()) {
        (Some(estimate), Some(stderr)) => Ok(CorrelationEstimate { estimate, stderr, n: m.n }),
        _ => Err(Error::EmptySelection(pair.to_string())),
    }
}

/// Fraction of trials at `pair` where `party` obtained `+1`.
pub fn plus_frequency(ensemble: &Ensemble, pair: &SettingPair, party: Party) -> Result<f64> {
    let mut m = Moments::default();
    for t in ensemble.matching(pair)? {
        let o = match party {
            Party::Alice => t.alice,
            Party::Bob => t.bob,
        };
        m.push(if o == Outcome::Plus { 1.0 } else { 0.0 });
    }
    m.mean().ok_or_else(|| Error::EmptySelection(pair.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshEstimate {
    pub value: f64,
    pub stderr: f64,
    pub correlations: [CorrelationEstimate; 4],
}

pub fn chsh_estimate(ensemble: &Ensemble, settings: &ChshSettings) -> Result<ChshEstimate> {
    let pairs = settings.pairs();
    let mut correlations = [CorrelationEstimate { estimate: 0.0, stderr: 0.0, n: 0 }; 4];
    for (c, p) in correlations.iter_mut().zip(&pairs) {
        *c = estimate_correlation(ensemble, p)?;
    }
    let [ab, abp, apb, apbp] = correlations.map(|c| c.estimate);
    let stderr = correlations.iter().map(|c| c.stderr * c.stderr).sum::<f64>().sqrt();
    Ok(ChshEstimate { value: ab + abp + apb - apbp, stderr, correlations })
}

/// The other party's outcomes, split by `by_party`'s `+1` and `−1` results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub pair: SettingPair,
    pub by_party: Party,
    pub count_plus: u64,
    pub count_minus: u64,
    pub avg_given_plus: Option<f64>,
    pub avg_given_minus: Option<f64>,
    pub stderr_plus: Option<f64>,
    pub stderr_minus: Option<f64>,
    /// Conservation targets from the reference state, when one was given
    /// and the pair carries angles.
    pub expected_plus: Option<f64>,
    pub expected_minus: Option<f64>,
}

impl PartitionReport {
    /// Largest `|observed − expected|` over the non-empty partitions.
    pub fn max_deviation(&self) -> Option<f64> {
        [(self.avg_given_plus, self.expected_plus), (self.avg_given_minus, self.expected_minus)]
            .into_iter()
            .filter_map(|(got, want)| Some((got? - want?).abs()))
            .reduce(f64::max)
    }
}

pub fn partition_analysis(
    ensemble: &Ensemble,
    pair: &SettingPair,
    by_party: Party,
    reference: Option<&BellState>,
) -> Result<PartitionReport> {
    let mut plus = Moments::default();
    let mut minus = Moments::default();
    for t in ensemble.matching(pair)? {
        let (mine, theirs) = match by_party {
            Party::Alice => (t.alice, t.bob),
            Party::Bob => (t.bob, t.alice),
        };
        match mine {
            Outcome::Plus => plus.push(theirs.value()),
            Outcome::Minus => minus.push(theirs.value()),
        }
    }
    let expected = |o: Outcome| Some(conditional_average(reference?, pair.relative_angle()?, o));
    Ok(PartitionReport {
        pair: *pair,
        by_party,
        count_plus: plus.n,
        count_minus: minus.n,
        avg_given_plus: plus.mean(),
        avg_given_minus: minus.mean(),
        stderr_plus: plus.stderr(),
        stderr_minus: minus.stderr(),
        expected_plus: expected(Outcome::Plus),
        expected_minus: expected(Outcome::Minus),
    })
}

/// Trials whose outcome pair is impossible under `state` at the trial's
/// settings. For equal settings these are exactly the trials that break
/// trial-by-trial conservation. Pairs without angles are skipped.
pub fn count_conservation_violations(ensemble: &Ensemble, state: &BellState) -> u64 {
    let impossible: Vec<Option<JointDistribution>> = ensemble
        .schedule
        .iter()
        .map(|p| Some(joint_distribution(state, p.alice.angle?, p.bob.angle?)))
        .collect();
    ensemble
        .trials
        .iter()
        .filter(|t| impossible[t.pair as usize].is_some_and(|d| d.prob(t.alice, t.bob) == 0.0))
        .count() as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub partition: PartitionReport,
    pub deviation: Option<f64>,
    /// Combined standard error of the compared partition averages.
    pub stderr: Option<f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub state: BellState,
    pub n_per_pair: usize,
    pub seed: u64,
    pub z_threshold: f64,
    pub entries: Vec<ScanEntry>,
    pub max_deviation: f64,
    pub worst_pair: Option<usize>,
    /// No pair deviates from its conservation target by more than
    /// `z_threshold` standard errors.
    pub consistent: bool,
}

/// Simulates the four CHSH pairs and compares Bob's partition averages
/// (split by Alice's outcome) with the conservation targets of `state`.
pub fn conservation_violation_scan(
    model: &CorrelationModel,
    state: &BellState,
    settings: &ChshSettings,
    n_per_pair: usize,
    seed: u64,
    z_threshold: f64,
) -> Result<ScanReport> {
    settings.validate()?;
    if !settings.has_angles() {
        return Err(Error::InvalidSettings("conservation targets need angles on all four settings".into()));
    }
    let ensemble = simulate_ensemble(model, &settings.pairs(), n_per_pair, seed)?;
    scan_ensemble(&ensemble, state, settings, z_threshold)
}

/// The analysis half of [`conservation_violation_scan`], for an ensemble
/// that already contains the four CHSH pairs.
pub fn scan_ensemble(
    ensemble: &Ensemble,
    state: &BellState,
    settings: &ChshSettings,
    z_threshold: f64,
) -> Result<ScanReport> {
    if !settings.has_angles() {
        return Err(Error::InvalidSettings("conservation targets need angles on all four settings".into()));
    }
    let pairs = settings.pairs();
    let mut entries = Vec::with_capacity(4);
    for pair in &pairs {
        let partition = partition_analysis(ensemble, pair, Party::Alice, Some(state))?;
        let deviation = partition.max_deviation();
        let stderr = match (partition.stderr_plus, partition.stderr_minus) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let flagged = match (deviation, stderr) {
            (Some(d), Some(s)) => d > 1e-12 && d > z_threshold * s,
            _ => false,
        };
        entries.push(ScanEntry { partition, deviation, stderr, flagged });
    }
    let mut max_deviation = 0.0;
    let mut worst_pair = None;
    for (i, e) in entries.iter().enumerate() {
        if let Some(d) = e.deviation {
            if worst_pair.is_none() || d > max_deviation {
                max_deviation = d;
                worst_pair = Some(i);
            }
        }
    }
    let consistent = entries.iter().all(|e| !e.flagged);
    let n_per_pair = entries.iter().map(|e| (e.partition.count_plus + e.partition.count_minus) as usize).min().unwrap_or(0);
    Ok(ScanReport {
        state: *state,
        n_per_pair,
        seed: ensemble.seed(),
        z_threshold,
        entries,
        max_deviation,
        worst_pair,
        consistent,
    })
}
