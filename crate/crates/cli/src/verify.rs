//! The self-check suite behind `bellscope verify`.

use std::f64::consts::{PI, SQRT_2, TAU};

use bellscope_core::ensemble::rng::uniform;
use bellscope_core::models::pr_eigenbasis_contradiction;
use bellscope_core::quantum::joint_distribution_hilbert;
use bellscope_core::tolerances::SU2_NON_INVARIANT;
use bellscope_core::{
    bound_ordering_report, chsh_value, conservation_deviation, generalized_pr_chsh, no_signaling_check,
    nprf_marginal_check, solve_conservation_state, su2_invariance_deviation, Angle, Axis, BellLabel, BellState,
    ChshSettings, CorrelationModel, GeneralizedPrModel, LhvModel, Parity, Realization, ReplacedCell,
};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::report::{CheckResult, Su2Row, VerifySummary};

const RANDOM_SETTINGS: usize = 200;
const RANDOM_LHV: usize = 1000;
const SU2_THETAS: usize = 201;

// Stream ids for the verification draws, disjoint from ensemble pair ids.
const STREAM_SETTINGS: u64 = 1 << 40;
const STREAM_LHV: u64 = (1 << 40) + 1;

struct Check {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    failed_at: Option<String>,
    ok: bool,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Check { name, tolerance, worst: 0.0, failed_at: None, ok: true }
    }

    /// Records a deviation that must stay within the tolerance.
    fn within(&mut self, deviation: f64, what: impl FnOnce() -> String) {
        self.observe(deviation, deviation <= self.tolerance, what);
    }

    fn observe(&mut self, deviation: f64, ok: bool, what: impl FnOnce() -> String) {
        if deviation > self.worst || deviation.is_nan() {
            self.worst = deviation;
        }
        if !ok && self.ok {
            self.ok = false;
            self.failed_at = Some(what());
        }
    }

    fn finish(self, detail: String) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            passed: self.ok,
            deviation: self.worst,
            tolerance: self.tolerance,
            detail: self.failed_at.map_or(detail, |w| format!("first failure: {w}")),
        }
    }
}

fn random_settings(seed: u64, count: usize) -> Vec<ChshSettings> {
    (0..count as u64)
        .map(|k| {
            let u = |j: u64| TAU * uniform(seed, STREAM_SETTINGS, 4 * k + j);
            ChshSettings::from_angles(u(0), u(1), u(2), u(3))
        })
        .collect()
}

fn random_lhv(seed: u64, k: u64, symmetric: bool) -> LhvModel {
    let mut scores = [0.0; 16];
    for (i, s) in scores.iter_mut().enumerate() {
        *s = uniform(seed, STREAM_LHV, 16 * k + i as u64);
    }
    if symmetric {
        // Pair every strategy with its all-outcomes-flipped partner.
        let base = scores;
        for (i, s) in scores.iter_mut().enumerate() {
            *s = base[i] + base[15 - i];
        }
    }
    LhvModel::from_scores(scores).expect("positive scores")
}

fn all_states() -> Vec<BellState> {
    let mut v = Vec::new();
    for label in BellLabel::ALL {
        for r in [Realization::SpinHalf, Realization::Photon] {
            v.push(BellState::new(label, r));
        }
    }
    v
}

fn marginal_checks(
    name_ns: &'static str,
    name_nprf: Option<&'static str>,
    models: &[CorrelationModel],
    settings: &[ChshSettings],
    tol: f64,
) -> CliResult<Vec<CheckResult>> {
    let mut ns = Check::new(name_ns, tol);
    let mut nprf = name_nprf.map(|n| Check::new(n, tol));
    for m in models {
        for s in settings {
            let r = no_signaling_check(m, s, tol)?;
            ns.within(r.max_violation, || format!("{} model at {:?}", m.kind(), s.pairs().map(|p| p.to_string())));
            if let Some(c) = nprf.as_mut() {
                let r = nprf_marginal_check(m, s, tol)?;
                c.within(r.max_deviation, || format!("{} model at {:?}", m.kind(), s.pairs().map(|p| p.to_string())));
            }
        }
    }
    let detail = format!("{} models x {} settings", models.len(), settings.len());
    let mut out = vec![ns.finish(detail.clone())];
    if let Some(c) = nprf {
        out.push(c.finish(detail));
    }
    Ok(out)
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<VerifySummary> {
    let tol = cfg.tolerances.analytic;
    let mut checks = Vec::new();

    let mut t = Check::new("tsirelson-analytic", tol);
    let singlet = chsh_value(&CorrelationModel::Quantum(BellState::singlet()), &ChshSettings::singlet_optimal())?;
    t.within((singlet.value + 2.0 * SQRT_2).abs(), || format!("singlet value {}", singlet.value));
    let photon = chsh_value(&CorrelationModel::Quantum(BellState::photon_pair()), &ChshSettings::photon_optimal())?;
    t.within((photon.value - 2.0 * SQRT_2).abs(), || format!("photon value {}", photon.value));
    checks.push(t.finish(format!("singlet {}, photon {}", singlet.value, photon.value)));

    let bounds = bound_ordering_report();
    let mut b = Check::new("bound-ordering", cfg.tolerances.optimizer);
    b.observe((bounds.classical - 2.0).abs(), bounds.classical == 2.0, || format!("classical {}", bounds.classical));
    b.observe((bounds.pr - 4.0).abs(), bounds.pr == 4.0, || format!("pr {}", bounds.pr));
    b.within((bounds.quantum - 2.0 * SQRT_2).abs(), || format!("quantum {}", bounds.quantum));
    b.observe(0.0, bounds.strictly_ordered, || "bounds not strictly ordered".into());
    checks.push(b.finish(format!("classical {}, quantum {}, pr {}", bounds.classical, bounds.quantum, bounds.pr)));

    let mut s = Check::new("solver-equivalence", tol);
    let n = cfg.scan.points;
    for parity in [Parity::Unlike, Parity::Like] {
        for i in 0..n {
            let theta = Angle::from_radians(TAU * i as f64 / (n - 1) as f64);
            let d = solve_conservation_state(theta, parity).max_abs_diff(&joint_distribution_hilbert(parity, theta));
            s.within(d, || format!("{parity:?} at theta {}", theta.radians()));
        }
    }
    checks.push(s.finish(format!("{n} angles, both parities")));

    let mut settings = random_settings(cfg.seed, RANDOM_SETTINGS);
    settings.push(ChshSettings::discrete());
    let angled: Vec<ChshSettings> = settings[..RANDOM_SETTINGS].to_vec();
    let quantum: Vec<CorrelationModel> = all_states().into_iter().map(CorrelationModel::Quantum).collect();
    checks.extend(marginal_checks("no-signaling:quantum", Some("nprf:quantum"), &quantum, &angled, tol)?);
    checks.extend(marginal_checks("no-signaling:pr", Some("nprf:pr"), &[CorrelationModel::Pr], &settings, tol)?);

    let spectrum_models: Vec<GeneralizedPrModel> = (0..cfg.spectrum.points)
        .flat_map(|i| {
            let c = 0.5 * i as f64 / (cfg.spectrum.points - 1) as f64;
            [ReplacedCell::First, ReplacedCell::Fourth].map(|cell| GeneralizedPrModel::from_c(c, cell))
        })
        .collect::<Result<_, _>>()?;
    let gpr: Vec<CorrelationModel> = spectrum_models.iter().map(|m| CorrelationModel::GeneralizedPr(*m)).collect();
    checks.extend(marginal_checks(
        "no-signaling:generalized-pr",
        Some("nprf:generalized-pr"),
        &gpr,
        &[ChshSettings::discrete()],
        tol,
    )?);

    // Generic mixtures of deterministic strategies do not signal but have
    // arbitrary marginals; outcome-flip-symmetric mixtures also have 1/2.
    let mut ns = Check::new("no-signaling:lhv", tol);
    let mut nprf = Check::new("nprf:lhv-symmetric", tol);
    for k in 0..RANDOM_LHV as u64 {
        let s = &settings[k as usize % settings.len()];
        let m = CorrelationModel::Lhv(random_lhv(cfg.seed, k, false));
        ns.within(no_signaling_check(&m, s, tol)?.max_violation, || format!("random lhv #{k}"));
        let m = CorrelationModel::Lhv(random_lhv(cfg.seed, k, true));
        nprf.within(nprf_marginal_check(&m, s, tol)?.max_deviation, || format!("symmetric lhv #{k}"));
    }
    checks.push(ns.finish(format!("{RANDOM_LHV} random mixtures")));
    checks.push(nprf.finish(format!("{RANDOM_LHV} flip-symmetric mixtures")));

    let mut su2 = Check::new("su2-invariance", tol);
    let mut su2_table = Vec::new();
    for label in BellLabel::ALL {
        for axis in Axis::ALL {
            let expected = match label {
                BellLabel::PsiMinus => true,
                BellLabel::PsiPlus => axis == Axis::Z,
                BellLabel::PhiMinus => axis == Axis::X,
                BellLabel::PhiPlus => axis == Axis::Y,
            };
            let worst = (0..SU2_THETAS)
                .map(|i| su2_invariance_deviation(label, axis, PI * i as f64 / (SU2_THETAS - 1) as f64))
                .fold(0.0, f64::max);
            if expected {
                su2.within(worst, || format!("{label} should be invariant about {axis:?}"));
            } else {
                su2.observe(0.0, worst > SU2_NON_INVARIANT, || format!("{label} should not be invariant about {axis:?}"));
            }
            su2_table.push(Su2Row {
                state: label.to_string(),
                axis: format!("{axis:?}").to_lowercase(),
                max_deviation: worst,
                expected_invariant: expected,
            });
        }
    }
    checks.push(su2.finish("4 states x 3 axes".into()));

    let mut sp = Check::new("pr-spectrum", tol);
    let assignment = ChshSettings::pr_conservation_assignment(0.0);
    let mut prev_dev = f64::NEG_INFINITY;
    for m in &spectrum_models {
        let generic = chsh_value(&CorrelationModel::GeneralizedPr(*m), &ChshSettings::discrete())?.value;
        sp.within((generic - generalized_pr_chsh(m)).abs(), || format!("c = {}", m.c()));
        if m.replaced_cell() == ReplacedCell::First {
            let dev = conservation_deviation(&CorrelationModel::GeneralizedPr(*m), &BellState::singlet(), &assignment)?
                .max_deviation;
            sp.observe(0.0, dev > prev_dev, || format!("deviation not increasing at c = {}", m.c()));
            prev_dev = dev;
        }
    }
    let ends = [
        (GeneralizedPrModel::from_c(0.0, ReplacedCell::First)?, 2.0),
        (GeneralizedPrModel::from_c(0.5, ReplacedCell::First)?, 4.0),
    ];
    for (m, want) in ends {
        let v = generalized_pr_chsh(&m);
        sp.observe((v - want).abs(), v == want, || format!("endpoint c = {} gives {v}", m.c()));
    }
    checks.push(sp.finish(format!("{} values of c", cfg.spectrum.points)));

    let mut eb = Check::new("pr-eigenbasis-contradiction", cfg.tolerances.optimizer);
    for parity in [Parity::Unlike, Parity::Like] {
        let r = pr_eigenbasis_contradiction(parity);
        eb.within(r.residual, || format!("{parity:?} fit residual {}", r.residual));
        eb.within((r.contradiction - 2.0).abs(), || format!("{parity:?} contradiction {}", r.contradiction));
    }
    checks.push(eb.finish("first-cell contradiction of 2 for both parities".into()));

    let mut own = vec![cfg.chsh_settings()];
    if cfg.model.is_angle_parameterized() {
        own.extend(angled.iter().copied());
    }
    checks.extend(marginal_checks("no-signaling:config-model", None, std::slice::from_ref(&cfg.model), &own, tol)?);

    Ok(VerifySummary { passed: checks.iter().all(|c| c.passed), checks, bounds, su2_table })
}
