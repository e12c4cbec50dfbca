use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use bellscope_core::ensemble::io::{write_csv, write_json};
use bellscope_core::primitives::format_f64;
use bellscope_core::{
    chsh_estimate, chsh_value, conservation_deviation, count_conservation_violations, estimate_correlation,
    generalized_pr_chsh, optimize_chsh, partition_analysis, plus_frequency, scan_ensemble, simulate_ensemble,
    ChshSettings, GeneralizedPrModel, Outcome, Party, ReplacedCell, SettingLabel, SettingPair,
};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::report::{ChshResult, PairSummary, ReportEnvelope, Results, SimulateResult};

pub const ENSEMBLE_CSV: &str = "ensemble.csv";
pub const ENSEMBLE_JSON: &str = "ensemble.json";
pub const REPORT_JSON: &str = "report.json";
pub const CORRELATIONS_CSV: &str = "correlations.csv";
pub const SCAN_CSV: &str = "scan.csv";
pub const SPECTRUM_CSV: &str = "pr_spectrum.csv";

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Config(format!("csv output: {e}"))
}

fn create(dir: &Path, name: &str) -> CliResult<BufWriter<File>> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    let f = File::create(&path).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

/// Writes a CSV table to `<out>/<name>` when an output directory is set,
/// otherwise to `stdout`.
fn emit_table(cfg: &ExperimentConfig, name: &str, stdout: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut buf = Vec::new();
    {
        let mut w = csv_writer(&mut buf);
        w.write_record(header).map_err(csv_err)?;
        for r in rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
    }
    match cfg.output.dir.as_deref() {
        Some(dir) => {
            let mut f = create(dir, name)?;
            f.write_all(&buf)?;
            f.flush()?;
        }
        None => stdout.write_all(&buf)?,
    }
    Ok(())
}

pub fn chsh(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> CliResult<ReportEnvelope> {
    let (mode, report) = match cfg.optimizer.mode {
        None => ("evaluate".to_string(), chsh_value(&cfg.model, &cfg.chsh_settings())?),
        Some(m) => {
            if !cfg.model.is_angle_parameterized() {
                return Err(CliError::Model(format!(
                    "cannot optimize settings for a {} model: its correlations do not depend on angles",
                    cfg.model.kind()
                )));
            }
            let name = serde_json::to_value(m).expect("mode serializes");
            let report = optimize_chsh(&cfg.model, m, cfg.optimizer.grid_points, cfg.optimizer.refine_iters)?;
            (name.as_str().unwrap_or_default().to_string(), report)
        }
    };
    let pairs = report.settings.pairs();
    let env = ReportEnvelope::new(
        cfg.clone(),
        Results::Chsh(ChshResult { mode, report: report.clone(), model_kind: cfg.model.kind().to_string() }),
    );
    let json = env.to_json();
    stdout.write_all(json.as_bytes())?;
    if let Some(dir) = cfg.output.dir.as_deref() {
        let mut f = create(dir, REPORT_JSON)?;
        f.write_all(json.as_bytes())?;
        f.flush()?;
        let rows: Vec<Vec<String>> = pairs
            .iter()
            .zip(report.correlations)
            .map(|(p, e)| vec![p.alice.to_string(), p.bob.to_string(), format_f64(e)])
            .collect();
        let mut sink = std::io::sink();
        emit_table(cfg, CORRELATIONS_CSV, &mut sink, &["alice_setting", "bob_setting", "correlation"], &rows)?;
    }
    Ok(env)
}

/// Sweeps `α = θ`, `β = 0` and tabulates the model's joint distribution.
pub fn scan(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let s = cfg.scan;
    let last = (s.points - 1) as f64;
    let mut rows = Vec::with_capacity(s.points);
    for i in 0..s.points {
        let theta = s.start + (s.end - s.start) * i as f64 / last;
        let d = cfg.model.distribution(&SettingLabel::a().at(theta), &SettingLabel::b().at(0.0))?;
        let avg = d.conditional_average(Party::Alice, Outcome::Plus).map_or_else(String::new, format_f64);
        rows.push(vec![
            format_f64(theta),
            format_f64(d.pp),
            format_f64(d.pm),
            format_f64(d.mp),
            format_f64(d.mm),
            format_f64(d.correlation()),
            avg,
        ]);
    }
    emit_table(
        cfg,
        SCAN_CSV,
        stdout,
        &["theta", "pPP", "pPM", "pMP", "pMM", "correlation", "conditional_avg_plus"],
        &rows,
    )
}

/// Tabulates the generalized-PR family over `c ∈ [0, 1/2]`. The deviation
/// column compares the first-cell family with the reference state's
/// conservation targets at the PR conservation assignment.
pub fn pr_spectrum(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let n = cfg.spectrum.points;
    let assignment = ChshSettings::pr_conservation_assignment(0.0);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let c = 0.5 * i as f64 / (n - 1) as f64;
        let first = GeneralizedPrModel::from_c(c, ReplacedCell::First)?;
        let fourth = GeneralizedPrModel::from_c(c, ReplacedCell::Fourth)?;
        let dev = conservation_deviation(&bellscope_core::CorrelationModel::GeneralizedPr(first), &cfg.state, &assignment)?;
        rows.push(vec![
            format_f64(first.c()),
            format_f64(first.e()),
            format_f64(generalized_pr_chsh(&first)),
            format_f64(generalized_pr_chsh(&fourth)),
            format_f64(dev.max_deviation),
        ]);
    }
    emit_table(
        cfg,
        SPECTRUM_CSV,
        stdout,
        &["c", "e", "chsh_first_cell", "chsh_fourth_cell", "conservation_deviation"],
        &rows,
    )
}

pub fn simulate(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> CliResult<ReportEnvelope> {
    let dir = cfg.require_out_dir()?;
    let settings = cfg.chsh_settings();
    let schedule: [SettingPair; 4] = settings.pairs();
    let ens = simulate_ensemble(&cfg.model, &schedule, cfg.n_per_pair, cfg.seed)?;

    let mut f = create(dir, ENSEMBLE_CSV)?;
    write_csv(&ens, &mut f)?;
    f.flush()?;
    let mut f = create(dir, ENSEMBLE_JSON)?;
    write_json(&ens, &mut f)?;
    f.flush()?;

    let analytic = chsh_value(&cfg.model, &settings)?;
    let mut pairs = Vec::with_capacity(4);
    for (p, exact) in schedule.iter().zip(analytic.correlations) {
        pairs.push(PairSummary {
            pair: *p,
            correlation: estimate_correlation(&ens, p)?,
            analytic_correlation: exact,
            alice_plus_frequency: plus_frequency(&ens, p, Party::Alice)?,
            bob_plus_frequency: plus_frequency(&ens, p, Party::Bob)?,
            partition_by_alice: partition_analysis(&ens, p, Party::Alice, Some(&cfg.state))?,
            partition_by_bob: partition_analysis(&ens, p, Party::Bob, Some(&cfg.state))?,
        });
    }
    let result = SimulateResult {
        n_per_pair: cfg.n_per_pair,
        seed: cfg.seed,
        pairs,
        chsh: chsh_estimate(&ens, &settings)?,
        analytic_chsh: analytic.value,
        conservation_scan: scan_ensemble(&ens, &cfg.state, &settings, cfg.tolerances.z_threshold)?,
        violating_trials: count_conservation_violations(&ens, &cfg.state),
        ensemble_csv: ENSEMBLE_CSV.to_string(),
        ensemble_json: ENSEMBLE_JSON.to_string(),
    };
    let env = ReportEnvelope::new(cfg.clone(), Results::Simulate(result));
    let json = env.to_json();
    let mut f = create(dir, REPORT_JSON)?;
    f.write_all(json.as_bytes())?;
    f.flush()?;
    stdout.write_all(json.as_bytes())?;
    Ok(env)
}
