//! Acceptance criteria, one pass/fail line each. Run with
//! `cargo test -p bellscope-cli --test acceptance`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_8, PI, SQRT_2, TAU};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use bellscope_core::ensemble::rng::uniform;
use bellscope_core::{
    chsh_value, classical_bound_bruteforce, conservation_deviation, estimate_correlation, generalized_pr_chsh,
    no_signaling_check, nprf_marginal_check, optimize_chsh, partition_analysis, simulate_ensemble,
    solve_conservation_state, su2_invariance_deviation, Angle, Axis, BellLabel, BellState, ChshSettings,
    CorrelationModel, GeneralizedPrModel, LhvModel, OptimizeMode, Parity, Party, Realization, ReplacedCell,
    SettingLabel, SettingPair,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn tsirelson() -> Outcome {
    const TOL: f64 = 1e-12;
    let singlet = chsh_value(
        &CorrelationModel::Quantum(BellState::singlet()),
        &ChshSettings::from_angles(FRAC_PI_4, -FRAC_PI_4, 0.0, FRAC_PI_2),
    )
    .map_err(|e| e.to_string())?
    .value;
    let photon = chsh_value(
        &CorrelationModel::Quantum(BellState::new(BellLabel::PhiPlus, Realization::Photon)),
        &ChshSettings::from_angles(FRAC_PI_8, -FRAC_PI_8, 0.0, FRAC_PI_4),
    )
    .map_err(|e| e.to_string())?
    .value;
    let d1 = (singlet + 2.0 * SQRT_2).abs();
    let d2 = (photon - 2.0 * SQRT_2).abs();
    check(d1 <= TOL && d2 <= TOL, format!("singlet {singlet:.15} (dev {d1:.1e}), photon {photon:.15} (dev {d2:.1e}), tol {TOL:.0e}"))
}

fn bound_ordering() -> Outcome {
    const TOL: f64 = 1e-6;
    let classical = classical_bound_bruteforce();
    let all_pm2 = classical.strategy_values.iter().all(|&v| v == 2.0 || v == -2.0);
    let pr = chsh_value(&CorrelationModel::Pr, &ChshSettings::discrete()).map_err(|e| e.to_string())?.value;
    let mut worst: f64 = 0.0;
    for (label, r, mode) in [
        (BellLabel::PsiMinus, Realization::SpinHalf, OptimizeMode::Minimize),
        (BellLabel::PhiPlus, Realization::Photon, OptimizeMode::Maximize),
        (BellLabel::PhiMinus, Realization::SpinHalf, OptimizeMode::Maximize),
    ] {
        let m = CorrelationModel::Quantum(BellState::new(label, r));
        let v = optimize_chsh(&m, mode, 16, 50).map_err(|e| e.to_string())?.value;
        worst = worst.max((v.abs() - 2.0 * SQRT_2).abs());
    }
    check(
        classical.max_abs == 2.0 && all_pm2 && pr == 4.0 && worst <= TOL,
        format!("classical {}, pr {pr}, optimizer |2√2| dev {worst:.1e} (tol {TOL:.0e})", classical.max_abs),
    )
}

fn solver_equivalence() -> Outcome {
    const TOL: f64 = 1e-12;
    let mut worst: f64 = 0.0;
    for parity in [Parity::Unlike, Parity::Like] {
        for i in 0..721 {
            let t = TAU * i as f64 / 720.0;
            let (c2, s2) = (t.cos().powi(2) / 2.0, t.sin().powi(2) / 2.0);
            let want = match parity {
                Parity::Unlike => [s2, c2, c2, s2],
                Parity::Like => [c2, s2, s2, c2],
            };
            let got = solve_conservation_state(Angle::from_radians(t), parity).cells();
            for (g, w) in got.iter().zip(want) {
                worst = worst.max((g - w).abs());
            }
        }
    }
    check(worst <= TOL, format!("721 angles x 2 parities, max dev {worst:.1e} (tol {TOL:.0e})"))
}

fn no_signaling_suite() -> Outcome {
    const TOL: f64 = 1e-12;
    let seed = 0x5eed;
    let mut k = 0u64;
    let mut draw = || {
        k += 1;
        uniform(seed, 7, k)
    };
    let mut settings = || {
        let mut a = [0.0; 4];
        for x in &mut a {
            *x = TAU * draw();
        }
        ChshSettings::from_angles(a[0], a[1], a[2], a[3])
    };
    let (mut ns, mut nprf) = (0.0f64, 0.0f64);
    let mut models = Vec::new();
    for label in BellLabel::ALL {
        for r in [Realization::SpinHalf, Realization::Photon] {
            models.push(CorrelationModel::Quantum(BellState::new(label, r)));
        }
    }
    models.push(CorrelationModel::Pr);
    for i in 0..=100 {
        for cell in [ReplacedCell::First, ReplacedCell::Fourth] {
            let m = GeneralizedPrModel::from_c(i as f64 / 200.0, cell).map_err(|e| e.to_string())?;
            models.push(CorrelationModel::GeneralizedPr(m));
        }
    }
    for m in &models {
        for _ in 0..20 {
            let s = settings();
            ns = ns.max(no_signaling_check(m, &s, TOL).map_err(|e| e.to_string())?.max_violation);
            nprf = nprf.max(nprf_marginal_check(m, &s, TOL).map_err(|e| e.to_string())?.max_deviation);
        }
    }
    let mut lhv_ns = 0.0f64;
    let mut lhv_nprf = 0.0f64;
    let mut scores = || {
        let mut w = [0.0; 16];
        for x in &mut w {
            *x = 0.01 + uniform(seed, 8, k);
            k += 1;
        }
        w
    };
    for _ in 0..1000 {
        let w = scores();
        let s = ChshSettings::discrete();
        let m = CorrelationModel::Lhv(LhvModel::from_scores(w).map_err(|e| e.to_string())?);
        lhv_ns = lhv_ns.max(no_signaling_check(&m, &s, TOL).map_err(|e| e.to_string())?.max_violation);
        // Flip-symmetric mixtures: strategy i paired with its complement 15 − i.
        let sym: [f64; 16] = std::array::from_fn(|i| w[i] + w[15 - i]);
        let m = CorrelationModel::Lhv(LhvModel::from_scores(sym).map_err(|e| e.to_string())?);
        lhv_nprf = lhv_nprf.max(nprf_marginal_check(&m, &s, TOL).map_err(|e| e.to_string())?.max_deviation);
    }
    let worst = ns.max(nprf).max(lhv_ns).max(lhv_nprf);
    check(
        worst <= TOL,
        format!(
            "{} quantum/PR/gen-PR models x 20 settings + 1000 LHV: no-signaling {:.1e}, 1/2-marginals {:.1e}, lhv {:.1e}/{:.1e} (tol {TOL:.0e})",
            models.len(),
            ns,
            nprf,
            lhv_ns,
            lhv_nprf
        ),
    )
}

fn monte_carlo() -> Outcome {
    const TOL: f64 = 5e-3;
    const N: usize = 1_000_000;
    let mut worst_corr: f64 = 0.0;
    let mut worst_part: f64 = 0.0;
    for (state, target) in [
        (BellState::singlet(), (|t: f64| -t.cos()) as fn(f64) -> f64),
        (BellState::photon_pair(), |t: f64| t.cos().powi(2) - t.sin().powi(2)),
    ] {
        let model = CorrelationModel::Quantum(state);
        for (k, theta) in [0.0, FRAC_PI_8, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2].into_iter().enumerate() {
            let p = SettingPair::new(SettingLabel::a().at(theta), SettingLabel::b().at(0.0));
            let ens = simulate_ensemble(&model, &[p], N, 2024 + k as u64).map_err(|e| e.to_string())?;
            let est = estimate_correlation(&ens, &p).map_err(|e| e.to_string())?.estimate;
            let want = target(theta);
            worst_corr = worst_corr.max((est - want).abs());
            for party in [Party::Alice, Party::Bob] {
                let r = partition_analysis(&ens, &p, party, None).map_err(|e| e.to_string())?;
                let plus = r.avg_given_plus.ok_or("empty + partition")?;
                let minus = r.avg_given_minus.ok_or("empty − partition")?;
                worst_part = worst_part.max((plus - want).abs()).max((minus + want).abs());
            }
        }
    }
    check(
        worst_corr <= TOL && worst_part <= TOL,
        format!("n = 1e6 per pair, 5 angles x 2 states: correlation dev {worst_corr:.1e}, partition dev {worst_part:.1e} (tol {TOL:.0e})"),
    )
}

fn pr_spectrum() -> Outcome {
    const TOL: f64 = 1e-12;
    let model = |c: f64, cell| GeneralizedPrModel::from_c(c, cell).map_err(|e| e.to_string());
    let lo = generalized_pr_chsh(&model(0.0, ReplacedCell::First)?);
    let hi = generalized_pr_chsh(&model(0.5, ReplacedCell::First)?);
    let mut worst: f64 = 0.0;
    let mut increasing = true;
    let mut prev = f64::NEG_INFINITY;
    let assignment = ChshSettings::pr_conservation_assignment(0.0);
    for i in 0..=100 {
        let c = i as f64 / 200.0;
        for cell in [ReplacedCell::First, ReplacedCell::Fourth] {
            let m = model(c, cell)?;
            let generic = chsh_value(&CorrelationModel::GeneralizedPr(m), &ChshSettings::discrete())
                .map_err(|e| e.to_string())?
                .value;
            worst = worst.max((generic - generalized_pr_chsh(&m)).abs());
        }
        let dev = conservation_deviation(
            &CorrelationModel::GeneralizedPr(model(c, ReplacedCell::First)?),
            &BellState::singlet(),
            &assignment,
        )
        .map_err(|e| e.to_string())?
        .max_deviation;
        increasing &= dev > prev;
        prev = dev;
    }
    check(
        lo == 2.0 && hi == 4.0 && worst <= TOL && increasing,
        format!("endpoints {lo}/{hi}, formula vs generic {worst:.1e} (tol {TOL:.0e}), deviation strictly increasing: {increasing}"),
    )
}

fn su2_table() -> Outcome {
    const TOL: f64 = 1e-12;
    const SEEN: f64 = 1e-3;
    let thetas: Vec<f64> = (0..=360).map(|i| PI * i as f64 / 360.0).collect();
    let mut bad = Vec::new();
    let mut invariant_worst: f64 = 0.0;
    for label in BellLabel::ALL {
        for axis in Axis::ALL {
            let expected = matches!(
                (label, axis),
                (BellLabel::PsiMinus, _) | (BellLabel::PsiPlus, Axis::Z) | (BellLabel::PhiMinus, Axis::X) | (BellLabel::PhiPlus, Axis::Y)
            );
            let worst = thetas.iter().map(|&t| su2_invariance_deviation(label, axis, t)).fold(0.0, f64::max);
            if expected {
                invariant_worst = invariant_worst.max(worst);
                if worst > TOL {
                    bad.push(format!("{label}/{axis:?} {worst:.1e}"));
                }
            } else if worst <= SEEN {
                bad.push(format!("{label}/{axis:?} max {worst:.1e}"));
            }
        }
    }
    check(
        bad.is_empty(),
        format!("6 invariant pairs max dev {invariant_worst:.1e} (tol {TOL:.0e}), 6 others exceed {SEEN:.0e}{}", if bad.is_empty() { String::new() } else { format!("; failing: {}", bad.join(", ")) }),
    )
}

fn simulate_files(dir: &Path, threads: &str) -> Result<(Vec<u8>, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_bellscope"))
        .args(["simulate", "--seed", "20240917", "--n", "50000", "--out"])
        .arg(dir)
        .env("BELLSCOPE_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("simulate failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let read = |n: &str| std::fs::read(dir.join(n)).map_err(|e| e.to_string());
    Ok((read("ensemble.csv")?, read("ensemble.json")?))
}

fn reproducibility() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs = [("1", "run1"), ("1", "run2"), ("4", "run3"), ("4", "run4")];
    let mut files = Vec::new();
    for (threads, name) in runs {
        files.push(simulate_files(&tmp.path().join(name), threads)?);
    }
    let same = files.windows(2).all(|w| w[0] == w[1]);
    check(
        same,
        format!("4 runs (threads 1,1,4,4), {} + {} bytes, identical: {same}", files[0].0.len(), files[0].1.len()),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 analytic Tsirelson values", Duration::from_secs(1), tsirelson),
        ("2 bound ordering 2 < 2√2 < 4", Duration::from_secs(5), bound_ordering),
        ("3 conservation solver equivalence", Duration::from_secs(1), solver_equivalence),
        ("4 no-signaling and 1/2-marginal suites", Duration::from_secs(5), no_signaling_suite),
        ("5 Monte Carlo convergence", Duration::from_secs(30), monte_carlo),
        ("6 generalized PR spectrum", Duration::from_secs(1), pr_spectrum),
        ("7 SU(2) invariance table", Duration::from_secs(1), su2_table),
        ("8 ensemble reproducibility", Duration::from_secs(60), reproducibility),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) => (elapsed <= budget, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] criterion {name}: {detail}; {:.3}s (budget {}s)",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 8 acceptance criteria passed");
}
