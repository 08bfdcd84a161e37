//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use stratdp::analysis::{
    reciprocal_moments_by_quadrature, reciprocal_normal_moments, theoretical_width_ratio,
    twr_lower_bound,
};
use stratdp::ci::ledger_rho;
use stratdp::dp_ci::{difference_ci, run_algorithm, str_nz_pub_sz, DpOptions};
use stratdp::estimators::{non_private_ci, plug_in_design_variance_ci};
use stratdp::sim::{Experiment, ExperimentConfig, RhoRule, SimulationReport};
use stratdp::{AlgorithmTag, Design, PrivacyBudget, RandomStream, StratumCounts};

const PRIVATE: [AlgorithmTag; 3] = AlgorithmTag::PRIVATE;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn load(name: &str) -> ExperimentConfig {
    ExperimentConfig::from_path(examples().join(name)).expect("shipped config parses")
}

fn run_report(config: &ExperimentConfig) -> SimulationReport {
    Experiment::new(config.clone()).unwrap().run(false).unwrap().0
}

fn in_band(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

// 1. Table 4 top panel.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let report = run_report(&load("table4_top.cfg"));
    let secs = start.elapsed().as_secs_f64();
    let point = &report.points[0];
    let targets = [
        (AlgorithmTag::NonPrivate, 0.127, 0.01),
        (AlgorithmTag::StrNzPubSz, 0.228, 0.01),
        (AlgorithmTag::PopNzPubSz, 0.295, 0.01),
        (AlgorithmTag::StrNzPrivSz, 0.327, 0.02),
    ];
    let mut ok = secs <= 60.0;
    let mut parts = Vec::new();
    for (alg, width, tol) in targets {
        let s = point.get(alg).unwrap();
        ok &= (s.mean_width - width).abs() <= tol && in_band(s.coverage, 0.885, 0.915);
        parts.push(format!("{alg} w={:.4} cov={:.4}", s.mean_width, s.coverage));
    }
    check(ok, format!("Table 4 top panel: {}; {secs:.2}s", parts.join(", ")))
}

// 2. Table 4 middle panel.
fn criterion_2() -> Outcome {
    let report = run_report(&load("table4_middle.cfg"));
    let point = &report.points[0];
    let targets = [
        (AlgorithmTag::StrNzPubSz, 2.074),
        (AlgorithmTag::PopNzPubSz, 1.239),
        (AlgorithmTag::StrNzPrivSz, 3.168),
    ];
    let mut ok = in_band(point.get(AlgorithmTag::NonPrivate).unwrap().coverage, 0.885, 0.92);
    let mut parts = vec![format!("p={:.3}", report.population.proportion)];
    for (alg, wr) in targets {
        let s = point.get(alg).unwrap();
        ok &= (s.width_ratio / wr - 1.0).abs() <= 0.15 && in_band(s.coverage, 0.885, 0.92);
        parts.push(format!("{alg} WR={:.3} cov={:.4}", s.width_ratio, s.coverage));
    }
    check(ok, format!("Table 4 middle panel: {}", parts.join(", ")))
}

// 3. Width-ratio lower bounds.
fn criterion_3() -> Outcome {
    let b = PrivacyBudget::new(1.0 / 152.0).unwrap();
    let expected = [3f64.sqrt(), 5f64.sqrt(), (3.0 + 2.0 * 2f64.sqrt()).sqrt()];
    let mut worst_identity = 0.0_f64;
    for (alg, e) in PRIVATE.iter().zip(expected) {
        worst_identity = worst_identity.max((twr_lower_bound(152, &b, *alg).unwrap() - e).abs());
    }
    let mut rng = RandomStream::new(3, 3).rng();
    let mut violations = 0;
    for _ in 0..1000 {
        let big_n: u64 = rng.random_range(10..1_000_000);
        let n: u64 = rng.random_range(2..big_n);
        let p: f64 = rng.random_range(0.001..0.999);
        let rho = 10f64.powf(rng.random_range(-5.0..2.0));
        let split: f64 = rng.random_range(0.02..0.98);
        let b = PrivacyBudget::with_split(rho, split).unwrap();
        for alg in PRIVATE {
            let t = theoretical_width_ratio(big_n, n, p, &b, alg).unwrap();
            if t < twr_lower_bound(n, &b, alg).unwrap() {
                violations += 1;
            }
        }
    }
    check(
        worst_identity <= 1e-12 && violations == 0,
        format!(
            "TWR bounds: identity error {worst_identity:.1e}; {violations} violations over 1000 random points"
        ),
    )
}

// 4. Reciprocal-normal series against quadrature.
fn criterion_4() -> Outcome {
    let mut rng = RandomStream::new(4, 4).rng();
    let mut worst = 0.0_f64; // max of error / bound
    for _ in 0..50 {
        // mu plays the role of a sample size; the omitted k = 3 term is
        // 105 r^4 / mu, which exceeds 10 r^4 below mu ~ 10.5.
        let mu = 10f64.powf(rng.random_range(50f64.log10()..5000f64.log10()));
        let ratio: f64 = rng.random_range(0.01..0.2);
        let sigma = ratio * mu;
        let (q1, q2) = reciprocal_moments_by_quadrature(mu, sigma).unwrap();
        for k in 0..4 {
            let s = reciprocal_normal_moments(mu, sigma, k).unwrap();
            let bound = 10.0 * ratio.powi(2 * k as i32 + 2);
            let err = (s.mean - q1).abs().max((s.second_moment - q2).abs());
            worst = worst.max(err / bound);
        }
    }
    let mut limit_err = 0.0_f64;
    for mu in [2.0, 37.0, 152.0, 4000.0] {
        let (q1, q2) = reciprocal_moments_by_quadrature(mu, mu * 1e-7).unwrap();
        limit_err = limit_err.max((q1 - 1.0 / mu).abs()).max((q2 - 1.0 / (mu * mu)).abs());
    }
    check(
        worst <= 1.0 && limit_err <= 1e-10,
        format!(
            "series vs quadrature: max error/bound {worst:.3} over 50 draws x k=0..3; sigma->0 error {limit_err:.1e}"
        ),
    )
}

// 5. Bias-corrected binomial variance term.
fn criterion_5() -> Outcome {
    let mut rng = RandomStream::new(5, 5).rng();
    let draws = 1_000_000u64;
    let mut worst_z = 0.0_f64;
    for param in 0..10 {
        let n: u64 = rng.random_range(20..400);
        let big_n = n * rng.random_range(2..30);
        let c: u64 = rng.random_range(0..=n);
        let rho = 10f64.powf(rng.random_range(-3.0..0.0));
        let design = Design::from_sizes(&[(big_n, n)]).unwrap();
        let counts = StratumCounts::new(vec![c]);
        let budget = PrivacyBudget::new(rho).unwrap();
        let correction = 1.0 / (2.0 * rho * (n * n) as f64);
        let stats: Vec<f64> = (0..draws)
            .into_par_iter()
            .map(|r| {
                let stream = RandomStream::new(500 + param, r);
                let (_, rel) =
                    str_nz_pub_sz(&stream, &design, &counts, &budget, &DpOptions::default()).unwrap();
                let p = rel[0].p_tilde;
                p * (1.0 - p) + correction
            })
            .collect();
        let m = draws as f64;
        let mean = stats.iter().sum::<f64>() / m;
        let sd = (stats.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
        let p_hat = c as f64 / n as f64;
        let z = (mean - p_hat * (1.0 - p_hat)).abs() / (sd / m.sqrt());
        worst_z = worst_z.max(z);
    }
    check(
        worst_z <= 4.0,
        format!("bias correction: max |z| = {worst_z:.2} over 10 parameterisations x 1e6 draws"),
    )
}

fn rel_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-15 * b.abs()
}

// 6. Noise scales: ledger and Monte-Carlo against the extrinsic variances.
fn criterion_6() -> Outcome {
    let sizes = [(2000u64, 400u64), (1500, 300), (1800, 500)];
    let counts_v = vec![180u64, 60, 410];
    let design = Design::from_sizes(&sizes).unwrap();
    let counts = StratumCounts::new(counts_v.clone());
    let budget = PrivacyBudget::with_split(0.05, 0.4).unwrap();
    let (rho, r1, r2) = (budget.rho(), budget.rho1(), budget.rho2());
    let total: f64 = sizes.iter().map(|s| s.0 as f64).sum();
    let w: Vec<f64> = sizes.iter().map(|s| s.0 as f64 / total).collect();
    let n: Vec<f64> = sizes.iter().map(|s| s.1 as f64).collect();
    let p_hat: Vec<f64> = counts_v.iter().zip(&n).map(|(&c, n)| c as f64 / n).collect();

    // Independent sensitivities.
    let delta_p = (0..3).map(|h| w[h] / n[h]).fold(0.0, f64::max);
    let delta_v = (0..3)
        .map(|h| {
            let big = sizes[h].0 as f64;
            let c = w[h] * w[h] * ((big - n[h]) / big) / (n[h] - 1.0);
            c / n[h] * (1.0 - 1.0 / n[h])
        })
        .fold(0.0, f64::max);

    let mut ledger_ok = true;
    let opts = DpOptions::default();
    let stream = RandomStream::new(6, 0);
    let (a1, _) = run_algorithm(AlgorithmTag::StrNzPubSz, &stream, &design, &counts, &budget, &opts).unwrap();
    for (h, rec) in a1.noise.iter().enumerate() {
        ledger_ok &= rec.rho == rho && rel_eq(rec.variance, (1.0 / n[h]).powi(2) / (2.0 * rho));
    }
    ledger_ok &= ledger_rho(&a1.noise) == rho;
    let (a2, _) = run_algorithm(AlgorithmTag::PopNzPubSz, &stream, &design, &counts, &budget, &opts).unwrap();
    ledger_ok &= a2.noise.len() == 2
        && rel_eq(a2.noise[0].variance, delta_p * delta_p / (2.0 * r1))
        && rel_eq(a2.noise[1].variance, delta_v * delta_v / (2.0 * r2))
        && rel_eq(ledger_rho(&a2.noise), rho);
    let (a3, _) = run_algorithm(AlgorithmTag::StrNzPrivSz, &stream, &design, &counts, &budget, &opts).unwrap();
    ledger_ok &= a3.noise.len() == 6
        && a3.noise.iter().all(|r| {
            let component = if r.statistic == "stratum_count" { r1 } else { r2 };
            r.rho == component && rel_eq(r.variance, 1.0 / (2.0 * component))
        })
        && rel_eq(ledger_rho(&a3.noise), rho);

    // Extrinsic variances for fixed data.
    let w2n2: Vec<f64> = (0..3).map(|h| (w[h] / n[h]).powi(2)).collect();
    let table = [
        (AlgorithmTag::StrNzPubSz, w2n2.iter().sum::<f64>() / (2.0 * rho)),
        (AlgorithmTag::PopNzPubSz, delta_p * delta_p / (2.0 * r1)),
        (
            AlgorithmTag::StrNzPrivSz,
            (0..3)
                .map(|h| w2n2[h] / (2.0 * r1) + w2n2[h] * p_hat[h] * p_hat[h] / (2.0 * r2))
                .sum(),
        ),
    ];
    let draws = 1_000_000u64;
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for (alg, expected) in table {
        let points: Vec<f64> = (0..draws)
            .into_par_iter()
            .map(|r| {
                let s = RandomStream::new(66, r);
                run_algorithm(alg, &s, &design, &counts, &budget, &opts).unwrap().0.point_estimate
            })
            .collect();
        let m = draws as f64;
        let mean = points.iter().sum::<f64>() / m;
        let var = points.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
        let rel = (var / expected - 1.0).abs();
        worst = worst.max(rel);
        parts.push(format!("{alg} {:+.2}%", 100.0 * (var / expected - 1.0)));
    }
    check(
        ledger_ok && worst <= 0.05,
        format!(
            "noise audit: ledger {}; Monte-Carlo vs extrinsic variance {}",
            if ledger_ok { "exact" } else { "MISMATCH" },
            parts.join(", ")
        ),
    )
}

// 7. No-noise limit.
fn criterion_7() -> Outcome {
    let design = Design::from_sizes(&[(2000, 100), (1500, 80), (1800, 120), (900, 45)]).unwrap();
    let counts = StratumCounts::new(vec![50, 20, 90, 30]);
    let budget = PrivacyBudget::new(1e12).unwrap();
    let opts = DpOptions::default();
    let standard = non_private_ci(&design, &counts, 0.1).unwrap();
    let plug_in = plug_in_design_variance_ci(&design, &counts, 0.1).unwrap();
    let mut worst = 0.0_f64;
    let mut priv_vs_standard = 0.0_f64;
    for seed in 0..20 {
        let stream = RandomStream::new(seed, 7);
        for alg in PRIVATE {
            let (ci, _) = run_algorithm(alg, &stream, &design, &counts, &budget, &opts).unwrap();
            let target = if alg == AlgorithmTag::StrNzPrivSz { &plug_in } else { &standard };
            worst = worst
                .max((ci.lower - target.lower).abs())
                .max((ci.upper - target.upper).abs());
            if alg == AlgorithmTag::StrNzPrivSz {
                priv_vs_standard = priv_vs_standard.max((ci.lower - standard.lower).abs());
            }
        }
    }
    check(
        worst <= 1e-5,
        format!(
            "rho=1e12: max endpoint gap {worst:.1e} (private-size algorithm against its exact-variance \
             non-private form; gap to the standard interval {priv_vs_standard:.1e})"
        ),
    )
}

// 8. Determinism.
fn criterion_8() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_stratdp");
    let dir = tempfile::tempdir().unwrap();
    let ex = examples();
    let data = ex.join("strata.csv");
    let smoke = ex.join("smoke.cfg");
    let mid_text = std::fs::read_to_string(ex.join("table4_middle.cfg"))
        .unwrap()
        .replace("repetitions = 10000", "repetitions = 500");
    let mid = dir.path().join("mid.cfg");
    std::fs::write(&mid, mid_text).unwrap();

    let d = data.to_str().unwrap();
    let m = mid.to_str().unwrap();
    let s = smoke.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["ci", "--input", d, "--algorithm", "str-priv", "--rho", "0.02", "--seed", "9"],
        vec!["ci", "--input", d, "--algorithm", "pop-pub", "--rho", "0.02", "--seed", "9", "--format", "csv"],
        vec!["analyze", "--input", d, "--rho", "0.02"],
        vec!["qq", "--config", m, "--algorithm", "str-priv"],
        vec!["qq", "--config", s, "--grid", "5"],
    ];
    let mut cli_ok = true;
    for args in &commands {
        let a = Command::new(bin).args(args).output().unwrap();
        let b = Command::new(bin).args(args).output().unwrap();
        cli_ok &= a.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    }
    let mut files = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("sim{run}"));
        let st = Command::new(bin)
            .args(["simulate", "--config", m, "--out", out.to_str().unwrap(), "--reps"])
            .status()
            .unwrap();
        cli_ok &= st.success();
        files.push((
            std::fs::read(out.join("summary.json")).unwrap_or_default(),
            std::fs::read(out.join("reps.csv")).unwrap_or_default(),
        ));
    }
    cli_ok &= files[0] == files[1];

    let config = ExperimentConfig::from_path(&mid).unwrap();
    let exp = Experiment::new(config).unwrap();
    let (report, _) = exp.run(false).unwrap();
    let rho = exp.rho_values()[0];
    let budget = exp.budget(rho).unwrap();
    let mut order: Vec<usize> = (0..exp.config.repetitions).collect();
    order.shuffle(&mut RandomStream::new(8, 8).rng());
    let records: Vec<_> = order
        .iter()
        .map(|&r| exp.run_repetition(0, r, &budget).unwrap())
        .collect();
    let permuted = exp.summarize(0, rho, records).unwrap();
    let single_thread = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| exp.run(false).unwrap().0);
    let lib_ok = permuted == report.points[0] && single_thread == report;
    check(
        cli_ok && lib_ok,
        format!(
            "determinism: {} CLI invocations byte-identical: {cli_ok}; permuted and single-thread summaries bit-identical: {lib_ok}",
            commands.len() + 1
        ),
    )
}

// 9. Coverage and width across a rho grid.
fn criterion_9() -> Outcome {
    let config = load("rho_sweep.cfg");
    let RhoRule::Grid(grid) = config.rho.clone() else {
        return check(false, "rho_sweep.cfg has no grid");
    };
    let report = run_report(&config);
    let reps = config.repetitions as f64;
    let mut widths_ok = true;
    let mut cover_ok = true;
    let mut over = Vec::new();
    for alg in config.reported_algorithms() {
        let rows: Vec<_> = report.points.iter().map(|p| p.get(alg).unwrap()).collect();
        if alg != AlgorithmTag::NonPrivate {
            for pair in rows.windows(2) {
                let se = ((pair[0].width_sd.unwrap().powi(2) + pair[1].width_sd.unwrap().powi(2)) / reps).sqrt();
                widths_ok &= pair[1].mean_width < pair[0].mean_width + 2.0 * se;
            }
        }
        for (rho, row) in grid.iter().zip(&rows) {
            let small_rho_priv = alg == AlgorithmTag::StrNzPrivSz && *rho < 0.005;
            if small_rho_priv {
                cover_ok &= row.coverage >= 0.885;
                if row.coverage > 0.915 {
                    over.push(format!("{rho}: {:.4}", row.coverage));
                }
            } else {
                cover_ok &= in_band(row.coverage, 0.885, 0.915);
            }
        }
    }
    let priv_widths: Vec<String> = report
        .points
        .iter()
        .map(|p| format!("{:.3}", p.get(AlgorithmTag::StrNzPrivSz).unwrap().mean_width))
        .collect();
    check(
        widths_ok && cover_ok,
        format!(
            "rho grid {grid:?}: widths decreasing {widths_ok} (str-priv {}); coverage in band {cover_ok}; \
             str-priv over-coverage at small rho [{}]",
            priv_widths.join(" > "),
            over.join(", ")
        ),
    )
}

// Difference of two independent populations.
fn difference_run() -> Outcome {
    let a = Experiment::new(load("table4_middle.cfg")).unwrap();
    let mut cfg_b = load("table4_middle.cfg");
    cfg_b.base_seed += 1000;
    cfg_b.proportion = stratdp::sim::RealParam::Uniform([0.3, 0.5]);
    let b = Experiment::new(cfg_b).unwrap();
    let truth = a.population.proportion - b.population.proportion;
    let algs = [AlgorithmTag::NonPrivate, AlgorithmTag::StrNzPubSz, AlgorithmTag::PopNzPubSz, AlgorithmTag::StrNzPrivSz];
    let ba = a.budget(a.rho_values()[0]).unwrap();
    let bb = b.budget(b.rho_values()[0]).unwrap();
    let reps = a.config.repetitions;
    let hits: Vec<[bool; 4]> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let ca = a.sample(0, r).unwrap();
            let cb = b.sample(0, r).unwrap();
            let mut out = [false; 4];
            for (i, &alg) in algs.iter().enumerate() {
                let sa = a.repetition_stream(0, r).substream(20 + i as u64);
                let sb = b.repetition_stream(0, r).substream(20 + i as u64);
                let (x, _) = run_algorithm(alg, &sa, &a.design, &ca, &ba, &a.options()).unwrap();
                let (y, _) = run_algorithm(alg, &sb, &b.design, &cb, &bb, &b.options()).unwrap();
                out[i] = difference_ci(&x, &y, 0.1).unwrap().covers(truth);
            }
            out
        })
        .collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, alg) in algs.iter().enumerate() {
        let cov = hits.iter().filter(|h| h[i]).count() as f64 / reps as f64;
        ok &= in_band(cov, 0.885, 0.915);
        parts.push(format!("{alg} {cov:.4}"));
    }
    check(ok, format!("difference p_a - p_b = {truth:.4}: coverage {}", parts.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("criterion 1", criterion_1),
        ("criterion 2", criterion_2),
        ("criterion 3", criterion_3),
        ("criterion 4", criterion_4),
        ("criterion 5", criterion_5),
        ("criterion 6", criterion_6),
        ("criterion 7", criterion_7),
        ("criterion 8", criterion_8),
        ("criterion 9", criterion_9),
        ("difference ", difference_run),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let o = f();
        println!("{name} {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += (!o.pass) as usize;
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
