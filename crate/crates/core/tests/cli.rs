use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_stratdp");

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn stratdp(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn one_row(dir: &Path) -> String {
    write(dir, "one.csv", "stratum_id,N_h,n_h,c_h\n1,2000,100,50\n")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn nonprivate_interval_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = one_row(dir.path());
    let out = stratdp(&["ci", "--input", &input, "--algorithm", "nonprivate", "--alpha", "0.1"]);
    assert!(out.status.success());
    let v = json(&out);
    let lo = v["interval"]["lower"].as_f64().unwrap();
    let hi = v["interval"]["upper"].as_f64().unwrap();
    assert!((lo - 0.41943).abs() < 1e-5 && (hi - 0.58057).abs() < 1e-5);
}

#[test]
fn huge_budget_matches_nonprivate() {
    let dir = tempfile::tempdir().unwrap();
    let input = one_row(dir.path());
    let base = json(&stratdp(&["ci", "--input", &input, "--algorithm", "nonprivate"]));
    let private = json(&stratdp(&[
        "ci", "--input", &input, "--algorithm", "str-pub", "--rho", "1e12", "--seed", "1",
    ]));
    for end in ["lower", "upper"] {
        let a = base["interval"][end].as_f64().unwrap();
        let b = private["interval"][end].as_f64().unwrap();
        assert!((a - b).abs() < 1e-5);
    }
}

#[test]
fn ci_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "s.csv", &std::fs::read_to_string(examples().join("strata.csv")).unwrap());
    for alg in ["str-pub", "pop-pub", "str-priv"] {
        for fmt in ["json", "csv"] {
            let args = [
                "ci", "--input", &input, "--algorithm", alg, "--rho", "0.01", "--seed", "77",
                "--format", fmt, "--clip-proportions",
            ];
            let a = stratdp(&args);
            let b = stratdp(&args);
            assert!(a.status.success());
            assert_eq!(a.stdout, b.stdout);
        }
    }
}

#[test]
fn json_and_csv_agree_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "s.csv", &std::fs::read_to_string(examples().join("strata.csv")).unwrap());
    let args = |fmt| {
        vec![
            "ci".to_string(), "--input".into(), input.clone(), "--algorithm".into(), "str-priv".into(),
            "--rho".into(), "0.05".into(), "--seed".into(), "3".into(), "--format".into(), fmt,
        ]
    };
    let j = Command::new(BIN).args(args("json".into())).output().unwrap();
    let c = Command::new(BIN).args(args("csv".into())).output().unwrap();
    let v = json(&j);
    let csv = String::from_utf8(c.stdout).unwrap();
    let lookup = |scope: &str, field: &str| -> f64 {
        csv.lines()
            .find(|l| l.starts_with(&format!("{scope},{field},")))
            .and_then(|l| l.rsplit(',').next())
            .unwrap()
            .parse()
            .unwrap()
    };
    for f in ["point_estimate", "variance_estimate", "lower", "upper"] {
        assert_eq!(v["interval"][f].as_f64().unwrap(), lookup("interval", f), "{f}");
    }
    for h in 0..3 {
        let s = &v["strata"][h];
        assert_eq!(s["p_tilde"].as_f64().unwrap(), lookup(&format!("stratum:{h}"), "p_tilde"));
        assert_eq!(s["n_tilde"].as_f64().unwrap(), lookup(&format!("stratum:{h}"), "n_tilde"));
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = one_row(dir.path());
    let bad_syntax = write(dir.path(), "bad.csv", "stratum_id,N_h,n_h,c_h\n1,2000,1x0,50\n");
    let bad_values = write(dir.path(), "big.csv", "stratum_id,N_h,n_h,c_h\n1,2000,100,150\n");

    let out = stratdp(&["ci", "--input", &bad_syntax, "--algorithm", "nonprivate"]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("row 2") && msg.contains("column 3"), "{msg}");

    let out = stratdp(&["ci", "--input", &bad_values, "--algorithm", "nonprivate"]);
    assert_eq!(out.status.code(), Some(2));

    let out = stratdp(&["ci", "--input", &good, "--algorithm", "str-pub"]);
    assert_eq!(out.status.code(), Some(2), "missing --rho");

    let out = stratdp(&["ci", "--input", &good, "--algorithm", "pop-pub", "--rho", "0.1", "--split", "1"]);
    assert_eq!(out.status.code(), Some(3));

    let out = stratdp(&["ci", "--input", &good, "--algorithm", "bogus"]);
    assert_eq!(out.status.code(), Some(1));

    let cfg = std::fs::read_to_string(examples().join("smoke.cfg")).unwrap();
    let typo = write(dir.path(), "typo.cfg", &format!("{cfg}aplha = 0.1\n"));
    let out = stratdp(&["simulate", "--config", &typo, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("aplha"));

    let infeasible = write(
        dir.path(),
        "tiny.cfg",
        &cfg.replace("sampling_rate = { fixed = 0.05 }", "sampling_rate = { fixed = 0.0001 }"),
    );
    let out = stratdp(&["qq", "--config", &infeasible]);
    assert_eq!(out.status.code(), Some(3));

    let broken = write(dir.path(), "broken.cfg", "alpha = [\n");
    let out = stratdp(&["simulate", "--config", &broken, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_smoke_writes_one_row_per_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = examples().join("smoke.cfg");
    let out = stratdp(&["simulate", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--reps"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let algs = summary["points"][0]["algorithms"].as_array().unwrap();
    assert_eq!(algs.len(), 4);
    for a in algs {
        let c = a["coverage"].as_f64().unwrap();
        assert!(c == 0.0 || c == 1.0);
    }
    assert_eq!(algs[0]["width_ratio"].as_f64(), Some(1.0));
    let reps = std::fs::read_to_string(dir.path().join("reps.csv")).unwrap();
    let lines: Vec<&str> = reps.lines().collect();
    assert_eq!(lines[0], "grid_index,rep,algorithm,covered,width,lower,upper");
    assert_eq!(lines.len(), 1 + 4);
    assert!(lines[1..].iter().all(|l| l.starts_with("0,0,")));
}

#[test]
fn simulate_grid_has_one_point_per_rho() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = std::fs::read_to_string(examples().join("smoke.cfg"))
        .unwrap()
        .replace("rho = { fixed = 0.01 }", "rho = { grid = [1e-3, 1e-2, 1e-1] }")
        .replace("repetitions = 1", "repetitions = 20");
    let path = write(dir.path(), "grid.cfg", &cfg);
    let out_dir = dir.path().join("out");
    let out = stratdp(&["simulate", "--config", &path, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    let points = s["points"].as_array().unwrap();
    assert_eq!(points.len(), 3);
    let rhos: Vec<f64> = points.iter().map(|p| p["budget"]["rho"].as_f64().unwrap()).collect();
    assert_eq!(rhos, vec![1e-3, 1e-2, 1e-1]);
}

#[test]
fn simulate_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = std::fs::read_to_string(examples().join("table4_middle.cfg"))
        .unwrap()
        .replace("repetitions = 10000", "repetitions = 300");
    let path = write(dir.path(), "m.cfg", &cfg);
    let mut outputs = Vec::new();
    for run in 0..2 {
        let out_dir = dir.path().join(format!("run{run}"));
        let out = stratdp(&["simulate", "--config", &path, "--out", out_dir.to_str().unwrap(), "--reps"]);
        assert!(out.status.success());
        outputs.push((
            std::fs::read(out_dir.join("summary.json")).unwrap(),
            std::fs::read(out_dir.join("reps.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

fn analyze_rows(out: &Output) -> Vec<(String, String, f64)> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',');
            let q = it.next().unwrap().to_string();
            let a = it.next().unwrap().to_string();
            (q, a, it.next().unwrap().parse().unwrap())
        })
        .collect()
}

fn value(rows: &[(String, String, f64)], q: &str, a: &str) -> f64 {
    rows.iter().find(|r| r.0 == q && r.1 == a).unwrap().2
}

#[test]
fn analyze_table4_setting() {
    let out = stratdp(&[
        "analyze", "--population-size", "2000", "--sample-size", "152", "--p", "0.5", "--rho",
        &(1.0f64 / 152.0).to_string(),
    ]);
    assert!(out.status.success());
    let rows = analyze_rows(&out);
    // Table 4 top-panel width ratios 1.786 / 2.318 / 2.567. The published
    // rows come from a population slightly smaller than N = 2000, so only the
    // stratum-noise algorithm meets 0.01 here; see the decisions notes.
    assert!((value(&rows, "twr", "str-pub") - 1.786).abs() < 0.01);
    assert!((value(&rows, "twr", "pop-pub") - 2.318).abs() < 0.011);
    assert!((value(&rows, "twr", "str-priv") - 2.567).abs() < 0.04);
    let bounds = [3f64.sqrt(), 5f64.sqrt(), (3.0 + 2.0 * 2f64.sqrt()).sqrt()];
    for (alg, b) in ["str-pub", "pop-pub", "str-priv"].iter().zip(bounds) {
        assert!((value(&rows, "twr_lower_bound", alg) - b).abs() < 1e-12);
    }
    assert_eq!(value(&rows, "budget_ratio_str_vs_pop", ""), 0.5);
}

#[test]
fn analyze_from_file() {
    let out = stratdp(&["analyze", "--input", examples().join("strata.csv").to_str().unwrap(), "--rho", "0.01"]);
    assert!(out.status.success());
    let rows = analyze_rows(&out);
    let r = value(&rows, "budget_ratio_priv_vs_pub", "");
    assert!((2.0..=4.0).contains(&r));
    assert!(rows.iter().all(|r| r.0 != "twr"));
}

#[test]
fn qq_commands() {
    let cfg = examples().join("smoke.cfg");
    let out = stratdp(&["qq", "--config", cfg.to_str().unwrap(), "--grid", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "q,theoretical,empirical");
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1].split(',').next().unwrap().parse::<f64>().unwrap(), 0.5);

    let dir = tempfile::tempdir().unwrap();
    let top = std::fs::read_to_string(examples().join("table4_top.cfg"))
        .unwrap()
        .replace("repetitions = 10000", "repetitions = 50");
    let path = write(dir.path(), "top.cfg", &top);
    let out = stratdp(&["qq", "--config", &path, "--grid", "1", "--algorithm", "str-priv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let theo: f64 = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((theo - 0.5 - 3.289e-3).abs() < 1e-6, "{theo}");
    let again = stratdp(&["qq", "--config", &path, "--grid", "1", "--algorithm", "str-priv"]);
    assert_eq!(text.as_bytes(), &again.stdout[..]);
}
