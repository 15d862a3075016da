use std::path::Path;
use std::process::{Command, Output};

fn prelog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prelog")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn record(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter(|l| !l.is_empty())
        .map(|l| {
            let (k, v) = l.split_once('=').expect("key=value line");
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn field(rec: &[(String, String)], key: &str) -> String {
    rec.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("missing {key}")).1.clone()
}

/// Parse a table file with the csv crate, skipping the settings comments.
fn table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn analyze_reports_the_fixed_point() {
    let o = prelog(&["analyze", "--power", "10"]);
    assert!(o.status.success());
    let rec = record(&stdout(&o));
    let rho: f64 = field(&rec, "rho_star").parse().unwrap();
    let r1: f64 = field(&rec, "r1").parse().unwrap();
    assert!((rho - 0.889).abs() < 1e-3);
    assert!((r1 - 1.41).abs() < 5e-3);
    assert_eq!(field(&rec, "rhoz").parse::<f64>().unwrap(), -1.0);
}

#[test]
fn analyze_at_high_power_has_prelog_near_two() {
    let o = prelog(&["analyze", "--power", "1e10"]);
    let ratio: f64 = field(&record(&stdout(&o)), "prelog_ratio").parse().unwrap();
    assert!(ratio >= 1.9);
}

#[test]
fn invalid_noise_exits_with_two() {
    let o = prelog(&["analyze", "--sigma1", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sigma1"));
    assert_eq!(prelog(&["analyze", "--rhoz", "1.5"]).status.code(), Some(2));
    assert_eq!(prelog(&["analyze", "--bogus"]).status.code(), Some(2));
}

#[test]
fn sweep_table_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = prelog(&["sweep", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let (header, rows) = table(&out);
    assert_eq!(header, ["P", "rho_star", "g", "R1", "R2", "sum", "prelog_ratio", "scaled_gap"]);
    assert_eq!(rows.len(), 33);
    let p = column(&header, &rows, "P");
    assert!(p.windows(2).all(|w| w[1] > w[0]));
    let ratio = column(&header, &rows, "prelog_ratio");
    assert!(ratio.windows(2).all(|w| w[1] > w[0]));
    let text = std::fs::read_to_string(&out).unwrap();
    for line in ["# sigma1=", "# rhoz=", "# delta=", "# tol=", "# points-per-decade=4"] {
        assert!(text.contains(line), "{line}");
    }
}

#[test]
fn sweep_with_unit_delta_leaves_gap_unscaled() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    assert!(prelog(&["sweep", "--delta", "1", "--p-stop", "1e5", "--out", out.to_str().unwrap()]).status.success());
    let (h, rows) = table(&out);
    assert_eq!(column(&h, &rows, "g"), column(&h, &rows, "scaled_gap"));
}

#[test]
fn uncorrelated_sweep_keeps_climbing() {
    // rho* keeps approaching one like 1 - sqrt(2 / P), so consecutive rows
    // near 1e10 still differ by several 1e-6.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    assert!(prelog(&["sweep", "--rhoz", "0", "--out", out.to_str().unwrap()]).status.success());
    let (h, rows) = table(&out);
    let rho = column(&h, &rows, "rho_star");
    let n = rho.len();
    assert!(rho.windows(2).all(|w| w[1] > w[0]));
    assert!((rho[n - 1] - rho[n - 2]) > 1e-6);
    let ratio = column(&h, &rows, "prelog_ratio");
    assert!(ratio[n - 1] < 1.05);
}

#[test]
fn short_sweep_is_rejected() {
    assert_eq!(prelog(&["sweep", "--p-start", "10", "--p-stop", "50"]).status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("sim{i}.csv"))).collect();
    for p in &paths {
        let o = prelog(&[
            "simulate",
            "--trials",
            "3000",
            "--block-length",
            "12",
            "--seed",
            "42",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
}

fn simulate_summary(extra: &[&str]) -> Vec<(String, String)> {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let mut args =
        vec!["simulate", "--trials", "2000", "--block-length", "15", "--seed", "5", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = prelog(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    record(&stdout(&o))
}

#[test]
fn interference_mode_decodes_like_broadcast() {
    let b = simulate_summary(&["--mode", "broadcast"]);
    let i = simulate_summary(&["--mode", "interference"]);
    for key in ["block_errors", "errors1", "errors2", "block_error_rate", "ci_low", "ci_high"] {
        assert_eq!(field(&b, key), field(&i, key), "{key}");
    }
}

#[test]
fn limited_mode_needs_perfect_correlation() {
    assert_eq!(prelog(&["simulate", "--mode", "limited", "--rhoz", "0.99"]).status.code(), Some(2));
    let full = simulate_summary(&[]);
    let lim = simulate_summary(&["--mode", "limited", "--fed-back-receiver", "2"]);
    assert_eq!(field(&full, "block_errors"), field(&lim, "block_errors"));
}

#[test]
fn simulate_table_has_moments_and_power() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let summary = dir.path().join("s.txt");
    let o = prelog(&[
        "simulate",
        "--trials",
        "5000",
        "--block-length",
        "10",
        "--mode",
        "interference",
        "--out",
        out.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let (h, rows) = table(&out);
    assert_eq!(rows.len(), 10);
    assert_eq!(rows[0][h.iter().position(|c| c == "mean1").unwrap()], "");
    let tx1 = column(&h, &rows[2..], "power_tx1");
    let tx2 = column(&h, &rows[2..], "power_tx2");
    assert!(tx1.iter().chain(&tx2).all(|&p| p <= 100.0 * 1.05));
    let rec = record(&std::fs::read_to_string(&summary).unwrap());
    let z: f64 = field(&rec, "max_moment_z").parse().unwrap();
    assert!(z <= 5.0);
}

#[test]
fn conflicting_rate_options_are_rejected() {
    assert_eq!(prelog(&["simulate", "--rate1", "1"]).status.code(), Some(2));
    assert_eq!(prelog(&["simulate", "--rate1", "1", "--rate2", "1", "--rate-fraction", "0.5"]).status.code(), Some(2));
    assert_eq!(prelog(&["simulate", "--trials", "10"]).status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "power = 10.0\nsigma2 = 2.0\nrhoz = -1.0\n").unwrap();
    let from_file = record(&stdout(&prelog(&["analyze", "--config", cfg.to_str().unwrap()])));
    assert_eq!(field(&from_file, "power").parse::<f64>().unwrap(), 10.0);
    assert_eq!(field(&from_file, "sigma2").parse::<f64>().unwrap(), 2.0);
    let overridden = record(&stdout(&prelog(&["analyze", "--config", cfg.to_str().unwrap(), "--power", "20"])));
    assert_eq!(field(&overridden, "power").parse::<f64>().unwrap(), 20.0);
    assert_eq!(field(&overridden, "sigma2").parse::<f64>().unwrap(), 2.0);

    std::fs::write(&cfg, "powr = 10.0\n").unwrap();
    assert_eq!(prelog(&["analyze", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_default_grid_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let o = prelog(&["verify", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 5);
    assert!(!text.contains("FAIL"));
    let (h, rows) = table(&out);
    let p = column(&h, &rows, "P");
    let dev = column(&h, &rows, "root_gap_dev");
    let i = p.iter().position(|&x| x == 1e6).unwrap();
    assert!(dev[i] < 0.01 * 1.0);
}

#[test]
fn verify_needs_four_decades() {
    assert_eq!(prelog(&["verify", "--p-start", "1e2", "--p-stop", "1e3"]).status.code(), Some(2));
}

#[test]
fn classify_exit_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [("1 -1\n-1 1\n", "Two", 0), ("1 0.5\n0.5 1\n", "One", 0), ("1 1 0\n1 1 0\n0 0 1\n", "Undefined", 3)];
    for (i, (matrix, class, code)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("m{i}.txt"));
        std::fs::write(&path, matrix).unwrap();
        let o = prelog(&["classify", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(*code));
        assert_eq!(field(&record(&stdout(&o)), "class"), *class);
    }
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 2\n2 1\n").unwrap();
    assert_eq!(prelog(&["classify", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, "1 0\n0\n").unwrap();
    assert_eq!(prelog(&["classify", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(prelog(&["classify", dir.path().join("missing").to_str().unwrap()]).status.code(), Some(2));
}
