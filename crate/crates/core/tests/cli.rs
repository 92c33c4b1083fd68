//! Command-line behaviour: outputs, determinism, provenance and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ionlight::scenario::{read_metadata, verify_config_hash, FitReport, PowerLawReport};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(sub: &str, config: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ionlight"))
        .arg(sub)
        .arg("--config")
        .arg(config)
        .args(extra)
        .output()
        .unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ionlight-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn delayed_gate_curves_and_provenance() {
    let cfg = scenario("fig1_single_ion.toml");
    let o = run("delayed-gate", &cfg, &["--threads", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(verify_config_hash(&text, &std::fs::read(&cfg).unwrap()));
    let meta = read_metadata(&text);
    assert!(meta.contains_key("eta") && meta.contains_key("build"));

    let mut rows = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(rows.next().unwrap(), "nbar,p_up_static,p_up_optimized,rabi_ratio");
    let rows: Vec<Vec<f64>> = rows.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 41);
    for r in &rows {
        assert!(r[2] + 1e-12 >= r[1], "optimized below static at nbar {}", r[0]);
    }
    assert!(rows.last().unwrap()[3] > 1.0);
    assert!(rows.last().unwrap()[1] < rows[0][1]);
}

#[test]
fn out_flag_matches_stdout_and_reruns_are_identical() {
    let cfg = scenario("fig4_chain25.toml");
    let dir = scratch("out");
    let path = dir.join("curves.csv");
    let a = run("delayed-gate", &cfg, &["--out", path.to_str().unwrap(), "--threads", "1"]);
    assert!(a.status.success());
    assert!(a.stdout.is_empty());
    let b = run("delayed-gate", &cfg, &["--threads", "4"]);
    assert_eq!(std::fs::read(&path).unwrap(), b.stdout);
    let header = stdout(&b).lines().find(|l| !l.starts_with('#')).unwrap().to_string();
    assert_eq!(header, "nbar,p_up_static,p_up_optimized,rabi_ratio,p_up_sk1,p_up_tycko");
}

#[test]
fn higher_frequency_decays_slower() {
    let dir = scratch("sweep");
    let base = std::fs::read_to_string(scenario("fig1_single_ion.toml")).unwrap();
    let mut last: Option<Vec<f64>> = None;
    for f in ["153e3", "243e3", "333e3", "423e3", "513e3"] {
        let text = base
            .replace("axial_com_hz = 153e3", &format!("axial_com_hz = {f}"))
            .replace("start = 64.0", "values = [64.0, 300.0, 600.0, 1000.0]")
            .lines()
            .filter(|l| !l.starts_with("stop") && !l.starts_with("points"))
            .collect::<Vec<_>>()
            .join("\n");
        let path = dir.join(format!("f{f}.toml"));
        std::fs::write(&path, text).unwrap();
        let o = run("delayed-gate", &path, &[]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let stat: Vec<f64> = stdout(&o)
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        if let Some(prev) = &last {
            for (hi, lo) in stat.iter().zip(prev).skip(1) {
                assert!(hi > lo, "{f}: {hi} <= {lo}");
            }
        }
        last = Some(stat);
    }
}

#[test]
fn truncation_threshold_override_keeps_more() {
    let cfg = scenario("truncation.toml");
    let kept = |extra: &[&str]| {
        let o = run("truncation-report", &cfg, extra);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o).lines().filter(|l| l.ends_with(",true")).count()
    };
    let default = kept(&[]);
    let loose = kept(&["--tolerance", "1e-6"]);
    assert!(loose > default, "{loose} vs {default}");
}

#[test]
fn fit_recovers_planted_rate_and_feeds_power_law() {
    let cfg = scenario("fig1_fit.toml");
    let o = run("fit", &cfg, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: FitReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!((report.fit.ndot / 96e3 - 1.0).abs() < 0.05, "{}", report.fit.ndot);

    let dir = scratch("pl");
    std::fs::write(dir.join("f153.json"), &o.stdout).unwrap();
    let pl = "version = 1\n\n[[points]]\nfrequency_hz = 153e3\nfit = \"f153.json\"\n\n[[points]]\nfrequency_hz = 300e3\nndot = 28000.0\n\n[[points]]\nfrequency_hz = 500e3\nndot = 11500.0\n";
    std::fs::write(dir.join("pl.toml"), pl).unwrap();
    let o = run("power-law", &dir.join("pl.toml"), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: PowerLawReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.points.len(), 3);
    assert!(r.fit.exponent > 1.5 && r.fit.exponent < 2.1, "{}", r.fit.exponent);
}

#[test]
fn power_law_scenario() {
    let o = run("power-law", &scenario("power_law.toml"), &[]);
    assert!(o.status.success());
    let r: PowerLawReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.points.len(), 8);
    assert!((r.fit.exponent - 1.8).abs() < 0.1);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = scratch("bad");
    let base = std::fs::read_to_string(scenario("fig1_single_ion.toml")).unwrap();

    let typo = dir.join("typo.toml");
    std::fs::write(&typo, base.replace("waist_z = 5e-6", "waist_zz = 5e-6")).unwrap();
    let o = run("delayed-gate", &typo, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("waist_zz"));

    let negative = dir.join("negative.toml");
    std::fs::write(&negative, base.replace("axial_com_hz = 153e3", "axial_com_hz = -153e3")).unwrap();
    assert_eq!(run("delayed-gate", &negative, &[]).status.code(), Some(2));

    let version = dir.join("version.toml");
    std::fs::write(&version, base.replace("version = 1", "version = 7")).unwrap();
    assert_eq!(run("delayed-gate", &version, &[]).status.code(), Some(2));

    assert_eq!(run("delayed-gate", &dir.join("missing.toml"), &[]).status.code(), Some(2));
}

#[test]
fn missing_data_column_is_named() {
    let dir = scratch("col");
    std::fs::write(dir.join("static.csv"), "delta_t_s,p\n0,0.97\n0.001,0.95\n0.002,0.93\n").unwrap();
    let base = std::fs::read_to_string(scenario("fig1_single_ion.toml")).unwrap();
    std::fs::write(dir.join("fit.toml"), format!("{base}\n[fit]\nstatic_data = \"static.csv\"\n")).unwrap();
    let o = run("fit", &dir.join("fit.toml"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p_up"));
}

#[test]
fn unparseable_data_reports_line() {
    let dir = scratch("line");
    std::fs::write(dir.join("static.csv"), "delta_t_s,p_up\n0,0.97\n0.001,oops\n0.002,0.93\n").unwrap();
    let base = std::fs::read_to_string(scenario("fig1_single_ion.toml")).unwrap();
    std::fs::write(dir.join("fit.toml"), format!("{base}\n[fit]\nstatic_data = \"static.csv\"\n")).unwrap();
    let o = run("fit", &dir.join("fit.toml"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn unreachable_calibration_exits_with_three() {
    let dir = scratch("hot");
    let base = std::fs::read_to_string(scenario("fig1_single_ion.toml")).unwrap();
    let text = base
        .replace("start = 64.0", "values = [64.0, 60000.0]")
        .lines()
        .filter(|l| !l.starts_with("stop") && !l.starts_with("points"))
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(dir.join("hot.toml"), text).unwrap();
    assert_eq!(run("delayed-gate", &dir.join("hot.toml"), &[]).status.code(), Some(3));
}
