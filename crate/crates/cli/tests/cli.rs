use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn xzdress(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xzdress"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn csv_column(p: &Path, name: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_path(p).unwrap();
    let idx = rdr.headers().unwrap().iter().position(|h| h == name).unwrap();
    rdr.records()
        .map(|r| r.unwrap()[idx].parse::<f64>().unwrap())
        .collect()
}

#[test]
fn presets_lists_every_figure() {
    let dir = TempDir::new().unwrap();
    let out = xzdress(&["presets", "--json"], dir.path());
    assert_eq!(code(&out), 0);
    let list: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = list.as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["fig2a", "fig2b", "fig2c", "fig3", "fig4a", "fig4b", "fig4c", "fig4d", "fig5"]);
}

#[test]
fn simulate_is_deterministic_and_round_trips_into_analyze() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", r#"{"preset": "fig2a", "t_span_tau": [0, 2], "samples_per_period": 2048}"#);
    let cfg = cfg.to_str().unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = xzdress(&["simulate", "--config", cfg, "--out", name, "--report", "r.json"], dir.path());
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.csv")).unwrap());
    let header = String::from_utf8_lossy(&a).lines().next().unwrap().to_string();
    assert_eq!(header, "tau,t,sx,sy,sz,p_plus,omega_ld");
    let report = read_json(&dir.path().join("r.json"));
    assert_eq!(report["scenario"]["adiabaticity"]["regime"], "adiabatic");

    let out = xzdress(&["analyze", "--input", "a.csv", "--estimates", "e.csv", "--report", "ar.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut f = csv_column(&dir.path().join("e.csv"), "f_ld");
    f.sort_by(f64::total_cmp);
    let median = f[f.len() / 2];
    assert!((75.0..80.5).contains(&median), "{median}");
    let folded = csv_column(&dir.path().join("e.csv"), "tau_folded");
    assert!(folded.iter().all(|v| (0.0..1.0).contains(v)));
    let ar = read_json(&dir.path().join("ar.json"));
    assert!((ar["drive_frequency"]["value"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn simulate_with_svg_and_preset_flag() {
    let dir = TempDir::new().unwrap();
    let out = xzdress(&["simulate", "--preset", "fig4c", "--svg", "p.svg", "--report", "r.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(dir.path().join("p.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}

#[test]
fn fig5_occupation_feeds_rabi_like_search() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", r#"{"preset": "fig5", "t_span_tau": [0, 30], "samples_per_period": 128}"#);
    let out = xzdress(
        &["simulate", "--config", cfg.to_str().unwrap(), "--report", "r.json", "--max-lag-tau", "10"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let r = read_json(&dir.path().join("r.json"));
    let f = &r["analysis"]["rabi_like_frequency"];
    assert_eq!(f["units"], "kHz");
    assert!((f["value"].as_f64().unwrap() - 0.213).abs() < 0.01);
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "c.json", r#"{"preset": "fig3", "t_span_tau": [1, 1]}"#);
    let out = xzdress(&["simulate", "--config", empty.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("t_span_tau"));
    assert_eq!(code(&xzdress(&["simulate", "--preset", "fig9"], dir.path())), 2);
    assert_eq!(code(&xzdress(&["compare", "--preset", "fig3", "--methods", "exact,magic"], dir.path())), 2);
    assert_eq!(code(&xzdress(&["simulate"], dir.path())), 2);
    let bad = write(&dir, "bad.csv", "t,signal\n0,1\n0.1,2\n0.2,x\n0.3,1\n");
    let out = xzdress(&["analyze", "--input", bad.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn exact_crossing_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.json",
        r#"{"scenario": "rotating_xz", "omega_khz": 1, "omega0z_khz": 2, "omega_x_khz": 2,
            "phi0z_over_pi": 0.5, "method": "adiabatic", "t_span_tau": [0, 1]}"#,
    );
    let out = xzdress(&["simulate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn short_trace_exits_4() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "s.csv", "t,signal\n0,1\n0.1,-1\n0.2,1\n");
    assert_eq!(code(&xzdress(&["analyze", "--input", p.to_str().unwrap()], dir.path())), 4);
}

#[test]
fn constant_signal_gives_empty_estimates_with_note() {
    let dir = TempDir::new().unwrap();
    let rows: String = (0..100).map(|k| format!("{},{}\n", k as f64 * 0.01, 0.5)).collect();
    let p = write(&dir, "c.csv", &format!("t,signal\n{rows}"));
    let out = xzdress(&["analyze", "--input", p.to_str().unwrap(), "--report", "r.json"], dir.path());
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(dir.path().join("estimates.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
    let r = read_json(&dir.path().join("r.json"));
    assert_eq!(r["estimate_count"], 0);
    assert!(r["notes"][0].as_str().unwrap().contains("zero crossings"));
}

#[test]
fn two_column_trace_at_125_khz() {
    let dir = TempDir::new().unwrap();
    let rows: String = (0..2000)
        .map(|k| {
            let t = k as f64 / 125.0;
            format!("{t},{}\n", (std::f64::consts::TAU * 10.0 * t + 0.3).sin())
        })
        .collect();
    let p = write(&dir, "exp.csv", &rows);
    let out = xzdress(&["analyze", "--input", p.to_str().unwrap(), "--drive-khz", "1", "--report", "r.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let f = csv_column(&dir.path().join("estimates.csv"), "f_ld");
    assert!(f.iter().all(|v| (v - 10.0).abs() < 0.05), "{f:?}");
    let r = read_json(&dir.path().join("r.json"));
    assert!((r["sample_rate"]["value"].as_f64().unwrap() - 125.0).abs() < 1e-6);
}

#[test]
fn compare_identical_methods_has_zero_deviation() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", r#"{"preset": "fig3", "t_span_tau": [0, 2], "samples_per_period": 128}"#);
    let cfg = cfg.to_str().unwrap();
    let out = xzdress(&["compare", "--config", cfg, "--methods", "exact,exact", "--report", "r.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&dir.path().join("r.json"));
    assert_eq!(r["deviations"][0]["max_abs_sx"], 0.0);

    let out = xzdress(
        &["compare", "--config", cfg, "--methods", "exact,floquet1,floquet2,adiabatic", "--out", "d.csv", "--report", "r2.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let r = read_json(&dir.path().join("r2.json"));
    assert_eq!(r["deviations"].as_array().unwrap().len(), 3);
    let d = csv_column(&dir.path().join("d.csv"), "dsx_floquet2");
    assert_eq!(d.len(), 257);
}

#[test]
fn compare_reports_failing_method_without_aborting() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.json",
        r#"{"scenario": "rotating_xz", "omega_khz": 1, "omega0z_khz": 2, "omega_x_khz": 2,
            "phi0z_over_pi": 0.5, "t_span_tau": [0, 1], "samples_per_period": 63}"#,
    );
    // The field vanishes at τ = 1/4, which this grid steps over; the closed form
    // still refuses the crossing.
    let out = xzdress(
        &["compare", "--config", cfg.to_str().unwrap(), "--methods", "exact,adiabatic,exact", "--report", "r.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&dir.path().join("r.json"));
    assert_eq!(r["failures"].as_array().unwrap().len(), 1);
    assert_eq!(r["failures"][0]["exit_code"], 3);
}

#[test]
fn rotating_sweep_shows_adiabatic_convergence() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.json",
        r#"{"scenario": "rotating_xz", "omega_khz": 1, "omega0z_khz": 4, "omega_x_khz": 0.8,
            "phi0z_over_pi": 0.5, "t_span_tau": [0, 1], "samples_per_period": 256}"#,
    );
    let out = xzdress(
        &["sweep", "--config", cfg.to_str().unwrap(), "--param", "omega_khz", "--values", "2,1,0.5", "--jobs", "3"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let dev = csv_column(&dir.path().join("sweep.csv"), "adiabatic_max_dev_sy");
    assert_eq!(dev.len(), 3);
    assert!(dev[0] > dev[1] && dev[1] > dev[2], "{dev:?}");
    let omega = csv_column(&dir.path().join("sweep.csv"), "omega_khz");
    assert_eq!(omega, [2.0, 1.0, 0.5]);
}

#[test]
fn sweep_validation() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&xzdress(&["sweep", "--preset", "fig2c", "--param", "omega_khz"], dir.path())), 2);
    let out = xzdress(&["sweep", "--preset", "fig2c", "--param", "rtol", "--values", "1"], dir.path());
    assert_eq!(code(&out), 2);
    let out = xzdress(&["sweep", "--preset", "fig3", "--param", "omega_khz", "--values", "-1,1.028", "--report", "r.json"], dir.path());
    assert_eq!(code(&out), 0);
    assert_eq!(read_json(&dir.path().join("r.json"))["failed_points"], 1);
}
