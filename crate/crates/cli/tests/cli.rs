use qha_cli::{list_experiments, render_plot, ExperimentConfig, PlotKind, SCHEMA};
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn qha(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qha")).args(args).env_remove("QHA_CACHE_DIR").output().expect("qha runs")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn check<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn registry_has_ten_anchored_entries() {
    let list = list_experiments();
    assert_eq!(list.len(), 10);
    assert!(list.iter().any(|(n, _, _)| *n == "sphere-schatten"));
    assert!(list.iter().all(|(_, d, a)| !d.is_empty() && !a.is_empty()));

    let o = qha(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for (name, _, _) in list {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn unknown_key_lists_valid_keys() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = qha(&["compactness", "--gamma=1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("gamma") && err.contains("valid keys"), "{err}");
    assert!(err.contains("measure") && err.contains("seed"), "{err}");
    assert!(!out.exists());

    let e = ExperimentConfig::new("compactness").unwrap().apply_override("gamma=1").unwrap_err();
    assert_eq!(e.exit_code(), 1);
}

#[test]
fn unknown_experiment_prints_registry() {
    let o = qha(&["no-such-thing"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("no-such-thing") && err.contains("sphere-schatten"), "{err}");
}

#[test]
fn mistyped_value_is_a_usage_error() {
    let o = qha(&["compactness", "--index=lots"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn dirac_compactness_is_not_compact() {
    let dir = tempfile::tempdir().unwrap();
    let o = qha(&["compactness", "--measure=dirac", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(dir.path());
    assert_eq!(check(&r, "verdict")["detail"], "not compact");
    assert_eq!(check(&r, "all_unit")["passed"], true);
    assert_eq!(r["passed"], true);
}

#[test]
fn report_schema_and_truncation_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let o = qha(&["compactness", "--measure=dirac", "--N=32", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(dir.path());
    assert_eq!(r["schema"], SCHEMA);
    assert_eq!(r["experiment"], "compactness");
    assert_eq!(r["n"], 32);
    assert_eq!(r["n_2n"], 64);
    assert_eq!(r["gates_passed"], true);
    let results = r["results"].as_object().unwrap();
    assert!(!results.is_empty());
    for (k, m) in results {
        let m = m.as_object().unwrap();
        assert!(m.contains_key("value") && m.contains_key("value_2n") && m.contains_key("delta"), "{k}");
    }
    // Timestamps live only in the meta file.
    assert!(!std::fs::read_to_string(dir.path().join("report.json")).unwrap().contains("timestamp"));
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.meta.json")).unwrap()).unwrap();
    assert!(meta["timestamp_unix"].is_u64());
}

#[test]
fn config_precedence_is_defaults_file_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"measure": "dirac", "index": 10, "rays": 8, "seed": 5}"#).unwrap();
    let out = dir.path().join("r");
    let o = qha(&["compactness", "--config", cfg.to_str().unwrap(), "--index=20", "--seed", "7", "--N=16", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let c = &report(&out)["config"];
    assert_eq!(c["experiment"], "compactness");
    assert_eq!(c["params"]["measure"], "dirac");
    assert_eq!(c["params"]["rays"], 8);
    assert_eq!(c["params"]["index"], 20);
    assert_eq!(c["params"]["radius_samples"], 4);
    assert_eq!(c["seed"], 7);
    assert_eq!(c["N"], 16);
}

#[test]
fn config_file_for_another_experiment_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"experiment": "transfer"}"#).unwrap();
    let o = qha(&["compactness", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gate_failure_exits_two_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let o = qha(&["compactness", "--measure=dirac", "--gate_tolerance=0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let r = report(dir.path());
    assert_eq!(r["gates_passed"], false);
    assert!(r["checks"].as_array().unwrap().is_empty());
}

#[test]
fn same_seed_gives_identical_reports_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = qha(&[
            "werner-young",
            "--N=8",
            "--trials=12",
            "--fun_M=24",
            "--span=4",
            "--workers",
            workers,
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(out.join("report.json")).unwrap()
    };
    let a = run("a", "1", "3");
    let b = run("b", "3", "3");
    let c = run("c", "1", "4");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn sphere_schatten_writes_spectrum_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let o = qha(&["sphere-schatten", "--n_max=20000", "--fit_lo=100", "--fit_hi=10000", "--out", dir.path().to_str().unwrap()]);
    assert!(matches!(o.status.code(), Some(0) | Some(3)), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("n,lambda_n\n"));
    assert_eq!(csv.lines().count(), 20001);
    let svg = std::fs::read_to_string(dir.path().join("plot.svg")).unwrap();
    assert!(svg.contains("slope="));
    assert!(dir.path().join("ratios.svg").exists());

    // Rendering is a pure function of the CSV bytes.
    let again = dir.path().join("again.svg");
    let spectrum = dir.path().join("spectrum.csv");
    let o = qha(&["plot", spectrum.to_str().unwrap(), "--kind", "loglog-spectrum", "--out", again.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read(&again).unwrap(), svg.as_bytes());
}

#[test]
fn plot_rendering_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.csv");
    let mut body = String::from("n,lambda_n\n");
    for n in 1..2000 {
        body.push_str(&format!("{n},{}\n", 0.7 * (n as f64).powf(-0.25)));
    }
    std::fs::write(&p, body).unwrap();
    let a = render_plot(&p, PlotKind::LoglogSpectrum).unwrap();
    let b = render_plot(&p, PlotKind::LoglogSpectrum).unwrap();
    assert_eq!(a, b);
    assert!(a.contains("slope=-0.2500"), "{a}");

    let r = dir.path().join("r.csv");
    std::fs::write(&r, "p,ratio\n3.0,0.5\n4.0,0.2\n5.0,0.01\n").unwrap();
    let svg = render_plot(&r, PlotKind::RatioCurve).unwrap();
    assert!(svg.contains("crossing"));
}

#[test]
fn empty_or_malformed_csv_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let out = dir.path().join("x.svg");
    let o = qha(&["plot", empty.to_str().unwrap(), "--kind", "loglog-spectrum", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b\n1,2\n").unwrap();
    assert!(render_plot(&bad, PlotKind::LoglogSpectrum).is_err());
    let words = dir.path().join("words.csv");
    std::fs::write(&words, "n,lambda_n\n1,x\n2,y\n").unwrap();
    assert!(render_plot(&words, PlotKind::LoglogSpectrum).is_err());
    let missing = dir.path().join("missing.csv");
    let o = qha(&["plot", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
