use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gapwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapwave"))
        .args(args)
        .output()
        .expect("spawn gapwave")
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn sturm_suite_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    let o = gapwave(&[
        "sturm",
        "--m-range",
        "1..8",
        "--trials",
        "200",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["schema"], "gapwave/1");
    assert_eq!(s["pass"], true);
    let rows = s["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 200);
    assert!(rows
        .iter()
        .all(|r| r["count"].as_u64().unwrap() >= 2 * r["m"].as_u64().unwrap()));
    assert!(!out.join("failures.json").exists());
}

#[test]
fn density_meets_tail_bound_and_writes_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("d");
    let o = gapwave(&[
        "density",
        "--gap",
        "3",
        "--band",
        "8",
        "--window",
        "628",
        "--seed",
        "2",
        "--svg",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = summary(&out);
    let tail = s["results"]["trials"][0]["tail_min"].as_f64().unwrap();
    assert!(tail >= 3.0 / std::f64::consts::PI * 0.95);
    let csv = fs::read_to_string(out.join("density.csv")).unwrap();
    assert!(csv.starts_with("r,s,density"));
    assert!(fs::read_to_string(out.join("density.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn bogus_kind_is_invalid() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "kind = \"bogus\"\n").unwrap();
    assert_eq!(
        gapwave(&["run", "--config", cfg.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn unknown_parameter_and_bad_values_are_invalid() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, "kind = \"heat\"\n[parameters]\nspeed = 3\n").unwrap();
    assert_eq!(
        gapwave(&["run", "--config", cfg.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let out = tmp.path().join("o");
    assert_eq!(
        gapwave(&["density", "--gap", "-1", "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        gapwave(&["example1", "--intervals", "5-3", "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("h");
    let cfg = tmp.path().join("h.toml");
    fs::write(
        &cfg,
        format!(
            "kind = \"heat\"\nseed = 5\noutput_dir = {:?}\n[parameters]\nsteps = 10\ngap = 2\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = gapwave(&["run", "--config", cfg.to_str().unwrap(), "--seed", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["seed"], 6);
    assert_eq!(s["parameters"]["steps"], 10);
    assert_eq!(s["results"]["counts"].as_array().unwrap().len(), 11);

    let o = gapwave(&["heat", "--config", cfg.to_str().unwrap(), "--steps", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(summary(&out)["results"]["counts"].as_array().unwrap().len(), 5);
}

#[test]
fn summaries_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = gapwave(&["decompose", "--seed", "9", "--gap", "2", "--out", dir.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(
        fs::read(a.join("summary.json")).unwrap(),
        fs::read(b.join("summary.json")).unwrap()
    );
    assert_eq!(
        fs::read(a.join("phase_curve.csv")).unwrap(),
        fs::read(b.join("phase_curve.csv")).unwrap()
    );
}

#[test]
fn failed_invariant_exits_one_with_record() {
    // The desk-scale zero density misses the 10% band around m + eta.
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("e2");
    let o = gapwave(&["example2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let f: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("failures.json")).unwrap()).unwrap();
    assert_eq!(f["schema"], "gapwave/1");
    assert_eq!(f["failures"].as_array().unwrap().len(), 1);
    assert_eq!(summary(&out)["pass"], false);
}

#[test]
fn example1_zero_free_intervals() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("e1");
    let o = gapwave(&["example1", "--json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(s["results"]["intervals"]
        .as_array()
        .unwrap()
        .iter()
        .all(|i| i["sign_changes"] == 0));
}
