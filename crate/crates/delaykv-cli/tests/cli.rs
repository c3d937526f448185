//! Behavioral tests of the binary: exit codes, config-file handling,
//! flag precedence, and output formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_delaykv"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn success_exits_zero_with_csv_on_stdout() {
    let out = bin()
        .args(["instability", "--lambda-k", "1.0", "--theta", "0.7"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout.starts_with("lambda_k,theta,y,a,tau,residual"),
        "unexpected header: {stdout}"
    );
    assert_eq!(stdout.lines().count(), 2);
}

#[test]
fn invalid_parameters_exit_one() {
    let out = bin()
        .args([
            "spectrum",
            "--a",
            "0.0",
            "--tau",
            "0.5",
            "--lambda-k",
            "1.0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", stderr_of(&out));
    assert!(
        stderr_of(&out).starts_with("error:"),
        "missing error prefix: {}",
        stderr_of(&out)
    );
}

#[test]
fn runtime_failures_exit_two() {
    // Far too few steps per delay for this stiffness; the integrator
    // blows past the divergence limit.
    let out = bin()
        .args([
            "simulate",
            "--a",
            "1.0",
            "--tau",
            "0.5",
            "--lambda-k",
            "10000",
            "--m",
            "8",
            "--T",
            "5.0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("diverged"), "{}", stderr_of(&out));
}

#[test]
fn config_file_supplies_parameters() {
    let path = tmp("ok.toml");
    std::fs::write(
        &path,
        "a = 1.0\ntau = 0.5\nlambda_k = [1.0, 4.0]\nbranches = 2\n",
    )
    .unwrap();
    let out = bin()
        .args(["spectrum", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let stdout = String::from_utf8(out.stdout).unwrap();
    // Two modes plus five sigma branches, after the header.
    let mode_rows = stdout.lines().skip(1).filter(|l| l.ends_with("]")).count();
    let sigma_rows = stdout.lines().filter(|l| l.contains("sigma")).count();
    assert!(mode_rows > 0, "no mode rows:\n{stdout}");
    assert_eq!(sigma_rows, 5, "wrong sigma row count:\n{stdout}");
}

#[test]
fn flags_override_the_config_file() {
    let path = tmp("override.toml");
    std::fs::write(&path, "a = 1.0\ntau = 0.5\nlambda_k = [1.0]\n").unwrap();
    // tau > a from the flag must flip the verdict line on stderr.
    let out = bin()
        .args(["spectrum", "--config"])
        .arg(&path)
        .args(["--tau", "3.0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert!(
        stderr_of(&out).contains("unstable"),
        "flag did not override config: {}",
        stderr_of(&out)
    );
}

#[test]
fn unknown_config_keys_are_rejected() {
    let path = tmp("bad_key.toml");
    std::fs::write(&path, "a = 1.0\ntau = 0.5\ndampingg = 2.0\n").unwrap();
    let out = bin()
        .args(["sigma", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", stderr_of(&out));
    assert!(
        stderr_of(&out).contains("dampingg"),
        "unhelpful message: {}",
        stderr_of(&out)
    );
}

#[test]
fn missing_required_parameters_exit_one() {
    let out = bin().args(["sigma", "--a", "1.0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", stderr_of(&out));
    assert!(
        stderr_of(&out).contains("tau"),
        "message does not name the gap: {}",
        stderr_of(&out)
    );
}

#[test]
fn json_extension_switches_the_format() {
    let path = tmp("sigma.json");
    let out = bin()
        .args(["sigma", "--a", "1.0", "--tau", "1.0", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let roots = value["roots"].as_array().unwrap();
    assert!(!roots.is_empty());
    assert!(roots[0]["re"].is_number());
}

#[test]
fn svg_plot_is_emitted_alongside_the_data() {
    let csv = tmp("traj.csv");
    let svg = tmp("traj.svg");
    let out = bin()
        .args([
            "simulate",
            "--a",
            "2.0",
            "--tau",
            "1.0",
            "--lambda-k",
            "1.0",
            "--m",
            "32",
            "--T",
            "10.0",
        ])
        .arg("--out")
        .arg(&csv)
        .arg("--svg")
        .arg(&svg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let plot = std::fs::read_to_string(&svg).unwrap();
    assert!(
        plot.starts_with("<svg"),
        "not an SVG: {}",
        &plot[..40.min(plot.len())]
    );
    assert!(plot.contains("polyline"), "plot has no curve");
    let data = std::fs::read_to_string(&csv).unwrap();
    assert!(
        data.starts_with("t,E,kinetic,potential,history"),
        "unexpected CSV: {}",
        &data[..60.min(data.len())]
    );
}
