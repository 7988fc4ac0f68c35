//! End-to-end checks of the command-line tool: byte-exact round trips,
//! reproducibility, reloadable config echoes, single-line errors, and
//! the window-cap runtime bound.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use adf_cli::config::Config;
use adf_cli::experiments::run_bench;

fn adf_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adf"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = adf_bin().args(args).output().expect("spawn");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_err(args: &[&str]) -> Output {
    let out = adf_bin().args(args).output().expect("spawn");
    assert!(!out.status.success(), "command {args:?} unexpectedly passed");
    out
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

fn with_config(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".config");
    PathBuf::from(p)
}

#[test]
fn ingest_output_reingests_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("rec.csv");
    // Awkward values: shortest round-trip formatting must survive a
    // full emit -> parse -> emit cycle untouched.
    let mut text = String::from("t,x\n");
    let mut t = 0.0f64;
    let mut x = 0.1f64;
    for _ in 0..200 {
        t += 0.0005;
        x += 1.0 / 3.0e4 + t * 1e-7;
        text.push_str(&format!("{t},{x}\n"));
    }
    std::fs::write(&input, &text).unwrap();

    let out1 = dir.path().join("pass1.csv");
    let out2 = dir.path().join("pass2.csv");
    run_ok(&["ingest", "--input", input.to_str().unwrap(), "--out", out1.to_str().unwrap()]);
    // The emitted trace leads with the same `t,x` columns, so it can be
    // fed straight back in; identical samples give identical estimates.
    run_ok(&["ingest", "--input", out1.to_str().unwrap(), "--out", out2.to_str().unwrap()]);
    assert_eq!(read(&out1), read(&out2));
}

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let common = [
        "--set",
        "duration=0.3",
        "--set",
        "signal=step",
        "--set",
        "step_amplitude=0.005",
        "--set",
        "noise=gaussian",
    ];
    let mut args_a = vec!["loop", "--out", a.to_str().unwrap()];
    args_a.extend_from_slice(&common);
    let mut args_b = vec!["loop", "--out", b.to_str().unwrap()];
    args_b.extend_from_slice(&common);
    let out_a = run_ok(&args_a);
    let out_b = run_ok(&args_b);
    assert_eq!(read(&a), read(&b));
    assert_eq!(read(&with_config(&a)), read(&with_config(&b)));
    // Timing lines differ run to run; every other metric must agree.
    let strip = |o: &Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .filter(|l| !l.starts_with("runtime_ns_per_sample="))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&out_a), strip(&out_b));
    let stdout = String::from_utf8_lossy(&out_a.stdout).to_string();
    assert!(stdout.contains("seed=1"), "seed must be logged: {stdout}");
}

#[test]
fn config_echo_reloads_into_the_same_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    run_ok(&[
        "bench",
        "--out",
        first.to_str().unwrap(),
        "--set",
        "duration=0.25",
        "--set",
        "delta=0.0002",
        "--set",
        "seed=9",
        "--set",
        "noise=uniform",
    ]);
    let echo = with_config(&first);
    let again = dir.path().join("again.csv");
    run_ok(&[
        "bench",
        "--out",
        again.to_str().unwrap(),
        "--config",
        echo.to_str().unwrap(),
    ]);
    assert_eq!(read(&first), read(&again));
    assert_eq!(read(&echo), read(&with_config(&again)));
}

#[test]
fn failures_exit_nonzero_with_one_error_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.csv");
    let out_s = out.to_str().unwrap();

    let check = |output: Output, needle: &str| {
        let stderr = String::from_utf8_lossy(&output.stderr).to_string();
        assert_eq!(stderr.trim_end().lines().count(), 1, "stderr: {stderr}");
        assert!(stderr.starts_with("error: "), "stderr: {stderr}");
        assert!(stderr.contains(needle), "stderr: {stderr}");
        assert!(output.stdout.is_empty());
        assert!(!out.exists(), "failed run must not leave a trace file");
    };

    let missing = dir.path().join("missing.csv");
    check(
        run_err(&["ingest", "--input", missing.to_str().unwrap(), "--out", out_s]),
        "cannot read",
    );

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "t,x\n0,0\n0.0005,zap\n").unwrap();
    check(
        run_err(&["ingest", "--input", bad.to_str().unwrap(), "--out", out_s]),
        "line 3",
    );

    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    check(
        run_err(&["ingest", "--input", empty.to_str().unwrap(), "--out", out_s]),
        "no samples",
    );

    check(
        run_err(&["bench", "--out", out_s, "--set", "waveform=sine"]),
        "unknown config key",
    );

    check(
        run_err(&["bench", "--out", out_s, "--set", "duration=0"]),
        "duration",
    );
}

/// Growing the window cap must grow per-sample cost at most linearly.
/// A noisy ramp keeps the window pinned at the cap, the worst case.
/// Quadratic behaviour would show a 16x leap from cap 35 to 140; the
/// linear implementation stays near 4x, asserted with slack for timer
/// noise.
#[test]
fn per_sample_cost_grows_linearly_in_the_window_cap() {
    let time_at = |r_max: u32| -> f64 {
        let mut cfg = Config::default();
        cfg.set("signal", "slope").unwrap();
        cfg.set("slope_t_start", "0").unwrap();
        cfg.set("slope_target", "1e9").unwrap();
        cfg.set("noise", "uniform").unwrap();
        cfg.set("duration", "10").unwrap();
        cfg.set("r_max", &r_max.to_string()).unwrap();
        cfg.validate().unwrap();
        (0..3)
            .map(|_| {
                let art = run_bench(&cfg).unwrap();
                assert_eq!(
                    art.metrics.get("r_star_max").unwrap(),
                    format!("{r_max}"),
                    "window must ride the cap for a worst-case timing"
                );
                art.metrics
                    .get("runtime_ns_per_sample")
                    .unwrap()
                    .parse::<f64>()
                    .unwrap()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let t35 = time_at(35);
    let t70 = time_at(70);
    let t140 = time_at(140);
    assert!(
        t70 / t35 < 5.0 && t140 / t70 < 5.0,
        "a cap doubling more than quintupled per-sample time: {t35} -> {t70} -> {t140} ns"
    );
    assert!(
        t140 / t35 < 10.0,
        "cap 35 -> 140 scaled per-sample time by {:.1}x ({t35} ns -> {t140} ns)",
        t140 / t35
    );
}
