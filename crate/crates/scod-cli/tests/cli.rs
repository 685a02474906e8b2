//! End-to-end checks of the binary: round-trips and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn scod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("scod-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn round_trip_generate_export_verify_all_orders() {
    for a in 1u32..=10 {
        for (family, routes) in [("g", vec!["premultiply"]), ("h", vec!["premultiply", "partition", "recursive"])] {
            for route in routes {
                for (fmt, other) in [("text", "json"), ("json", "text")] {
                    let f1 = tmp(&format!("full-{family}-{a}-{route}-{fmt}-1"));
                    let f2 = tmp(&format!("full-{family}-{a}-{route}-{fmt}-2"));
                    for step in [
                        scod(&[
                            "generate", "--a", &a.to_string(), "--family", family, "--route",
                            route, "--format", fmt, "--out", f1.to_str().unwrap(),
                        ]),
                        scod(&[
                            "export", "--in", f1.to_str().unwrap(), "--to", other, "--out",
                            f2.to_str().unwrap(),
                        ]),
                        scod(&["verify", "--path", f2.to_str().unwrap()]),
                    ] {
                        assert!(step.status.success(), "a={a} {family} {route} {fmt}: {step:?}");
                    }
                    std::fs::remove_file(&f1).ok();
                    std::fs::remove_file(&f2).ok();
                }
            }
        }
    }
}

#[test]
fn exit_codes_are_distinct() {
    // Usage error (a = 0 rejected by the range parser).
    let out = scod(&["generate", "--a", "0", "--family", "g"]);
    assert_eq!(out.status.code(), Some(2), "usage: {out:?}");

    // Parse failure on a corrupted file.
    let bad = tmp("bad-parse");
    std::fs::write(&bad, "scod-design v1\nn 2\nk 2\nscale_num 0\nx1\tx?\nx2\tx1*\n").unwrap();
    let out = scod(&["verify", "--path", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "parse: {out:?}");
    std::fs::remove_file(&bad).ok();

    // Verification failure: flip one sign of an otherwise valid design.
    let good = tmp("good");
    let out = scod(&["generate", "--a", "2", "--family", "g", "--out", good.to_str().unwrap()]);
    assert!(out.status.success());
    let content = std::fs::read_to_string(&good).unwrap();
    let corrupted = content.replacen("x3\t0", "-x3\t0", 1);
    assert_ne!(content, corrupted, "corruption must hit a cell");
    let badfile = tmp("corrupted");
    std::fs::write(&badfile, corrupted).unwrap();
    let out = scod(&["verify", "--path", badfile.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "verify: {out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("Gram cell"), "must report the offending cell: {stdout}");
    std::fs::remove_file(&good).ok();
    std::fs::remove_file(&badfile).ok();
}

#[test]
fn tables_self_check_passes() {
    let out = scod(&["tables", "--check"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("all embedded values match"));
    assert!(stdout.contains("65519/65536"));
}

#[test]
fn analyze_reports_metrics() {
    let out = scod(&["analyze", "--a", "5", "--family", "h", "--format", "json"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("\"zero_fraction\": \"1/4\""), "{stdout}");
    assert!(stdout.contains("\"papr_flat\": \"4/3\""), "{stdout}");
    assert!(stdout.contains("restricted-unit"), "{stdout}");
}

#[test]
fn simulate_rejects_invalid_config() {
    let cfg = tmp("missing-constellation.toml");
    std::fs::write(
        &cfg,
        "designs = [\"g\"]\na = 2\npower_mode = \"average\"\nsnr_db = [0.0]\ntrials_per_point = 10\nseed = 1\n",
    )
    .unwrap();
    let out = scod(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("constellation"), "{stderr}");
    std::fs::remove_file(&cfg).ok();
}

#[test]
fn simulate_runs_tiny_campaign_deterministically() {
    let cfg = tmp("tiny.toml");
    std::fs::write(
        &cfg,
        "designs = [\"g\", \"h\", \"gy\"]\na = 3\nconstellation = \"qpsk\"\npower_mode = \"peak\"\nsnr_db = [0.0, 2.0]\ntrials_per_point = 2000\nseed = 5\n",
    )
    .unwrap();
    let out1 = scod(&["simulate", "--config", cfg.to_str().unwrap()]);
    let out2 = scod(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert!(out1.status.success());
    assert_eq!(out1.stdout, out2.stdout, "same seed, same records");
    let changed = scod(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "6"]);
    assert_ne!(out1.stdout, changed.stdout);
    std::fs::remove_file(&cfg).ok();
}

#[test]
fn bundled_presets_run_and_their_checks_pass() {
    // Average-power preset: curve-coincidence check must pass.
    let out = scod(&["simulate", "--config", "fig1_desk"]);
    assert!(out.status.success(), "{out:?}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("curves coincide"), "{stderr}");

    // Peak-power preset: measured shift must sit at 10*log10(2) dB.
    let out = scod(&["simulate", "--config", "peak_a3"]);
    assert!(out.status.success(), "{out:?}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("measured shift"), "{stderr}");
}

#[test]
fn generate_large_order_streams() {
    let out = scod(&["generate", "--a", "13", "--family", "h"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("scod-design v1\nn 8192\nk 14\nscale_num -9\n"));
    assert_eq!(text.lines().count(), 5 + 8192);
}
