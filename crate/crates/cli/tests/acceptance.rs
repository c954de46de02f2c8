//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use eschlab_core::suite::{run_criterion, Level, SuiteConfig, CRITERIA};

const SEED: u64 = 20240611;

fn line(id: u8, passed: bool, elapsed: Duration, summary: &str) {
    let name = CRITERIA[(id - 1) as usize].1;
    println!(
        "criterion {id} [{name}]: {} ({:.2} s) {summary}",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
}

/// Runs `verify-paper fast` through the binary and returns stdout and the wall time.
fn verify_fast() -> Result<(Vec<u8>, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_eschlab"))
        .args(["verify-paper", "fast", "--seed", &SEED.to_string()])
        .env_remove("ESCHLAB_SEED")
        .output()
        .map_err(|e| format!("spawning eschlab: {e}"))?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!(
            "verify-paper fast exited with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok((out.stdout, elapsed))
}

fn determinism() -> (bool, Duration, String) {
    let start = Instant::now();
    let runs = verify_fast().and_then(|a| verify_fast().map(|b| (a, b)));
    let elapsed = start.elapsed();
    match runs {
        Err(e) => (false, elapsed, e),
        Ok(((first, t1), (second, t2))) => {
            let same = first == second;
            let quick = t1 < Duration::from_secs(60) && t2 < Duration::from_secs(60);
            let summary = format!(
                "two CLI runs: {} bytes, {}; wall times {:.2} s and {:.2} s (limit 60 s)",
                first.len(),
                if same { "byte-identical" } else { "different" },
                t1.as_secs_f64(),
                t2.as_secs_f64()
            );
            (same && quick, elapsed, summary)
        }
    }
}

fn main() -> ExitCode {
    let cfg = SuiteConfig::new(Level::Fast, SEED);
    let limits = [(1u8, 30u64), (2, 60)];
    let mut all = true;
    for id in 1..=8u8 {
        let start = Instant::now();
        let report = run_criterion(id, &cfg).expect("known criterion");
        let elapsed = start.elapsed();
        let mut passed = report.passed;
        let mut summary = report.summary;
        if let Some(&(_, secs)) = limits.iter().find(|(i, _)| *i == id) {
            if elapsed >= Duration::from_secs(secs) {
                passed = false;
                summary.push_str(&format!("; over the {secs} s limit"));
            }
        }
        all &= passed;
        line(id, passed, elapsed, &summary);
    }
    let (passed, elapsed, summary) = determinism();
    all &= passed;
    line(9, passed, elapsed, &summary);
    println!("acceptance: {}", if all { "all criteria passed" } else { "FAILED" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
