use std::process::{Command, Output};

use serde_json::Value;

fn eschlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eschlab"))
        .args(args)
        .env_remove("ESCHLAB_SEED")
        .output()
        .expect("spawn eschlab")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn ok_json(args: &[&str]) -> Value {
    let out = eschlab(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    json_of(&out)
}

#[test]
fn classify_examples() {
    let v = ok_json(&["classify", "--p", "0,1,1", "--q", "0,0,2"]);
    assert_eq!(v["result"]["class"], "AlmostPositive");
    assert_eq!(v["result"]["exceptional"], true);
    assert_eq!(v["result"]["products"].as_array().unwrap().len(), 6);
    let v = ok_json(&["classify", "--p", "1,1,1", "--q", "0,0,3"]);
    assert_eq!(v["result"]["class"], "PositivelyCurved");
    assert_eq!(v["result"]["products"], serde_json::json!([1, 1, 1, 1, 1, 1]));

    assert_eq!(eschlab(&["classify", "--p", "0,0,0", "--q", "0,0,0"]).status.code(), Some(2));
    assert_eq!(eschlab(&["classify", "--p", "0,0", "--q", "0,0,0"]).status.code(), Some(1));
    assert_eq!(eschlab(&["classify", "--p", "0,0,1", "--q", "0,0,0"]).status.code(), Some(2));
    assert_eq!(eschlab(&["classify", "--bogus"]).status.code(), Some(1));
    assert_eq!(eschlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn envelope_fields() {
    let v = ok_json(&["--seed", "0x2a", "--t", "2", "--tol", "curvature=1e-7", "classify", "--p", "0,1,1", "--q", "0,0,2"]);
    assert_eq!(v["tool"], "eschlab");
    assert_eq!(v["seed"], 42);
    assert_eq!(v["t"], 2.0);
    assert_eq!(v["tolerances"]["curvature"], 1e-7);
    assert!(v["version"].is_string());
    assert_eq!(v["command"], "classify");
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "seed=5\nformat=json\n").unwrap();
    let cfg = path.to_str().unwrap();
    let args = ["--config", cfg, "classify", "--p", "0,1,1", "--q", "0,0,2"];
    assert_eq!(ok_json(&args)["seed"], 5);

    let run_env = |extra: &[&str]| {
        let mut all: Vec<&str> = extra.to_vec();
        all.extend_from_slice(&args);
        let out = Command::new(env!("CARGO_BIN_EXE_eschlab"))
            .args(&all)
            .env("ESCHLAB_SEED", "7")
            .output()
            .unwrap();
        json_of(&out)["seed"].clone()
    };
    assert_eq!(run_env(&[]), 7);
    assert_eq!(run_env(&["--seed", "9"]), 9);
}

#[test]
fn enumerate_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cat.jsonl");
    let v = ok_json(&["enumerate", "--max-abs", "2", "--out", path.to_str().unwrap()]);
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["command"], "enumerate");
    let entries = &lines[1..];
    assert_eq!(entries.len() as u64, v["result"]["entries"].as_u64().unwrap());
    for l in entries {
        for key in ["p", "q", "admissible", "class", "products", "canonical_p", "canonical_q"] {
            assert!(!l[key].is_null(), "missing {key}");
        }
    }

    let kerin = ok_json(&["classify", "--p", "0,1,1", "--q", "0,0,2"]);
    let key = &kerin["result"]["canonical"]["eschenburg_isometries"];
    let hits = entries.iter().filter(|l| l["p"] == key["p"] && l["q"] == key["q"]).count();
    assert_eq!(hits, 1);

    let again = eschlab(&["enumerate", "--max-abs", "2"]);
    assert_eq!(again.stdout, text.as_bytes());

    let flat = eschlab(&["enumerate", "--max-abs", "2", "--filter", "FlatPlaneEverywhere"]);
    let flat = String::from_utf8(flat.stdout).unwrap();
    let rows: Vec<Value> = flat.lines().skip(1).map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|l| l["products"].as_array().unwrap().iter().all(|x| x.as_i64().unwrap() <= 0)));

    let zero = eschlab(&["enumerate", "--max-abs", "0"]);
    let zero = String::from_utf8(zero.stdout).unwrap();
    assert!(zero.lines().skip(1).all(|l| !l.contains("AlmostPositive")));

    assert_eq!(eschlab(&["enumerate", "--max-abs", "1000"]).status.code(), Some(2));
    let bad = dir.path().join("missing").join("cat.jsonl");
    let out = eschlab(&["enumerate", "--max-abs", "1", "--out", bad.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));
}

#[test]
fn scan_esch_fractions() {
    let frac = |p: &str, q: &str| {
        ok_json(&["scan-esch", "--p", p, "--q", q, "--samples", "200"])["result"]["fraction"]
            .as_f64()
            .unwrap()
    };
    assert_eq!(frac("0,0,2", "0,1,1"), 1.0);
    assert_eq!(frac("1,1,1", "0,0,3"), 0.0);
    let f = frac("0,0,3", "1,1,1");
    assert!(f > 0.0 && f < 1.0, "{f}");
    assert_eq!(eschlab(&["scan-esch", "--p", "0,0,0", "--q", "0,0,0"]).status.code(), Some(2));
}

#[test]
fn wilking_modes() {
    let v = ok_json(&["wilking", "analyze", "--q", "1,-1,0"]);
    assert_eq!(v["result"]["candidate"]["verdict"], "KnownAlmostPositiveHomogeneous");

    let v = ok_json(&["wilking", "certify", "--q", "3,1,-2"]);
    assert_eq!(v["result"]["case"], "2c");
    assert_eq!(v["result"]["passed"], true);
    assert!(v["result"]["certificate"]["residuals"].is_object());

    let out = eschlab(&["wilking", "analyze", "--q", "2,4,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pairwise"));
    let out = eschlab(&["wilking", "certify", "--q", "2,1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rule"));

    let out = eschlab(&["wilking", "sweep", "--q", "3,1,-2", "--steps", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# {"));
    assert_eq!(lines.next().unwrap(), "theta,h,g,sin_theta_zero,plus_zero,minus_zero");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 11);
    let mid: Vec<&str> = rows[5].split(',').collect();
    let theta: f64 = mid[0].parse().unwrap();
    assert!((theta - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    assert_eq!(mid[1].parse::<f64>().unwrap(), 1.0);
    assert_eq!(mid[2].parse::<f64>().unwrap(), 0.5);
    let again = eschlab(&["wilking", "sweep", "--q", "3,1,-2", "--steps", "11"]);
    assert_eq!(again.stdout, text.as_bytes());
}

#[test]
fn verify_paper_negative_control() {
    let ok = eschlab(&["verify-paper", "fast", "--criteria", "5,6"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let v = json_of(&ok);
    assert_eq!(v["result"]["passed"], true);
    assert_eq!(v["result"]["criteria"].as_array().unwrap().len(), 2);

    let bad = eschlab(&["--tol", "identity=1e-30", "verify-paper", "fast", "--criteria", "5"]);
    assert_eq!(bad.status.code(), Some(3));
    assert_eq!(json_of(&bad)["result"]["passed"], false);

    let bad = eschlab(&["--tol", "curvature=1e-30", "verify-paper", "fast", "--criteria", "6"]);
    assert_eq!(bad.status.code(), Some(3));

    assert_eq!(eschlab(&["verify-paper", "medium"]).status.code(), Some(1));
    assert_eq!(eschlab(&["verify-paper", "fast", "--criteria", "12"]).status.code(), Some(1));
}
