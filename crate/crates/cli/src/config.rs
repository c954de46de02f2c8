//! Run configuration: defaults, then an optional `key=value` file, then the
//! `ESCHLAB_SEED` variable, then flags.

use std::path::Path;

use anyhow::{bail, Context};
use eschlab_core::rng::DEFAULT_SEED;
use eschlab_core::su3::DEFAULT_T;
use eschlab_core::Tolerances;
use serde::Serialize;

pub const SEED_VAR: &str = "ESCHLAB_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: usize,
    pub t: f64,
    pub tolerances: Tolerances,
    /// `None` lets each command pick its natural format.
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            samples: eschlab_core::eschenburg::DEFAULT_SAMPLES,
            t: DEFAULT_T,
            tolerances: Tolerances::default(),
            format: None,
        }
    }
}

pub fn parse_seed(s: &str) -> anyhow::Result<u64> {
    let s = s.trim();
    let v = match s.strip_prefix("0x") {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    v.with_context(|| format!("invalid seed {s:?}"))
}

pub fn parse_t(s: &str) -> anyhow::Result<f64> {
    let t: f64 = s.trim().parse().with_context(|| format!("invalid t {s:?}"))?;
    if !(t.is_finite() && t > 0.0) {
        bail!("t must be positive and finite, got {t}");
    }
    Ok(t)
}

fn parse_format(s: &str) -> anyhow::Result<Format> {
    match s.trim() {
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        "text" => Ok(Format::Text),
        other => bail!("unknown format {other:?}"),
    }
}

/// `key=value` with the tolerance key and a positive value.
pub fn apply_tolerance(tol: &mut Tolerances, spec: &str) -> anyhow::Result<()> {
    let (k, v) = spec
        .split_once('=')
        .with_context(|| format!("expected key=value, got {spec:?}"))?;
    let v: f64 = v.trim().parse().with_context(|| format!("invalid tolerance value in {spec:?}"))?;
    tol.set(k.trim(), v)?;
    Ok(())
}

impl RunConfig {
    pub fn apply_line(&mut self, key: &str, value: &str) -> anyhow::Result<()> {
        match key {
            "seed" => self.seed = parse_seed(value)?,
            "samples" => self.samples = value.trim().parse().context("invalid samples")?,
            "t" => self.t = parse_t(value)?,
            "format" => self.format = Some(parse_format(value)?),
            k => match k.strip_prefix("tol.") {
                Some(name) => apply_tolerance(&mut self.tolerances, &format!("{name}={value}"))?,
                None => bail!("unknown config key {k:?}"),
            },
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> anyhow::Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .with_context(|| format!("{}:{}: expected key=value", path.display(), n + 1))?;
            self.apply_line(k.trim(), v.trim())
                .with_context(|| format!("{}:{}", path.display(), n + 1))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# comment\nseed = 0x10\nt=2.5\ntol.curvature=1e-7\nformat=text\n").unwrap();
        let mut cfg = RunConfig::default();
        cfg.apply_file(&path).unwrap();
        assert_eq!(cfg.seed, 16);
        assert_eq!(cfg.t, 2.5);
        assert_eq!(cfg.tolerances.curvature, 1e-7);
        assert_eq!(cfg.format, Some(Format::Text));
        assert!(cfg.apply_line("bogus", "1").is_err());
        assert!(cfg.apply_line("t", "-1").is_err());
        assert!(cfg.apply_line("tol.curvature", "0").is_err());
    }
}
