//! Numerical thresholds shared by the certificate builders and the suites.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `<phi X, V>_0` for unit `X`.
    pub horizontality: f64,
    /// Norms of the brackets in the zero criterion.
    pub bracket: f64,
    /// Gram-normalized curvature counted as zero.
    pub curvature: f64,
    /// Bound on every residual recorded in a certificate.
    pub certificate: f64,
    /// Algebraic identities between closed forms.
    pub identity: f64,
    /// Closed-form derivatives against central differences.
    pub derivative: f64,
    /// Orbit invariants under group translations.
    pub invariant: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            horizontality: 1e-10,
            bracket: 1e-10,
            curvature: 1e-8,
            certificate: 1e-9,
            identity: 1e-10,
            derivative: 1e-6,
            invariant: 1e-12,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 7] = [
        "horizontality",
        "bracket",
        "curvature",
        "certificate",
        "identity",
        "derivative",
        "invariant",
    ];

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance {key} must be positive, got {value}"
            )));
        }
        let slot = match key {
            "horizontality" => &mut self.horizontality,
            "bracket" => &mut self.bracket,
            "curvature" => &mut self.curvature,
            "certificate" => &mut self.certificate,
            "identity" => &mut self.identity,
            "derivative" => &mut self.derivative,
            "invariant" => &mut self.invariant,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown tolerance '{key}' (expected one of {})",
                    Self::KEYS.join(", ")
                )))
            }
        };
        *slot = value;
        Ok(())
    }

    /// Sets every tolerance to `value`.
    pub fn uniform(value: f64) -> Self {
        Tolerances {
            horizontality: value,
            bracket: value,
            curvature: value,
            certificate: value,
            identity: value,
            derivative: value,
            invariant: value,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let mut t = Tolerances::default();
        t.set("curvature", 1e-30).unwrap();
        assert_eq!(t.curvature, 1e-30);
        assert!(t.set("nope", 1.0).is_err());
        assert!(t.set("bracket", -1.0).is_err());
    }
}
