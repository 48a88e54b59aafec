//! Numerical tolerances shared by every stage of the analysis.
//!
//! Two families are kept apart: `alg` governs pointwise algebra on jets
//! (frame orthogonality, Weingarten duality), `class` governs predicates
//! that involve outer finite differences (e.g. derivatives of `alpha`).

use serde::{Deserialize, Serialize};
use std::path::Path;

/// Environment variable naming a TOML file with default tolerances.
pub const CONFIG_ENV: &str = "CONECYL_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Pointwise algebraic tolerance.
    pub alg: f64,
    /// Classification-predicate tolerance.
    pub class: f64,
    /// Causal-character tolerance (relative to `1 + |v|^2`).
    pub causal: f64,
    /// Symmetry tolerance for shape-operator matrices (relative).
    pub symmetry: f64,
    /// Positive-definiteness threshold for Gram matrices (relative).
    pub gram: f64,
    /// Cone-constraint tolerance (relative to `1 + |x|^2`).
    pub cone: f64,
    /// Relative outer-difference step: `h = step * (1 + |u|)`.
    pub step: f64,
    /// Relative step for the metric-only curvature oracle.
    pub metric_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            alg: 1e-8,
            class: 1e-5,
            causal: 1e-9,
            symmetry: 1e-9,
            gram: 1e-9,
            cone: 1e-9,
            step: 1e-4,
            metric_step: 1e-3,
        }
    }
}

impl Tolerances {
    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_toml_str(&text)
    }

    /// Defaults, overridden by the file named in [`CONFIG_ENV`] when set.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) => Self::from_file(Path::new(&p)),
            None => Ok(Self::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_toml_keeps_defaults() {
        let t = Tolerances::from_toml_str("class = 1e-3\n").unwrap();
        assert_eq!(t.class, 1e-3);
        assert_eq!(t.alg, Tolerances::default().alg);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(Tolerances::from_toml_str("bogus = 1").is_err());
    }
}
