use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and work budgets shared by every numerical kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub series_terms_max: usize,
    pub quadrature_subdivision_max: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            series_terms_max: 400,
            quadrature_subdivision_max: 200_000,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.abs_tol) || !positive(self.rel_tol) {
            return Err(Error::invalid(format!(
                "tolerances must be finite and positive (abs_tol={}, rel_tol={})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.series_terms_max == 0 || self.quadrature_subdivision_max == 0 {
            return Err(Error::invalid("work budgets must be positive"));
        }
        Ok(())
    }

    /// Same budgets, tighter absolute target.
    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = ToleranceConfig::default();
        assert_eq!(cfg.abs_tol, 1e-12);
        assert_eq!(cfg.rel_tol, 1e-10);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_nonpositive() {
        let cfg = ToleranceConfig {
            abs_tol: 0.0,
            ..ToleranceConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = ToleranceConfig {
            series_terms_max: 0,
            ..ToleranceConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn partial_toml_keeps_defaults() {
        let cfg: ToleranceConfig = toml::from_str("abs_tol = 1e-9").unwrap();
        assert_eq!(cfg.abs_tol, 1e-9);
        assert_eq!(cfg.rel_tol, 1e-10);
    }
}
