use serde::Serialize;

use crate::dual_system::ExclusionSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Exact,
    MinimalNotComplete,
    CompleteNotMinimal,
}

impl Regime {
    pub fn is_complete(self) -> bool {
        !matches!(self, Regime::MinimalNotComplete)
    }

    pub fn is_minimal(self) -> bool {
        !matches!(self, Regime::CompleteNotMinimal)
    }
}

/// The half-open exactness window `[M − 1/2, M + 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub lower: f64,
    pub upper: f64,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl Window {
    pub fn for_m(m: usize) -> Window {
        let m = m as f64;
        Window {
            lower: m - 0.5,
            upper: m + 0.5,
            lower_closed: true,
            upper_closed: false,
        }
    }

    pub fn contains(&self, alpha: f64) -> bool {
        self.lower <= alpha && alpha < self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifierVerdict {
    pub alpha: f64,
    pub m: usize,
    pub regime: Regime,
    pub window: Window,
}

pub fn classify(alpha: f64, m: usize) -> Result<ClassifierVerdict> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!(
            "alpha must be positive and finite, got {alpha}"
        )));
    }
    if m == 0 {
        return Err(Error::domain("M must be at least 1"));
    }
    let window = Window::for_m(m);
    let regime = if alpha < window.lower {
        Regime::MinimalNotComplete
    } else if alpha < window.upper {
        Regime::Exact
    } else {
        Regime::CompleteNotMinimal
    };
    Ok(ClassifierVerdict {
        alpha,
        m,
        regime,
        window,
    })
}

/// A weight `α > 0` together with the excluded set.
#[derive(Debug, Clone)]
pub struct WeightedSystemSpec {
    alpha: f64,
    exclusion: ExclusionSet,
}

impl WeightedSystemSpec {
    pub fn new(alpha: f64, exclusion: ExclusionSet) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::domain(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        Ok(WeightedSystemSpec { alpha, exclusion })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn exclusion(&self) -> &ExclusionSet {
        &self.exclusion
    }

    pub fn m(&self) -> usize {
        self.exclusion.m()
    }

    pub fn verdict(&self) -> ClassifierVerdict {
        classify(self.alpha, self.m()).expect("validated on construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_rows() {
        assert_eq!(classify(0.5, 1).unwrap().regime, Regime::Exact);
        assert_eq!(classify(1.5, 1).unwrap().regime, Regime::CompleteNotMinimal);
        assert_eq!(classify(1.5, 2).unwrap().regime, Regime::Exact);
        assert_eq!(classify(1.0, 2).unwrap().regime, Regime::MinimalNotComplete);
        assert_eq!(classify(2.5, 3).unwrap().regime, Regime::Exact);
        assert_eq!(classify(2.5, 2).unwrap().regime, Regime::CompleteNotMinimal);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(classify(0.0, 1), Err(Error::Domain(_))));
        assert!(matches!(classify(-1.0, 1), Err(Error::Domain(_))));
        assert!(matches!(classify(f64::NAN, 1), Err(Error::Domain(_))));
        assert!(matches!(classify(1.0, 0), Err(Error::Domain(_))));
    }
}
