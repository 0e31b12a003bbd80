//! Finite exponential sums `p(t) = Σ_j c_j e^{i μ_j t}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::ExactRational;
use crate::vandermonde::two_pi_times;

/// Relative threshold below which a float derivative at zero counts as zero.
pub const VANISHING_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrigTerm {
    pub frequency: f64,
    #[serde(serialize_with = "crate::report::serialize_complex")]
    pub coefficient: Complex64,
}

/// Exponential sum with real frequencies and complex coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TrigPolynomial {
    terms: Vec<TrigTerm>,
}

impl TrigPolynomial {
    /// Builds the sum; exactly zero coefficients are dropped, so the zero
    /// polynomial has no terms.
    pub fn new(terms: Vec<TrigTerm>) -> Result<Self> {
        let mut terms: Vec<TrigTerm> = terms
            .into_iter()
            .filter(|t| t.coefficient != Complex64::new(0.0, 0.0))
            .collect();
        if terms.iter().any(|t| {
            !t.frequency.is_finite()
                || !t.coefficient.re.is_finite()
                || !t.coefficient.im.is_finite()
        }) {
            return Err(Error::invalid("polynomial terms must be finite"));
        }
        terms.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        if terms.windows(2).any(|w| w[0].frequency == w[1].frequency) {
            return Err(Error::invalid("polynomial frequencies must be distinct"));
        }
        Ok(TrigPolynomial { terms })
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|term| term.coefficient * Complex64::from_polar(1.0, term.frequency * t))
            .sum()
    }

    /// `p^{(k)}(0) = Σ_j c_j (i μ_j)^k`.
    pub fn derivative_at_zero(&self, k: u32) -> Complex64 {
        let ik = Complex64::i().powu(k);
        self.terms
            .iter()
            .map(|term| term.coefficient * term.frequency.powi(k as i32) * ik)
            .sum()
    }

    /// Largest `r ≤ max_order` with `p^{(k)}(0) = 0` for all `k < r`.
    ///
    /// A derivative counts as zero when it is below
    /// `VANISHING_THRESHOLD · Σ_j |c_j| |μ_j|^k`.
    pub fn vanishing_order(&self, max_order: u32) -> Result<u32> {
        if max_order == 0 {
            return Err(Error::invalid("max_order must be at least 1"));
        }
        if self.is_zero() {
            return Err(Error::domain(
                "vanishing order of the zero polynomial is undefined",
            ));
        }
        for k in 0..max_order {
            let scale: f64 = self
                .terms
                .iter()
                .map(|t| t.coefficient.norm() * t.frequency.abs().powi(k as i32))
                .sum();
            if self.derivative_at_zero(k).norm() > VANISHING_THRESHOLD * scale {
                return Ok(k);
            }
        }
        Ok(max_order)
    }
}

/// Exponential sum over integer harmonics `e^{2πi h t}` with exact
/// rational coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct HarmonicPolynomial {
    terms: BTreeMap<i64, ExactRational>,
}

impl HarmonicPolynomial {
    /// Sums coefficients of repeated harmonics and drops zeros.
    pub fn new(terms: impl IntoIterator<Item = (i64, ExactRational)>) -> Self {
        let mut map: BTreeMap<i64, ExactRational> = BTreeMap::new();
        for (h, c) in terms {
            let entry = map.entry(h).or_insert_with(ExactRational::zero);
            *entry = &*entry + &c;
        }
        map.retain(|_, c| !c.is_zero());
        HarmonicPolynomial { terms: map }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &ExactRational)> {
        self.terms.iter().map(|(&h, c)| (h, c))
    }

    pub fn coefficient(&self, h: i64) -> ExactRational {
        self.terms
            .get(&h)
            .cloned()
            .unwrap_or_else(ExactRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_harmonic(&self) -> i64 {
        self.terms.keys().map(|h| h.abs()).max().unwrap_or(0)
    }

    pub fn to_trig(&self) -> TrigPolynomial {
        let terms = self
            .terms
            .iter()
            .map(|(&h, c)| TrigTerm {
                frequency: two_pi_times(h),
                coefficient: Complex64::new(c.to_f64(), 0.0),
            })
            .collect();
        TrigPolynomial::new(terms).expect("harmonics are distinct and coefficients finite")
    }

    /// `S_k = Σ_h c_h h^k`, so that `p^{(k)}(0) = (2πi)^k S_k`.
    pub fn moment(&self, k: u32) -> ExactRational {
        self.terms
            .iter()
            .map(|(&h, c)| c * &ExactRational::from_integer(h).pow(k))
            .sum()
    }

    /// Exact vanishing order at `t = 0`, capped at `max_order`.
    pub fn vanishing_order(&self, max_order: u32) -> Result<u32> {
        if max_order == 0 {
            return Err(Error::invalid("max_order must be at least 1"));
        }
        if self.is_zero() {
            return Err(Error::domain(
                "vanishing order of the zero polynomial is undefined",
            ));
        }
        Ok((0..max_order)
            .find(|&k| !self.moment(k).is_zero())
            .unwrap_or(max_order))
    }

    /// `∫_0^1 p(t) e^{−2πimt} dt`, read off from the coefficient of `e^{2πimt}`.
    pub fn pairing(&self, m: i64) -> ExactRational {
        self.coefficient(m)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&h, c)| Complex64::from_polar(c.to_f64(), two_pi_times(h) * t))
            .sum()
    }

    /// An evaluator that stays accurate near `t = 0`, where the direct sum
    /// cancels down to `O(t^r)`.
    pub fn local_evaluator(&self) -> LocalEvaluator {
        let h_max = self.max_abs_harmonic().max(1) as f64;
        // Below `switch`, `|2π h t| ≤ 1/2` for every harmonic.
        let switch = 0.5 / (std::f64::consts::TAU * h_max);
        let taylor = (0..TAYLOR_TERMS).map(|k| self.moment(k).to_f64()).collect();
        LocalEvaluator {
            taylor,
            switch,
            direct: self.to_trig(),
        }
    }
}

const TAYLOR_TERMS: u32 = 48;

/// Evaluates a [`HarmonicPolynomial`] by its Taylor series with exact
/// moments for small `t` and by direct summation elsewhere.
#[derive(Debug, Clone)]
pub struct LocalEvaluator {
    taylor: Vec<f64>,
    switch: f64,
    direct: TrigPolynomial,
}

impl LocalEvaluator {
    pub fn eval(&self, t: f64) -> Complex64 {
        if t.abs() > self.switch {
            return self.direct.eval(t);
        }
        let x = std::f64::consts::TAU * t;
        // Σ_k S_k (i x)^k / k!
        let mut re = 0.0;
        let mut im = 0.0;
        let mut power = 1.0;
        for (k, s) in self.taylor.iter().enumerate() {
            if k > 0 {
                power *= x / k as f64;
            }
            let term = s * power;
            match k % 4 {
                0 => re += term,
                1 => im += term,
                2 => re -= term,
                _ => im -= term,
            }
        }
        Complex64::new(re, im)
    }

    pub fn switch_point(&self) -> f64 {
        self.switch
    }

    pub fn polynomial(&self) -> &TrigPolynomial {
        &self.direct
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> ExactRational {
        ExactRational::from_integer(n)
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let p = TrigPolynomial::new(vec![TrigTerm {
            frequency: 1.0,
            coefficient: Complex64::new(0.0, 0.0),
        }])
        .unwrap();
        assert!(p.is_zero());
        assert!(p.vanishing_order(4).is_err());
        let h = HarmonicPolynomial::new([(1, q(2)), (1, q(-2))]);
        assert!(h.is_zero());
    }

    #[test]
    fn duplicate_frequencies_rejected() {
        let t = TrigTerm {
            frequency: 1.0,
            coefficient: Complex64::new(1.0, 0.0),
        };
        assert!(TrigPolynomial::new(vec![t, t]).is_err());
    }

    #[test]
    fn second_difference_vanishes_to_order_two() {
        // e^{2πi·2t} − 2 e^{2πit} + 1 = (e^{2πit} − 1)^2
        let h = HarmonicPolynomial::new([(0, q(1)), (1, q(-2)), (2, q(1))]);
        assert_eq!(h.vanishing_order(10).unwrap(), 2);
        assert_eq!(h.to_trig().vanishing_order(10).unwrap(), 2);
        assert_eq!(h.pairing(1), q(-2));
        assert_eq!(h.pairing(5), q(0));
    }

    #[test]
    fn local_evaluator_matches_closed_form_near_zero() {
        let h = HarmonicPolynomial::new([(0, q(1)), (1, q(-2)), (2, q(1))]);
        let eval = h.local_evaluator();
        for &t in &[1e-9, 1e-5, 0.01, 0.05, 0.3, 0.9] {
            // (e^{iθ} − 1)² = −4 sin²(θ/2) e^{iθ}
            let exact = Complex64::from_polar(
                -4.0 * (std::f64::consts::PI * t).sin().powi(2),
                std::f64::consts::TAU * t,
            );
            let got = eval.eval(t);
            assert!(
                (got - exact).norm() <= 1e-13 * exact.norm(),
                "t={t}: {got} vs {exact}"
            );
        }
    }
}
