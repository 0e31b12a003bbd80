use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

use super::exclusion::ExclusionSet;
use super::poly::{HarmonicPolynomial, TrigPolynomial};
use super::table::{dual_coefficients, f_n_exact, Arithmetic, DualCoefficientTable};
use crate::diagnostics::probe::{default_eps_grid, energy_probe, ProbeKind, ProbeSeries};
use crate::error::{Error, Result};
use crate::kernels::{ExactRational, ToleranceConfig};
use crate::vandermonde::last_row_cofactors_exact;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum L2Norm {
    Finite(f64),
    Infinite,
}

impl L2Norm {
    pub fn is_finite(&self) -> bool {
        matches!(self, L2Norm::Finite(_))
    }
}

/// `H(t) = Σ_j a_j e^{iΛ_j t}` vanishing to order `M−1` at the origin, and
/// the weighted norm of `h = H / t^α`.
#[derive(Debug, Clone, Serialize)]
pub struct AnnihilatorWitness {
    #[serde(rename = "H")]
    pub h: HarmonicPolynomial,
    pub vanish_order: u32,
    pub alpha: f64,
    pub l2_norm_of_h: L2Norm,
    pub probe: ProbeSeries,
}

impl AnnihilatorWitness {
    pub fn as_trig(&self) -> TrigPolynomial {
        self.h.to_trig()
    }

    /// `⟨h, t^α r_n⟩ = ∫_0^1 H(t) e^{−2πint} dt`, exactly.
    pub fn inner_product(&self, n: i64) -> ExactRational {
        self.h.pairing(n)
    }
}

/// The annihilator built from the bottom-row cofactors of the integer
/// Vandermonde matrix, scaled so its first coefficient is 1.
pub fn annihilator_polynomial(exclusion: &ExclusionSet) -> Result<HarmonicPolynomial> {
    let ints = exclusion.require_trigonometric("annihilator witness")?;
    let cof = last_row_cofactors_exact(ints)?;
    let first = cof
        .last_row_cofactors
        .iter()
        .find(|c| **c != BigInt::from(0))
        .cloned()
        .ok_or_else(|| Error::Singular("all cofactors vanish".into()))?;
    let first = ExactRational::from_integer(first);
    let terms = ints
        .iter()
        .zip(&cof.last_row_cofactors)
        .map(|(&h, c)| {
            (
                h,
                ExactRational::from_integer(c.clone()).checked_div(&first),
            )
        })
        .map(|(h, c)| c.map(|c| (h, c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(HarmonicPolynomial::new(terms))
}

pub fn annihilator_witness(
    exclusion: &ExclusionSet,
    alpha: f64,
    cfg: &ToleranceConfig,
) -> Result<AnnihilatorWitness> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!(
            "alpha must be positive and finite, got {alpha}"
        )));
    }
    let h = annihilator_polynomial(exclusion)?;
    let vanish_order = h.vanishing_order(exclusion.m() as u32 + 1)?;
    let probe = energy_probe(
        &h,
        alpha,
        &default_eps_grid(),
        ProbeKind::CompletenessWitnessNorm,
        cfg,
    )?;
    let l2_norm_of_h = match (probe.convergent, probe.limit) {
        (true, Some(limit)) => L2Norm::Finite(limit.sqrt()),
        _ => L2Norm::Infinite,
    };
    Ok(AnnihilatorWitness {
        h,
        vanish_order,
        alpha,
        l2_norm_of_h,
        probe,
    })
}

/// `⟨f_n/t^α, t^α r_m⟩ = ∫_0^1 f_n(t) e^{−2πimt} dt` on the trigonometric map.
///
/// All frequency differences are `2π` times an integer, so each term is
/// `I(0, 2πk) = δ_{k,0}`.
pub fn biorthogonality_inner_product(
    exclusion: &ExclusionSet,
    n: i64,
    m: i64,
) -> Result<Complex64> {
    exclusion.require_trigonometric("biorthogonality")?;
    exclusion.require_outside(n)?;
    let table = dual_coefficients(exclusion, n..=n, Arithmetic::Float)?;
    biorthogonality_from_table(&table, n, m)
}

/// As [`biorthogonality_inner_product`], reading `a_{n,·}` from a table.
pub fn biorthogonality_from_table(
    table: &DualCoefficientTable,
    n: i64,
    m: i64,
) -> Result<Complex64> {
    let exclusion = table.exclusion();
    let ints = exclusion.require_trigonometric("biorthogonality")?;
    exclusion.require_outside(m)?;
    let row = table.row(n)?;
    let harmonics = std::iter::once(n).chain(ints.iter().copied());
    let coefficients = std::iter::once(1.0).chain(row.a.iter().copied());
    Ok(harmonics
        .zip(coefficients)
        .map(|(h, c)| Complex64::new(c, 0.0) * kronecker_moment(h - m))
        .sum())
}

/// `I(0, 2πk)`.
fn kronecker_moment(k: i64) -> Complex64 {
    if k == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Exact counterpart of [`biorthogonality_inner_product`].
pub fn biorthogonality_exact(exclusion: &ExclusionSet, n: i64, m: i64) -> Result<ExactRational> {
    exclusion.require_outside(m)?;
    Ok(f_n_exact(exclusion, n)?.pairing(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual_system::FrequencyMap;

    fn q(n: i64) -> ExactRational {
        ExactRational::from_integer(n)
    }

    #[test]
    fn two_point_annihilator() {
        let a = ExclusionSet::trigonometric(&[0, 1]).unwrap();
        let h = annihilator_polynomial(&a).unwrap();
        assert_eq!(h, HarmonicPolynomial::new([(0, q(1)), (1, q(-1))]));
        assert_eq!(h.vanishing_order(5).unwrap(), 1);
    }

    #[test]
    fn single_point_annihilator_is_constant() {
        let a = ExclusionSet::trigonometric(&[0]).unwrap();
        let h = annihilator_polynomial(&a).unwrap();
        assert_eq!(h, HarmonicPolynomial::new([(0, q(1))]));
    }

    #[test]
    fn witness_norm_flags() {
        let cfg = ToleranceConfig::default();
        let a = ExclusionSet::trigonometric(&[0, 1]).unwrap();
        let w = annihilator_witness(&a, 1.0, &cfg).unwrap();
        assert_eq!(w.vanish_order, 1);
        assert!(w.l2_norm_of_h.is_finite(), "{:?}", w.probe);
        let w = annihilator_witness(&a, 1.5, &cfg).unwrap();
        assert_eq!(w.l2_norm_of_h, L2Norm::Infinite);
        assert!(annihilator_witness(&a, 0.0, &cfg).is_err());
    }

    #[test]
    fn witness_is_orthogonal_off_a() {
        let a = ExclusionSet::trigonometric(&[-2, 1, 4]).unwrap();
        let w = annihilator_witness(&a, 1.2, &ToleranceConfig::default()).unwrap();
        assert_eq!(w.vanish_order, 2);
        for n in -30..=30 {
            if !a.contains(n) {
                assert!(w.inner_product(n).is_zero());
            }
        }
    }

    #[test]
    fn kronecker_pattern() {
        let a = ExclusionSet::trigonometric(&[0, 1]).unwrap();
        assert_eq!(
            biorthogonality_inner_product(&a, 2, 3).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert_eq!(
            biorthogonality_inner_product(&a, 2, 2).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert!(matches!(
            biorthogonality_inner_product(&a, 0, 2),
            Err(Error::Index(_))
        ));
        assert_eq!(biorthogonality_exact(&a, -4, -4).unwrap(), q(1));
        let custom =
            ExclusionSet::with_map(&[0], FrequencyMap::custom("id", |n| n as f64)).unwrap();
        assert!(matches!(
            biorthogonality_inner_product(&custom, 1, 2),
            Err(Error::Unsupported(_))
        ));
    }
}
