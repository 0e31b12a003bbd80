use num_complex::Complex64;
use serde::Serialize;

use super::classify::WeightedSystemSpec;
use super::probe::{ProbeKind, ProbeSeries};
use crate::dual_system::{dual_coefficients, Arithmetic, DualCoefficientTable};
use crate::error::{Error, Result};
use crate::kernels::{moment_integral, ToleranceConfig};

/// `‖t^α e^{2πint}‖_{L²(0,1)} = (2α+1)^{−1/2}`, independent of `n`.
pub fn weighted_norm(alpha: f64, _n: i64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!(
            "alpha must be positive and finite, got {alpha}"
        )));
    }
    Ok(
        moment_integral(2.0 * alpha, 0.0, &ToleranceConfig::default())?
            .value
            .re
            .sqrt(),
    )
}

/// `⟨t^α r_m, f_n / t^α⟩ = ∫_0^1 e^{2πimt} conj(f_n(t)) dt`, which picks out
/// `conj(a_{n,j(m)})` by Kronecker pairing of harmonics.
pub fn obstruction_inner_product(
    table: &DualCoefficientTable,
    m: i64,
    n: i64,
) -> Result<Complex64> {
    let exclusion = table.exclusion();
    exclusion.require_trigonometric("obstruction inner product")?;
    let j = exclusion
        .position_of(m)
        .ok_or_else(|| Error::Index(format!("index {m} is not in the excluded set")))?;
    let row = table.row(n)?;
    Ok(Complex64::new(row.a[j], 0.0).conj())
}

/// Magnitudes of the expansion coefficients of `t^α r_m`, `m ∈ A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub m: i64,
    /// 1-based position of `λ_m` among the excluded nodes.
    pub j: usize,
    pub window: i64,
    pub series: ProbeSeries,
    /// Minimum over `4 ≤ |n| ≤ N/2`.
    pub inner_min: f64,
    /// Minimum over `N/2 ≤ |n| ≤ N`.
    pub outer_min: f64,
    pub non_decaying: bool,
    pub flagged: Vec<i64>,
}

pub const INNER_START: i64 = 4;

pub fn schauder_obstruction_report(
    spec: &WeightedSystemSpec,
    m: i64,
    window: i64,
    cfg: &ToleranceConfig,
) -> Result<ObstructionReport> {
    let exclusion = spec.exclusion();
    exclusion.require_trigonometric("Schauder obstruction")?;
    let j = exclusion
        .position_of(m)
        .ok_or_else(|| Error::Index(format!("index {m} is not in the excluded set")))?;
    if window < 2 * INNER_START {
        return Err(Error::invalid(format!(
            "obstruction window must be at least {}",
            2 * INNER_START
        )));
    }
    cfg.validate()?;
    let norm = weighted_norm(spec.alpha(), 0)?;
    let table = dual_coefficients(exclusion, -window..=window, Arithmetic::Float)?;

    let mut abscissae = Vec::new();
    let mut values = Vec::new();
    let mut flagged = Vec::new();
    for row in table.rows() {
        let v = obstruction_inner_product(&table, m, row.n)?.norm() * norm;
        if v == 0.0 {
            flagged.push(row.n);
            continue;
        }
        abscissae.push(row.n as f64);
        values.push(v);
    }
    let half = window / 2;
    let min_over = |lo: i64, hi: i64| {
        abscissae
            .iter()
            .zip(&values)
            .filter(|(n, _)| (lo..=hi).contains(&(n.abs() as i64)))
            .map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min)
    };
    let inner_min = min_over(INNER_START, half);
    let outer_min = min_over(half, window);
    let non_decaying = outer_min.is_finite() && outer_min >= inner_min * (1.0 - 1e-9);

    let mut series = ProbeSeries::new(ProbeKind::SchauderObstruction, abscissae, values);
    series.convergent = !non_decaying;
    if !flagged.is_empty() {
        series
            .notes
            .push(format!("{} zero coefficients excluded", flagged.len()));
    }
    Ok(ObstructionReport {
        m,
        j: j + 1,
        window,
        series,
        inner_min,
        outer_min,
        non_decaying,
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual_system::ExclusionSet;

    fn spec(alpha: f64, a: &[i64]) -> WeightedSystemSpec {
        WeightedSystemSpec::new(alpha, ExclusionSet::trigonometric(a).unwrap()).unwrap()
    }

    #[test]
    fn norms() {
        assert!((weighted_norm(0.5, 0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((weighted_norm(1.5, 7).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(
            weighted_norm(1.5, -100).unwrap(),
            weighted_norm(1.5, 0).unwrap()
        );
        assert!(weighted_norm(0.0, 0).is_err());
    }

    #[test]
    fn linear_obstruction() {
        let r =
            schauder_obstruction_report(&spec(1.5, &[0, 1]), 1, 64, &ToleranceConfig::default())
                .unwrap();
        assert_eq!(r.j, 2);
        for (n, v) in r.series.abscissae.iter().zip(&r.series.values) {
            assert!((v - n.abs() / 2.0).abs() < 1e-12);
        }
        assert!(r.non_decaying);
    }

    #[test]
    fn constant_obstruction() {
        let r = schauder_obstruction_report(&spec(0.5, &[0]), 0, 64, &ToleranceConfig::default())
            .unwrap();
        assert!(r
            .series
            .values
            .iter()
            .all(|v| (v - 0.5f64.sqrt()).abs() < 1e-12));
        assert!(r.non_decaying && r.flagged.is_empty());
    }

    #[test]
    fn inner_product_is_conjugate_coefficient() {
        let a = ExclusionSet::trigonometric(&[0, 1]).unwrap();
        let t = dual_coefficients(&a, -10..=10, Arithmetic::Float).unwrap();
        assert_eq!(
            obstruction_inner_product(&t, 0, 5).unwrap(),
            Complex64::new(4.0, 0.0)
        );
        assert_eq!(
            obstruction_inner_product(&t, 1, 5).unwrap(),
            Complex64::new(-5.0, 0.0)
        );
        assert!(obstruction_inner_product(&t, 2, 5).is_err());
    }
}
