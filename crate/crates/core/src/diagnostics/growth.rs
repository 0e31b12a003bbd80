use std::io::Write;
use std::ops::RangeInclusive;

use serde::Serialize;

use super::probe::least_squares_slope;
use crate::dual_system::DualCoefficientTable;
use crate::error::{Error, Result};

/// Power-law fit of `|a_{n,j}|` against `|λ_n|` over a tail of indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthFit {
    /// 1-based column.
    pub j: usize,
    pub tail: (i64, i64),
    /// `(|λ_n|, |a_{n,j}|)` for the retained `n`.
    pub samples: Vec<(f64, f64)>,
    pub fitted_slope: f64,
    /// `min |a_{n,j}| / |λ_n|^{M−1}` over the retained samples.
    pub delta_estimate: f64,
    /// Indices excluded because `a_{n,j} = 0`.
    pub flagged: Vec<i64>,
    /// Fraction of the tail that was flagged.
    pub flagged_fraction: f64,
}

impl GrowthFit {
    /// Writes `abs_lambda,abs_a` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::invalid(format!("csv write failed: {e}"));
        w.write_record(["abs_lambda", "abs_a"]).map_err(io)?;
        for (x, y) in &self.samples {
            w.write_record([x.to_string(), y.to_string()]).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::invalid(format!("csv write failed: {e}")))?;
        Ok(())
    }
}

/// Fits `log|a_{n,j}|` against `log|λ_n|` over `tail`.
///
/// The tail must sit inside the table window and satisfy
/// `min |n| ≥ 2·max|A|`. Indices with `a_{n,j} = 0` are flagged and skipped.
pub fn growth_fit(
    table: &DualCoefficientTable,
    j: usize,
    tail: RangeInclusive<i64>,
) -> Result<GrowthFit> {
    let exclusion = table.exclusion();
    let m = exclusion.m();
    if j == 0 || j > m {
        return Err(Error::Index(format!("j = {j} outside 1..={m}")));
    }
    let (lo, hi) = (*tail.start(), *tail.end());
    let (wlo, whi) = table.window();
    if lo > hi || lo < wlo || hi > whi {
        return Err(Error::invalid(format!(
            "tail [{lo}, {hi}] must lie inside the window [{wlo}, {whi}]"
        )));
    }
    let min_abs = if lo <= 0 && hi >= 0 {
        0
    } else {
        lo.abs().min(hi.abs())
    };
    if min_abs < 2 * exclusion.max_abs_index() {
        return Err(Error::invalid(format!(
            "tail must satisfy min |n| >= 2 max|A| = {}",
            2 * exclusion.max_abs_index()
        )));
    }

    let power = (m - 1) as i32;
    let mut samples = Vec::new();
    let mut flagged = Vec::new();
    let mut total = 0usize;
    for n in lo..=hi {
        if exclusion.contains(n) {
            continue;
        }
        total += 1;
        let row = table.row(n)?;
        let a = row.a[j - 1].abs();
        if a == 0.0 {
            flagged.push(n);
        } else {
            samples.push((row.lambda.abs(), a));
        }
    }
    if samples.len() < 2 {
        return Err(Error::Numerical(format!(
            "only {} nonzero samples in the tail",
            samples.len()
        )));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let fitted_slope = least_squares_slope(&xs, &ys)
        .ok_or_else(|| Error::Numerical("degenerate growth fit".into()))?;
    let delta_estimate = samples
        .iter()
        .map(|(l, a)| a / l.powi(power))
        .fold(f64::INFINITY, f64::min);
    let flagged_fraction = flagged.len() as f64 / total as f64;
    Ok(GrowthFit {
        j,
        tail: (lo, hi),
        samples,
        fitted_slope,
        delta_estimate,
        flagged,
        flagged_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual_system::{dual_coefficients, Arithmetic, ExclusionSet};
    use std::f64::consts::TAU;

    #[test]
    fn linear_growth_for_two_points() {
        let a = ExclusionSet::trigonometric(&[0, 1]).unwrap();
        let t = dual_coefficients(&a, -4096..=4096, Arithmetic::Float).unwrap();
        let g2 = growth_fit(&t, 2, 64..=4096).unwrap();
        assert!((g2.fitted_slope - 1.0).abs() < 1e-12);
        assert!((g2.delta_estimate - 1.0 / TAU).abs() < 1e-12);
        let g1 = growth_fit(&t, 1, 64..=4096).unwrap();
        assert!((g1.fitted_slope - 1.0).abs() < 0.05);
        assert!(g1.delta_estimate > 0.0);
    }

    #[test]
    fn constant_for_single_point() {
        let a = ExclusionSet::trigonometric(&[0]).unwrap();
        let t = dual_coefficients(&a, 1..=100, Arithmetic::Float).unwrap();
        let g = growth_fit(&t, 1, 10..=100).unwrap();
        assert_eq!(g.fitted_slope, 0.0);
        assert_eq!(g.delta_estimate, 1.0);
    }

    #[test]
    fn tail_preconditions() {
        let a = ExclusionSet::trigonometric(&[0, 10]).unwrap();
        let t = dual_coefficients(&a, -100..=100, Arithmetic::Float).unwrap();
        assert!(growth_fit(&t, 1, 5..=100).is_err());
        assert!(growth_fit(&t, 1, 20..=200).is_err());
        assert!(growth_fit(&t, 3, 20..=100).is_err());
        assert!(growth_fit(&t, 1, 20..=100).is_ok());
    }
}
