use std::collections::BTreeMap;
use std::io::Write;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exclusion::ExclusionSet;
use super::poly::{HarmonicPolynomial, TrigPolynomial, TrigTerm};
use crate::error::{Error, Result};
use crate::kernels::ExactRational;
use crate::vandermonde::{solve_exact, solve_power_rhs, ConditioningWarning, SolveMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    #[default]
    Float,
    Exact,
}

impl Arithmetic {
    pub fn label(self) -> &'static str {
        match self {
            Arithmetic::Float => "float",
            Arithmetic::Exact => "exact",
        }
    }
}

/// Coefficients `a_{n,1..M}` for one index `n ∉ A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualRow {
    pub n: i64,
    pub lambda: f64,
    pub a: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<ExactRational>>,
    pub residual_norm: f64,
    pub method: SolveMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<ConditioningWarning>,
}

/// Dual coefficients over a finite window of indices.
#[derive(Debug, Clone)]
pub struct DualCoefficientTable {
    exclusion: ExclusionSet,
    window: (i64, i64),
    arithmetic: Arithmetic,
    rows: BTreeMap<i64, DualRow>,
}

fn solve_row(exclusion: &ExclusionSet, n: i64, arithmetic: Arithmetic) -> Result<DualRow> {
    let lambda = exclusion.lambda(n);
    match arithmetic {
        Arithmetic::Float => {
            let r = solve_power_rhs(exclusion.nodes(), lambda)?;
            Ok(DualRow {
                n,
                lambda,
                a: r.solution,
                exact: None,
                residual_norm: r.residual_norm,
                method: r.method,
                warning: r.warning,
            })
        }
        Arithmetic::Exact => {
            let ints = exclusion.require_trigonometric("exact arithmetic")?;
            let r = solve_exact(ints, n)?;
            Ok(DualRow {
                n,
                lambda,
                a: r.solution.iter().map(ExactRational::to_f64).collect(),
                exact: Some(r.solution),
                residual_norm: 0.0,
                method: r.method,
                warning: None,
            })
        }
    }
}

/// Solves the dual Vandermonde system for every `n` in `window \ A`.
pub fn dual_coefficients(
    exclusion: &ExclusionSet,
    window: RangeInclusive<i64>,
    arithmetic: Arithmetic,
) -> Result<DualCoefficientTable> {
    let (lo, hi) = (*window.start(), *window.end());
    if lo > hi {
        return Err(Error::invalid(format!("empty window [{lo}, {hi}]")));
    }
    let indices: Vec<i64> = (lo..=hi).filter(|n| !exclusion.contains(*n)).collect();
    if indices.is_empty() {
        return Err(Error::invalid(format!(
            "window [{lo}, {hi}] is empty after removing the excluded set"
        )));
    }
    let rows: Vec<DualRow> = indices
        .par_iter()
        .map(|&n| solve_row(exclusion, n, arithmetic))
        .collect::<Result<_>>()?;
    Ok(DualCoefficientTable {
        exclusion: exclusion.clone(),
        window: (lo, hi),
        arithmetic,
        rows: rows.into_iter().map(|r| (r.n, r)).collect(),
    })
}

impl DualCoefficientTable {
    pub fn exclusion(&self) -> &ExclusionSet {
        &self.exclusion
    }

    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    pub fn arithmetic(&self) -> Arithmetic {
        self.arithmetic
    }

    pub fn rows(&self) -> impl Iterator<Item = &DualRow> {
        self.rows.values()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, n: i64) -> Result<&DualRow> {
        self.exclusion.require_outside(n)?;
        self.rows.get(&n).ok_or_else(|| {
            Error::Index(format!(
                "index {n} lies outside the window [{}, {}]",
                self.window.0, self.window.1
            ))
        })
    }

    /// `a_{n,j}` with 1-based `j`.
    pub fn coefficient(&self, n: i64, j: usize) -> Result<f64> {
        let row = self.row(n)?;
        if j == 0 || j > row.a.len() {
            return Err(Error::Index(format!("j = {j} outside 1..={}", row.a.len())));
        }
        Ok(row.a[j - 1])
    }

    pub fn coefficient_exact(&self, n: i64, j: usize) -> Result<ExactRational> {
        let row = self.row(n)?;
        let exact = row
            .exact
            .as_ref()
            .ok_or_else(|| Error::Arithmetic("table was computed in floating point".into()))?;
        if j == 0 || j > exact.len() {
            return Err(Error::Index(format!("j = {j} outside 1..={}", exact.len())));
        }
        Ok(exact[j - 1].clone())
    }

    pub fn max_residual(&self) -> f64 {
        self.rows().map(|r| r.residual_norm).fold(0.0, f64::max)
    }

    pub fn warning_count(&self) -> usize {
        self.rows().filter(|r| r.warning.is_some()).count()
    }

    /// `f_n(t) = e^{i λ_n t} + Σ_j a_{n,j} e^{i Λ_j t}`.
    pub fn build_f_n(&self, n: i64) -> Result<TrigPolynomial> {
        let row = self.row(n)?;
        let mut terms = vec![TrigTerm {
            frequency: row.lambda,
            coefficient: Complex64::new(1.0, 0.0),
        }];
        terms.extend(
            self.exclusion
                .nodes()
                .nodes()
                .iter()
                .zip(&row.a)
                .map(|(&f, &a)| TrigTerm {
                    frequency: f,
                    coefficient: Complex64::new(a, 0.0),
                }),
        );
        TrigPolynomial::new(terms)
    }

    /// `f_n` over integer harmonics, for tables computed exactly.
    pub fn f_n_exact(&self, n: i64) -> Result<HarmonicPolynomial> {
        let ints = self.exclusion.require_trigonometric("exact f_n")?;
        let row = self.row(n)?;
        let exact = row
            .exact
            .as_ref()
            .ok_or_else(|| Error::Arithmetic("table was computed in floating point".into()))?;
        Ok(harmonic_f_n(ints, n, exact))
    }

    /// Writes `n,j,re_a,im_a,arithmetic` rows, adding `exact_a` on the exact path.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let exact = self.arithmetic == Arithmetic::Exact;
        let mut header = vec!["n", "j", "re_a", "im_a", "arithmetic"];
        if exact {
            header.push("exact_a");
        }
        let io = |e: csv::Error| Error::invalid(format!("csv write failed: {e}"));
        w.write_record(&header).map_err(io)?;
        for row in self.rows() {
            for (j, a) in row.a.iter().enumerate() {
                let mut rec = vec![
                    row.n.to_string(),
                    (j + 1).to_string(),
                    a.to_string(),
                    "0".to_string(),
                    self.arithmetic.label().to_string(),
                ];
                if let Some(ex) = &row.exact {
                    rec.push(ex[j].to_string());
                }
                w.write_record(&rec).map_err(io)?;
            }
        }
        w.flush()
            .map_err(|e| Error::invalid(format!("csv write failed: {e}")))?;
        Ok(())
    }
}

pub(crate) fn harmonic_f_n(ints: &[i64], n: i64, a: &[ExactRational]) -> HarmonicPolynomial {
    HarmonicPolynomial::new(
        std::iter::once((n, ExactRational::one()))
            .chain(ints.iter().copied().zip(a.iter().cloned())),
    )
}

/// Builds `f_n` for a single index without materializing a table.
pub fn build_f_n(exclusion: &ExclusionSet, n: i64) -> Result<TrigPolynomial> {
    exclusion.require_outside(n)?;
    dual_coefficients(exclusion, n..=n, Arithmetic::Float)?.build_f_n(n)
}

/// Exact `f_n` over integer harmonics.
pub fn f_n_exact(exclusion: &ExclusionSet, n: i64) -> Result<HarmonicPolynomial> {
    let ints = exclusion.require_trigonometric("exact f_n")?;
    exclusion.require_outside(n)?;
    Ok(harmonic_f_n(ints, n, &solve_exact(ints, n)?.solution))
}
