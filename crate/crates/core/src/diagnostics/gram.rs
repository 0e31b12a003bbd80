use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::classify::{Regime, WeightedSystemSpec};
use super::probe::{least_squares_slope, ProbeKind, ProbeSeries};
use crate::error::{Error, Result};
use crate::kernels::{moment_integral, ToleranceConfig};
use crate::vandermonde::two_pi_times;

/// Gram matrix of `{t^α e^{2πint} : |n| ≤ N, n ∉ A}`.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub truncation: usize,
    pub indices: Vec<i64>,
    /// `G[(r, c)] = ⟨t^α e_{n_c}, t^α e_{n_r}⟩ = I(2α, 2π(n_c − n_r))`.
    pub entries: DMatrix<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StructureTag {
    HermitianToeplitzWithDeletions,
}

impl GramMatrix {
    pub fn structure_tag(&self) -> StructureTag {
        StructureTag::HermitianToeplitzWithDeletions
    }

    pub fn order(&self) -> usize {
        self.indices.len()
    }

    /// Largest componentwise `|G_{rc} − conj(G_{cr})|`.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.entries;
        let mut worst = 0.0f64;
        for r in 0..g.nrows() {
            for c in r..g.ncols() {
                worst = worst.max((g[(r, c)] - g[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn smallest_eigenvalue(&self) -> Result<f64> {
        smallest_eigenvalue(&self.entries)
    }
}

fn smallest_eigenvalue(g: &DMatrix<Complex64>) -> Result<f64> {
    let eig = g.clone().symmetric_eigenvalues();
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return Err(Error::Numerical(
            "Hermitian eigen-solver returned non-finite values".into(),
        ));
    }
    Ok(min)
}

/// Kernel values `I(2α, 2πd)` for `d ∈ [−2N, 2N]`, indexed by `d + 2N`.
///
/// Both signs of `d` are evaluated independently, so Hermitian symmetry of
/// the assembled matrix is a check rather than a construction.
fn kernel_cache(alpha: f64, n: usize, cfg: &ToleranceConfig) -> Result<Vec<Complex64>> {
    let span = 2 * n as i64;
    (-span..=span)
        .into_par_iter()
        .map(|d| moment_integral(2.0 * alpha, two_pi_times(d), cfg).map(|v| v.value))
        .collect()
}

fn assemble(indices: &[i64], cache: &[Complex64], span: i64) -> DMatrix<Complex64> {
    DMatrix::from_fn(indices.len(), indices.len(), |r, c| {
        cache[(indices[c] - indices[r] + span) as usize]
    })
}

fn truncated_indices(spec: &WeightedSystemSpec, n: usize) -> Vec<i64> {
    let n = n as i64;
    (-n..=n)
        .filter(|k| !spec.exclusion().contains(*k))
        .collect()
}

pub fn gram_matrix(
    spec: &WeightedSystemSpec,
    n: usize,
    cfg: &ToleranceConfig,
) -> Result<GramMatrix> {
    spec.exclusion().require_trigonometric("Gram matrix")?;
    let indices = truncated_indices(spec, n);
    if indices.is_empty() {
        return Err(Error::invalid(format!(
            "truncation N = {n} leaves no indices"
        )));
    }
    let cache = kernel_cache(spec.alpha(), n, cfg)?;
    let entries = assemble(&indices, &cache, 2 * n as i64);
    Ok(GramMatrix {
        truncation: n,
        indices,
        entries,
    })
}

/// `σ_min(G_N)` along an increasing grid of truncations.
pub fn frame_lower_bound_probe(
    spec: &WeightedSystemSpec,
    n_grid: &[usize],
    cfg: &ToleranceConfig,
) -> Result<ProbeSeries> {
    spec.exclusion().require_trigonometric("frame probe")?;
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "truncation grid must be nonempty and strictly increasing",
        ));
    }
    let n_max = *n_grid.last().expect("nonempty");
    let cache = kernel_cache(spec.alpha(), n_max, cfg)?;
    let span = 2 * n_max as i64;
    let values: Vec<f64> = n_grid
        .iter()
        .map(|&n| {
            let indices = truncated_indices(spec, n);
            if indices.is_empty() {
                return Err(Error::invalid(format!(
                    "truncation N = {n} leaves no indices"
                )));
            }
            smallest_eigenvalue(&assemble(&indices, &cache, span))
        })
        .collect::<Result<_>>()?;

    let abscissae: Vec<f64> = n_grid.iter().map(|&n| n as f64).collect();
    let mut series = ProbeSeries::new(
        ProbeKind::FrameLowerBound,
        abscissae.clone(),
        values.clone(),
    );
    if values.iter().all(|v| *v > 0.0) {
        let xs: Vec<f64> = abscissae.iter().map(|x| x.ln()).collect();
        let ys: Vec<f64> = values.iter().map(|y| y.ln()).collect();
        series.fitted_exponent = least_squares_slope(&xs, &ys);
    }
    let verdict = spec.verdict();
    if verdict.regime != Regime::Exact {
        series.notes.push(format!(
            "alpha = {} lies outside the exactness window for M = {}; the trend is not evidence about frames",
            spec.alpha(),
            spec.m()
        ));
    }
    Ok(series)
}
