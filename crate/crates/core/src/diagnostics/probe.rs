//! Divergence probes: `∫_ε^1 |p(t)|² t^{−2α} dt` along a geometric ε grid.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::classify::WeightedSystemSpec;
use crate::dual_system::{annihilator_polynomial, f_n_exact, HarmonicPolynomial};
use crate::error::{Error, Result};
use crate::kernels::{integrate, QuadOptions, ToleranceConfig};

/// Fitted exponents above this count as a convergent series.
pub const CONVERGENCE_MARGIN: f64 = 0.05;
/// Number of trailing grid points used in exponent fits.
pub const FIT_POINTS: usize = 8;
const MIN_GRID_POINTS: usize = 6;
const PROBE_REL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    MinimalityDivergence,
    CompletenessWitnessNorm,
    FrameLowerBound,
    SchauderObstruction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSeries {
    pub kind: ProbeKind,
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
    pub fitted_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_exponent: Option<f64>,
    /// Whether the partial integrals approach a finite limit.
    pub convergent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ProbeSeries {
    pub(crate) fn new(kind: ProbeKind, abscissae: Vec<f64>, values: Vec<f64>) -> Self {
        ProbeSeries {
            kind,
            abscissae,
            values,
            fitted_exponent: None,
            predicted_exponent: None,
            convergent: false,
            limit: None,
            notes: Vec::new(),
        }
    }

    /// Writes `abscissa,value` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::invalid(format!("csv write failed: {e}"));
        w.write_record(["abscissa", "value"]).map_err(io)?;
        for (x, y) in self.abscissae.iter().zip(&self.values) {
            w.write_record([x.to_string(), y.to_string()]).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::invalid(format!("csv write failed: {e}")))?;
        Ok(())
    }
}

/// `2^{−4}, 2^{−5}, …, 2^{−20}`.
pub fn default_eps_grid() -> Vec<f64> {
    (4..=20).map(|k| 2f64.powi(-k)).collect()
}

/// Checks that `grid` is a strictly decreasing geometric sequence in
/// `(0, 1)` and returns its ratio.
pub fn validate_eps_grid(grid: &[f64]) -> Result<f64> {
    if grid.len() < MIN_GRID_POINTS {
        return Err(Error::invalid(format!(
            "epsilon grid needs at least {MIN_GRID_POINTS} points"
        )));
    }
    if grid.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::invalid("epsilon grid must lie in (0, 1)"));
    }
    let ratio = grid[1] / grid[0];
    if !(ratio < 1.0) {
        return Err(Error::invalid("epsilon grid must be strictly decreasing"));
    }
    if grid
        .windows(2)
        .any(|w| ((w[1] / w[0]) / ratio - 1.0).abs() > 1e-9)
    {
        return Err(Error::invalid("epsilon grid must be geometric"));
    }
    Ok(ratio)
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Energy of `p(t)/t^α` on `[ε, 1]` for each ε in `eps_grid`.
///
/// Values are cumulative partial integrals. The exponent is fitted to the
/// last dyadic increments, which behave like `ε^p` with `p = 2r − 2α + 1`
/// for a polynomial vanishing to order `r`.
pub fn energy_probe(
    poly: &HarmonicPolynomial,
    alpha: f64,
    eps_grid: &[f64],
    kind: ProbeKind,
    cfg: &ToleranceConfig,
) -> Result<ProbeSeries> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!(
            "alpha must be positive and finite, got {alpha}"
        )));
    }
    if poly.is_zero() {
        return Err(Error::domain("energy of the zero polynomial"));
    }
    let ratio = validate_eps_grid(eps_grid)?;
    let eval = poly.local_evaluator();
    let spread = {
        let hs: Vec<i64> = poly.terms().map(|(h, _)| h).collect();
        (hs[hs.len() - 1] - hs[0]) as f64
    };
    let opts = QuadOptions::new(
        f64::MIN_POSITIVE,
        PROBE_REL_TOL,
        cfg.quadrature_subdivision_max,
    )
    .oscillation(std::f64::consts::TAU * spread);
    let integrand = |t: f64| Complex64::new(eval.eval(t).norm_sqr() * t.powf(-2.0 * alpha), 0.0);

    let mut bounds = vec![1.0];
    bounds.extend_from_slice(eps_grid);
    let pieces: Vec<f64> = bounds
        .par_windows(2)
        .map(|w| integrate(integrand, w[1], w[0], &opts).map(|r| r.value.re))
        .collect::<Result<_>>()?;

    let values: Vec<f64> = pieces
        .iter()
        .scan(0.0, |acc, d| {
            *acc += d;
            Some(*acc)
        })
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("probe integral overflowed".into()));
    }

    let increments = &pieces[1..];
    let k = FIT_POINTS.min(increments.len());
    let tail_eps = &eps_grid[eps_grid.len() - k..];
    let tail_inc = &increments[increments.len() - k..];
    if tail_inc.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::Numerical(
            "probe increments underflowed; choose a coarser epsilon grid".into(),
        ));
    }
    let xs: Vec<f64> = tail_eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = tail_inc.iter().map(|d| d.ln()).collect();
    let fitted = least_squares_slope(&xs, &ys)
        .ok_or_else(|| Error::Numerical("degenerate exponent fit".into()))?;

    let order = poly.vanishing_order(64)? as f64;
    let mut series = ProbeSeries::new(kind, eps_grid.to_vec(), values);
    series.fitted_exponent = Some(fitted);
    series.predicted_exponent = Some(2.0 * order - 2.0 * alpha + 1.0);
    series.convergent = fitted > CONVERGENCE_MARGIN;
    if series.convergent {
        let q = ratio.powf(fitted);
        let last = *series.values.last().expect("grid is nonempty");
        series.limit = Some(last + tail_inc[k - 1] * q / (1.0 - q));
    }
    Ok(series)
}

/// `∫_ε^1 |f_n(t)|² t^{−2α} dt`; finite as `ε → 0` iff `2M − 2α > −1`.
pub fn minimality_divergence_probe(
    spec: &WeightedSystemSpec,
    n: i64,
    eps_grid: &[f64],
    cfg: &ToleranceConfig,
) -> Result<ProbeSeries> {
    let f = f_n_exact(spec.exclusion(), n)?;
    energy_probe(
        &f,
        spec.alpha(),
        eps_grid,
        ProbeKind::MinimalityDivergence,
        cfg,
    )
}

/// `∫_ε^1 |H(t)|² t^{−2α} dt` for the annihilator; finite iff `α < M − 1/2`.
pub fn completeness_witness_probe(
    spec: &WeightedSystemSpec,
    eps_grid: &[f64],
    cfg: &ToleranceConfig,
) -> Result<ProbeSeries> {
    let h = annihilator_polynomial(spec.exclusion())?;
    energy_probe(
        &h,
        spec.alpha(),
        eps_grid,
        ProbeKind::CompletenessWitnessNorm,
        cfg,
    )
}
