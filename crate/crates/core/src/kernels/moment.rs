//! The oscillatory moment integral `I(beta, theta) = ∫₀¹ t^beta e^{i theta t} dt`.
//!
//! Three independent evaluation paths are provided:
//!
//! * a power series `Σ (iθ)^k / (k! (β+k+1))`, summed in double-double so the
//!   `e^{|θ|}`-sized intermediate terms do not destroy the result;
//! * the upward integration-by-parts recurrence
//!   `I(β,θ) = e^{iθ}/(iθ) − (β/(iθ)) I(β−1,θ)`, started from the fractional
//!   part of `β` (closed form for integer `β`, a continued fraction for the
//!   upper incomplete gamma function otherwise);
//! * adaptive Gauss–Kronrod quadrature with panels no longer than `π/|θ|`.
//!
//! [`moment_integral`] picks a path and falls back to quadrature whenever the
//! tracked error estimate of the preferred path exceeds `abs_tol`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ddouble::{CDd, Dd};
use super::quadrature::{integrate, integrate_breakpoints, QuadOptions};
use super::tolerance::ToleranceConfig;
use crate::error::{Error, Result};

/// Beyond this `|θ|` the series is not used by [`moment_integral`].
pub const SERIES_THETA_MAX: f64 = 30.0;

/// The series accepts a slightly wider range when called directly; beyond
/// it the double-double headroom (`e^{|θ|}` vs. 2^-104) is used up.
const SERIES_THETA_LIMIT: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    Series,
    Recurrence,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentIntegralValue {
    pub beta: f64,
    pub theta: f64,
    #[serde(serialize_with = "crate::report::serialize_complex")]
    pub value: Complex64,
    pub method: MomentMethod,
    pub abs_error_estimate: f64,
}

fn check_args(beta: f64, theta: f64) -> Result<()> {
    if beta.is_nan() || beta <= -1.0 {
        return Err(Error::domain(format!(
            "non-integrable weight t^{beta} on (0,1): need beta > -1"
        )));
    }
    if !theta.is_finite() {
        return Err(Error::domain(format!("theta must be finite, got {theta}")));
    }
    Ok(())
}

fn exact_at_zero(beta: f64) -> MomentIntegralValue {
    MomentIntegralValue {
        beta,
        theta: 0.0,
        value: Complex64::new(1.0 / (beta + 1.0), 0.0),
        method: MomentMethod::Series,
        abs_error_estimate: 0.0,
    }
}

/// `I(beta, theta)` with automatic path selection.
pub fn moment_integral(
    beta: f64,
    theta: f64,
    cfg: &ToleranceConfig,
) -> Result<MomentIntegralValue> {
    check_args(beta, theta)?;
    if theta == 0.0 {
        return Ok(exact_at_zero(beta));
    }
    let preferred = if theta.abs() <= SERIES_THETA_MAX {
        moment_series(beta, theta, cfg)
    } else {
        moment_recurrence(beta, theta, cfg)
    };
    match preferred {
        Ok(v) if v.abs_error_estimate <= cfg.abs_tol => Ok(v),
        Ok(_) | Err(Error::Accuracy { .. }) => moment_quadrature(beta, theta, cfg),
        Err(e) => Err(e),
    }
}

/// Power-series path. Valid for `|theta| <= 40`.
pub fn moment_series(beta: f64, theta: f64, cfg: &ToleranceConfig) -> Result<MomentIntegralValue> {
    check_args(beta, theta)?;
    if theta == 0.0 {
        return Ok(exact_at_zero(beta));
    }
    if theta.abs() > SERIES_THETA_LIMIT {
        return Err(Error::Accuracy {
            message: format!("series path limited to |theta| <= {SERIES_THETA_LIMIT}"),
            best: Complex64::new(f64::NAN, f64::NAN),
            error_estimate: f64::INFINITY,
        });
    }
    let (sum, err) = series_sum(beta, theta, cfg.series_terms_max)?;
    Ok(MomentIntegralValue {
        beta,
        theta,
        value: sum,
        method: MomentMethod::Series,
        abs_error_estimate: err,
    })
}

fn series_sum(beta: f64, theta: f64, max_terms: usize) -> Result<(Complex64, f64)> {
    let abs_theta = theta.abs();
    let beta_dd = Dd::from_f64(beta);
    let theta_dd = Dd::from_f64(theta);
    let mut term = CDd::from_real(Dd::from_f64(1.0));
    let mut sum = CDd::ZERO;
    let mut largest: f64 = 0.0;
    for k in 0..max_terms {
        let denom = beta_dd.add(Dd::from_f64((k + 1) as f64));
        let contrib = term.div_real(denom);
        sum = sum.add(contrib);
        let term_mag = term.norm();
        largest = largest.max(contrib.norm());
        let next = (k + 1) as f64;
        if next > abs_theta {
            // Geometric bound on everything not yet summed.
            let ratio = abs_theta / (next + 1.0);
            let next_mag = term_mag * abs_theta / next;
            let remainder = next_mag / (beta + next + 1.0) / (1.0 - ratio);
            if remainder < 1e-18 * sum.norm().max(1e-300) || remainder < 1e-300 {
                let rounding = largest * (k + 1) as f64 * 4.0 * 2f64.powi(-104);
                let value = sum.to_c64();
                let err = remainder + rounding + value.norm() * f64::EPSILON;
                return Ok((value, err));
            }
        }
        term = term.mul_i(theta_dd.div(Dd::from_f64(next)));
    }
    Err(Error::Accuracy {
        message: format!("series did not converge in {max_terms} terms"),
        best: sum.to_c64(),
        error_estimate: f64::INFINITY,
    })
}

/// `(e^{iθ} − 1)/(iθ)` without cancellation in `cos θ − 1`.
fn unit_moment(theta: f64) -> Complex64 {
    let half = 0.5 * theta;
    Complex64::new(theta.sin() / theta, 2.0 * half.sin() * half.sin() / theta)
}

/// `1/z` with the magnitude scaled out first, so `|z|` near the limits of
/// the exponent range neither overflows nor underflows.
fn recip(z: Complex64) -> Complex64 {
    let s = z.re.abs().max(z.im.abs());
    let w = z.unscale(s);
    w.conj().unscale(w.norm_sqr() * s)
}

/// `e^{z} z^{-s} Γ(s, z)` by the Legendre continued fraction (modified Lentz).
fn upper_gamma_scaled(s: f64, z: Complex64, max_terms: usize) -> Result<Complex64> {
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0 - s;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = recip(b);
    let mut h = d;
    for i in 1..max_terms {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = d * an + b;
        if d.norm() < TINY {
            d = Complex64::new(TINY, 0.0);
        }
        c = b + recip(c) * an;
        if c.norm() < TINY {
            c = Complex64::new(TINY, 0.0);
        }
        d = recip(d);
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).norm() < 1e-17 {
            return Ok(h);
        }
    }
    Err(Error::Accuracy {
        message: format!(
            "incomplete gamma continued fraction did not converge in {max_terms} terms"
        ),
        best: h,
        error_estimate: f64::INFINITY,
    })
}

/// `I(b, θ)` for `b ∈ (-1, 1)`, `θ ≠ 0`: the starting value of the recurrence.
fn recurrence_base(b: f64, theta: f64, cfg: &ToleranceConfig) -> Result<(Complex64, f64)> {
    if b == 0.0 {
        let v = unit_moment(theta);
        return Ok((v, 4.0 * f64::EPSILON * (v.norm() + 1.0 / theta.abs())));
    }
    if theta.abs() <= SERIES_THETA_MAX {
        return series_sum(b, theta, cfg.series_terms_max);
    }
    let s = b + 1.0;
    let z = Complex64::new(0.0, -theta);
    let h = upper_gamma_scaled(s, z, cfg.series_terms_max)?;
    let phase = Complex64::from_polar(1.0, 0.5 * PI * s * theta.signum());
    let lower = phase * (libm::tgamma(s) * theta.abs().powf(-s));
    let upper = Complex64::from_polar(1.0, theta) * h;
    let v = lower - upper;
    let err = 16.0 * f64::EPSILON * (lower.norm() + upper.norm());
    Ok((v, err))
}

/// Upward integration-by-parts recurrence with propagated error bound.
pub fn moment_recurrence(
    beta: f64,
    theta: f64,
    cfg: &ToleranceConfig,
) -> Result<MomentIntegralValue> {
    check_args(beta, theta)?;
    if theta == 0.0 {
        let mut v = exact_at_zero(beta);
        v.method = MomentMethod::Recurrence;
        return Ok(v);
    }
    let floor = beta.floor().max(0.0);
    let base_exponent = beta - floor;
    let steps = floor as usize;
    let (mut value, mut err) = recurrence_base(base_exponent, theta, cfg)?;
    let boundary = Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, theta) / theta;
    let inv_i_theta = Complex64::new(0.0, -1.0 / theta);
    for k in 0..steps {
        let exponent = base_exponent + (k + 1) as f64;
        let gain = exponent / theta.abs();
        value = boundary - inv_i_theta * exponent * value;
        err = gain * err + 4.0 * f64::EPSILON * (boundary.norm() + value.norm());
    }
    if !(err <= cfg.abs_tol) {
        return Err(Error::Accuracy {
            message: format!(
                "recurrence error bound {err:e} exceeds abs_tol (|beta/theta| = {:.3})",
                beta / theta.abs()
            ),
            best: value,
            error_estimate: err,
        });
    }
    Ok(MomentIntegralValue {
        beta,
        theta,
        value,
        method: MomentMethod::Recurrence,
        abs_error_estimate: err,
    })
}

/// Adaptive Gauss–Kronrod path; the cross-check for the other two.
pub fn moment_quadrature(
    beta: f64,
    theta: f64,
    cfg: &ToleranceConfig,
) -> Result<MomentIntegralValue> {
    check_args(beta, theta)?;
    let opts =
        QuadOptions::new(cfg.abs_tol, 0.0, cfg.quadrature_subdivision_max).oscillation(theta);
    // Gauss–Kronrod nodes are interior, so t = 0 is never evaluated.
    let r = integrate(
        |t: f64| Complex64::from_polar(t.powf(beta), theta * t),
        0.0,
        1.0,
        &opts,
    )?;
    Ok(MomentIntegralValue {
        beta,
        theta,
        value: r.value,
        method: MomentMethod::Quadrature,
        abs_error_estimate: r.abs_error,
    })
}

/// `∫_ε¹ t^beta e^{i theta t} dt` for any real `beta`.
pub fn moment_integral_tail(
    beta: f64,
    theta: f64,
    eps: f64,
    cfg: &ToleranceConfig,
) -> Result<Complex64> {
    tail_with_error(beta, theta, eps, cfg).map(|(v, _)| v)
}

/// As [`moment_integral_tail`], also returning the error estimate. The
/// estimate meets `max(abs_tol, rel_tol * |value|)`.
pub fn tail_with_error(
    beta: f64,
    theta: f64,
    eps: f64,
    cfg: &ToleranceConfig,
) -> Result<(Complex64, f64)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!(
            "tail cut-off must lie in (0,1), got {eps}"
        )));
    }
    if !theta.is_finite() || beta.is_nan() || beta.is_infinite() {
        return Err(Error::domain("tail integral needs finite beta and theta"));
    }
    if theta == 0.0 {
        let p = beta + 1.0;
        let v = if p == 0.0 {
            -eps.ln()
        } else {
            -(p * eps.ln()).exp_m1() / p
        };
        return Ok((Complex64::new(v, 0.0), 4.0 * f64::EPSILON * v.abs()));
    }
    if beta > -1.0 {
        let full = moment_integral(beta, theta, cfg)?;
        let scale = eps.powf(beta + 1.0);
        let head = moment_integral(beta, theta * eps, cfg)?;
        let v = full.value - head.value * scale;
        return Ok((v, full.abs_error_estimate + scale * head.abs_error_estimate));
    }
    // Dyadic panels resolve the t^beta growth towards ε.
    let mut breaks = vec![eps];
    while breaks.last().copied().unwrap() * 2.0 < 1.0 {
        let next = breaks.last().unwrap() * 2.0;
        breaks.push(next);
    }
    breaks.push(1.0);
    let opts = QuadOptions::new(
        cfg.abs_tol,
        cfg.rel_tol * 1e-2,
        cfg.quadrature_subdivision_max,
    )
    .oscillation(theta);
    let r = integrate_breakpoints(
        |t| Complex64::from_polar(t.powf(beta), theta * t),
        &breaks,
        &opts,
    )?;
    Ok((r.value, r.abs_error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn linear_weight_at_zero_frequency() {
        let v = moment_integral(1.0, 0.0, &cfg()).unwrap();
        assert_eq!(v.value, Complex64::new(0.5, 0.0));
        assert_eq!(v.abs_error_estimate, 0.0);
    }

    #[test]
    fn full_period_is_zero() {
        let v = moment_integral(0.0, 2.0 * PI, &cfg()).unwrap();
        assert!(v.value.norm() < 1e-15, "{:?}", v.value);
    }

    #[test]
    fn linear_weight_full_period() {
        // ∫ t e^{2πit} dt = −i/(2π) by parts.
        let expected = Complex64::new(0.0, -1.0 / (2.0 * PI));
        for v in [
            moment_integral(1.0, 2.0 * PI, &cfg()).unwrap(),
            moment_series(1.0, 2.0 * PI, &cfg()).unwrap(),
            moment_recurrence(1.0, 2.0 * PI, &cfg()).unwrap(),
            moment_quadrature(1.0, 2.0 * PI, &cfg()).unwrap(),
        ] {
            assert!(
                (v.value - expected).norm() < 1e-13,
                "{:?}: {:?}",
                v.method,
                v.value
            );
        }
        assert_abs_diff_eq!(expected.im, -0.159_154_943_091_895_35, epsilon = 1e-15);
    }

    #[test]
    fn auto_selects_paths() {
        assert_eq!(
            moment_integral(0.3, 5.0, &cfg()).unwrap().method,
            MomentMethod::Series
        );
        assert_eq!(
            moment_integral(0.3, 500.0, &cfg()).unwrap().method,
            MomentMethod::Recurrence
        );
        // |β/θ| well above 1 defeats the upward recurrence.
        assert_eq!(
            moment_integral(80.0, 35.0, &cfg()).unwrap().method,
            MomentMethod::Quadrature
        );
    }

    #[test]
    fn non_integrable_weight_is_rejected() {
        assert!(matches!(
            moment_integral(-1.0, 1.0, &cfg()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            moment_integral(-3.0, 0.0, &cfg()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            moment_integral(0.0, f64::INFINITY, &cfg()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn negative_fractional_exponent() {
        // ∫ t^{-1/2} dt = 2; compare oscillatory value across paths.
        let a = moment_series(-0.5, 10.0, &cfg()).unwrap();
        let b = moment_recurrence(-0.5, 10.0, &cfg()).unwrap();
        assert!((a.value - b.value).norm() < 1e-13);
        let c = moment_recurrence(-0.5, 1000.0, &cfg()).unwrap();
        let d = moment_quadrature(-0.5, 1000.0, &cfg().with_abs_tol(1e-11)).unwrap();
        assert!(
            (c.value - d.value).norm() < 1e-10,
            "{:?} vs {:?}",
            c.value,
            d.value
        );
    }

    #[test]
    fn tail_closed_forms() {
        let c = cfg();
        assert_abs_diff_eq!(
            moment_integral_tail(-1.0, 0.0, (-1.0f64).exp(), &c)
                .unwrap()
                .re,
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            moment_integral_tail(0.0, 0.0, 0.25, &c).unwrap().re,
            0.75,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            moment_integral_tail(-2.0, 0.0, 0.01, &c).unwrap().re,
            99.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn tail_rejects_bad_cutoff() {
        for eps in [0.0, 1.0, -0.5, 2.0, f64::NAN] {
            assert!(matches!(
                moment_integral_tail(0.0, 1.0, eps, &cfg()),
                Err(Error::Domain(_))
            ));
        }
    }

    #[test]
    fn tail_singular_oscillatory_matches_quadrature_split() {
        // β = −2: compare direct dyadic evaluation with a two-piece split.
        let c = cfg();
        let whole = moment_integral_tail(-2.0, 7.0, 0.01, &c).unwrap();
        let upper = moment_integral_tail(-2.0, 7.0, 0.1, &c).unwrap();
        let opts = QuadOptions::new(1e-13, 1e-13, 10_000).oscillation(7.0);
        let piece = integrate(
            |t| Complex64::from_polar(t.powi(-2), 7.0 * t),
            0.01,
            0.1,
            &opts,
        )
        .unwrap();
        assert!((whole - upper - piece.value).norm() < 1e-10);
    }
}
