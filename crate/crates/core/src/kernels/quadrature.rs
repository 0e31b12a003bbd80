//! Globally adaptive Gauss–Kronrod (7, 15) quadrature for complex integrands.
//!
//! Initial panels are capped in length so that oscillatory integrands with
//! angular frequency `omega` see at most half a period per panel; the panel
//! with the largest error estimate is bisected until the total estimate
//! meets `max(abs_tol, rel_tol * |I|)` or reaches the rounding level of the
//! panel sums.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on initial panel length (e.g. `pi / |omega|`).
    pub max_panel: Option<f64>,
    pub max_subdivisions: usize,
}

impl QuadOptions {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            max_panel: None,
            max_subdivisions,
        }
    }

    /// Caps panels at half a period of `e^{i omega t}`.
    pub fn oscillation(mut self, omega: f64) -> Self {
        if omega.is_finite() && omega.abs() > 0.0 {
            self.max_panel = Some(std::f64::consts::PI / omega.abs());
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub abs_error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    floor: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [Complex64::new(0.0, 0.0); 15];
    fv[14] = f(centre);
    for (i, &x) in XGK[..7].iter().enumerate() {
        let dx = half * x;
        fv[2 * i] = f(centre - dx);
        fv[2 * i + 1] = f(centre + dx);
    }
    let weight = |i: usize| if i == 14 { WGK[7] } else { WGK[i / 2] };
    let mut kronrod = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for (i, v) in fv.iter().enumerate() {
        kronrod += v * weight(i);
        abs_sum += weight(i) * v.norm();
    }
    let mut gauss = fv[14] * WG[3];
    for i in (1..7).step_by(2) {
        gauss += (fv[2 * i] + fv[2 * i + 1]) * WG[i / 2];
    }
    let mean = kronrod * 0.5;
    let spread: f64 = fv
        .iter()
        .enumerate()
        .map(|(i, v)| weight(i) * (v - mean).norm())
        .sum::<f64>()
        * half.abs();
    let value = kronrod * half;
    // QUADPACK's scaling of the Gauss–Kronrod difference.
    let mut error = ((kronrod - gauss) * half).norm();
    if spread > 0.0 && error > 0.0 {
        error = spread * (200.0 * error / spread).powf(1.5).min(1.0);
    }
    // Never claim accuracy below the rounding level of the panel sum.
    let floor = 50.0 * f64::EPSILON * abs_sum * half.abs();
    Panel {
        a,
        b,
        value,
        error: error.max(floor),
        floor,
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    integrate_breakpoints(f, &[a, b], opts)
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, starting from the given
/// panels (each further capped by `opts.max_panel`).
pub fn integrate_breakpoints<F: Fn(f64) -> Complex64>(
    f: F,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    if breaks.len() < 2 || breaks.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(
            "quadrature needs at least two finite breakpoints",
        ));
    }
    if breaks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "quadrature breakpoints must be strictly increasing",
        ));
    }

    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let pieces = match opts.max_panel {
            Some(len) if len > 0.0 => ((hi - lo) / len).ceil().max(1.0) as usize,
            _ => 1,
        };
        let step = (hi - lo) / pieces as f64;
        for k in 0..pieces {
            let pa = lo + step * k as f64;
            let pb = if k + 1 == pieces {
                hi
            } else {
                lo + step * (k + 1) as f64
            };
            heap.push(gauss_kronrod(&f, pa, pb));
        }
    }

    let total = |heap: &BinaryHeap<Panel>| {
        heap.iter()
            .fold((Complex64::new(0.0, 0.0), 0.0, 0.0), |(v, e, f), p| {
                (v + p.value, e + p.error, f + p.floor)
            })
    };
    let (mut value, mut error, mut floor) = total(&heap);
    let mut subdivisions = 0usize;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * value.norm());
        // Past twice the rounding floor, bisection cannot help any more.
        if error <= target || error <= 2.0 * floor {
            break;
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::Accuracy {
                message: format!(
                    "quadrature budget of {} subdivisions exhausted",
                    opts.max_subdivisions
                ),
                best: value,
                error_estimate: error,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel can no longer be split in floating point.
            return Err(Error::Accuracy {
                message: "quadrature panel underflow".into(),
                best: value,
                error_estimate: error,
            });
        }
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        floor += left.floor + right.floor - worst.floor;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        // Re-sum periodically to stop incremental drift.
        if subdivisions % 256 == 0 {
            (value, error, floor) = total(&heap);
        }
    }
    let (value, error, _) = total(&heap);
    Ok(QuadratureResult {
        value,
        abs_error: error,
        panels: heap.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn opts() -> QuadOptions {
        QuadOptions::new(1e-14, 1e-13, 10_000)
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|t| Complex64::new(t * t * t, 0.0), 0.0, 2.0, &opts()).unwrap();
        assert!((r.value.re - 4.0).abs() < 1e-14);
    }

    #[test]
    fn full_period_vanishes() {
        let r = integrate(
            |t| Complex64::from_polar(1.0, 2.0 * PI * t),
            0.0,
            1.0,
            &opts().oscillation(2.0 * PI),
        )
        .unwrap();
        assert!(r.value.norm() < 1e-14);
    }

    #[test]
    fn endpoint_singularity_in_derivative() {
        let r = integrate(|t| Complex64::new(t.sqrt(), 0.0), 0.0, 1.0, &opts()).unwrap();
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn highly_oscillatory() {
        let omega: f64 = 1e4;
        let exact = Complex64::new(omega.sin() / omega, (1.0 - omega.cos()) / omega);
        let r = integrate(
            |t| Complex64::from_polar(1.0, omega * t),
            0.0,
            1.0,
            &opts().oscillation(omega),
        )
        .unwrap();
        assert!(
            (r.value - exact).norm() < 1e-13,
            "{:?} vs {:?}",
            r.value,
            exact
        );
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let tight = QuadOptions::new(1e-300, 1e-300, 3);
        match integrate(|t| Complex64::new(t.sqrt(), 0.0), 0.0, 1.0, &tight) {
            Err(Error::Accuracy { best, .. }) => assert!((best.re - 2.0 / 3.0).abs() < 1e-3),
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(integrate_breakpoints(|_| Complex64::new(1.0, 0.0), &[0.0, 0.0], &opts()).is_err());
        assert!(integrate_breakpoints(|_| Complex64::new(1.0, 0.0), &[0.0], &opts()).is_err());
    }
}
