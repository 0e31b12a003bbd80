//! Scalar foundations: exact rationals, tolerances, quadrature and the
//! oscillatory moment integral.

mod ddouble;
pub mod moment;
pub mod quadrature;
pub mod rational;
pub mod tolerance;

pub use moment::{
    moment_integral, moment_integral_tail, moment_quadrature, moment_recurrence, moment_series,
    tail_with_error, MomentIntegralValue, MomentMethod, SERIES_THETA_MAX,
};
pub use quadrature::{integrate, integrate_breakpoints, QuadOptions, QuadratureResult};
pub use rational::ExactRational;
pub use tolerance::ToleranceConfig;
