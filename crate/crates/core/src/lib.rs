//! Weighted exponential systems `{t^α e^{2πint}}_{n ∈ Z \ A}` in `L²(0,1)`:
//! dual-system construction, exactness classification and diagnostics.

pub mod acceptance;
pub mod cli;
pub mod diagnostics;
pub mod dual_system;
pub mod error;
pub mod kernels;
pub mod report;
pub mod vandermonde;

pub use error::{Error, Result};
