use serde::Serialize;

use super::exclusion::ExclusionSet;
use crate::error::Result;
use crate::kernels::ExactRational;
use crate::vandermonde::{inverse_exact, last_row_cofactors, last_row_cofactors_exact, solve_dual};

/// `a_{n,j} = Σ_k c_{j,k} (−λ_n)^{k−1}` with `k = 1..M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolynomialForm {
    /// `c[j][k]` for 0-based `j, k`.
    pub c: Vec<Vec<f64>>,
    /// On integer nodes, `c_{j,k} (2π)^{k−1}` as exact rationals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaled_exact: Option<Vec<Vec<ExactRational>>>,
    pub leading_nonzero: bool,
}

impl PolynomialForm {
    pub fn m(&self) -> usize {
        self.c.len()
    }

    /// Evaluates the `j`-th (0-based) coefficient polynomial at `λ`.
    pub fn evaluate(&self, j: usize, lambda: f64) -> f64 {
        // Horner in x = −λ.
        self.c[j]
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * -lambda + c)
    }

    pub fn leading(&self, j: usize) -> f64 {
        self.c[j][self.m() - 1]
    }
}

fn sign(k: usize) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Coefficients of `a_{n,j}` as polynomials in `λ_n`, from the inverse of
/// the node Vandermonde matrix: `c_{j,k} = (−1)^{k−1} (Λ^{−1})_{j,k}`.
pub fn polynomial_form(exclusion: &ExclusionSet) -> Result<PolynomialForm> {
    let m = exclusion.m();
    if let Some(ints) = exclusion.nodes().integer_form() {
        let inv = inverse_exact(ints)?;
        let scaled: Vec<Vec<ExactRational>> = inv
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(k, v)| v * &ExactRational::from_integer(-sign(k)))
                    .collect()
            })
            .collect();
        let c = scaled
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(k, v)| v.to_f64() / std::f64::consts::TAU.powi(k as i32))
                    .collect()
            })
            .collect();
        let cof = last_row_cofactors_exact(ints)?;
        let leading_nonzero = cof.all_nonzero && scaled.iter().all(|row| !row[m - 1].is_zero());
        return Ok(PolynomialForm {
            c,
            scaled_exact: Some(scaled),
            leading_nonzero,
        });
    }

    // Column k of Λ^{−1} solves Λ a = e_k.
    let mut c = vec![vec![0.0; m]; m];
    for k in 0..m {
        let mut e = vec![0.0; m];
        e[k] = 1.0;
        let col = solve_dual(exclusion.nodes(), &e)?.solution;
        for j in 0..m {
            c[j][k] = -(sign(k) as f64) * col[j];
        }
    }
    let cof = last_row_cofactors(exclusion.nodes());
    let leading_nonzero = cof.all_nonzero && c.iter().all(|row| row[m - 1] != 0.0);
    Ok(PolynomialForm {
        c,
        scaled_exact: None,
        leading_nonzero,
    })
}
