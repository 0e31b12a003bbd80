//! Vandermonde systems `V(Λ) a = b` with `V[k][j] = Λ_j^k`.
//!
//! The floating path never materializes `V`: it runs the O(M²) Björck–Pereyra
//! elimination for the dual (moment) system directly on the nodes. The exact
//! path materializes the integer matrix and eliminates over the rationals;
//! it shares no code with the floating path and serves as its oracle.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::ExactRational;

/// Relative residual above which a float solve carries a conditioning warning.
pub const RESIDUAL_WARNING_THRESHOLD: f64 = 1e-9;

/// Strictly increasing distinct nodes `Λ₁ < … < Λ_M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeSet {
    nodes: Vec<f64>,
    integer_form: Option<Vec<i64>>,
}

impl NodeSet {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::invalid("node set must contain at least one node"));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("nodes must be finite"));
        }
        for w in nodes.windows(2) {
            if w[1] == w[0] {
                return Err(Error::Singular(format!("duplicate node {}", w[0])));
            }
            if w[1] < w[0] {
                return Err(Error::invalid("nodes must be strictly increasing"));
            }
        }
        Ok(NodeSet {
            nodes,
            integer_form: None,
        })
    }

    /// Sorts first; duplicates are still rejected.
    pub fn from_unsorted(mut nodes: Vec<f64>) -> Result<Self> {
        nodes.sort_by(f64::total_cmp);
        NodeSet::new(nodes)
    }

    /// Nodes `2π·k` for the given integers (sorted internally).
    pub fn trigonometric(ints: &[i64]) -> Result<Self> {
        let mut ints = ints.to_vec();
        ints.sort_unstable();
        if let Some(w) = ints.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Singular(format!("duplicate node index {}", w[0])));
        }
        let nodes = ints.iter().map(|&k| two_pi_times(k)).collect();
        let mut set = NodeSet::new(nodes)?;
        set.integer_form = Some(ints);
        Ok(set)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// The integers `k_j` with `Λ_j = 2π k_j`, when the set was built that way.
    pub fn integer_form(&self) -> Option<&[i64]> {
        self.integer_form.as_deref()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn position(&self, x: f64) -> Option<usize> {
        self.nodes.iter().position(|&v| v == x)
    }
}

pub(crate) fn two_pi_times(k: i64) -> f64 {
    std::f64::consts::TAU * k as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    BjorckPereyra,
    ExactRational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditioningWarning {
    pub relative_residual: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VandermondeSolveResult<S> {
    pub solution: Vec<S>,
    /// `‖V a − b‖∞ / ‖b‖∞`; zero on the exact path.
    pub residual_norm: f64,
    pub method: SolveMethod,
    pub warning: Option<ConditioningWarning>,
}

/// Björck–Pereyra elimination for `Σ_j a_j x_j^k = b_k`, `k = 0..M−1`, in place.
fn bjorck_pereyra_dual(x: &[f64], b: &mut [f64]) {
    let n = x.len();
    for k in 0..n.saturating_sub(1) {
        for i in (k + 1..n).rev() {
            b[i] -= x[k] * b[i - 1];
        }
    }
    for k in (0..n.saturating_sub(1)).rev() {
        for i in k + 1..n {
            b[i] /= x[i] - x[i - k - 1];
        }
        for i in k..n - 1 {
            b[i] -= b[i + 1];
        }
    }
}

fn relative_residual(x: &[f64], a: &[f64], rhs: &[f64]) -> f64 {
    let scale = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut powers = vec![1.0; x.len()];
    let mut worst = 0.0f64;
    for &b in rhs {
        let row: f64 = powers.iter().zip(a).map(|(p, c)| p * c).sum();
        worst = worst.max((row - b).abs());
        for (p, &xi) in powers.iter_mut().zip(x) {
            *p *= xi;
        }
    }
    if scale == 0.0 {
        worst
    } else {
        worst / scale
    }
}

/// Solves `V(nodes) a = b` for a general right-hand side (float path).
pub fn solve_dual(nodes: &NodeSet, rhs: &[f64]) -> Result<VandermondeSolveResult<f64>> {
    if rhs.len() != nodes.len() {
        return Err(Error::invalid(format!(
            "rhs has length {}, expected {}",
            rhs.len(),
            nodes.len()
        )));
    }
    let mut a = rhs.to_vec();
    bjorck_pereyra_dual(nodes.nodes(), &mut a);
    Ok(finish(nodes.nodes(), a, rhs))
}

fn finish(x: &[f64], a: Vec<f64>, rhs: &[f64]) -> VandermondeSolveResult<f64> {
    let residual = relative_residual(x, &a, rhs);
    let warning = (!(residual <= RESIDUAL_WARNING_THRESHOLD)).then_some(ConditioningWarning {
        relative_residual: residual,
        threshold: RESIDUAL_WARNING_THRESHOLD,
    });
    VandermondeSolveResult {
        solution: a,
        residual_norm: residual,
        method: SolveMethod::BjorckPereyra,
        warning,
    }
}

/// Solves `V(Λ) a = −(1, x, …, x^{M−1})ᵀ`.
///
/// For node sets with an integer form the rows are divided by `(2π)^k`
/// first, which leaves the solution unchanged and keeps the powers small.
/// When `x` coincides with a node the result is exactly `−e_j`.
pub fn solve_power_rhs(nodes: &NodeSet, x: f64) -> Result<VandermondeSolveResult<f64>> {
    if !x.is_finite() {
        return Err(Error::domain("right-hand side abscissa must be finite"));
    }
    let m = nodes.len();
    if let Some(j) = nodes.position(x) {
        let mut a = vec![0.0; m];
        a[j] = -1.0;
        return Ok(VandermondeSolveResult {
            solution: a,
            residual_norm: 0.0,
            method: SolveMethod::BjorckPereyra,
            warning: None,
        });
    }
    let (work_nodes, work_x): (Vec<f64>, f64) = match nodes.integer_form() {
        Some(ints) => (
            ints.iter().map(|&k| k as f64).collect(),
            x / std::f64::consts::TAU,
        ),
        None => (nodes.nodes().to_vec(), x),
    };
    let mut rhs = Vec::with_capacity(m);
    let mut p = 1.0;
    for _ in 0..m {
        rhs.push(-p);
        p *= work_x;
    }
    let mut a = rhs.clone();
    bjorck_pereyra_dual(&work_nodes, &mut a);
    Ok(finish(&work_nodes, a, &rhs))
}

fn check_distinct(ints: &[i64]) -> Result<()> {
    let mut sorted = ints.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Singular(format!("duplicate node {}", w[0])));
    }
    if ints.is_empty() {
        return Err(Error::invalid("node set must contain at least one node"));
    }
    Ok(())
}

/// Gaussian elimination over the rationals on a square system.
fn rational_elimination(
    mut mat: Vec<Vec<ExactRational>>,
    mut rhs: Vec<ExactRational>,
) -> Result<Vec<ExactRational>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !mat[r][col].is_zero())
            .ok_or_else(|| Error::Singular("singular matrix in exact elimination".into()))?;
        mat.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = mat[col][col].recip()?;
        for r in col + 1..n {
            if mat[r][col].is_zero() {
                continue;
            }
            let factor = &mat[r][col] * &inv;
            for c in col..n {
                let delta = &factor * &mat[col][c];
                mat[r][c] -= delta;
            }
            let delta = &factor * &rhs[col];
            rhs[r] -= delta;
        }
    }
    let mut sol = vec![ExactRational::zero(); n];
    for r in (0..n).rev() {
        let mut acc = rhs[r].clone();
        for c in r + 1..n {
            acc -= &mat[r][c] * &sol[c];
        }
        sol[r] = acc.checked_div(&mat[r][r])?;
    }
    Ok(sol)
}

fn integer_vandermonde(nodes: &[i64]) -> Vec<Vec<ExactRational>> {
    let m = nodes.len();
    let mut rows = Vec::with_capacity(m);
    let mut powers: Vec<BigInt> = vec![BigInt::one(); m];
    for _ in 0..m {
        rows.push(powers.iter().cloned().map(ExactRational::from).collect());
        for (p, &x) in powers.iter_mut().zip(nodes) {
            *p *= x;
        }
    }
    rows
}

/// Exact solve of `V(k) a = −(1, x, …, x^{M−1})ᵀ` over integer nodes.
/// Solution entries follow the order of `nodes_int`.
pub fn solve_exact(nodes_int: &[i64], x_int: i64) -> Result<VandermondeSolveResult<ExactRational>> {
    check_distinct(nodes_int)?;
    let m = nodes_int.len();
    let solution = if let Some(j) = nodes_int.iter().position(|&k| k == x_int) {
        let mut a = vec![ExactRational::zero(); m];
        a[j] = -ExactRational::one();
        a
    } else {
        let mut rhs = Vec::with_capacity(m);
        let mut p = BigInt::one();
        for _ in 0..m {
            rhs.push(-ExactRational::from(p.clone()));
            p *= x_int;
        }
        rational_elimination(integer_vandermonde(nodes_int), rhs)?
    };
    Ok(VandermondeSolveResult {
        solution,
        residual_norm: 0.0,
        method: SolveMethod::ExactRational,
        warning: None,
    })
}

/// `(V⁻¹)` of the integer Vandermonde matrix, exactly, as rows `j` / columns `k`.
pub fn inverse_exact(nodes_int: &[i64]) -> Result<Vec<Vec<ExactRational>>> {
    check_distinct(nodes_int)?;
    let m = nodes_int.len();
    let v = integer_vandermonde(nodes_int);
    let mut inv = vec![vec![ExactRational::zero(); m]; m];
    for k in 0..m {
        let mut e = vec![ExactRational::zero(); m];
        e[k] = ExactRational::one();
        let col = rational_elimination(v.clone(), e)?;
        for (j, value) in col.into_iter().enumerate() {
            inv[j][k] = value;
        }
    }
    Ok(inv)
}

/// `Π_{i<j} (Λ_j − Λ_i)` by the product formula.
pub fn determinant(nodes: &NodeSet) -> f64 {
    let x = nodes.nodes();
    let mut det = 1.0;
    for j in 0..x.len() {
        for i in 0..j {
            det *= x[j] - x[i];
        }
    }
    det
}

/// Exact product-formula determinant for integer nodes (order as given).
pub fn determinant_exact(nodes_int: &[i64]) -> BigInt {
    let mut det = BigInt::one();
    for j in 0..nodes_int.len() {
        for i in 0..j {
            det *= BigInt::from(nodes_int[j]) - BigInt::from(nodes_int[i]);
        }
    }
    det
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CofactorReport<S> {
    /// Cofactors of the bottom-row entries `Λ_j^{M−1}`, `j = 1..M`.
    pub last_row_cofactors: Vec<S>,
    pub determinant: S,
    pub all_nonzero: bool,
}

fn sign(exponent: usize) -> f64 {
    if exponent % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Cofactors of the bottom row: `(−1)^{M+j}` times the Vandermonde
/// determinant of the nodes with `Λ_j` removed.
pub fn last_row_cofactors(nodes: &NodeSet) -> CofactorReport<f64> {
    let x = nodes.nodes();
    let m = x.len();
    let cofactors: Vec<f64> = (0..m)
        .map(|j| {
            let rest: Vec<f64> = x
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, &v)| v)
                .collect();
            let minor = NodeSet {
                nodes: rest,
                integer_form: None,
            };
            sign(m + j + 1) * determinant(&minor)
        })
        .collect();
    let scale = cofactors.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
    let all_nonzero = cofactors
        .iter()
        .all(|c| c.abs() > 1e-12 * scale && c.is_finite());
    CofactorReport {
        last_row_cofactors: cofactors,
        determinant: determinant(nodes),
        all_nonzero,
    }
}

/// Exact variant for integer nodes.
pub fn last_row_cofactors_exact(nodes_int: &[i64]) -> Result<CofactorReport<BigInt>> {
    check_distinct(nodes_int)?;
    let m = nodes_int.len();
    let cofactors: Vec<BigInt> = (0..m)
        .map(|j| {
            let rest: Vec<i64> = nodes_int
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, &v)| v)
                .collect();
            let minor = determinant_exact(&rest);
            if (m + j + 1) % 2 == 0 {
                minor
            } else {
                -minor
            }
        })
        .collect();
    let all_nonzero = cofactors.iter().all(|c| !c.is_zero());
    Ok(CofactorReport {
        last_row_cofactors: cofactors,
        determinant: determinant_exact(nodes_int),
        all_nonzero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn q(p: i64, d: i64) -> ExactRational {
        ExactRational::new(p, d).unwrap()
    }

    #[test]
    fn single_node() {
        let nodes = NodeSet::trigonometric(&[0]).unwrap();
        for n in [-3, 1, 7] {
            let r = solve_power_rhs(&nodes, TAU * n as f64).unwrap();
            assert_eq!(r.solution, vec![-1.0]);
        }
    }

    #[test]
    fn two_nodes_closed_form() {
        let nodes = NodeSet::trigonometric(&[0, 1]).unwrap();
        for n in [-5i64, 2, 3, 10, 1000] {
            let r = solve_power_rhs(&nodes, TAU * n as f64).unwrap();
            assert!((r.solution[0] - (n - 1) as f64).abs() < 1e-12 * n.abs() as f64);
            assert!((r.solution[1] + n as f64).abs() < 1e-12 * n.abs() as f64);
            assert!(r.warning.is_none());
        }
    }

    #[test]
    fn coincident_abscissa_gives_negated_unit_vector() {
        let nodes = NodeSet::trigonometric(&[0, 1]).unwrap();
        assert_eq!(
            solve_power_rhs(&nodes, 0.0).unwrap().solution,
            vec![-1.0, 0.0]
        );
        assert_eq!(
            solve_power_rhs(&nodes, TAU).unwrap().solution,
            vec![0.0, -1.0]
        );
        let exact = solve_exact(&[-2, 4, 9], 4).unwrap();
        assert_eq!(exact.solution, vec![q(0, 1), q(-1, 1), q(0, 1)]);
    }

    #[test]
    fn exact_examples() {
        for n in [-7i64, 2, 5, 100] {
            let r = solve_exact(&[0, 1], n).unwrap();
            assert_eq!(
                r.solution,
                vec![ExactRational::from(n - 1), ExactRational::from(-n)]
            );
        }
        assert_eq!(
            solve_exact(&[-1, 1], 0).unwrap().solution,
            vec![q(-1, 2), q(-1, 2)]
        );
        assert_eq!(solve_exact(&[3], 3).unwrap().solution, vec![q(-1, 1)]);
        assert_eq!(solve_exact(&[3], 3).unwrap().residual_norm, 0.0);
    }

    #[test]
    fn duplicates_are_singular() {
        assert!(matches!(solve_exact(&[1, 1], 0), Err(Error::Singular(_))));
        assert!(matches!(
            NodeSet::trigonometric(&[2, 2]),
            Err(Error::Singular(_))
        ));
        assert!(matches!(
            NodeSet::new(vec![1.0, 1.0]),
            Err(Error::Singular(_))
        ));
        assert!(NodeSet::new(vec![2.0, 1.0]).is_err());
        assert!(NodeSet::from_unsorted(vec![2.0, 1.0]).is_ok());
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&NodeSet::trigonometric(&[0]).unwrap()), 1.0);
        assert!((determinant(&NodeSet::trigonometric(&[0, 1]).unwrap()) - TAU).abs() < 1e-15);
        let d3 = determinant(&NodeSet::trigonometric(&[0, 1, 2]).unwrap());
        assert!((d3 - 16.0 * PI.powi(3)).abs() < 1e-12 * d3);
        assert_eq!(determinant_exact(&[0, 1, 2]), BigInt::from(2));
    }

    #[test]
    fn cofactor_examples() {
        let r = last_row_cofactors(&NodeSet::trigonometric(&[0, 1]).unwrap());
        assert_eq!(r.last_row_cofactors, vec![-1.0, 1.0]);
        assert!(r.all_nonzero);
        let r = last_row_cofactors(&NodeSet::trigonometric(&[0]).unwrap());
        assert_eq!(r.last_row_cofactors, vec![1.0]);
        assert_eq!(r.determinant, 1.0);
        let e = last_row_cofactors_exact(&[0, 1]).unwrap();
        assert_eq!(
            e.last_row_cofactors,
            vec![BigInt::from(-1), BigInt::from(1)]
        );
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let nodes = [-3, 0, 2, 7];
        let inv = inverse_exact(&nodes).unwrap();
        let v = integer_vandermonde(&nodes);
        for i in 0..4 {
            for k in 0..4 {
                let entry: ExactRational = (0..4).map(|j| &v[i][j] * &inv[j][k]).sum();
                let expected = if i == k {
                    ExactRational::one()
                } else {
                    ExactRational::zero()
                };
                assert_eq!(entry, expected);
            }
        }
    }

    #[test]
    fn generic_rhs_matches_exact() {
        let nodes = NodeSet::new(vec![-1.5, 0.25, 2.0]).unwrap();
        let rhs = [1.0, -2.0, 0.5];
        let r = solve_dual(&nodes, &rhs).unwrap();
        assert!(r.residual_norm < 1e-14);
        assert!(solve_dual(&nodes, &rhs[..2]).is_err());
    }
}
