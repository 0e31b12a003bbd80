//! Dual functions `f_n`, their coefficient tables and polynomial form, the
//! completeness annihilator, and closed-form biorthogonality checks.

mod exclusion;
mod poly;
mod polyform;
mod table;
mod witness;

pub use exclusion::{ExclusionSet, FrequencyMap};
pub use poly::{HarmonicPolynomial, LocalEvaluator, TrigPolynomial, TrigTerm, VANISHING_THRESHOLD};
pub use polyform::{polynomial_form, PolynomialForm};
pub use table::{
    build_f_n, dual_coefficients, f_n_exact, Arithmetic, DualCoefficientTable, DualRow,
};
pub use witness::{
    annihilator_polynomial, annihilator_witness, biorthogonality_exact, biorthogonality_from_table,
    biorthogonality_inner_product, AnnihilatorWitness, L2Norm,
};

/// Vanishing order of `p` at the origin; see [`TrigPolynomial::vanishing_order`].
pub fn vanishing_order(p: &TrigPolynomial, max_order: u32) -> crate::error::Result<u32> {
    p.vanishing_order(max_order)
}
