//! Exactness-window classification, divergence probes, Gram-matrix frame
//! trends, coefficient growth fits and the Schauder obstruction.

mod classify;
mod gram;
mod growth;
mod obstruction;
pub mod probe;

pub use classify::{classify, ClassifierVerdict, Regime, WeightedSystemSpec, Window};
pub use gram::{frame_lower_bound_probe, gram_matrix, GramMatrix, StructureTag};
pub use growth::{growth_fit, GrowthFit};
pub use obstruction::{
    obstruction_inner_product, schauder_obstruction_report, weighted_norm, ObstructionReport,
};
pub use probe::{
    completeness_witness_probe, default_eps_grid, energy_probe, minimality_divergence_probe,
    validate_eps_grid, ProbeKind, ProbeSeries,
};
