//! Structured dense subgraphs: bipartite and split extraction from weighted
//! cyclic hypergraphs, and the hierarchical box partition of r-sets with its
//! weighted counting check.

mod boxes;
mod extract;

pub use boxes::{
    box_decomposition, interval_systems, weighted_box_bound_check, BoxBoundReport, BoxDecomposition, BoxLevel,
    BoxViolation, IntervalBox,
};
pub use extract::{
    bipartite_loss, c_r, check_bipartite_certificate, extract_bipartite, extract_split, psi, Certificate,
    ExtractConfig, ExtractionResult,
};
