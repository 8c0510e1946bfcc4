//! Exact extremal values by branch and bound, and the verification suites
//! that compare them with closed forms and bounds.

mod cache;
mod solver;
mod verify;

pub use cache::ValueCache;
pub use solver::{
    construction_seed, max_pattern_free, z_max_pattern_free, ExtremalResult, SolverConfig, DEFAULT_GUARD, MAX_UNIVERSE,
};
pub use verify::{
    partite_sizes, verify_boxes, verify_closed_form, verify_constructions, verify_cyclic_vs_linear,
    verify_partite_bound, verify_recurrence, verify_splitter, Verifier, VerifyReport, VerifyRow,
};
