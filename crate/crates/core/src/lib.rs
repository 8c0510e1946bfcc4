//! Ordered and convex geometric uniform hypergraphs.
//!
//! The crate covers crossing-path and crossing-matching patterns with an
//! order-preserving containment engine, the extremal families for crossing
//! paths, split and bipartite extraction from weighted hypergraphs, the
//! hierarchical box partition of `r`-sets, and an exact branch-and-bound
//! solver for pattern-free maximization used to check extremal values.
//!
//! Parallel kernels run on rayon when the `parallel` feature (default) is
//! enabled and fall back to sequential loops with identical output otherwise.

pub mod combinatorics;
pub mod constructions;
mod error;
pub mod format;
mod hypergraph;
pub mod par;
pub mod patterns;
pub mod random;
pub mod search;
pub mod splitter;

pub use error::{Error, Result};
pub use hypergraph::{Edge, Embedding, Hypergraph, Mode, WeightedHypergraph};
pub use patterns::Pattern;
