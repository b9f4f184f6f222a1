//! Pattern-to-pattern isomorphism and pattern-to-data evaluation.

mod eval;
mod iso;

pub use crate::predicate::predicate_contains;
pub use eval::{evaluate_query, CostReport, MatchSet};
pub use iso::{for_each_isomorphism, subgraph_isomorphisms, Mapping};
