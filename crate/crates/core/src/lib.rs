//! Materialized view selection for labeled property graphs.
//!
//! Queries are turned into candidate views (a pattern with a traversal order
//! plus the materialized edge-induced content). Containment checks decide
//! which queries a view can answer, benefits come from a deterministic cost
//! counter, and selectors pick a view set under a byte budget.

pub mod benefit;
pub mod containment;
pub mod error;
pub mod genes;
pub mod graph;
pub mod harness;
pub mod io;
pub mod matcher;
pub mod par;
pub mod pattern;
pub mod predicate;
pub mod schema;
pub mod selector;
pub mod value;
pub mod view;

pub use benefit::{assign_benefits, benefit_multi, benefit_single, BenefitVector, EvalContext};
pub use containment::{
    pattern_contains, query_answerable, two_level_search, vva, vva_trace, ContainmentWitness, CoverResult,
    GeneAssignment, VvaTrace,
};
pub use error::{Error, Result};
pub use genes::{articulation_points, fission, Gene, GeneSet};
pub use graph::{Edge, PropertyGraph, Props, Vertex};
pub use io::{load_graph, save_graph, GraphFormat};
pub use matcher::{evaluate_query, subgraph_isomorphisms, CostReport, Mapping, MatchSet};
pub use pattern::{
    load_workload, parse_pattern_query, parse_workload, PatternBuilder, PatternEdge, PatternNode, PatternQuery,
};
pub use predicate::{predicate_contains, Atom, Comparator, Predicate};
pub use schema::{infer_schema, SchemaGraph};
pub use selector::{branch_and_bound_select, dps, fusion, gga, greedy_select, remove_empty, GgaParams, SelectionState};
pub use value::{PropertyValue, ValueKind};
pub use view::{
    answer_with_view, answer_with_views, build_view_pattern, load_view_graphml, materialize_view, save_view_graphml,
    ExtendedGraphView, ViewPattern,
};
