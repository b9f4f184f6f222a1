use std::collections::{BTreeSet, HashSet};
use std::ops::{Add, AddAssign};

use crate::graph::PropertyGraph;
use crate::pattern::PatternQuery;

/// Work counters of one evaluation. `cost` is always the sum of the two.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CostReport {
    pub edges_examined: u64,
    pub rows_emitted: u64,
    pub cost: u64,
}

impl CostReport {
    pub fn new(edges_examined: u64, rows_emitted: u64) -> Self {
        CostReport {
            edges_examined,
            rows_emitted,
            cost: edges_examined + rows_emitted,
        }
    }
}

impl Add for CostReport {
    type Output = CostReport;

    fn add(self, rhs: CostReport) -> CostReport {
        CostReport::new(
            self.edges_examined + rhs.edges_examined,
            self.rows_emitted + rhs.rows_emitted,
        )
    }
}

impl AddAssign for CostReport {
    fn add_assign(&mut self, rhs: CostReport) {
        *self = *self + rhs;
    }
}

/// Distinct bindings of pattern aliases to vertex ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchSet {
    pub aliases: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl MatchSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows as a set, columns reordered to ascending alias.
    pub fn canonical(&self) -> BTreeSet<Vec<(String, String)>> {
        self.rows
            .iter()
            .map(|row| {
                let mut pairs: Vec<(String, String)> = self.aliases.iter().cloned().zip(row.iter().cloned()).collect();
                pairs.sort();
                pairs
            })
            .collect()
    }

    /// Same aliases and the same set of rows, regardless of order.
    pub fn same_rows(&self, other: &MatchSet) -> bool {
        let a: BTreeSet<&String> = self.aliases.iter().collect();
        let b: BTreeSet<&String> = other.aliases.iter().collect();
        a == b && self.len() == other.len() && self.canonical() == other.canonical()
    }

    pub fn column(&self, alias: &str) -> Option<usize> {
        self.aliases.iter().position(|a| a == alias)
    }
}

type Row = Vec<Option<u32>>;

fn binds(graph: &PropertyGraph, query: &PatternQuery, node: usize, v: u32) -> bool {
    let pn = query.node(node);
    let vx = graph.vertex(v);
    vx.label == pn.label && pn.pred.eval(&vx.props)
}

/// Evaluates `query` over `graph` with homomorphism semantics.
///
/// Edges are joined one at a time in the query's edge order. A step expands
/// each partial row from an already bound endpoint through the label-grouped
/// adjacency lists; when neither endpoint is bound the step scans all edges of
/// that label once. Every data edge looked at counts towards `edges_examined`
/// and every distinct row produced by a step counts towards `rows_emitted`.
pub fn evaluate_query(graph: &PropertyGraph, query: &PatternQuery) -> (MatchSet, CostReport) {
    let n = query.node_count();
    let mut rows: Vec<Row> = vec![vec![None; n]];
    let mut examined = 0u64;
    let mut emitted = 0u64;

    for pe in query.edges() {
        let (u, v) = (pe.from, pe.to);
        let edge_ok = |e: u32| pe.pred.eval(&graph.edge(e).props);
        let mut next: Vec<Row> = Vec::new();
        let mut seen: HashSet<Row> = HashSet::new();
        let mut push = |row: Row, next: &mut Vec<Row>| {
            if seen.insert(row.clone()) {
                next.push(row);
            }
        };
        if rows.iter().all(|r| r[u].is_none() && r[v].is_none()) {
            let mut hits: Vec<(u32, u32)> = Vec::new();
            for &e in graph.edges_with_label(&pe.label) {
                examined += 1;
                let (s, t) = (graph.source(e), graph.target(e));
                if u == v && s != t {
                    continue;
                }
                if edge_ok(e) && binds(graph, query, u, s) && binds(graph, query, v, t) {
                    hits.push((s, t));
                }
            }
            for row in &rows {
                for &(s, t) in &hits {
                    let mut r = row.clone();
                    r[u] = Some(s);
                    r[v] = Some(t);
                    push(r, &mut next);
                }
            }
        } else {
            for row in &rows {
                match (row[u], row[v]) {
                    (Some(s), bound_t) => {
                        for &e in graph.out_edges(s, &pe.label) {
                            examined += 1;
                            let t = graph.target(e);
                            let fits = match bound_t {
                                Some(bt) => bt == t,
                                None => binds(graph, query, v, t),
                            };
                            if fits && edge_ok(e) {
                                let mut r = row.clone();
                                r[v] = Some(t);
                                push(r, &mut next);
                            }
                        }
                    }
                    (None, Some(t)) => {
                        for &e in graph.in_edges(t, &pe.label) {
                            examined += 1;
                            let s = graph.source(e);
                            if binds(graph, query, u, s) && edge_ok(e) {
                                let mut r = row.clone();
                                r[u] = Some(s);
                                push(r, &mut next);
                            }
                        }
                    }
                    (None, None) => unreachable!("rows of one step bind the same aliases"),
                }
            }
        }
        emitted += next.len() as u64;
        rows = next;
        if rows.is_empty() {
            break;
        }
    }

    let matches = MatchSet {
        aliases: query.aliases(),
        rows: rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|v| graph.vertex(v.expect("every node is touched")).id.clone())
                    .collect()
            })
            .collect(),
    };
    (matches, CostReport::new(examined, emitted))
}
