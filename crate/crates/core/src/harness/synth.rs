//! Seeded random graphs and workloads over a small shared vocabulary, sized
//! for exhaustive cross-checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Edge, PropertyGraph, Vertex};
use crate::pattern::{PatternEdge, PatternNode, PatternQuery};
use crate::predicate::{Atom, Comparator, Predicate};

const VERTEX_LABELS: [&str; 3] = ["A", "B", "C"];
const EDGE_LABELS: [&str; 2] = ["r", "s"];

pub fn random_graph(seed: u64, vertices: usize, edges: usize) -> PropertyGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = vertices.max(1);
    let vs = (0..n)
        .map(|i| {
            let mut v = Vertex::new(format!("v{i}"), *VERTEX_LABELS.choose(&mut rng).expect("labels"));
            v = v.with("k", rng.gen_range(0..5i64));
            if rng.gen_bool(0.5) {
                v = v.with("f", rng.gen_bool(0.5));
            }
            v
        })
        .collect();
    let es = (0..edges)
        .map(|j| {
            let s = rng.gen_range(0..n);
            let d = if rng.gen_bool(0.05) { s } else { rng.gen_range(0..n) };
            let mut e = Edge::new(
                format!("e{j}"),
                format!("v{s}"),
                format!("v{d}"),
                *EDGE_LABELS.choose(&mut rng).expect("labels"),
            );
            if rng.gen_bool(0.5) {
                e = e.with("w", rng.gen_range(0..3i64));
            }
            e
        })
        .collect();
    PropertyGraph::new(vs, es).expect("generated graph is valid")
}

fn random_atom(rng: &mut ChaCha8Rng, key: &str, max: i64) -> Atom {
    let op = *[
        Comparator::Lt,
        Comparator::Le,
        Comparator::Eq,
        Comparator::Ge,
        Comparator::Ne,
    ]
    .choose(rng)
    .expect("ops");
    Atom::new(key, op, rng.gen_range(0..=max))
}

fn random_pred(rng: &mut ChaCha8Rng, key: &str, max: i64, p: f64) -> Predicate {
    if rng.gen_bool(p) {
        Predicate::new(vec![random_atom(rng, key, max)]).expect("single atom")
    } else {
        Predicate::universal()
    }
}

fn query_with(rng: &mut ChaCha8Rng, name: String, max_edges: usize) -> PatternQuery {
    let m = rng.gen_range(1..=max_edges.max(1));
    let mut nodes = vec![PatternNode {
        alias: "n0".into(),
        label: VERTEX_LABELS.choose(rng).expect("labels").to_string(),
        pred: random_pred(rng, "k", 4, 0.2),
    }];
    let mut edges = Vec::new();
    for _ in 0..m {
        let old = rng.gen_range(0..nodes.len());
        let other = if nodes.len() >= 2 && rng.gen_bool(0.25) {
            rng.gen_range(0..nodes.len())
        } else {
            nodes.push(PatternNode {
                alias: format!("n{}", nodes.len()),
                label: VERTEX_LABELS.choose(rng).expect("labels").to_string(),
                pred: random_pred(rng, "k", 4, 0.2),
            });
            nodes.len() - 1
        };
        let (from, to) = if rng.gen_bool(0.5) { (old, other) } else { (other, old) };
        edges.push(PatternEdge {
            from,
            to,
            label: EDGE_LABELS.choose(rng).expect("labels").to_string(),
            pred: random_pred(rng, "w", 2, 0.1),
        });
    }
    PatternQuery::new(name, nodes, edges, 1.0).expect("grown patterns are connected")
}

pub fn random_query(seed: u64, max_edges: usize) -> PatternQuery {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    query_with(&mut rng, "q".into(), max_edges)
}

/// A connected sub-pattern: a random traversal prefix of `q`.
fn random_sub(rng: &mut ChaCha8Rng, q: &PatternQuery, name: String) -> PatternQuery {
    let m = q.edge_count();
    let keep = rng.gen_range(1..=m);
    let mut chosen = vec![rng.gen_range(0..m)];
    while chosen.len() < keep {
        let nodes = q.touched_nodes(&chosen);
        let frontier: Vec<usize> = (0..m)
            .filter(|e| !chosen.contains(e))
            .filter(|&e| nodes.contains(&q.edge(e).from) || nodes.contains(&q.edge(e).to))
            .collect();
        chosen.push(*frontier.choose(rng).expect("connected pattern"));
    }
    chosen.sort_unstable();
    q.sub_pattern(name, &chosen).expect("connected prefix")
}

/// `q` plus one edge to a fresh or existing node.
fn random_super(rng: &mut ChaCha8Rng, q: &PatternQuery, name: String) -> PatternQuery {
    let mut nodes = q.nodes().to_vec();
    let mut edges = q.edges().to_vec();
    let old = rng.gen_range(0..nodes.len());
    let other = if rng.gen_bool(0.3) {
        rng.gen_range(0..nodes.len())
    } else {
        nodes.push(PatternNode {
            alias: format!("x{}", nodes.len()),
            label: VERTEX_LABELS.choose(rng).expect("labels").to_string(),
            pred: Predicate::universal(),
        });
        nodes.len() - 1
    };
    let (from, to) = if rng.gen_bool(0.5) { (old, other) } else { (other, old) };
    edges.push(PatternEdge {
        from,
        to,
        label: EDGE_LABELS.choose(rng).expect("labels").to_string(),
        pred: Predicate::universal(),
    });
    PatternQuery::new(name, nodes, edges, 1.0).expect("extension stays connected")
}

/// A workload in which later queries are often sub-patterns or extensions of
/// earlier ones, so containment between queries is common.
pub fn random_workload(seed: u64, queries: usize, max_edges: usize) -> Vec<PatternQuery> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0005_eed0_fa11);
    let mut out: Vec<PatternQuery> = Vec::with_capacity(queries);
    for i in 0..queries {
        let name = format!("q{i}");
        let q = if out.is_empty() || rng.gen_bool(0.35) {
            query_with(&mut rng, name, max_edges)
        } else {
            let base = out[rng.gen_range(0..out.len())].clone();
            if rng.gen_bool(0.5) || base.edge_count() > max_edges {
                random_sub(&mut rng, &base, name)
            } else {
                random_super(&mut rng, &base, name)
            }
        };
        out.push(q);
    }
    out
}

/// A random traversal order of `q` in which every prefix is connected.
pub fn random_order(seed: u64, q: &PatternQuery) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = q.edge_count();
    let mut order = vec![rng.gen_range(0..m)];
    while order.len() < m {
        let nodes = q.touched_nodes(&order);
        let frontier: Vec<usize> = (0..m)
            .filter(|e| !order.contains(e))
            .filter(|&e| nodes.contains(&q.edge(e).from) || nodes.contains(&q.edge(e).to))
            .collect();
        order.push(*frontier.choose(&mut rng).expect("connected pattern"));
    }
    order
}

#[cfg(test)]
pub(crate) fn arb_instance(
    max_vertices: usize,
    max_queries: usize,
) -> impl proptest::strategy::Strategy<Value = (PropertyGraph, Vec<PatternQuery>)> {
    use proptest::prelude::*;
    (any::<u64>(), 2..=max_vertices, 1..=max_queries)
        .prop_map(|(seed, n, k)| (random_graph(seed, n, 2 * n), random_workload(seed, k, 3)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(random_graph(5, 10, 20), random_graph(5, 10, 20));
        assert_eq!(random_workload(5, 6, 3), random_workload(5, 6, 3));
        assert_ne!(random_graph(5, 10, 20), random_graph(6, 10, 20));
    }
}
