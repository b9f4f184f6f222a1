//! Small hand-built graphs, patterns and views with known answers.

use crate::graph::{Edge, PropertyGraph, Vertex};
use crate::pattern::{PatternBuilder, PatternQuery};
use crate::predicate::{Atom, Comparator};
use crate::view::{materialize_view, ExtendedGraphView, ViewPattern};

/// Three persons, a company and a university.
pub fn friends_graph() -> PropertyGraph {
    PropertyGraph::new(
        vec![
            Vertex::new("p1", "person").with("gender", "male"),
            Vertex::new("p2", "person").with("gender", "female"),
            Vertex::new("p3", "person").with("gender", "female").with("age", 28),
            Vertex::new("c1", "company"),
            Vertex::new("u1", "university"),
        ],
        vec![
            Edge::new("k1", "p1", "p2", "knows"),
            Edge::new("k2", "p1", "p3", "knows"),
            Edge::new("w1", "p2", "c1", "workAt"),
            Edge::new("w2", "p1", "c1", "workAt"),
            Edge::new("s1", "p2", "u1", "studyAt"),
            Edge::new("s2", "p3", "u1", "studyAt"),
        ],
    )
    .expect("fixture graph is valid")
}

fn male() -> Vec<Atom> {
    vec![Atom::new("gender", Comparator::Eq, "male")]
}

fn female() -> Vec<Atom> {
    vec![Atom::new("gender", Comparator::Eq, "female")]
}

/// Male persons' female friends with their company and university.
pub fn friends_query() -> PatternQuery {
    PatternBuilder::new("friends")
        .node_where("p", "person", male())
        .node_where("f", "person", female())
        .node("c", "company")
        .node("u", "university")
        .edge("p", "f", "knows")
        .edge("f", "c", "workAt")
        .edge("f", "u", "studyAt")
        .build()
        .expect("fixture query is valid")
}

/// Views over [`friends_graph`] for `colleagues` and `friends`, and the queries
/// `colleagues`, `friends`, `friend_school`, `friend_job`, `friend_colleagues`.
/// The last three need the `friends` view, the last one both views.
pub fn friends_views_and_queries() -> (Vec<ExtendedGraphView>, Vec<PatternQuery>) {
    let colleagues = PatternBuilder::new("colleagues")
        .node("x", "person")
        .node("y", "person")
        .node("c", "company")
        .edge("x", "c", "workAt")
        .edge("y", "c", "workAt")
        .build()
        .expect("fixture");
    let friends = friends_query();
    let school = PatternBuilder::new("friend_school")
        .node_where("p", "person", male())
        .node_where("f", "person", female())
        .node("u", "university")
        .edge("p", "f", "knows")
        .edge("f", "u", "studyAt")
        .build()
        .expect("fixture");
    let job = PatternBuilder::new("friend_job")
        .node_where("p", "person", male())
        .node_where("f", "person", female())
        .node("c", "company")
        .edge("p", "f", "knows")
        .edge("f", "c", "workAt")
        .build()
        .expect("fixture");
    let merged = PatternBuilder::new("friend_colleagues")
        .node_where("p", "person", male())
        .node_where("f", "person", female())
        .node("c", "company")
        .node("y", "person")
        .edge("p", "f", "knows")
        .edge("f", "c", "workAt")
        .edge("y", "c", "workAt")
        .build()
        .expect("fixture");
    let g = friends_graph();
    let views = vec![
        materialize_view(&g, &ViewPattern::new(colleagues.clone(), vec![0, 1]).expect("fixture")),
        materialize_view(&g, &ViewPattern::new(friends.clone(), vec![0, 1, 2]).expect("fixture")),
    ];
    (views, vec![colleagues, friends, school, job, merged])
}

/// The chain `A -> B -> C -> D`.
pub fn chain_query() -> PatternQuery {
    PatternBuilder::new("chain")
        .node("A", "a")
        .node("B", "b")
        .node("C", "c")
        .node("D", "d")
        .edge("A", "B", "r")
        .edge("B", "C", "r")
        .edge("C", "D", "r")
        .build()
        .expect("fixture")
}

/// The chain plus a detour `C -> E -> D`, traversed in two orders. In the
/// second order the detour reaches `D` before the chain edge `C -> D` does.
pub fn branching_views() -> (ViewPattern, ViewPattern) {
    let p = PatternBuilder::new("branch")
        .node("A", "a")
        .node("B", "b")
        .node("C", "c")
        .node("D", "d")
        .node("E", "e")
        .edge("A", "B", "r")
        .edge("B", "C", "r")
        .edge("C", "D", "r")
        .edge("C", "E", "r")
        .edge("E", "D", "r")
        .build()
        .expect("fixture");
    (
        ViewPattern::new(p.clone(), vec![0, 1, 2, 3, 4]).expect("fixture"),
        ViewPattern::new(p, vec![0, 1, 3, 4, 2]).expect("fixture"),
    )
}

/// `A -> B -> C`, a triangle on `C, D, E`, and `E -> F`: four genes around
/// the cut vertices `B`, `C`, `E`.
pub fn gene_query() -> PatternQuery {
    PatternBuilder::new("genes")
        .node("A", "a")
        .node("B", "b")
        .node("C", "c")
        .node("D", "d")
        .node("E", "e")
        .node("F", "f")
        .edge("A", "B", "r")
        .edge("B", "C", "r")
        .edge("C", "D", "r")
        .edge("D", "E", "r")
        .edge("C", "E", "r")
        .edge("E", "F", "r")
        .build()
        .expect("fixture")
}

/// [`gene_query`] with three views: `V1 = A -> B`, `V2 = A -> B -> C` and
/// `V3` = the triangle followed by `E -> F`.
pub fn gene_views() -> (PatternQuery, Vec<ExtendedGraphView>) {
    let q = gene_query();
    let v1 = q.sub_pattern("V1", &[0]).expect("fixture");
    let v2 = q.sub_pattern("V2", &[0, 1]).expect("fixture");
    let v3 = q.sub_pattern("V3", &[2, 4, 3, 5]).expect("fixture");
    let views = [(v1, vec![0]), (v2, vec![0, 1]), (v3, vec![0, 1, 2, 3])]
        .into_iter()
        .map(|(p, order)| {
            let id = p.name.clone();
            ExtendedGraphView::pattern_only(id, ViewPattern::new(p, order).expect("fixture"))
        })
        .collect();
    (q, views)
}

/// A graph on which every edge of [`gene_query`] has matches, with some
/// partial structures that do not extend.
pub fn gene_graph() -> PropertyGraph {
    let mut vertices = Vec::new();
    for (label, n) in [("a", 3), ("b", 3), ("c", 3), ("d", 2), ("e", 3), ("f", 2)] {
        for i in 0..n {
            vertices.push(Vertex::new(format!("{label}{i}"), label));
        }
    }
    let pairs = [
        ("a0", "b0"),
        ("a1", "b0"),
        ("a2", "b1"),
        ("b0", "c0"),
        ("b1", "c1"),
        ("b2", "c2"),
        ("c0", "d0"),
        ("c1", "d1"),
        ("c2", "d1"),
        ("d0", "e0"),
        ("d1", "e1"),
        ("d1", "e2"),
        ("c0", "e0"),
        ("c1", "e1"),
        ("c2", "e2"),
        ("c2", "e0"),
        ("e0", "f0"),
        ("e1", "f1"),
        ("e0", "f1"),
    ];
    let edges = pairs
        .iter()
        .enumerate()
        .map(|(i, (s, d))| Edge::new(format!("r{i:02}"), *s, *d, "r"))
        .collect();
    PropertyGraph::new(vertices, edges).expect("fixture")
}

/// Rebuilds the content of each view from `graph`, keeping ids.
pub fn materialized(graph: &PropertyGraph, views: &[ExtendedGraphView]) -> Vec<ExtendedGraphView> {
    views
        .iter()
        .map(|v| {
            let mut m = crate::view::materialize_view(graph, &v.vp);
            m.id = v.id.clone();
            m
        })
        .collect()
}
