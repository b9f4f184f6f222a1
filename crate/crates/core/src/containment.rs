//! Deciding whether views can answer a query: pattern filtering, the
//! verification walk over a view's traversal order, and multi-view covers.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use crate::genes::split_in_order;
use crate::matcher::{for_each_isomorphism, Mapping};
use crate::pattern::PatternQuery;
use crate::predicate::predicate_contains;
use crate::view::{ExtendedGraphView, ViewPattern};

/// Upper bound on embeddings tried per (query, view) pair.
pub const MAPPING_LIMIT: usize = 4096;

/// Upper bound on gene unions tried per (query, view) pair.
const UNION_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainmentWitness {
    pub mapping: Mapping,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VvaTrace {
    pub accepted: bool,
    /// View edge whose unmapped traversal reaches a mapped vertex too early.
    pub offending_edge: Option<usize>,
    /// View edges visited.
    pub steps: usize,
}

/// Query edges of one gene and the view that answers them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneAssignment {
    pub edges: Vec<usize>,
    pub view: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverResult {
    pub views: Vec<String>,
    /// One entry per query gene, in gene order.
    pub assignment: Vec<GeneAssignment>,
    /// Views of `views` that cover each gene.
    pub gene_index: Vec<BTreeSet<String>>,
    /// True when one view answers the whole query.
    pub single_view: bool,
}

fn predicates_hold(query: &PatternQuery, view: &PatternQuery, m: &Mapping) -> bool {
    let nodes = m
        .nodes
        .iter()
        .enumerate()
        .all(|(i, &h)| predicate_contains(&view.node(h).pred, &query.node(i).pred).unwrap_or(false));
    nodes
        && m.edges
            .iter()
            .enumerate()
            .all(|(i, &h)| predicate_contains(&view.edge(h).pred, &query.edge(i).pred).unwrap_or(false))
}

/// Visits embeddings of `query` into `view` that respect labels and whose
/// view-side predicates admit everything the query-side predicates admit.
pub fn for_each_containment<F>(query: &PatternQuery, view: &PatternQuery, mut visit: F)
where
    F: FnMut(&Mapping) -> ControlFlow<()>,
{
    let mut tried = 0;
    for_each_isomorphism(query, view, |m| {
        tried += 1;
        if predicates_hold(query, view, m) {
            visit(m)?;
        }
        if tried >= MAPPING_LIMIT {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
}

/// First embedding of `query` into the view pattern that passes the filter.
pub fn pattern_contains(query: &PatternQuery, vp: &ViewPattern) -> Option<Mapping> {
    let mut found = None;
    for_each_containment(query, vp.pattern(), |m| {
        found = Some(m.clone());
        ControlFlow::Break(())
    });
    found
}

/// Walks the view's traversal order once. Mapped edges mark their endpoints
/// as discovered. The walk succeeds as soon as every mapped node and edge is
/// discovered, and fails when an unmapped edge touches a mapped node before
/// that node is discovered.
pub fn vva_trace(vp: &ViewPattern, mapping: &Mapping) -> VvaTrace {
    let p = vp.pattern();
    let mut mapped_node = vec![false; p.node_count()];
    let mut mapped_edge = vec![false; p.edge_count()];
    for &n in &mapping.nodes {
        mapped_node[n] = true;
    }
    for &e in &mapping.edges {
        mapped_edge[e] = true;
    }
    let (need_nodes, need_edges) = (mapping.nodes.len(), mapping.edges.len());
    let mut seen_node = vec![false; p.node_count()];
    let (mut d_nodes, mut d_edges) = (0, 0);
    let mut steps = 0;
    for &e in vp.order() {
        if d_nodes == need_nodes && d_edges == need_edges {
            return VvaTrace {
                accepted: true,
                offending_edge: None,
                steps,
            };
        }
        steps += 1;
        let pe = p.edge(e);
        if mapped_edge[e] {
            d_edges += 1;
            for n in [pe.from, pe.to] {
                if !seen_node[n] {
                    seen_node[n] = true;
                    d_nodes += 1;
                }
            }
        } else if [pe.from, pe.to].iter().any(|&n| mapped_node[n] && !seen_node[n]) {
            return VvaTrace {
                accepted: false,
                offending_edge: Some(e),
                steps,
            };
        }
    }
    VvaTrace {
        accepted: true,
        offending_edge: None,
        steps,
    }
}

pub fn vva(_query: &PatternQuery, view: &ExtendedGraphView, mapping: &Mapping) -> bool {
    vva_trace(&view.vp, mapping).accepted
}

/// First filtered embedding that the verification walk accepts.
pub fn pattern_answerable(query: &PatternQuery, vp: &ViewPattern) -> Option<Mapping> {
    let mut found = None;
    for_each_containment(query, vp.pattern(), |m| {
        if vva_trace(vp, m).accepted {
            found = Some(m.clone());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found
}

/// A witness that `view`'s content holds every match of `query`. `None` does
/// not prove the opposite.
pub fn query_answerable(query: &PatternQuery, view: &ExtendedGraphView) -> Option<ContainmentWitness> {
    pattern_answerable(query, &view.vp).map(|mapping| ContainmentWitness {
        mapping,
        verified: true,
    })
}

/// Connected unions of genes, smallest first, then lexicographic.
fn connected_unions(query: &PatternQuery, genes: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = genes.len();
    let touched: Vec<BTreeSet<usize>> = genes.iter().map(|g| query.touched_nodes(g)).collect();
    let mut out = Vec::new();
    let mut level: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut seen: BTreeSet<Vec<usize>> = level.iter().cloned().collect();
    while !level.is_empty() && out.len() < UNION_LIMIT {
        level.sort();
        out.extend(level.iter().cloned());
        let mut next = Vec::new();
        for set in &level {
            let nodes: BTreeSet<usize> = set.iter().flat_map(|&g| touched[g].iter().copied()).collect();
            for (g, t) in touched.iter().enumerate() {
                if set.contains(&g) || t.is_disjoint(&nodes) {
                    continue;
                }
                let mut grown = set.clone();
                grown.push(g);
                grown.sort_unstable();
                if seen.insert(grown.clone()) {
                    next.push(grown);
                }
            }
        }
        level = next;
    }
    out.truncate(UNION_LIMIT);
    out
}

/// For each gene of `query`, the first connected union of genes containing
/// it that `vp` answers as a whole, with the embedding of that union. The
/// union's sub-pattern lists its genes' edges in union order, and its nodes
/// ascend by query node index.
pub fn gene_cover(query: &PatternQuery, genes: &[Vec<usize>], vp: &ViewPattern) -> Vec<Option<(Vec<usize>, Mapping)>> {
    let mut cover: Vec<Option<(Vec<usize>, Mapping)>> = vec![None; genes.len()];
    for set in connected_unions(query, genes) {
        if cover.iter().all(Option::is_some) {
            break;
        }
        if set.iter().all(|&g| cover[g].is_some()) {
            continue;
        }
        let edges = union_edges(genes, &set);
        if edges.len() > vp.pattern().edge_count() {
            continue;
        }
        let sub = query.sub_pattern("union", &edges).expect("connected union");
        if let Some(m) = pattern_answerable(&sub, vp) {
            for &g in &set {
                cover[g].get_or_insert_with(|| (set.clone(), m.clone()));
            }
        }
    }
    cover
}

pub(crate) fn union_edges(genes: &[Vec<usize>], set: &[usize]) -> Vec<usize> {
    set.iter().flat_map(|&g| genes[g].iter().copied()).collect()
}

/// Genes of `query` that `vp` covers. A gene counts as covered when some
/// connected union of genes containing it is answerable by the view as a
/// whole, which keeps every partial result a superset of what the final join
/// needs.
pub fn covered_genes(query: &PatternQuery, genes: &[Vec<usize>], vp: &ViewPattern) -> BTreeSet<usize> {
    gene_cover(query, genes, vp)
        .iter()
        .enumerate()
        .filter_map(|(g, c)| c.as_ref().map(|_| g))
        .collect()
}

/// Genes of a query pattern: blocks split at cut vertices, edges ascending.
pub fn query_genes(query: &PatternQuery) -> Vec<Vec<usize>> {
    let identity: Vec<usize> = (0..query.edge_count()).collect();
    split_in_order(query, &identity)
}

/// Finds an irredundant set of views that together answer `query`.
///
/// A single answering view wins outright. Otherwise query genes are matched
/// against each candidate in turn until all are covered, and views whose
/// genes are all covered by others are dropped. Views with an empty gene set
/// are ignored.
pub fn two_level_search(query: &PatternQuery, candidates: &[ExtendedGraphView]) -> Option<CoverResult> {
    let refs: Vec<&ExtendedGraphView> = candidates.iter().collect();
    two_level_search_in(query, &refs)
}

/// Candidates smallest first, ties by id: the scan order cost-aware callers
/// pass to [`two_level_search_in`].
pub fn by_size(candidates: &[ExtendedGraphView]) -> Vec<&ExtendedGraphView> {
    let mut refs: Vec<&ExtendedGraphView> = candidates.iter().collect();
    refs.sort_by(|a, b| a.size_bytes.cmp(&b.size_bytes).then_with(|| a.id.cmp(&b.id)));
    refs
}

/// [`two_level_search`] scanning candidates in the given order.
pub fn two_level_search_in(query: &PatternQuery, candidates: &[&ExtendedGraphView]) -> Option<CoverResult> {
    let live: Vec<&ExtendedGraphView> = candidates.iter().copied().filter(|v| !v.genes.is_empty()).collect();
    let all: Vec<usize> = (0..query.edge_count()).collect();
    for v in &live {
        if query_answerable(query, v).is_some() {
            return Some(CoverResult {
                views: vec![v.id.clone()],
                assignment: vec![GeneAssignment {
                    edges: all,
                    view: v.id.clone(),
                }],
                gene_index: vec![BTreeSet::from([v.id.clone()])],
                single_view: true,
            });
        }
    }

    let genes = query_genes(query);
    let mut chosen: Vec<usize> = Vec::new();
    let mut index: Vec<Vec<usize>> = vec![Vec::new(); genes.len()];
    let mut union: BTreeSet<usize> = BTreeSet::new();
    for (vi, v) in live.iter().enumerate() {
        let covered = covered_genes(query, &genes, &v.vp);
        if covered.is_empty() {
            continue;
        }
        chosen.push(vi);
        for g in covered {
            index[g].push(vi);
            union.insert(g);
        }
        if union.len() == genes.len() {
            break;
        }
    }
    if union.len() < genes.len() {
        return None;
    }

    let mut k = 0;
    while k < chosen.len() {
        let vj = chosen[k];
        let needed = index.iter().any(|m| m.iter().all(|&x| x == vj));
        if needed {
            k += 1;
        } else {
            chosen.remove(k);
            for m in &mut index {
                m.retain(|&x| x != vj);
            }
        }
    }

    let id = |vi: usize| live[vi].id.clone();
    Some(CoverResult {
        views: chosen.iter().map(|&vi| id(vi)).collect(),
        assignment: genes
            .iter()
            .zip(&index)
            .map(|(edges, m)| GeneAssignment {
                edges: edges.clone(),
                view: id(*m.iter().min().expect("covered gene")),
            })
            .collect(),
        gene_index: index.iter().map(|m| m.iter().map(|&vi| id(vi)).collect()).collect(),
        single_view: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fixtures;
    use crate::pattern::PatternBuilder;
    use crate::predicate::{Atom, Comparator};

    #[test]
    fn late_branch_fails_verification() {
        let q = fixtures::chain_query();
        let (good, bad) = fixtures::branching_views();
        let m = pattern_contains(&q, &good).unwrap();
        assert_eq!(m.edges, [0, 1, 2]);
        let t = vva_trace(&good, &m);
        assert!(t.accepted);
        assert!(t.steps <= good.pattern().edge_count());

        let t = vva_trace(&bad, &m);
        assert!(!t.accepted);
        let e = bad.pattern().edge(t.offending_edge.unwrap());
        assert_eq!((bad.pattern().alias(e.from), bad.pattern().alias(e.to)), ("E", "D"));
    }

    #[test]
    fn identity_verifies() {
        let (good, _) = fixtures::branching_views();
        let view = ExtendedGraphView::pattern_only("v", good.clone());
        let m = Mapping::identity(good.pattern());
        assert!(vva(good.pattern(), &view, &m));
        assert_eq!(pattern_contains(good.pattern(), &good), Some(m));
    }

    #[test]
    fn sub_queries_of_friends_view() {
        let (views, queries) = fixtures::friends_views_and_queries();
        let q2 = &views[1];
        for q in &queries[2..4] {
            assert!(pattern_contains(q, &q2.vp).is_some(), "{}", q.name);
            assert!(query_answerable(q, q2).is_some(), "{}", q.name);
        }
        // the merged query needs both views
        assert!(pattern_contains(&queries[4], &views[0].vp).is_none());
        assert!(pattern_contains(&queries[4], &q2.vp).is_none());
    }

    #[test]
    fn predicate_direction() {
        let view = PatternBuilder::new("v")
            .node_where("a", "person", vec![Atom::new("age", Comparator::Lt, 50i64)])
            .node("b", "person")
            .edge("a", "b", "knows")
            .build()
            .unwrap();
        let vp = ViewPattern::new(view, vec![0]).unwrap();
        let narrow = PatternBuilder::new("q")
            .node_where("a", "person", vec![Atom::new("age", Comparator::Lt, 30i64)])
            .node("b", "person")
            .edge("a", "b", "knows")
            .build()
            .unwrap();
        let plain = PatternBuilder::new("q")
            .node("a", "person")
            .node("b", "person")
            .edge("a", "b", "knows")
            .build()
            .unwrap();
        assert!(pattern_contains(&narrow, &vp).is_some());
        assert!(pattern_contains(&plain, &vp).is_none());
    }

    #[test]
    fn disjoint_labels() {
        let (views, _) = fixtures::friends_views_and_queries();
        let q = PatternBuilder::new("q")
            .node("a", "robot")
            .node("b", "robot")
            .edge("a", "b", "knows")
            .build()
            .unwrap();
        assert!(views.iter().all(|v| query_answerable(&q, v).is_none()));
        assert!(two_level_search(&q, &views).is_none());
    }

    #[test]
    fn two_level_cover() {
        let (q, views) = fixtures::gene_views();
        let cover = two_level_search(&q, &views).unwrap();
        assert_eq!(cover.views, ["V2", "V3"]);
        assert!(!cover.single_view);
        let m: Vec<Vec<&str>> = cover
            .gene_index
            .iter()
            .map(|s| s.iter().map(String::as_str).collect())
            .collect();
        assert_eq!(m, [vec!["V2"], vec!["V2"], vec!["V3"], vec!["V3"]]);
        let assigned: Vec<&str> = cover.assignment.iter().map(|g| g.view.as_str()).collect();
        assert_eq!(assigned, ["V2", "V2", "V3", "V3"]);
    }

    #[test]
    fn single_view_short_circuit() {
        let (q, mut views) = fixtures::gene_views();
        views.push(ExtendedGraphView::pattern_only(
            "W",
            ViewPattern::new(q.clone(), (0..q.edge_count()).collect()).unwrap(),
        ));
        let cover = two_level_search(&q, &views).unwrap();
        assert!(cover.single_view);
        assert_eq!(cover.views, ["W"]);
    }
}
