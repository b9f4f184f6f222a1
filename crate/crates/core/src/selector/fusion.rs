//! Merging a donor view into the other candidates.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::containment::{gene_cover, pattern_answerable, two_level_search, union_edges};
use crate::genes::fission;
use crate::graph::PropertyGraph;
use crate::matcher::Mapping;
use crate::pattern::{PatternEdge, PatternNode, PatternQuery};
use crate::view::{materialize_view, ExtendedGraphView, ViewPattern};

/// Gene union and its mapping into a view, when the view covers the gene.
type GeneCover = Option<(Vec<usize>, Mapping)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FusionOutcome {
    /// Nothing could be merged.
    Unchanged,
    /// The whole donor lives inside `target` as a traversal prefix.
    Contained { target: String },
    /// Donor genes merged into or joined onto other views; `kept` genes stay
    /// with the donor.
    Genes {
        merged: Vec<(usize, String)>,
        joined: Vec<(usize, String)>,
        kept: Vec<usize>,
    },
    /// The change was undone, because leftover genes were disconnected or
    /// coverage of the guard queries would drop.
    RolledBack { reason: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionLog {
    pub donor: String,
    pub outcome: FusionOutcome,
}

fn covered(guard: &[PatternQuery], views: &[ExtendedGraphView]) -> BTreeSet<usize> {
    (0..guard.len())
        .filter(|&i| two_level_search(&guard[i], views).is_some())
        .collect()
}

/// `edges` reordered so every prefix touches `start` nodes or earlier edges.
fn connected_order(p: &PatternQuery, edges: &[usize], start: &BTreeSet<usize>) -> Option<Vec<usize>> {
    let mut reached = start.clone();
    let mut left: Vec<usize> = edges.to_vec();
    let mut out = Vec::with_capacity(edges.len());
    while !left.is_empty() {
        let k = if reached.is_empty() {
            0
        } else {
            left.iter().position(|&e| {
                let pe = p.edge(e);
                reached.contains(&pe.from) || reached.contains(&pe.to)
            })?
        };
        let e = left.remove(k);
        reached.insert(p.edge(e).from);
        reached.insert(p.edge(e).to);
        out.push(e);
    }
    Some(out)
}

/// Appends the donor gene's edges to `host`, reusing host nodes that the
/// donor's nodes already map to and adding the rest under fresh aliases.
fn join_gene(
    host: &ViewPattern,
    donor: &PatternQuery,
    gene: &[usize],
    image: &mut BTreeMap<usize, usize>,
) -> ViewPattern {
    let hp = host.pattern();
    let mut nodes: Vec<PatternNode> = hp.nodes().to_vec();
    let mut edges: Vec<PatternEdge> = hp.edges().to_vec();
    let mut order = host.order().to_vec();
    let start: BTreeSet<usize> = image.keys().copied().collect();
    let seq = connected_order(donor, gene, &start).expect("gene shares a node with the host");
    for e in seq {
        let de = donor.edge(e);
        for n in [de.from, de.to] {
            if image.contains_key(&n) {
                continue;
            }
            let dn = donor.node(n);
            let mut alias = dn.alias.clone();
            let mut k = 1;
            while nodes.iter().any(|x| x.alias == alias) {
                alias = format!("{}_{k}", dn.alias);
                k += 1;
            }
            nodes.push(PatternNode {
                alias,
                label: dn.label.clone(),
                pred: dn.pred.clone(),
            });
            image.insert(n, nodes.len() - 1);
        }
        edges.push(PatternEdge {
            from: image[&de.from],
            to: image[&de.to],
            label: de.label.clone(),
            pred: de.pred.clone(),
        });
        order.push(edges.len() - 1);
    }
    let p = PatternQuery::new(hp.name.clone(), nodes, edges, hp.weight).expect("joined pattern is connected");
    ViewPattern::new(p, order).expect("appended edges extend from reached nodes")
}

fn rematerialize(graph: &PropertyGraph, old: &ExtendedGraphView, vp: ViewPattern) -> ExtendedGraphView {
    let mut v = materialize_view(graph, &vp);
    v.id = old.id.clone();
    if old.genes.len() > 1 {
        v.genes = fission(&v);
    }
    v
}

/// Moves the donor's genes into other candidates.
///
/// If another view already holds the whole donor as a traversal prefix the
/// donor is simply emptied. Otherwise each donor gene is merged into the
/// first view (by id) that covers it, and leftover genes that touch a node
/// the donor shares with a receiving view are appended to that view. Genes
/// that fit nowhere stay with the donor. The whole step is undone if any
/// guard query (the donor's own pattern when `guard` is empty) loses its
/// cover.
pub fn fusion(
    candidates: &mut Vec<ExtendedGraphView>,
    donor: &str,
    graph: &PropertyGraph,
    guard: &[PatternQuery],
) -> FusionLog {
    let log = |outcome| FusionLog {
        donor: donor.to_string(),
        outcome,
    };
    let Some(di) = candidates.iter().position(|v| v.id == donor) else {
        return log(FusionOutcome::Unchanged);
    };
    if candidates[di].genes.is_empty() {
        return log(FusionOutcome::Unchanged);
    }
    let own = [candidates[di].vp.pattern().clone()];
    let guard = if guard.is_empty() { &own[..] } else { guard };
    let before = covered(guard, candidates);
    let snapshot = candidates.clone();
    let d = candidates[di].clone();
    let dp = d.vp.pattern();

    let mut targets: Vec<usize> = (0..candidates.len())
        .filter(|&j| j != di && !candidates[j].genes.is_empty())
        .collect();
    targets.sort_by(|&a, &b| candidates[a].id.cmp(&candidates[b].id));

    let mut outcome = None;
    for &j in &targets {
        let t = &candidates[j].vp;
        if let Some(m) = pattern_answerable(dp, t) {
            let mapped: Vec<usize> = d.vp.order().iter().map(|&e| m.edges[e]).collect();
            if t.order().starts_with(&mapped) {
                candidates[di].genes.genes.clear();
                outcome = Some(FusionOutcome::Contained {
                    target: candidates[j].id.clone(),
                });
                break;
            }
        }
    }

    if outcome.is_none() {
        let genes: Vec<Vec<usize>> = d.genes.genes.iter().map(|g| g.edges.clone()).collect();
        let covers: Vec<Vec<GeneCover>> = targets
            .iter()
            .map(|&j| gene_cover(dp, &genes, &candidates[j].vp))
            .collect();
        let mut merged = Vec::new();
        let mut images: HashMap<usize, BTreeMap<usize, usize>> = HashMap::new();
        let mut leftover = Vec::new();
        let hits: Vec<_> = (0..genes.len())
            .map(|g| {
                targets
                    .iter()
                    .zip(&covers)
                    .find_map(|(&j, c)| c[g].as_ref().map(|c| (j, c)))
            })
            .collect();
        for (g, hit) in hits.into_iter().enumerate() {
            match hit {
                Some((j, (set, m))) => {
                    let sub_nodes: Vec<usize> = dp.touched_nodes(&union_edges(&genes, set)).into_iter().collect();
                    let image = images.entry(j).or_default();
                    for (k, &n) in sub_nodes.iter().enumerate() {
                        image.entry(n).or_insert(m.nodes[k]);
                    }
                    merged.push((g, j));
                }
                None => leftover.push(g),
            }
        }
        if merged.is_empty() {
            return log(FusionOutcome::Unchanged);
        }

        let mut joined = Vec::new();
        let mut changed: BTreeMap<usize, ViewPattern> = BTreeMap::new();
        let mut progress = true;
        while progress {
            progress = false;
            for k in 0..leftover.len() {
                let g = leftover[k];
                let touched = dp.touched_nodes(&genes[g]);
                let host = targets.iter().copied().find(|j| {
                    images
                        .get(j)
                        .is_some_and(|img| touched.iter().any(|n| img.contains_key(n)))
                });
                if let Some(j) = host {
                    let base = changed.get(&j).cloned().unwrap_or_else(|| candidates[j].vp.clone());
                    let image = images.get_mut(&j).expect("host has images");
                    changed.insert(j, join_gene(&base, dp, &genes[g], image));
                    joined.push((g, j));
                    leftover.remove(k);
                    progress = true;
                    break;
                }
            }
        }
        for (j, vp) in changed {
            candidates[j] = rematerialize(graph, &snapshot[j], vp);
        }

        if leftover.is_empty() {
            candidates[di].genes.genes.clear();
        } else {
            let edges: Vec<usize> = leftover.iter().flat_map(|&g| genes[g].iter().copied()).collect();
            if !dp.edges_connected(&edges) {
                *candidates = snapshot;
                return log(FusionOutcome::RolledBack {
                    reason: "leftover genes are disconnected",
                });
            }
            let seq = connected_order(dp, &edges, &BTreeSet::new()).expect("connected");
            let shrunk = dp.sub_pattern(dp.name.clone(), &seq).expect("connected");
            let order = (0..seq.len()).collect();
            let vp = ViewPattern::new(shrunk, order).expect("connected order");
            let mut v = materialize_view(graph, &vp);
            v.id = d.id.clone();
            v.genes = fission(&v);
            candidates[di] = v;
        }
        let id = |j: usize| snapshot[j].id.clone();
        outcome = Some(FusionOutcome::Genes {
            merged: merged.into_iter().map(|(g, j)| (g, id(j))).collect(),
            joined: joined.into_iter().map(|(g, j)| (g, id(j))).collect(),
            kept: leftover,
        });
    }

    let after = covered(guard, candidates);
    if !before.is_subset(&after) {
        *candidates = snapshot;
        return log(FusionOutcome::RolledBack {
            reason: "coverage would drop",
        });
    }
    log(outcome.expect("set above"))
}

/// Drops views whose gene set is empty.
pub fn remove_empty(candidates: Vec<ExtendedGraphView>) -> Vec<ExtendedGraphView> {
    candidates.into_iter().filter(|v| !v.genes.is_empty()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fixtures;

    fn gene_setup() -> (PropertyGraph, Vec<ExtendedGraphView>) {
        let g = fixtures::gene_graph();
        let q = fixtures::gene_query();
        let mut views = Vec::new();
        for (name, edges) in [("V1", vec![0]), ("V2", vec![0, 1]), ("V3", vec![2, 4, 3])] {
            let p = q.sub_pattern(name, &edges).unwrap();
            let n = p.edge_count();
            views.push(materialize_view(&g, &ViewPattern::new(p, (0..n).collect()).unwrap()));
        }
        let donor = materialize_view(&g, &ViewPattern::new(q.clone(), (0..q.edge_count()).collect()).unwrap());
        let mut donor = donor;
        donor.id = "Q".into();
        donor.genes = fission(&donor);
        views.push(donor);
        (g, views)
    }

    fn edge_count(views: &[ExtendedGraphView]) -> usize {
        views.iter().map(|v| v.vp.pattern().edge_count()).sum()
    }

    #[test]
    fn genes_merge_and_tail_joins() {
        let (g, mut views) = gene_setup();
        let q = fixtures::gene_query();
        let log = fusion(&mut views, "Q", &g, &[]);
        assert_eq!(
            log.outcome,
            FusionOutcome::Genes {
                merged: vec![(0, "V1".into()), (1, "V2".into()), (2, "V3".into())],
                joined: vec![(3, "V3".into())],
                kept: vec![],
            }
        );
        let v3 = views.iter().find(|v| v.id == "V3").unwrap();
        assert_eq!(v3.vp.pattern().edge_count(), 4);
        let tail = v3.vp.pattern().edge(v3.vp.order()[3]);
        assert_eq!(v3.vp.pattern().alias(tail.from), "E");
        let views = remove_empty(views);
        assert_eq!(views.len(), 3);
        assert!(two_level_search(&q, &views).is_some());
    }

    #[test]
    fn contained_prefix_donor_is_emptied() {
        let (g, mut views) = gene_setup();
        views.pop();
        let v1 = views[0].clone();
        let mut dup = v1.clone();
        dup.id = "W".into();
        views.push(dup);
        let before = views.iter().find(|v| v.id == "V2").unwrap().clone();
        let log = fusion(&mut views, "W", &g, &[]);
        assert_eq!(log.outcome, FusionOutcome::Contained { target: "V1".into() });
        assert!(views.iter().find(|v| v.id == "W").unwrap().genes.is_empty());
        assert_eq!(views.iter().find(|v| v.id == "V2").unwrap(), &before);
    }

    #[test]
    fn join_moves_edges() {
        let (g, mut views) = gene_setup();
        let before = edge_count(&views);
        fusion(&mut views, "Q", &g, &[]);
        let donor = views.iter().find(|v| v.id == "Q").unwrap();
        assert!(donor.genes.is_empty());
        // three merged genes hold 5 edges; the joined one moved to V3
        assert_eq!(edge_count(&views) - donor.vp.pattern().edge_count(), before - 6 + 1);
    }

    #[test]
    fn nothing_to_merge() {
        let g = fixtures::friends_graph();
        let (mut views, _) = fixtures::friends_views_and_queries();
        let snapshot = views.clone();
        let log = fusion(&mut views, "colleagues", &g, &[]);
        assert_eq!(log.outcome, FusionOutcome::Unchanged);
        assert_eq!(views, snapshot);
    }

    #[test]
    fn coverage_guard_rolls_back() {
        let (g, mut views) = gene_setup();
        // a guard query only the donor's traversal order can answer
        let q = fixtures::gene_query();
        let guard = vec![q.sub_pattern("tail", &[5]).unwrap(), q.clone()];
        let snapshot = views.clone();
        let covered_before = covered(&guard, &views);
        let log = fusion(&mut views, "Q", &g, &guard);
        let covered_after = covered(&guard, &views);
        assert!(covered_before.is_subset(&covered_after));
        if let FusionOutcome::RolledBack { .. } = log.outcome {
            assert_eq!(views, snapshot);
        }
    }

    #[test]
    fn remove_keeps_non_empty() {
        let (_, views) = gene_setup();
        let n = views.len();
        assert_eq!(remove_empty(views).len(), n);
    }
}
