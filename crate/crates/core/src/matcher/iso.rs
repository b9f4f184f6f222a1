use std::collections::{BTreeMap, HashMap};
use std::ops::ControlFlow;

use crate::pattern::PatternQuery;

/// Injective embedding of a needle pattern into a haystack pattern.
/// `nodes[i]` is the haystack node hosting needle node `i`; likewise `edges`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mapping {
    pub nodes: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Mapping {
    pub fn identity(p: &PatternQuery) -> Self {
        Mapping {
            nodes: (0..p.node_count()).collect(),
            edges: (0..p.edge_count()).collect(),
        }
    }
}

struct Index {
    // (from, to, label) -> edge indices, ascending
    between: HashMap<(usize, usize, String), Vec<usize>>,
    out_deg: Vec<BTreeMap<String, usize>>,
    in_deg: Vec<BTreeMap<String, usize>>,
}

impl Index {
    fn new(p: &PatternQuery) -> Self {
        let mut between: HashMap<(usize, usize, String), Vec<usize>> = HashMap::new();
        let mut out_deg = vec![BTreeMap::new(); p.node_count()];
        let mut in_deg = vec![BTreeMap::new(); p.node_count()];
        for (i, e) in p.edges().iter().enumerate() {
            between.entry((e.from, e.to, e.label.clone())).or_default().push(i);
            *out_deg[e.from].entry(e.label.clone()).or_insert(0) += 1;
            *in_deg[e.to].entry(e.label.clone()).or_insert(0) += 1;
        }
        Index {
            between,
            out_deg,
            in_deg,
        }
    }

    fn count(&self, from: usize, to: usize, label: &str) -> usize {
        self.between.get(&(from, to, label.to_string())).map_or(0, Vec::len)
    }
}

fn degrees_fit(small: &BTreeMap<String, usize>, big: &BTreeMap<String, usize>) -> bool {
    small.iter().all(|(l, &n)| big.get(l).copied().unwrap_or(0) >= n)
}

/// Needle nodes in matching order: rarest haystack label first, then always a
/// node adjacent to the ones already placed; ties by alias.
fn match_order(needle: &PatternQuery, haystack: &PatternQuery) -> Vec<usize> {
    let mut freq: HashMap<&str, usize> = HashMap::new();
    for n in haystack.nodes() {
        *freq.entry(n.label.as_str()).or_insert(0) += 1;
    }
    let key = |i: usize| {
        let n = needle.node(i);
        (freq.get(n.label.as_str()).copied().unwrap_or(0), n.alias.clone())
    };
    let mut placed = vec![false; needle.node_count()];
    let mut order = Vec::with_capacity(needle.node_count());
    while order.len() < needle.node_count() {
        let frontier: Vec<usize> = (0..needle.node_count())
            .filter(|&i| !placed[i])
            .filter(|&i| {
                order.is_empty()
                    || needle
                        .edges()
                        .iter()
                        .any(|e| (e.from == i && placed[e.to]) || (e.to == i && placed[e.from]))
            })
            .collect();
        let pool = if frontier.is_empty() {
            (0..needle.node_count()).filter(|&i| !placed[i]).collect()
        } else {
            frontier
        };
        let next = pool.into_iter().min_by_key(|&i| key(i)).expect("unplaced node");
        placed[next] = true;
        order.push(next);
    }
    order
}

struct Search<'a, F> {
    needle: &'a PatternQuery,
    nidx: Index,
    hidx: Index,
    order: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    map: Vec<Option<usize>>,
    used: Vec<bool>,
    visit: F,
}

impl<F: FnMut(&Mapping) -> ControlFlow<()>> Search<'_, F> {
    fn feasible(&self, x: usize, h: usize) -> bool {
        if !degrees_fit(&self.nidx.out_deg[x], &self.hidx.out_deg[h])
            || !degrees_fit(&self.nidx.in_deg[x], &self.hidx.in_deg[h])
        {
            return false;
        }
        for e in self.needle.edges() {
            let (a, b) = (e.from, e.to);
            if a != x && b != x {
                continue;
            }
            let img = |n: usize| if n == x { Some(h) } else { self.map[n] };
            if let (Some(fa), Some(fb)) = (img(a), img(b)) {
                if self.nidx.count(a, b, &e.label) > self.hidx.count(fa, fb, &e.label) {
                    return false;
                }
            }
        }
        true
    }

    fn nodes(&mut self, depth: usize) -> ControlFlow<()> {
        if depth == self.order.len() {
            return self.edges();
        }
        let x = self.order[depth];
        for k in 0..self.candidates[x].len() {
            let h = self.candidates[x][k];
            if self.used[h] || !self.feasible(x, h) {
                continue;
            }
            self.map[x] = Some(h);
            self.used[h] = true;
            let flow = self.nodes(depth + 1);
            self.map[x] = None;
            self.used[h] = false;
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn edges(&mut self) -> ControlFlow<()> {
        let nodes: Vec<usize> = self.map.iter().map(|m| m.expect("complete")).collect();
        let mut groups: BTreeMap<(usize, usize, String), Vec<usize>> = BTreeMap::new();
        for (i, e) in self.needle.edges().iter().enumerate() {
            groups.entry((e.from, e.to, e.label.clone())).or_default().push(i);
        }
        let groups: Vec<(Vec<usize>, Vec<usize>)> = groups
            .into_iter()
            .map(|((a, b, l), needles)| {
                let hosts = self.hidx.between[&(nodes[a], nodes[b], l)].clone();
                (needles, hosts)
            })
            .collect();
        let mut edges = vec![usize::MAX; self.needle.edge_count()];
        assign_groups(&groups, 0, &mut edges, &mut |edges| {
            (self.visit)(&Mapping {
                nodes: nodes.clone(),
                edges: edges.to_vec(),
            })
        })
    }
}

fn assign_groups(
    groups: &[(Vec<usize>, Vec<usize>)],
    g: usize,
    edges: &mut [usize],
    emit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if g == groups.len() {
        return emit(edges);
    }
    let (needles, hosts) = &groups[g];
    let mut taken = vec![false; hosts.len()];
    permute(needles, hosts, 0, &mut taken, edges, &mut |edges| {
        assign_groups(groups, g + 1, edges, emit)
    })
}

fn permute(
    needles: &[usize],
    hosts: &[usize],
    k: usize,
    taken: &mut [bool],
    edges: &mut [usize],
    next: &mut dyn FnMut(&mut [usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if k == needles.len() {
        return next(edges);
    }
    for j in 0..hosts.len() {
        if taken[j] {
            continue;
        }
        taken[j] = true;
        edges[needles[k]] = hosts[j];
        let flow = permute(needles, hosts, k + 1, taken, edges, next);
        taken[j] = false;
        flow?;
    }
    ControlFlow::Continue(())
}

/// Visits every label-preserving injective embedding of `needle` into
/// `haystack`. Predicates are ignored. Order is deterministic: needle nodes are
/// placed rarest-label first and haystack candidates are tried by alias.
pub fn for_each_isomorphism<F>(needle: &PatternQuery, haystack: &PatternQuery, visit: F)
where
    F: FnMut(&Mapping) -> ControlFlow<()>,
{
    if needle.node_count() > haystack.node_count() || needle.edge_count() > haystack.edge_count() {
        return;
    }
    let mut by_alias: Vec<usize> = (0..haystack.node_count()).collect();
    by_alias.sort_by(|&a, &b| haystack.alias(a).cmp(haystack.alias(b)));
    let candidates = (0..needle.node_count())
        .map(|i| {
            by_alias
                .iter()
                .copied()
                .filter(|&h| haystack.node(h).label == needle.node(i).label)
                .collect()
        })
        .collect();
    let mut search = Search {
        needle,
        nidx: Index::new(needle),
        hidx: Index::new(haystack),
        order: match_order(needle, haystack),
        candidates,
        map: vec![None; needle.node_count()],
        used: vec![false; haystack.node_count()],
        visit,
    };
    let _ = search.nodes(0);
}

/// At most `limit` embeddings of `needle` into `haystack`, in search order.
pub fn subgraph_isomorphisms(needle: &PatternQuery, haystack: &PatternQuery, limit: usize) -> Vec<Mapping> {
    let mut out = Vec::new();
    if limit == 0 {
        return out;
    }
    for_each_isomorphism(needle, haystack, |m| {
        out.push(m.clone());
        if out.len() >= limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use proptest::prelude::*;

    use super::*;
    use crate::pattern::{PatternBuilder, PatternEdge, PatternNode};
    use crate::predicate::Predicate;

    fn brute(needle: &PatternQuery, haystack: &PatternQuery) -> BTreeSet<Mapping> {
        let n = needle.node_count();
        let h = haystack.node_count();
        let mut out = BTreeSet::new();
        let mut nodes = vec![0; n];
        fn rec(
            i: usize,
            nodes: &mut Vec<usize>,
            needle: &PatternQuery,
            haystack: &PatternQuery,
            h: usize,
            out: &mut BTreeSet<Mapping>,
        ) {
            if i == nodes.len() {
                let distinct: BTreeSet<_> = nodes.iter().collect();
                if distinct.len() != nodes.len() {
                    return;
                }
                if (0..nodes.len()).any(|k| needle.node(k).label != haystack.node(nodes[k]).label) {
                    return;
                }
                let mut edges = vec![0; needle.edge_count()];
                rec_edges(0, &mut edges, nodes, needle, haystack, out);
                return;
            }
            for v in 0..h {
                nodes[i] = v;
                rec(i + 1, nodes, needle, haystack, h, out);
            }
        }
        fn rec_edges(
            i: usize,
            edges: &mut Vec<usize>,
            nodes: &[usize],
            needle: &PatternQuery,
            haystack: &PatternQuery,
            out: &mut BTreeSet<Mapping>,
        ) {
            if i == edges.len() {
                let distinct: BTreeSet<_> = edges.iter().collect();
                if distinct.len() == edges.len() {
                    out.insert(Mapping {
                        nodes: nodes.to_vec(),
                        edges: edges.clone(),
                    });
                }
                return;
            }
            let e = needle.edge(i);
            for (j, he) in haystack.edges().iter().enumerate() {
                if he.from == nodes[e.from] && he.to == nodes[e.to] && he.label == e.label {
                    edges[i] = j;
                    rec_edges(i + 1, edges, nodes, needle, haystack, out);
                }
            }
        }
        rec(0, &mut nodes, needle, haystack, h, &mut out);
        out
    }

    fn q3_in_q2() -> (PatternQuery, PatternQuery) {
        let q2 = PatternBuilder::new("Q2")
            .node("p", "person")
            .node("f", "person")
            .node("c", "company")
            .node("u", "university")
            .edge("p", "f", "knows")
            .edge("f", "c", "workAt")
            .edge("f", "u", "studyAt")
            .build()
            .unwrap();
        let q3 = PatternBuilder::new("Q3")
            .node("x", "person")
            .node("y", "university")
            .edge("x", "y", "studyAt")
            .build()
            .unwrap();
        (q3, q2)
    }

    #[test]
    fn identity_is_found() {
        let (_, q2) = q3_in_q2();
        let all = subgraph_isomorphisms(&q2, &q2, 100);
        assert!(all.contains(&Mapping::identity(&q2)));
    }

    #[test]
    fn sub_query_embeds() {
        let (q3, q2) = q3_in_q2();
        let maps = subgraph_isomorphisms(&q3, &q2, 10);
        assert_eq!(
            maps,
            vec![Mapping {
                nodes: vec![1, 3],
                edges: vec![2]
            }]
        );
    }

    #[test]
    fn limit_and_parallel_edges() {
        let two = PatternBuilder::new("h")
            .node("a", "x")
            .node("b", "x")
            .edge("a", "b", "k")
            .edge("a", "b", "k")
            .build()
            .unwrap();
        let one = PatternBuilder::new("n")
            .node("a", "x")
            .node("b", "x")
            .edge("a", "b", "k")
            .build()
            .unwrap();
        assert_eq!(subgraph_isomorphisms(&one, &two, 100).len(), 2);
        assert_eq!(subgraph_isomorphisms(&two, &two, 100).len(), 2);
        assert_eq!(subgraph_isomorphisms(&one, &two, 1).len(), 1);
        assert!(subgraph_isomorphisms(&two, &one, 100).is_empty());
    }

    fn arb_pattern(max_nodes: usize, max_extra: usize) -> impl Strategy<Value = PatternQuery> {
        (2..=max_nodes)
            .prop_flat_map(move |n| {
                let labels = proptest::collection::vec(0..2u8, n);
                let tree = proptest::collection::vec((any::<prop::sample::Index>(), any::<bool>(), 0..2u8), n - 1);
                let extra = proptest::collection::vec((0..n, 0..n, 0..2u8), 0..=max_extra);
                (Just(n), labels, tree, extra)
            })
            .prop_map(|(n, labels, tree, extra)| {
                let nodes = (0..n)
                    .map(|i| PatternNode {
                        alias: format!("n{i}"),
                        label: format!("L{}", labels[i]),
                        pred: Predicate::universal(),
                    })
                    .collect();
                let mut edges = Vec::new();
                for (i, (parent, flip, l)) in tree.into_iter().enumerate() {
                    let child = i + 1;
                    let parent = parent.index(child);
                    let (from, to) = if flip { (child, parent) } else { (parent, child) };
                    edges.push(PatternEdge {
                        from,
                        to,
                        label: format!("e{l}"),
                        pred: Predicate::universal(),
                    });
                }
                for (a, b, l) in extra {
                    edges.push(PatternEdge {
                        from: a,
                        to: b,
                        label: format!("e{l}"),
                        pred: Predicate::universal(),
                    });
                }
                PatternQuery::new("p", nodes, edges, 1.0).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn agrees_with_exhaustive_assignment(needle in arb_pattern(4, 1), haystack in arb_pattern(6, 3)) {
            let fast: BTreeSet<Mapping> = subgraph_isomorphisms(&needle, &haystack, usize::MAX).into_iter().collect();
            let slow = brute(&needle, &haystack);
            prop_assert_eq!(fast, slow);
        }
    }
}
