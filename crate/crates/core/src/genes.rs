//! Splitting view patterns at cut vertices into connected genes.

use std::collections::BTreeSet;

use crate::pattern::PatternQuery;
use crate::view::{ExtendedGraphView, ViewPattern};

/// A connected fragment of a view pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Gene {
    /// Parent pattern edge indices, in the parent's traversal order.
    pub edges: Vec<usize>,
    /// The fragment on its own; its edges follow `edges`, so its traversal
    /// order is the identity.
    pub pattern: PatternQuery,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeneSet {
    pub genes: Vec<Gene>,
    pub cut_points: BTreeSet<String>,
}

impl GeneSet {
    /// The whole view pattern as one gene.
    pub fn unsplit(vp: &ViewPattern) -> GeneSet {
        GeneSet {
            genes: vec![Gene {
                edges: vp.order().to_vec(),
                pattern: vp.ordered_pattern(),
            }],
            cut_points: BTreeSet::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }
}

struct Dfs<'a> {
    p: &'a PatternQuery,
    adj: Vec<Vec<(usize, usize)>>,
    disc: Vec<usize>,
    low: Vec<usize>,
    time: usize,
    stack: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    cut: BTreeSet<usize>,
}

impl Dfs<'_> {
    fn visit(&mut self, u: usize, via: Option<usize>) {
        self.time += 1;
        self.disc[u] = self.time;
        self.low[u] = self.time;
        let mut children = 0;
        for k in 0..self.adj[u].len() {
            let (w, e) = self.adj[u][k];
            if Some(e) == via {
                continue;
            }
            if self.disc[w] == 0 {
                children += 1;
                self.stack.push(e);
                self.visit(w, Some(e));
                self.low[u] = self.low[u].min(self.low[w]);
                if self.low[w] >= self.disc[u] {
                    if via.is_some() {
                        self.cut.insert(u);
                    }
                    let mut block = Vec::new();
                    while let Some(top) = self.stack.pop() {
                        block.push(top);
                        if top == e {
                            break;
                        }
                    }
                    self.blocks.push(block);
                }
            } else if self.disc[w] < self.disc[u] {
                self.stack.push(e);
                self.low[u] = self.low[u].min(self.disc[w]);
            }
        }
        if via.is_none() && children > 1 {
            self.cut.insert(u);
        }
    }
}

fn tarjan(p: &PatternQuery) -> Dfs<'_> {
    let n = p.node_count();
    let mut adj = vec![Vec::new(); n];
    for (i, e) in p.edges().iter().enumerate() {
        if e.from != e.to {
            adj[e.from].push((e.to, i));
            adj[e.to].push((e.from, i));
        }
    }
    let mut dfs = Dfs {
        p,
        adj,
        disc: vec![0; n],
        low: vec![0; n],
        time: 0,
        stack: Vec::new(),
        blocks: Vec::new(),
        cut: BTreeSet::new(),
    };
    for u in 0..n {
        if dfs.disc[u] == 0 {
            dfs.visit(u, None);
        }
    }
    dfs
}

/// Aliases whose removal disconnects the underlying undirected pattern.
pub fn articulation_points(pattern: &PatternQuery) -> BTreeSet<String> {
    tarjan(pattern)
        .cut
        .iter()
        .map(|&i| pattern.alias(i).to_string())
        .collect()
}

/// Biconnected blocks as edge index sets, each sorted ascending. Self-loops
/// join the first block that touches their vertex.
pub fn biconnected_blocks(pattern: &PatternQuery) -> Vec<Vec<usize>> {
    let dfs = tarjan(pattern);
    let mut blocks = dfs.blocks;
    for (i, e) in dfs.p.edges().iter().enumerate() {
        if e.from != e.to {
            continue;
        }
        let host = blocks.iter().position(|b| {
            b.iter().any(|&k| {
                let pe = pattern.edge(k);
                pe.from == e.from || pe.to == e.from
            })
        });
        match host {
            Some(h) => blocks[h].push(i),
            None => blocks.push(vec![i]),
        }
    }
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks
}

/// Blocks of `pattern` with edges listed in `order`, blocks sorted by the
/// position of their first edge in `order`.
pub fn split_in_order(pattern: &PatternQuery, order: &[usize]) -> Vec<Vec<usize>> {
    let mut pos = vec![0; pattern.edge_count()];
    for (k, &e) in order.iter().enumerate() {
        pos[e] = k;
    }
    let mut blocks: Vec<Vec<usize>> = biconnected_blocks(pattern)
        .into_iter()
        .map(|mut b| {
            b.sort_by_key(|&e| pos[e]);
            b
        })
        .collect();
    blocks.sort_by_key(|b| pos[b[0]]);
    blocks
}

/// Splits a view pattern at its cut vertices. A pattern without cut vertices
/// comes back as a single gene.
pub fn fission(view: &ExtendedGraphView) -> GeneSet {
    let p = view.vp.pattern();
    let genes = split_in_order(p, view.vp.order())
        .into_iter()
        .enumerate()
        .map(|(i, edges)| Gene {
            pattern: p
                .sub_pattern(format!("{}#g{}", view.id, i + 1), &edges)
                .expect("blocks are connected"),
            edges,
        })
        .collect();
    GeneSet {
        genes,
        cut_points: articulation_points(p),
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::harness::fixtures;
    use crate::harness::synth::random_query;
    use crate::pattern::PatternBuilder;

    fn components_without(p: &PatternQuery, removed: usize) -> usize {
        let n = p.node_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        for e in p.edges() {
            if e.from != removed && e.to != removed {
                let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
                parent[a] = b;
            }
        }
        let roots: BTreeSet<usize> = (0..n).filter(|&x| x != removed).map(|x| find(&mut parent, x)).collect();
        roots.len()
    }

    fn brute_cut(p: &PatternQuery) -> BTreeSet<String> {
        (0..p.node_count())
            .filter(|&v| components_without(p, v) > 1)
            .map(|v| p.alias(v).to_string())
            .collect()
    }

    #[test]
    fn single_edge_has_none() {
        let q = PatternBuilder::new("q")
            .node("a", "x")
            .node("b", "x")
            .edge("a", "b", "k")
            .build()
            .unwrap();
        assert!(articulation_points(&q).is_empty());
    }

    #[test]
    fn four_genes() {
        let q = fixtures::gene_query();
        let cut: Vec<String> = articulation_points(&q).into_iter().collect();
        assert_eq!(cut, ["B", "C", "E"]);
        let view = crate::view::ExtendedGraphView::pattern_only(
            "V",
            ViewPattern::new(q.clone(), (0..q.edge_count()).collect()).unwrap(),
        );
        let genes = fission(&view);
        assert_eq!(genes.len(), 4);
        let sizes: Vec<usize> = genes.genes.iter().map(|g| g.edges.len()).collect();
        assert_eq!(sizes, [1, 1, 3, 1]);
    }

    #[test]
    fn triangle_is_one_gene() {
        let q = PatternBuilder::new("t")
            .node("a", "x")
            .node("b", "x")
            .node("c", "x")
            .edge("a", "b", "k")
            .edge("b", "c", "k")
            .edge("c", "a", "k")
            .build()
            .unwrap();
        let view =
            crate::view::ExtendedGraphView::pattern_only("t", ViewPattern::new(q.clone(), vec![0, 1, 2]).unwrap());
        let genes = fission(&view);
        assert_eq!(genes.len(), 1);
        assert_eq!(genes.genes[0].pattern.edge_count(), 3);
        assert!(genes.cut_points.is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn cut_points_match_removal_oracle(seed in any::<u64>()) {
            let q = random_query(seed, 8);
            prop_assume!(q.node_count() <= 8);
            prop_assert_eq!(articulation_points(&q), brute_cut(&q));
        }

        #[test]
        fn genes_reassemble_the_pattern(seed in any::<u64>()) {
            let q = random_query(seed, 8);
            let blocks = biconnected_blocks(&q);
            let mut all: Vec<usize> = blocks.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..q.edge_count()).collect::<Vec<_>>());
            let cut: BTreeSet<usize> = articulation_points(&q).iter().map(|a| q.node_index(a).unwrap()).collect();
            for (i, a) in blocks.iter().enumerate() {
                prop_assert!(q.edges_connected(a));
                for b in &blocks[i + 1..] {
                    let shared: BTreeSet<usize> = q.touched_nodes(a).intersection(&q.touched_nodes(b)).copied().collect();
                    prop_assert!(shared.is_subset(&cut));
                }
            }
        }
    }
}
