//! View patterns, view materialization and answering queries from views.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use crate::containment::{query_answerable, GeneAssignment};
use crate::error::{Error, Result};
use crate::genes::GeneSet;
use crate::graph::PropertyGraph;
use crate::io::{graphml_size, read_graphml, write_graphml, ViewMeta};
use crate::matcher::{evaluate_query, CostReport, MatchSet};
use crate::pattern::PatternQuery;
use crate::schema::SchemaGraph;

/// A pattern plus the order in which its edges are traversed. Every prefix of
/// the order is weakly connected.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewPattern {
    pattern: PatternQuery,
    order: Vec<usize>,
}

impl ViewPattern {
    pub fn new(pattern: PatternQuery, order: Vec<usize>) -> Result<Self> {
        let m = pattern.edge_count();
        let distinct: BTreeSet<usize> = order.iter().copied().collect();
        if order.len() != m || distinct.len() != m || order.iter().any(|&e| e >= m) {
            return Err(Error::InvalidOrder(format!(
                "{}: {:?} is not a permutation of 0..{m}",
                pattern.name, order
            )));
        }
        for k in 2..=m {
            if !pattern.edges_connected(&order[..k]) {
                return Err(Error::InvalidOrder(format!(
                    "{}: prefix {:?} is not connected",
                    pattern.name,
                    &order[..k]
                )));
            }
        }
        Ok(ViewPattern { pattern, order })
    }

    pub fn pattern(&self) -> &PatternQuery {
        &self.pattern
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// The pattern with its edges rearranged into traversal order.
    pub fn ordered_pattern(&self) -> PatternQuery {
        let mut p = self
            .pattern
            .sub_pattern(self.pattern.name.clone(), &self.order)
            .expect("a view pattern is connected");
        p.weight = self.pattern.weight;
        p
    }
}

fn selectivity(query: &PatternQuery, schema: &SchemaGraph, e: usize) -> f64 {
    let pe = query.edge(e);
    let count = schema.triple_count(&query.node(pe.from).label, &pe.label, &query.node(pe.to).label);
    count as f64 / (1 + query.endpoint_atoms(e) + pe.pred.len()) as f64
}

/// Orders the query's edges by estimated selectivity, always extending from
/// nodes already reached. Ties go to the lower edge index.
pub fn build_view_pattern(query: &PatternQuery, schema: &SchemaGraph) -> ViewPattern {
    let m = query.edge_count();
    let est: Vec<f64> = (0..m).map(|e| selectivity(query, schema, e)).collect();
    let mut reached = vec![false; query.node_count()];
    let mut used = vec![false; m];
    let mut order = Vec::with_capacity(m);
    while order.len() < m {
        let next = (0..m)
            .filter(|&e| !used[e])
            .filter(|&e| {
                let pe = query.edge(e);
                order.is_empty() || reached[pe.from] || reached[pe.to]
            })
            .min_by(|&a, &b| est[a].total_cmp(&est[b]).then(a.cmp(&b)))
            .expect("connected pattern always has a frontier edge");
        used[next] = true;
        reached[query.edge(next).from] = true;
        reached[query.edge(next).to] = true;
        order.push(next);
    }
    ViewPattern::new(query.clone(), order).expect("frontier order is connected")
}

/// A view pattern with its materialized content.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedGraphView {
    pub id: String,
    pub vp: ViewPattern,
    pub content: PropertyGraph,
    pub genes: GeneSet,
    pub size_bytes: u64,
}

impl ExtendedGraphView {
    pub fn new(id: impl Into<String>, vp: ViewPattern, content: PropertyGraph) -> Self {
        let genes = GeneSet::unsplit(&vp);
        let size_bytes = graphml_size(&content);
        ExtendedGraphView {
            id: id.into(),
            vp,
            content,
            genes,
            size_bytes,
        }
    }

    /// A view with empty content, for pattern-level reasoning.
    pub fn pattern_only(id: impl Into<String>, vp: ViewPattern) -> Self {
        ExtendedGraphView::new(id, vp, PropertyGraph::empty())
    }
}

/// Per-node candidate vertex sets fixed at the node's first visit, plus the
/// matched edges of every traversal step.
struct Traversal {
    steps: Vec<Vec<u32>>,
}

fn traverse(graph: &PropertyGraph, vp: &ViewPattern) -> Traversal {
    let p = vp.pattern();
    let mut cand: Vec<Option<BTreeSet<u32>>> = vec![None; p.node_count()];
    let mut steps = Vec::with_capacity(vp.order().len());
    let node_ok = |node: usize, v: u32| {
        let pn = p.node(node);
        let vx = graph.vertex(v);
        vx.label == pn.label && pn.pred.eval(&vx.props)
    };
    for &ei in vp.order() {
        let pe = p.edge(ei);
        let (u, w) = (pe.from, pe.to);
        let admits = |node: usize, v: u32, cand: &[Option<BTreeSet<u32>>]| match &cand[node] {
            Some(set) => set.contains(&v),
            None => node_ok(node, v),
        };
        let pool: Vec<u32> = match (&cand[u], &cand[w]) {
            (Some(src), _) => src
                .iter()
                .flat_map(|&s| graph.out_edges(s, &pe.label).iter().copied())
                .collect(),
            (None, Some(dst)) => dst
                .iter()
                .flat_map(|&t| graph.in_edges(t, &pe.label).iter().copied())
                .collect(),
            (None, None) => graph.edges_with_label(&pe.label).to_vec(),
        };
        let mut matched: Vec<u32> = pool
            .into_iter()
            .filter(|&e| {
                let (s, t) = (graph.source(e), graph.target(e));
                (u != w || s == t) && pe.pred.eval(&graph.edge(e).props) && admits(u, s, &cand) && admits(w, t, &cand)
            })
            .collect();
        matched.sort_unstable();
        matched.dedup();
        if cand[u].is_none() {
            cand[u] = Some(matched.iter().map(|&e| graph.source(e)).collect());
        }
        if cand[w].is_none() {
            cand[w] = Some(matched.iter().map(|&e| graph.target(e)).collect());
        }
        steps.push(matched);
    }
    Traversal { steps }
}

/// Materializes a view: the union of the edges matched at every traversal
/// step, with their endpoints. The view id is the pattern's name.
pub fn materialize_view(graph: &PropertyGraph, vp: &ViewPattern) -> ExtendedGraphView {
    materialize_traced(graph, vp).0
}

/// Like [`materialize_view`], also returning the cumulative set of base-graph
/// edge indices in the content after each traversal step.
pub fn materialize_traced(graph: &PropertyGraph, vp: &ViewPattern) -> (ExtendedGraphView, Vec<BTreeSet<u32>>) {
    let t = traverse(graph, vp);
    let mut acc = BTreeSet::new();
    let mut trace = Vec::with_capacity(t.steps.len());
    for step in &t.steps {
        acc.extend(step.iter().copied());
        trace.push(acc.clone());
    }
    let content = graph.edge_induced(&acc);
    let view = ExtendedGraphView::new(vp.pattern().name.clone(), vp.clone(), content);
    (view, trace)
}

/// Answers `query` from one view after checking that the view can answer it.
pub fn answer_with_view(view: &ExtendedGraphView, query: &PatternQuery) -> Result<(MatchSet, CostReport)> {
    if query_answerable(query, view).is_none() {
        return Err(Error::Contract(format!(
            "view {} cannot answer query {}",
            view.id, query.name
        )));
    }
    Ok(evaluate_query(&view.content, query))
}

/// Hash-joins two match sets on their shared aliases. Returns the joined set
/// and the number of rows read from both inputs.
pub fn hash_join(left: &MatchSet, right: &MatchSet) -> (MatchSet, u64) {
    let shared: Vec<(usize, usize)> = left
        .aliases
        .iter()
        .enumerate()
        .filter_map(|(i, a)| right.column(a).map(|j| (i, j)))
        .collect();
    let extra: Vec<usize> = (0..right.aliases.len())
        .filter(|j| !shared.iter().any(|&(_, sj)| sj == *j))
        .collect();
    let mut table: HashMap<Vec<&str>, Vec<usize>> = HashMap::new();
    for (k, row) in right.rows.iter().enumerate() {
        let key = shared.iter().map(|&(_, j)| row[j].as_str()).collect();
        table.entry(key).or_default().push(k);
    }
    let mut aliases = left.aliases.clone();
    aliases.extend(extra.iter().map(|&j| right.aliases[j].clone()));
    let mut rows = Vec::new();
    for row in &left.rows {
        let key: Vec<&str> = shared.iter().map(|&(i, _)| row[i].as_str()).collect();
        if let Some(hits) = table.get(&key) {
            for &k in hits {
                let mut out = row.clone();
                out.extend(extra.iter().map(|&j| right.rows[k][j].clone()));
                rows.push(out);
            }
        }
    }
    let read = (left.len() + right.len()) as u64;
    (MatchSet { aliases, rows }, read)
}

/// Result of answering a query from a multi-view cover.
#[derive(Debug, Clone)]
pub struct CoverEvaluation {
    pub matches: MatchSet,
    /// Cost of each gene's evaluation, with the view it ran on, in
    /// assignment order.
    pub partials: Vec<(String, CostReport)>,
    /// Rows read by the joins.
    pub join_cost: u64,
}

impl CoverEvaluation {
    pub fn total(&self) -> CostReport {
        let mut c = CostReport::new(0, self.join_cost);
        for (_, p) in &self.partials {
            c += *p;
        }
        c
    }
}

/// Evaluates each gene of `query` on its assigned view, then joins the
/// partial results smallest first, always joining a partial that shares an
/// alias with what has been joined so far.
pub fn evaluate_cover(
    views: &[ExtendedGraphView],
    query: &PatternQuery,
    assignment: &[GeneAssignment],
) -> Result<CoverEvaluation> {
    let covered: BTreeSet<usize> = assignment.iter().flat_map(|g| g.edges.iter().copied()).collect();
    if covered.len() != query.edge_count() || covered.iter().any(|&e| e >= query.edge_count()) {
        return Err(Error::Contract(format!(
            "assignment does not cover every edge of {}",
            query.name
        )));
    }
    let mut partials: Vec<(MatchSet, &str)> = Vec::with_capacity(assignment.len());
    let mut costs = Vec::with_capacity(assignment.len());
    for (i, g) in assignment.iter().enumerate() {
        let view = views.iter().find(|v| v.id == g.view).ok_or_else(|| {
            Error::Contract(format!(
                "gene {i} of {} assigned to unknown view {}",
                query.name, g.view
            ))
        })?;
        let (m, c) = if g.edges.len() == query.edge_count() {
            evaluate_query(&view.content, query)
        } else {
            let gene = query.sub_pattern(format!("{}#{i}", query.name), &g.edges)?;
            evaluate_query(&view.content, &gene)
        };
        costs.push((view.id.clone(), c));
        partials.push((m, view.id.as_str()));
    }
    let (joined, join_cost) = join_partials(partials);
    let order: Vec<usize> = query
        .aliases()
        .iter()
        .map(|a| joined.column(a).expect("every alias is covered"))
        .collect();
    let matches = MatchSet {
        aliases: query.aliases(),
        rows: joined
            .rows
            .into_iter()
            .map(|r| order.iter().map(|&k| r[k].clone()).collect())
            .collect(),
    };
    Ok(CoverEvaluation {
        matches,
        partials: costs,
        join_cost,
    })
}

/// Answers `query` from several views; the join's row reads are added to
/// `rows_emitted` of the returned cost.
pub fn answer_with_views(
    views: &[ExtendedGraphView],
    query: &PatternQuery,
    assignment: &[GeneAssignment],
) -> Result<(MatchSet, CostReport)> {
    let eval = evaluate_cover(views, query, assignment)?;
    let cost = eval.total();
    Ok((eval.matches, cost))
}

/// Joins partial results; returns the result and the join cost.
pub(crate) fn join_partials(mut partials: Vec<(MatchSet, &str)>) -> (MatchSet, u64) {
    let mut idx: Vec<usize> = (0..partials.len()).collect();
    idx.sort_by(|&a, &b| {
        partials[a]
            .0
            .len()
            .cmp(&partials[b].0.len())
            .then_with(|| partials[a].1.cmp(partials[b].1))
            .then(a.cmp(&b))
    });
    let first = idx.remove(0);
    let mut acc = std::mem::take(&mut partials[first].0);
    let mut join_cost = 0;
    while !idx.is_empty() {
        let pick = idx
            .iter()
            .position(|&k| partials[k].0.aliases.iter().any(|a| acc.column(a).is_some()))
            .unwrap_or(0);
        let k = idx.remove(pick);
        let (next, read) = hash_join(&acc, &partials[k].0);
        join_cost += read;
        acc = next;
    }
    (acc, join_cost)
}

pub fn save_view_graphml(view: &ExtendedGraphView, path: impl AsRef<Path>) -> Result<()> {
    let text = write_graphml(
        &view.content,
        &view.id,
        Some(ViewMeta {
            pattern: view.vp.pattern(),
            order: view.vp.order(),
        }),
    );
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_view_graphml(path: impl AsRef<Path>) -> Result<ExtendedGraphView> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let doc = read_graphml(&text)?;
    let missing = |what: &str| Error::parse(path.display().to_string(), format!("no {what} metadata"));
    let pattern = doc.pattern.ok_or_else(|| missing("vp.pattern"))?;
    let order = doc.order.ok_or_else(|| missing("vp.order"))?;
    let vp = ViewPattern::new(pattern, order)?;
    Ok(ExtendedGraphView::new(doc.id, vp, doc.graph))
}
