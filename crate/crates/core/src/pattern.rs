use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predicate::{Atom, Predicate};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternNode {
    pub alias: String,
    pub label: String,
    pub pred: Predicate,
}

/// A pattern edge; endpoints are indices into the pattern's node list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternEdge {
    pub from: usize,
    pub to: usize,
    pub label: String,
    pub pred: Predicate,
}

/// A weakly connected directed pattern with at least one edge.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternQuery {
    pub name: String,
    nodes: Vec<PatternNode>,
    edges: Vec<PatternEdge>,
    pub weight: f64,
}

impl PatternQuery {
    pub fn new(name: impl Into<String>, nodes: Vec<PatternNode>, edges: Vec<PatternEdge>, weight: f64) -> Result<Self> {
        let name = name.into();
        let mut seen = BTreeSet::new();
        for n in &nodes {
            if !seen.insert(n.alias.as_str()) {
                return Err(Error::DuplicateAlias {
                    pattern: name,
                    alias: n.alias.clone(),
                });
            }
        }
        if edges.is_empty() {
            return Err(Error::EmptyPattern(name));
        }
        if edges.iter().any(|e| e.from >= nodes.len() || e.to >= nodes.len()) {
            return Err(Error::Contract(format!("pattern {name}: edge endpoint out of range")));
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::parse(
                format!("pattern {name}"),
                format!("weight must be a nonnegative number, got {weight}"),
            ));
        }
        let q = PatternQuery {
            name,
            nodes,
            edges,
            weight,
        };
        let all: Vec<usize> = (0..q.edges.len()).collect();
        if q.touched_nodes(&all).len() != q.nodes.len() || !q.edges_connected(&all) {
            return Err(Error::Disconnected(q.name));
        }
        Ok(q)
    }

    pub fn nodes(&self) -> &[PatternNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[PatternEdge] {
        &self.edges
    }

    pub fn node(&self, i: usize) -> &PatternNode {
        &self.nodes[i]
    }

    pub fn edge(&self, i: usize) -> &PatternEdge {
        &self.edges[i]
    }

    pub fn alias(&self, i: usize) -> &str {
        &self.nodes[i].alias
    }

    pub fn node_index(&self, alias: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.alias == alias)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn aliases(&self) -> Vec<String> {
        self.nodes.iter().map(|n| n.alias.clone()).collect()
    }

    /// Nodes touched by the given edges, ascending.
    pub fn touched_nodes(&self, edges: &[usize]) -> BTreeSet<usize> {
        edges
            .iter()
            .flat_map(|&e| [self.edges[e].from, self.edges[e].to])
            .collect()
    }

    /// Whether the given edges form one weakly connected piece.
    pub fn edges_connected(&self, edges: &[usize]) -> bool {
        if edges.is_empty() {
            return false;
        }
        let mut reached: BTreeSet<usize> = BTreeSet::new();
        let first = &self.edges[edges[0]];
        reached.insert(first.from);
        reached.insert(first.to);
        let mut pending: Vec<usize> = edges[1..].to_vec();
        loop {
            let before = pending.len();
            pending.retain(|&e| {
                let pe = &self.edges[e];
                if reached.contains(&pe.from) || reached.contains(&pe.to) {
                    reached.insert(pe.from);
                    reached.insert(pe.to);
                    false
                } else {
                    true
                }
            });
            if pending.is_empty() {
                return true;
            }
            if pending.len() == before {
                return false;
            }
        }
    }

    /// The sub-pattern formed by `edges` (kept in the given order) and their endpoints.
    pub fn sub_pattern(&self, name: impl Into<String>, edges: &[usize]) -> Result<PatternQuery> {
        let touched = self.touched_nodes(edges);
        let remap: HashMap<usize, usize> = touched.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let nodes = touched.iter().map(|&n| self.nodes[n].clone()).collect();
        let edges = edges
            .iter()
            .map(|&e| {
                let pe = &self.edges[e];
                PatternEdge {
                    from: remap[&pe.from],
                    to: remap[&pe.to],
                    label: pe.label.clone(),
                    pred: pe.pred.clone(),
                }
            })
            .collect();
        PatternQuery::new(name, nodes, edges, 1.0)
    }

    /// Total number of predicate atoms on the endpoints of edge `e`.
    pub fn endpoint_atoms(&self, e: usize) -> usize {
        let pe = &self.edges[e];
        let mut n = self.nodes[pe.from].pred.len();
        if pe.to != pe.from {
            n += self.nodes[pe.to].pred.len();
        }
        n
    }

    pub fn to_doc(&self) -> QueryDoc {
        QueryDoc {
            name: self.name.clone(),
            weight: self.weight,
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDoc {
                    alias: n.alias.clone(),
                    label: n.label.clone(),
                    pred: n.pred.atoms().to_vec(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    from: self.nodes[e.from].alias.clone(),
                    to: self.nodes[e.to].alias.clone(),
                    label: e.label.clone(),
                    pred: e.pred.atoms().to_vec(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for PatternQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.name)?;
        for (i, e) in self.edges.iter().enumerate() {
            let (a, b) = (&self.nodes[e.from], &self.nodes[e.to]);
            let sep = if i == 0 { " " } else { ", " };
            write!(
                f,
                "{sep}({}:{})-[{}]->({}:{})",
                a.alias, a.label, e.label, b.alias, b.label
            )?;
        }
        Ok(())
    }
}

/// Fluent construction for patterns written in code.
#[derive(Debug, Default)]
pub struct PatternBuilder {
    name: String,
    weight: f64,
    nodes: Vec<(String, String, Vec<Atom>)>,
    edges: Vec<(String, String, String, Vec<Atom>)>,
}

impl PatternBuilder {
    pub fn new(name: &str) -> Self {
        PatternBuilder {
            name: name.to_string(),
            weight: 1.0,
            ..Default::default()
        }
    }

    pub fn weight(mut self, w: f64) -> Self {
        self.weight = w;
        self
    }

    pub fn node(self, alias: &str, label: &str) -> Self {
        self.node_where(alias, label, vec![])
    }

    pub fn node_where(mut self, alias: &str, label: &str, pred: Vec<Atom>) -> Self {
        self.nodes.push((alias.into(), label.into(), pred));
        self
    }

    pub fn edge(self, from: &str, to: &str, label: &str) -> Self {
        self.edge_where(from, to, label, vec![])
    }

    pub fn edge_where(mut self, from: &str, to: &str, label: &str, pred: Vec<Atom>) -> Self {
        self.edges.push((from.into(), to.into(), label.into(), pred));
        self
    }

    pub fn build(self) -> Result<PatternQuery> {
        let doc = QueryDoc {
            name: self.name,
            weight: self.weight,
            nodes: self
                .nodes
                .into_iter()
                .map(|(alias, label, pred)| NodeDoc { alias, label, pred })
                .collect(),
            edges: self
                .edges
                .into_iter()
                .map(|(from, to, label, pred)| EdgeDoc { from, to, label, pred })
                .collect(),
        };
        parse_pattern_query(&doc)
    }
}

fn default_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryDoc {
    pub name: String,
    #[serde(default = "default_weight")]
    pub weight: f64,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub alias: String,
    pub label: String,
    #[serde(default)]
    pub pred: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub from: String,
    pub to: String,
    pub label: String,
    #[serde(default)]
    pub pred: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadDoc {
    pub queries: Vec<QueryDoc>,
}

pub fn parse_pattern_query(doc: &QueryDoc) -> Result<PatternQuery> {
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for n in &doc.nodes {
        nodes.push(PatternNode {
            alias: n.alias.clone(),
            label: n.label.clone(),
            pred: Predicate::new(n.pred.clone())?,
        });
    }
    let index: HashMap<&str, usize> = doc
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.alias.as_str(), i))
        .collect();
    let lookup = |alias: &str| {
        index.get(alias).copied().ok_or_else(|| Error::UnknownAlias {
            pattern: doc.name.clone(),
            alias: alias.to_string(),
        })
    };
    let mut edges = Vec::with_capacity(doc.edges.len());
    for e in &doc.edges {
        edges.push(PatternEdge {
            from: lookup(&e.from)?,
            to: lookup(&e.to)?,
            label: e.label.clone(),
            pred: Predicate::new(e.pred.clone())?,
        });
    }
    PatternQuery::new(doc.name.clone(), nodes, edges, doc.weight)
}

pub fn parse_workload(json: &str) -> Result<Vec<PatternQuery>> {
    let doc: WorkloadDoc = serde_json::from_str(json).map_err(|e| Error::parse("workload", e))?;
    doc.queries.iter().map(parse_pattern_query).collect()
}

pub fn load_workload(path: impl AsRef<std::path::Path>) -> Result<Vec<PatternQuery>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let doc: WorkloadDoc = serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e))?;
    doc.queries.iter().map(parse_pattern_query).collect()
}

pub fn workload_to_json(queries: &[PatternQuery]) -> String {
    let doc = WorkloadDoc {
        queries: queries.iter().map(PatternQuery::to_doc).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("workload serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicate::Comparator;

    const FRIENDS_QUERY: &str = r#"{
        "name": "friends",
        "nodes": [
            {"alias": "p", "label": "person", "pred": [{"key": "gender", "op": "=", "value": "male"}]},
            {"alias": "f", "label": "person", "pred": [{"key": "gender", "op": "=", "value": "female"}]},
            {"alias": "c", "label": "company"},
            {"alias": "u", "label": "university"}
        ],
        "edges": [
            {"from": "p", "to": "f", "label": "knows"},
            {"from": "f", "to": "c", "label": "workAt"},
            {"from": "f", "to": "u", "label": "studyAt"}
        ]
    }"#;

    #[test]
    fn parses_friend_query() {
        let doc: QueryDoc = serde_json::from_str(FRIENDS_QUERY).unwrap();
        let q = parse_pattern_query(&doc).unwrap();
        assert_eq!(q.node_count(), 4);
        assert_eq!(q.weight, 1.0);
        let labels: Vec<_> = q.nodes().iter().map(|n| (n.alias.as_str(), n.label.as_str())).collect();
        assert_eq!(
            labels,
            [("p", "person"), ("f", "person"), ("c", "company"), ("u", "university")]
        );
        assert_eq!(q.node(0).pred.atoms(), &[Atom::new("gender", Comparator::Eq, "male")]);
        assert_eq!(q.node(1).pred.atoms(), &[Atom::new("gender", Comparator::Eq, "female")]);
        let edges: Vec<_> = q
            .edges()
            .iter()
            .map(|e| (q.alias(e.from), q.alias(e.to), e.label.as_str()))
            .collect();
        assert_eq!(
            edges,
            [("p", "f", "knows"), ("f", "c", "workAt"), ("f", "u", "studyAt")]
        );
        assert_eq!(parse_pattern_query(&q.to_doc()).unwrap(), q);
    }

    #[test]
    fn single_edge() {
        let q = PatternBuilder::new("q")
            .node("A", "x")
            .node("B", "x")
            .edge("A", "B", "knows")
            .build()
            .unwrap();
        assert_eq!((q.node_count(), q.edge_count()), (2, 1));
    }

    #[test]
    fn errors() {
        let unknown = PatternBuilder::new("q").node("a", "x").edge("a", "x", "k").build();
        assert!(matches!(unknown, Err(Error::UnknownAlias { ref alias, .. }) if alias == "x"));

        let empty = PatternBuilder::new("q").node("a", "x").build();
        assert!(matches!(empty, Err(Error::EmptyPattern(_))));

        let split = PatternBuilder::new("q")
            .node("a", "x")
            .node("b", "x")
            .node("c", "x")
            .node("d", "x")
            .edge("a", "b", "k")
            .edge("c", "d", "k")
            .build();
        assert!(matches!(split, Err(Error::Disconnected(_))));

        let bad_op = serde_json::from_str::<QueryDoc>(
            r#"{"name":"q","nodes":[{"alias":"a","label":"x","pred":[{"key":"k","op":"~","value":1}]}],"edges":[]}"#,
        );
        assert!(bad_op.is_err());

        let mixed = PatternBuilder::new("q")
            .node_where(
                "a",
                "x",
                vec![
                    Atom::new("k", Comparator::Lt, 3i64),
                    Atom::new("k", Comparator::Ne, "z"),
                ],
            )
            .node("b", "x")
            .edge("a", "b", "k")
            .build();
        assert!(matches!(mixed, Err(Error::MalformedPredicate(_))));
    }
}
