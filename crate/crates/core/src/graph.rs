use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::PropertyValue;

pub type Props = BTreeMap<String, PropertyValue>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub label: String,
    #[serde(default)]
    pub props: Props,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub src: String,
    pub dst: String,
    pub label: String,
    #[serde(default)]
    pub props: Props,
}

impl Vertex {
    pub fn new(id: impl Into<String>, label: impl Into<String>) -> Self {
        Vertex {
            id: id.into(),
            label: label.into(),
            props: Props::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<PropertyValue>) -> Self {
        self.props.insert(key.to_string(), value.into());
        self
    }
}

impl Edge {
    pub fn new(
        id: impl Into<String>,
        src: impl Into<String>,
        dst: impl Into<String>,
        label: impl Into<String>,
    ) -> Self {
        Edge {
            id: id.into(),
            src: src.into(),
            dst: dst.into(),
            label: label.into(),
            props: Props::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<PropertyValue>) -> Self {
        self.props.insert(key.to_string(), value.into());
        self
    }
}

/// A directed labeled multigraph with property maps.
///
/// Elements are kept sorted by id, so two graphs built from the same elements
/// in any order are equal. Adjacency lists are grouped by edge label, which
/// lets the evaluator touch only the edges whose label matches.
#[derive(Debug, Clone, Default)]
pub struct PropertyGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    vertex_ix: HashMap<String, u32>,
    edge_labels: Vec<String>,
    edge_label_of: Vec<u32>,
    src: Vec<u32>,
    dst: Vec<u32>,
    out_adj: Vec<Vec<u32>>,
    in_adj: Vec<Vec<u32>>,
    by_label: Vec<Vec<u32>>,
}

impl PartialEq for PropertyGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for PropertyGraph {}

impl PropertyGraph {
    pub fn new(mut vertices: Vec<Vertex>, mut edges: Vec<Edge>) -> Result<Self> {
        vertices.sort_by(|a, b| a.id.cmp(&b.id));
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in vertices.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::DuplicateId {
                    kind: "vertex",
                    id: pair[0].id.clone(),
                });
            }
        }
        for pair in edges.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::DuplicateId {
                    kind: "edge",
                    id: pair[0].id.clone(),
                });
            }
        }
        let vertex_ix: HashMap<String, u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.clone(), i as u32))
            .collect();

        let edge_labels: Vec<String> = edges
            .iter()
            .map(|e| e.label.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();

        let n = vertices.len();
        let mut src = Vec::with_capacity(edges.len());
        let mut dst = Vec::with_capacity(edges.len());
        let mut edge_label_of = Vec::with_capacity(edges.len());
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut by_label = vec![Vec::new(); edge_labels.len()];
        for (i, e) in edges.iter().enumerate() {
            let lookup = |id: &str| {
                vertex_ix.get(id).copied().ok_or_else(|| Error::DanglingEndpoint {
                    edge: e.id.clone(),
                    vertex: id.to_string(),
                })
            };
            let s = lookup(&e.src)?;
            let d = lookup(&e.dst)?;
            let l = edge_labels.binary_search(&e.label).expect("interned") as u32;
            src.push(s);
            dst.push(d);
            edge_label_of.push(l);
            out_adj[s as usize].push(i as u32);
            in_adj[d as usize].push(i as u32);
            by_label[l as usize].push(i as u32);
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_by_key(|&e| (edge_label_of[e as usize], e));
        }

        Ok(PropertyGraph {
            vertices,
            edges,
            vertex_ix,
            edge_labels,
            edge_label_of,
            src,
            dst,
            out_adj,
            in_adj,
            by_label,
        })
    }

    pub fn empty() -> Self {
        PropertyGraph::default()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty()
    }

    pub fn vertex(&self, ix: u32) -> &Vertex {
        &self.vertices[ix as usize]
    }

    pub fn edge(&self, ix: u32) -> &Edge {
        &self.edges[ix as usize]
    }

    pub fn vertex_index(&self, id: &str) -> Option<u32> {
        self.vertex_ix.get(id).copied()
    }

    pub fn edge_index(&self, id: &str) -> Option<u32> {
        self.edges
            .binary_search_by(|e| e.id.as_str().cmp(id))
            .ok()
            .map(|i| i as u32)
    }

    pub fn source(&self, edge: u32) -> u32 {
        self.src[edge as usize]
    }

    pub fn target(&self, edge: u32) -> u32 {
        self.dst[edge as usize]
    }

    pub(crate) fn edge_label_id(&self, label: &str) -> Option<u32> {
        self.edge_labels
            .binary_search_by(|l| l.as_str().cmp(label))
            .ok()
            .map(|i| i as u32)
    }

    fn label_slice<'a>(&self, list: &'a [u32], label: u32) -> &'a [u32] {
        let lo = list.partition_point(|&e| self.edge_label_of[e as usize] < label);
        let hi = list.partition_point(|&e| self.edge_label_of[e as usize] <= label);
        &list[lo..hi]
    }

    /// Outgoing edges of `vertex` carrying `label`, ascending by edge index.
    pub fn out_edges(&self, vertex: u32, label: &str) -> &[u32] {
        match self.edge_label_id(label) {
            Some(l) => self.label_slice(&self.out_adj[vertex as usize], l),
            None => &[],
        }
    }

    pub fn in_edges(&self, vertex: u32, label: &str) -> &[u32] {
        match self.edge_label_id(label) {
            Some(l) => self.label_slice(&self.in_adj[vertex as usize], l),
            None => &[],
        }
    }

    pub fn edges_with_label(&self, label: &str) -> &[u32] {
        match self.edge_label_id(label) {
            Some(l) => &self.by_label[l as usize],
            None => &[],
        }
    }

    /// The edge-induced subgraph over the given edge indices.
    pub fn edge_induced(&self, edges: &BTreeSet<u32>) -> PropertyGraph {
        let mut verts = BTreeSet::new();
        for &e in edges {
            verts.insert(self.src[e as usize]);
            verts.insert(self.dst[e as usize]);
        }
        let vertices = verts.iter().map(|&v| self.vertex(v).clone()).collect();
        let edges = edges.iter().map(|&e| self.edge(e).clone()).collect();
        PropertyGraph::new(vertices, edges).expect("subgraph of a valid graph")
    }

    pub fn vertex_ids(&self) -> BTreeSet<&str> {
        self.vertices.iter().map(|v| v.id.as_str()).collect()
    }

    pub fn edge_ids(&self) -> BTreeSet<&str> {
        self.edges.iter().map(|e| e.id.as_str()).collect()
    }

    /// True when every vertex and edge of `self` appears in `other` unchanged.
    pub fn is_subgraph_of(&self, other: &PropertyGraph) -> bool {
        self.vertices
            .iter()
            .all(|v| other.vertex_index(&v.id).is_some_and(|i| other.vertex(i) == v))
            && self
                .edges
                .iter()
                .all(|e| other.edge_index(&e.id).is_some_and(|i| other.edge(i) == e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> PropertyGraph {
        PropertyGraph::new(
            vec![
                Vertex::new("b", "person"),
                Vertex::new("a", "person").with("age", 30),
                Vertex::new("u", "university"),
            ],
            vec![
                Edge::new("e2", "a", "u", "studyAt"),
                Edge::new("e1", "a", "b", "knows"),
                Edge::new("e3", "a", "b", "knows").with("since", 2001),
            ],
        )
        .unwrap()
    }

    #[test]
    fn element_order_does_not_matter() {
        let g = tiny();
        let mut vs = g.vertices().to_vec();
        let mut es = g.edges().to_vec();
        vs.reverse();
        es.rotate_left(1);
        assert_eq!(PropertyGraph::new(vs, es).unwrap(), g);
    }

    #[test]
    fn labeled_adjacency() {
        let g = tiny();
        let a = g.vertex_index("a").unwrap();
        assert_eq!(g.out_edges(a, "knows").len(), 2);
        assert_eq!(g.out_edges(a, "studyAt").len(), 1);
        assert!(g.out_edges(a, "workAt").is_empty());
        let b = g.vertex_index("b").unwrap();
        assert_eq!(g.in_edges(b, "knows").len(), 2);
        assert_eq!(g.edges_with_label("knows").len(), 2);
    }

    #[test]
    fn rejects_dangling_and_duplicates() {
        let err = PropertyGraph::new(vec![Vertex::new("a", "x")], vec![Edge::new("e", "a", "p9", "k")]).unwrap_err();
        assert!(matches!(err, Error::DanglingEndpoint { ref vertex, .. } if vertex == "p9"));

        let err = PropertyGraph::new(vec![Vertex::new("a", "x"), Vertex::new("a", "y")], vec![]).unwrap_err();
        assert!(matches!(err, Error::DuplicateId { kind: "vertex", .. }));
    }

    #[test]
    fn edge_induced_subgraph() {
        let g = tiny();
        let e1 = g.edge_index("e1").unwrap();
        let sub = g.edge_induced(&[e1].into_iter().collect());
        assert_eq!(sub.vertex_count(), 2);
        assert_eq!(sub.edge_count(), 1);
        assert!(sub.is_subgraph_of(&g));
        assert!(!g.is_subgraph_of(&sub));
    }
}
