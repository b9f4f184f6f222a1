use std::collections::BTreeMap;

use crate::graph::PropertyGraph;

/// Label-level summary of a graph: vertex label counts and the distinct
/// `(source label, edge label, target label)` triples with their edge counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchemaGraph {
    pub vertex_labels: BTreeMap<String, usize>,
    pub triples: BTreeMap<(String, String, String), usize>,
}

impl SchemaGraph {
    pub fn triple_count(&self, src: &str, label: &str, dst: &str) -> usize {
        self.triples
            .get(&(src.to_string(), label.to_string(), dst.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn edge_label_count(&self, label: &str) -> usize {
        self.triples
            .iter()
            .filter(|((_, l, _), _)| l == label)
            .map(|(_, c)| c)
            .sum()
    }
}

pub fn infer_schema(graph: &PropertyGraph) -> SchemaGraph {
    let mut schema = SchemaGraph::default();
    for v in graph.vertices() {
        *schema.vertex_labels.entry(v.label.clone()).or_default() += 1;
    }
    for (i, e) in graph.edges().iter().enumerate() {
        let s = &graph.vertex(graph.source(i as u32)).label;
        let d = &graph.vertex(graph.target(i as u32)).label;
        *schema
            .triples
            .entry((s.clone(), e.label.clone(), d.clone()))
            .or_default() += 1;
    }
    schema
}
