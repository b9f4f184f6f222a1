//! On-disk formats: graph JSON and the GraphML subset used for views.

mod graphml;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, PropertyGraph, Vertex};

pub use graphml::{graphml_size, read_graphml, write_graphml, GraphmlDocument, ViewMeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Json,
    Graphml,
}

impl GraphFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("graphml") || ext.eq_ignore_ascii_case("xml") => GraphFormat::Graphml,
            _ => GraphFormat::Json,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

pub fn graph_from_json(text: &str) -> Result<PropertyGraph> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(|e| Error::parse("graph json", e))?;
    PropertyGraph::new(doc.vertices, doc.edges)
}

pub fn graph_to_json(graph: &PropertyGraph) -> String {
    let doc = GraphDoc {
        vertices: graph.vertices().to_vec(),
        edges: graph.edges().to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("graph serializes")
}

pub fn load_graph(path: impl AsRef<Path>, format: GraphFormat) -> Result<PropertyGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let tag = |e: Error| match e {
        Error::Parse { message, .. } => Error::parse(path.display().to_string(), message),
        other => other,
    };
    match format {
        GraphFormat::Json => graph_from_json(&text).map_err(tag),
        GraphFormat::Graphml => read_graphml(&text).map(|d| d.graph).map_err(tag),
    }
}

pub fn save_graph(graph: &PropertyGraph, path: impl AsRef<Path>, format: GraphFormat) -> Result<()> {
    let text = match format {
        GraphFormat::Json => graph_to_json(graph),
        GraphFormat::Graphml => write_graphml(graph, "G", None),
    };
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_json_graph() {
        let g = graph_from_json(
            r#"{"vertices":[{"id":"a","label":"person","props":{"age":3}},{"id":"b","label":"person"}],
                "edges":[{"id":"e","src":"a","dst":"b","label":"knows","props":{}}]}"#,
        )
        .unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 1));
    }

    #[test]
    fn dangling_endpoint() {
        let err = graph_from_json(
            r#"{"vertices":[{"id":"a","label":"person"}],
                "edges":[{"id":"e","src":"a","dst":"p9","label":"knows"}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DanglingEndpoint { ref vertex, .. } if vertex == "p9"));
    }

    #[test]
    fn parse_error_has_position() {
        let err = graph_from_json("{\"vertices\": [\n  {\"id\": 1}\n]}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn file_round_trip_both_formats() {
        let g = crate::harness::generate_social_graph(12, 3, 3, 7);
        let dir = tempfile::tempdir().unwrap();
        for (name, fmt) in [("g.json", GraphFormat::Json), ("g.graphml", GraphFormat::Graphml)] {
            let path = dir.path().join(name);
            save_graph(&g, &path, fmt).unwrap();
            assert_eq!(GraphFormat::from_path(&path), fmt);
            let back = load_graph(&path, fmt).unwrap();
            assert_eq!(back, g);
        }
    }
}
