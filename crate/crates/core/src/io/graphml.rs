use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};
use crate::graph::{Edge, PropertyGraph, Props, Vertex};
use crate::pattern::{parse_pattern_query, PatternQuery, QueryDoc};
use crate::value::{PropertyValue, ValueKind};

const PATTERN_KEY: &str = "vp.pattern";
const ORDER_KEY: &str = "vp.order";
const LABEL_V: &str = "labelV";
const LABEL_E: &str = "labelE";

/// View pattern and traversal order stored as graph-level data.
#[derive(Debug, Clone, Copy)]
pub struct ViewMeta<'a> {
    pub pattern: &'a PatternQuery,
    pub order: &'a [usize],
}

#[derive(Debug, Clone)]
pub struct GraphmlDocument {
    pub id: String,
    pub graph: PropertyGraph,
    pub pattern: Option<PatternQuery>,
    pub order: Option<Vec<usize>>,
}

fn prop_keys<'a>(maps: impl Iterator<Item = &'a Props>) -> BTreeSet<(String, ValueKind)> {
    maps.flat_map(|m| m.iter().map(|(k, v)| (k.clone(), v.kind())))
        .collect()
}

fn key_id(scope: char, name: &str, kind: ValueKind) -> String {
    format!("{scope}.{}.{name}", kind.name())
}

/// Serializes a graph as GraphML. Output is byte-stable for a fixed input:
/// keys are sorted, elements follow the graph's id order.
pub fn write_graphml(graph: &PropertyGraph, id: &str, meta: Option<ViewMeta<'_>>) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    let key = |out: &mut String, id: &str, scope: &str, name: &str, kind: ValueKind| {
        let _ = writeln!(
            out,
            "  <key id=\"{}\" for=\"{scope}\" attr.name=\"{}\" attr.type=\"{}\"/>",
            escape(id),
            escape(name),
            kind.name()
        );
    };
    if meta.is_some() {
        key(&mut out, PATTERN_KEY, "graph", PATTERN_KEY, ValueKind::Text);
        key(&mut out, ORDER_KEY, "graph", ORDER_KEY, ValueKind::Text);
    }
    key(&mut out, LABEL_V, "node", LABEL_V, ValueKind::Text);
    key(&mut out, LABEL_E, "edge", LABEL_E, ValueKind::Text);
    for (name, kind) in prop_keys(graph.vertices().iter().map(|v| &v.props)) {
        key(&mut out, &key_id('v', &name, kind), "node", &name, kind);
    }
    for (name, kind) in prop_keys(graph.edges().iter().map(|e| &e.props)) {
        key(&mut out, &key_id('e', &name, kind), "edge", &name, kind);
    }

    let _ = writeln!(out, "  <graph id=\"{}\" edgedefault=\"directed\">", escape(id));
    if let Some(meta) = meta {
        let json = serde_json::to_string(&meta.pattern.to_doc()).expect("pattern serializes");
        let order: Vec<String> = meta.order.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "    <data key=\"{PATTERN_KEY}\">{}</data>", escape(&json));
        let _ = writeln!(out, "    <data key=\"{ORDER_KEY}\">{}</data>", order.join(","));
    }
    let data = |out: &mut String, scope: char, props: &Props| {
        for (name, value) in props {
            let _ = writeln!(
                out,
                "      <data key=\"{}\">{}</data>",
                escape(&key_id(scope, name, value.kind())),
                escape(&value.to_string())
            );
        }
    };
    for v in graph.vertices() {
        let _ = writeln!(out, "    <node id=\"{}\">", escape(&v.id));
        let _ = writeln!(out, "      <data key=\"{LABEL_V}\">{}</data>", escape(&v.label));
        data(&mut out, 'v', &v.props);
        out.push_str("    </node>\n");
    }
    for e in graph.edges() {
        let _ = writeln!(
            out,
            "    <edge id=\"{}\" source=\"{}\" target=\"{}\">",
            escape(&e.id),
            escape(&e.src),
            escape(&e.dst)
        );
        let _ = writeln!(out, "      <data key=\"{LABEL_E}\">{}</data>", escape(&e.label));
        data(&mut out, 'e', &e.props);
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

/// Serialized GraphML byte length of a graph without view metadata.
pub fn graphml_size(graph: &PropertyGraph) -> u64 {
    write_graphml(graph, "content", None).len() as u64
}

enum Element {
    Node(Vertex),
    Edge(Edge),
}

struct KeyDecl {
    name: String,
    kind: ValueKind,
}

fn attrs(e: &BytesStart<'_>, pos: u64) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for a in e.attributes() {
        let a = a.map_err(|err| Error::parse(format!("graphml at byte {pos}"), err))?;
        let key = String::from_utf8_lossy(a.key.as_ref()).into_owned();
        let value = a
            .unescape_value()
            .map_err(|err| Error::parse(format!("graphml at byte {pos}"), err))?
            .into_owned();
        map.insert(key, value);
    }
    Ok(map)
}

fn required(map: &HashMap<String, String>, name: &str, element: &str, pos: u64) -> Result<String> {
    map.get(name).cloned().ok_or_else(|| {
        Error::parse(
            format!("graphml <{element}> at byte {pos}"),
            format!("missing attribute {name}"),
        )
    })
}

pub fn read_graphml(text: &str) -> Result<GraphmlDocument> {
    let mut reader = Reader::from_str(text);
    let mut keys: HashMap<String, KeyDecl> = HashMap::new();
    let mut graph_id = String::new();
    let mut graph_data: BTreeMap<String, String> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut current: Option<Element> = None;
    let mut data_key: Option<String> = None;
    let mut data_text = String::new();

    loop {
        let pos = reader.buffer_position();
        let ctx = |what: &str| format!("graphml {what} at byte {pos}");
        let event = reader.read_event().map_err(|e| Error::parse(ctx("document"), e))?;
        match event {
            Event::Start(e) | Event::Empty(e) => {
                let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                let a = attrs(&e, pos)?;
                match name.as_str() {
                    "key" => {
                        let id = required(&a, "id", "key", pos)?;
                        let kind = a
                            .get("attr.type")
                            .map(|t| {
                                ValueKind::from_name(t)
                                    .ok_or_else(|| Error::parse(ctx("<key>"), format!("unsupported attr.type {t}")))
                            })
                            .transpose()?
                            .unwrap_or(ValueKind::Text);
                        let attr_name = a.get("attr.name").cloned().unwrap_or_else(|| id.clone());
                        keys.insert(id, KeyDecl { name: attr_name, kind });
                    }
                    "graph" => {
                        graph_id = a.get("id").cloned().unwrap_or_default();
                        if a.get("edgedefault").is_some_and(|d| d != "directed") {
                            return Err(Error::parse(ctx("<graph>"), "only directed graphs are supported"));
                        }
                    }
                    "node" => {
                        let id = required(&a, "id", "node", pos)?;
                        current = Some(Element::Node(Vertex::new(id, "")));
                    }
                    "edge" => {
                        let id = required(&a, "id", "edge", pos)?;
                        let src = required(&a, "source", "edge", pos)?;
                        let dst = required(&a, "target", "edge", pos)?;
                        current = Some(Element::Edge(Edge::new(id, src, dst, "")));
                    }
                    "data" => {
                        data_key = Some(required(&a, "key", "data", pos)?);
                        data_text.clear();
                    }
                    _ => {}
                }
                if matches!(name.as_str(), "node" | "edge" | "data") && reader_is_empty_tag(text, pos) {
                    finish_element(
                        &name,
                        &mut current,
                        &mut data_key,
                        &mut data_text,
                        &keys,
                        &mut graph_data,
                        &mut vertices,
                        &mut edges,
                        pos,
                    )?;
                }
            }
            Event::Text(t) => {
                if data_key.is_some() {
                    let s = t.unescape().map_err(|e| Error::parse(ctx("text"), e))?;
                    data_text.push_str(&s);
                }
            }
            Event::CData(t) => {
                if data_key.is_some() {
                    data_text.push_str(&String::from_utf8_lossy(&t.into_inner()));
                }
            }
            Event::End(e) => {
                let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                finish_element(
                    &name,
                    &mut current,
                    &mut data_key,
                    &mut data_text,
                    &keys,
                    &mut graph_data,
                    &mut vertices,
                    &mut edges,
                    pos,
                )?;
            }
            Event::Eof => break,
            _ => {}
        }
    }

    let graph = PropertyGraph::new(vertices, edges)?;
    let pattern = graph_data
        .get(PATTERN_KEY)
        .map(|json| {
            let doc: QueryDoc = serde_json::from_str(json).map_err(|e| Error::parse("graphml vp.pattern", e))?;
            parse_pattern_query(&doc)
        })
        .transpose()?;
    let order = graph_data
        .get(ORDER_KEY)
        .map(|s| {
            s.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse("graphml vp.order", e))
        })
        .transpose()?;
    Ok(GraphmlDocument {
        id: graph_id,
        graph,
        pattern,
        order,
    })
}

// `Event::Empty` carries no matching End event; detect it from the source text.
fn reader_is_empty_tag(text: &str, start: u64) -> bool {
    let rest = &text[start as usize..];
    let end = rest.find('>').unwrap_or(rest.len());
    rest[..end].trim_end().ends_with('/')
}

#[allow(clippy::too_many_arguments)]
fn finish_element(
    name: &str,
    current: &mut Option<Element>,
    data_key: &mut Option<String>,
    data_text: &mut String,
    keys: &HashMap<String, KeyDecl>,
    graph_data: &mut BTreeMap<String, String>,
    vertices: &mut Vec<Vertex>,
    edges: &mut Vec<Edge>,
    pos: u64,
) -> Result<()> {
    match name {
        "data" => {
            let Some(key) = data_key.take() else {
                return Ok(());
            };
            let text = std::mem::take(data_text);
            match current {
                None => {
                    graph_data.insert(key, text);
                }
                Some(el) => {
                    let (label_key, label, props) = match el {
                        Element::Node(v) => (LABEL_V, &mut v.label, &mut v.props),
                        Element::Edge(e) => (LABEL_E, &mut e.label, &mut e.props),
                    };
                    if key == label_key || key == "label" {
                        *label = text;
                    } else {
                        let decl = keys.get(&key).ok_or_else(|| {
                            Error::parse(format!("graphml <data> at byte {pos}"), format!("undeclared key {key}"))
                        })?;
                        let value = PropertyValue::parse_as(decl.kind, &text).ok_or_else(|| {
                            Error::parse(
                                format!("graphml <data key=\"{key}\"> at byte {pos}"),
                                format!("cannot read {text:?} as {}", decl.kind.name()),
                            )
                        })?;
                        props.insert(decl.name.clone(), value);
                    }
                }
            }
        }
        "node" => {
            if let Some(Element::Node(v)) = current.take() {
                vertices.push(v);
            }
        }
        "edge" => {
            if let Some(Element::Edge(e)) = current.take() {
                edges.push(e);
            }
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Vertex};
    use crate::pattern::PatternBuilder;

    fn sample() -> PropertyGraph {
        PropertyGraph::new(
            vec![
                Vertex::new("p1", "person")
                    .with("gender", "male")
                    .with("age", 31)
                    .with("vip", true),
                Vertex::new("p2", "person").with("name", "A & <B>").with("score", 0.1),
                Vertex::new("u1", "university").with("age", "old"),
            ],
            vec![
                Edge::new("e1", "p1", "p2", "knows").with("since", 2010),
                Edge::new("e2", "p2", "u1", "studyAt"),
                Edge::new("e3", "p2", "u1", "studyAt").with("w", -2.5e-7),
            ],
        )
        .unwrap()
    }

    #[test]
    fn empty_graph() {
        let text = write_graphml(&PropertyGraph::empty(), "v", None);
        assert!(!text.contains("<node") && !text.contains("<edge "));
        let doc = read_graphml(&text).unwrap();
        assert!(doc.graph.is_empty());
    }

    #[test]
    fn round_trip_preserves_elements_and_kinds() {
        let g = sample();
        let text = write_graphml(&g, "g", None);
        let doc = read_graphml(&text).unwrap();
        assert_eq!(doc.graph, g);
        assert_eq!(doc.id, "g");
        // the same key name may carry two kinds
        assert!(text.contains("v.int.age") && text.contains("v.string.age"));
        assert_eq!(write_graphml(&doc.graph, "g", None), text);
    }

    #[test]
    fn metadata_round_trip() {
        let q = PatternBuilder::new("q")
            .node("p", "person")
            .node("f", "person")
            .node("c", "company")
            .edge("p", "f", "knows")
            .edge("f", "c", "workAt")
            .build()
            .unwrap();
        let text = write_graphml(
            &sample(),
            "v",
            Some(ViewMeta {
                pattern: &q,
                order: &[1, 0],
            }),
        );
        assert!(text.contains("<data key=\"vp.order\">1,0</data>"));
        let doc = read_graphml(&text).unwrap();
        assert_eq!(doc.pattern.unwrap(), q);
        assert_eq!(doc.order.unwrap(), vec![1, 0]);
    }

    #[test]
    fn foreign_empty_elements() {
        let text = r#"<?xml version="1.0"?>
<graphml><key id="k" for="node" attr.name="k" attr.type="int"/>
<graph id="x" edgedefault="directed"><node id="a"/><node id="b"><data key="k">4</data></node>
<edge id="e" source="a" target="b"/></graph></graphml>"#;
        let g = read_graphml(text).unwrap().graph;
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 1));
        assert_eq!(g.vertex(1).props["k"], PropertyValue::Int(4));
    }

    #[test]
    fn bad_value_reports_context() {
        let text = r#"<graphml><key id="k" for="node" attr.name="k" attr.type="int"/>
<graph id="x" edgedefault="directed"><node id="a"><data key="k">four</data></node></graph></graphml>"#;
        let err = read_graphml(text).unwrap_err().to_string();
        assert!(err.contains("four") && err.contains("byte"), "{err}");
    }
}
