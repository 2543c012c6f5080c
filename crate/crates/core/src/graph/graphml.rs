use std::collections::BTreeMap;
use std::fmt::Write as _;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{committer_node_id, list_node_id, CommGraph, CommitterNode, Edge, GraphError};

const HEADER: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<graphml xmlns="http://graphml.graphdrawing.org/xmlns" xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" xsi:schemaLocation="http://graphml.graphdrawing.org/xmlns http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd">
  <key id="type" for="node" attr.name="type" attr.type="string"/>
  <key id="label" for="node" attr.name="label" attr.type="string"/>
  <key id="personality_cluster" for="node" attr.name="personality_cluster" attr.type="int"/>
  <key id="technical_cluster" for="node" attr.name="technical_cluster" attr.type="int"/>
  <key id="total_messages" for="node" attr.name="total_messages" attr.type="long"/>
  <key id="weight" for="edge" attr.name="weight" attr.type="long"/>
  <graph id="comm" edgedefault="undirected">
"#;

fn esc(s: &str) -> String {
    quick_xml::escape::escape(s).into_owned()
}

/// GraphML 1.0 document. Nodes are sorted by id (committers then lists),
/// edges by (source, target), so identical graphs give identical bytes.
pub fn export_graphml(g: &CommGraph) -> String {
    let mut out = String::from(HEADER);
    let mut nodes: Vec<(String, String)> = Vec::new();
    for c in &g.committers {
        let mut body = format!(
            "<data key=\"type\">committer</data><data key=\"label\">{}</data>",
            esc(&c.identity_id)
        );
        if let Some(p) = c.personality_cluster {
            write!(body, "<data key=\"personality_cluster\">{p}</data>").unwrap();
        }
        if let Some(t) = c.technical_cluster {
            write!(body, "<data key=\"technical_cluster\">{t}</data>").unwrap();
        }
        write!(body, "<data key=\"total_messages\">{}</data>", c.total_messages).unwrap();
        nodes.push((committer_node_id(&c.identity_id), body));
    }
    for l in &g.lists {
        nodes.push((
            list_node_id(l),
            format!("<data key=\"type\">list</data><data key=\"label\">{}</data>", esc(l)),
        ));
    }
    nodes.sort();
    for (id, body) in nodes {
        writeln!(out, "    <node id=\"{}\">{body}</node>", esc(&id)).unwrap();
    }
    let mut edges: Vec<(String, String, u64)> = g
        .edges
        .iter()
        .map(|e| (committer_node_id(&e.identity_id), list_node_id(&e.list_name), e.weight))
        .collect();
    edges.sort();
    for (s, t, w) in edges {
        writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\"><data key=\"weight\">{w}</data></edge>",
            esc(&s),
            esc(&t)
        )
        .unwrap();
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn attr(e: &BytesStart<'_>, name: &str) -> Result<Option<String>, GraphError> {
    for a in e.attributes() {
        let a = a.map_err(|err| GraphError::Xml(err.to_string()))?;
        if a.key.as_ref() == name.as_bytes() {
            let v = a.unescape_value().map_err(|err| GraphError::Xml(err.to_string()))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

#[derive(Default)]
struct Pending {
    node_id: Option<String>,
    edge: Option<(String, String)>,
    data: BTreeMap<String, String>,
}

/// Reads back a document produced by [`export_graphml`].
pub fn parse_graphml(xml: &str) -> Result<CommGraph, GraphError> {
    let mut reader = Reader::from_str(xml);
    reader.config_mut().trim_text(true);
    let mut keys: BTreeMap<String, String> = BTreeMap::new();
    let mut nodes: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut raw_edges: Vec<(String, String, BTreeMap<String, String>)> = Vec::new();
    let mut pending = Pending::default();
    let mut data_key: Option<String> = None;
    let mut saw_root = false;
    loop {
        let ev = reader.read_event().map_err(|e| GraphError::Xml(e.to_string()))?;
        match ev {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(ev, Event::Empty(_));
                match e.name().as_ref() {
                    b"graphml" => saw_root = true,
                    b"key" => {
                        let id = attr(e, "id")?.ok_or_else(|| GraphError::Structure("key without id".into()))?;
                        let name = attr(e, "attr.name")?.unwrap_or_else(|| id.clone());
                        keys.insert(id, name);
                    }
                    b"node" => {
                        let id = attr(e, "id")?.ok_or_else(|| GraphError::Structure("node without id".into()))?;
                        if empty {
                            nodes.insert(id, BTreeMap::new());
                        } else {
                            pending = Pending { node_id: Some(id), ..Default::default() };
                        }
                    }
                    b"edge" => {
                        let s = attr(e, "source")?.ok_or_else(|| GraphError::Structure("edge without source".into()))?;
                        let t = attr(e, "target")?.ok_or_else(|| GraphError::Structure("edge without target".into()))?;
                        if empty {
                            raw_edges.push((s, t, BTreeMap::new()));
                        } else {
                            pending = Pending { edge: Some((s, t)), ..Default::default() };
                        }
                    }
                    b"data" => {
                        let k = attr(e, "key")?.ok_or_else(|| GraphError::Structure("data without key".into()))?;
                        if !keys.contains_key(&k) {
                            return Err(GraphError::Structure(format!("undeclared key {k:?}")));
                        }
                        data_key = (!empty).then_some(k);
                    }
                    _ => {}
                }
            }
            Event::Text(t) => {
                if let Some(k) = &data_key {
                    let v = t.unescape().map_err(|e| GraphError::Xml(e.to_string()))?;
                    pending.data.insert(keys[k].clone(), v.into_owned());
                }
            }
            Event::End(e) => match e.name().as_ref() {
                b"data" => {
                    if let Some(k) = data_key.take() {
                        pending.data.entry(keys[&k].clone()).or_default();
                    }
                }
                b"node" => {
                    let p = std::mem::take(&mut pending);
                    nodes.insert(p.node_id.unwrap_or_default(), p.data);
                }
                b"edge" => {
                    let p = std::mem::take(&mut pending);
                    let (s, t) = p.edge.unwrap_or_default();
                    raw_edges.push((s, t, p.data));
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }
    if !saw_root {
        return Err(GraphError::Structure("missing <graphml> root".into()));
    }

    let int = |v: Option<&String>, what: &str| -> Result<Option<u64>, GraphError> {
        v.map(|s| s.parse::<u64>().map_err(|_| GraphError::Structure(format!("bad {what}: {s:?}"))))
            .transpose()
    };
    let mut g = CommGraph::default();
    let mut label_of: BTreeMap<String, (bool, String)> = BTreeMap::new();
    for (id, data) in &nodes {
        let label = data.get("label").cloned().unwrap_or_else(|| id.clone());
        match data.get("type").map(String::as_str) {
            Some("committer") => {
                g.committers.push(CommitterNode {
                    identity_id: label.clone(),
                    personality_cluster: int(data.get("personality_cluster"), "personality_cluster")?.map(|x| x as usize),
                    technical_cluster: int(data.get("technical_cluster"), "technical_cluster")?.map(|x| x as usize),
                    total_messages: int(data.get("total_messages"), "total_messages")?.unwrap_or(0),
                });
                label_of.insert(id.clone(), (true, label));
            }
            Some("list") => {
                g.lists.push(label.clone());
                label_of.insert(id.clone(), (false, label));
            }
            other => return Err(GraphError::Structure(format!("node {id:?} has type {other:?}"))),
        }
    }
    for (s, t, data) in raw_edges {
        let (Some((true, c)), Some((false, l))) = (label_of.get(&s), label_of.get(&t)) else {
            return Err(GraphError::Structure(format!("edge {s:?} -- {t:?} is not committer -- list")));
        };
        let weight = int(data.get("weight"), "weight")?.unwrap_or(1);
        g.edges.push(Edge { identity_id: c.clone(), list_name: l.clone(), weight });
    }
    g.committers.sort_by(|a, b| a.identity_id.cmp(&b.identity_id));
    g.lists.sort();
    g.edges.sort();
    Ok(g)
}
