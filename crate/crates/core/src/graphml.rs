//! GraphML serialization of segment graphs: one `<node>` per candidate
//! segment, one `<data>` element per attribute, `<edge>` elements carrying
//! the 1/2 conflict label. Reading back a written document reproduces the
//! graph field for field.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use quick_xml::events::Event;
use quick_xml::Reader;
use thiserror::Error;

use crate::graph::{CandidateSegment, EdgeLabel, NodeId, Provenance, SegGraph, Span};
use crate::morph::{CngCode, MorphTag};
use crate::phonology::{parse_iast, PhonemeString};

const NODE_KEYS: &[&str] = &[
    "color_class",
    "position",
    "chunk_no",
    "word",
    "lemma",
    "sense",
    "cng",
    "pre_verb",
    "morph",
    "length_word",
    "der_pre_verb",
    "der_lemma",
    "der_sense",
    "der_morph",
    "der_cng",
    "char_pos",
    "synthetic",
];

#[derive(Debug, Error)]
pub enum GraphmlError {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("node {node}: missing attribute {attr:?}")]
    MissingAttribute { node: String, attr: &'static str },
    #[error("xml: {0}")]
    Xml(#[from] quick_xml::Error),
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(ch),
        }
    }
    out
}

fn join_senses(senses: &BTreeSet<u32>) -> String {
    senses
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn join_morphs(morphs: &BTreeSet<MorphTag>) -> String {
    morphs
        .iter()
        .map(|m| m.as_str().to_string())
        .collect::<Vec<_>>()
        .join("|")
}

/// Serialize a graph as a GraphML document.
pub fn write_graphml(g: &SegGraph) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    for key in NODE_KEYS {
        let _ = writeln!(
            out,
            "  <key id=\"{key}\" for=\"node\" attr.name=\"{key}\" attr.type=\"string\"/>"
        );
    }
    out.push_str("  <key id=\"label\" for=\"edge\" attr.name=\"label\" attr.type=\"string\"/>\n");
    out.push_str("  <graph edgedefault=\"undirected\">\n");
    for node in g.nodes() {
        let _ = writeln!(out, "    <node id=\"n{}\">", node.id.0);
        let mut data = |key: &str, value: &str| {
            let _ = writeln!(out, "      <data key=\"{key}\">{}</data>", escape(value));
        };
        data("color_class", &node.color_class);
        data("position", &node.position.to_string());
        data("chunk_no", &node.chunk_no.to_string());
        data("word", &node.word.render());
        data("lemma", &node.lemma.render());
        data("sense", &join_senses(&node.sense));
        data("cng", &node.cng.to_string());
        if let Some(pv) = &node.pre_verb {
            data("pre_verb", &pv.render());
        }
        data("morph", &join_morphs(&node.morph));
        data("length_word", &node.length_word.to_string());
        if let Some(pv) = &node.der_pre_verb {
            data("der_pre_verb", &pv.render());
        }
        if let Some(l) = &node.der_lemma {
            data("der_lemma", &l.render());
        }
        data("der_sense", &join_senses(&node.der_sense));
        data("der_morph", &join_morphs(&node.der_morph));
        if let Some(c) = &node.der_cng {
            data("der_cng", &c.to_string());
        }
        data(
            "char_pos",
            &format!("{},{}", node.char_pos.start, node.char_pos.end),
        );
        data("synthetic", node.synthetic.as_str());
        out.push_str("    </node>\n");
    }
    for (a, b, label) in g.edges() {
        let _ = writeln!(
            out,
            "    <edge source=\"n{}\" target=\"n{}\">\n      <data key=\"label\">{}</data>\n    </edge>",
            a.0,
            b.0,
            label.as_str()
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn malformed(msg: impl ToString) -> GraphmlError {
    GraphmlError::MalformedDocument(msg.to_string())
}

fn parse_node_id(raw: &str) -> Result<NodeId, GraphmlError> {
    let digits = raw.strip_prefix('n').unwrap_or(raw);
    digits
        .parse::<u32>()
        .map(NodeId)
        .map_err(|_| malformed(format!("bad node id {raw:?}")))
}

fn parse_senses(raw: &str) -> Result<BTreeSet<u32>, GraphmlError> {
    raw.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| malformed(format!("bad sense index {s:?}")))
        })
        .collect()
}

fn parse_morphs(raw: &str) -> BTreeSet<MorphTag> {
    raw.split('|')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(MorphTag::new)
        .collect()
}

fn parse_ps(raw: &str) -> Result<PhonemeString, GraphmlError> {
    parse_iast(raw).map_err(|e| malformed(e.to_string()))
}

fn segment_from_attrs(
    node_label: &str,
    id: NodeId,
    attrs: &BTreeMap<String, String>,
) -> Result<CandidateSegment, GraphmlError> {
    let require = |attr: &'static str| {
        attrs.get(attr).ok_or(GraphmlError::MissingAttribute {
            node: node_label.to_string(),
            attr,
        })
    };
    let int = |attr: &'static str| -> Result<usize, GraphmlError> {
        require(attr)?
            .parse::<usize>()
            .map_err(|_| malformed(format!("{node_label}: bad integer in {attr}")))
    };
    let char_pos = {
        let raw = require("char_pos")?;
        let (s, e) = raw
            .split_once(',')
            .ok_or_else(|| malformed(format!("{node_label}: char_pos {raw:?}")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| malformed(format!("{node_label}: char_pos {raw:?}")))
        };
        Span::new(parse(s)?, parse(e)?)
    };
    Ok(CandidateSegment {
        id,
        color_class: require("color_class")?.clone(),
        position: int("position")?,
        chunk_no: int("chunk_no")?,
        word: parse_ps(require("word")?)?,
        lemma: parse_ps(require("lemma")?)?,
        sense: attrs
            .get("sense")
            .map(|s| parse_senses(s))
            .transpose()?
            .unwrap_or_default(),
        cng: CngCode(
            require("cng")?
                .parse::<i32>()
                .map_err(|_| malformed(format!("{node_label}: bad cng")))?,
        ),
        pre_verb: attrs.get("pre_verb").map(|s| parse_ps(s)).transpose()?,
        morph: attrs
            .get("morph")
            .map(|s| parse_morphs(s))
            .unwrap_or_default(),
        length_word: int("length_word")?,
        der_pre_verb: attrs.get("der_pre_verb").map(|s| parse_ps(s)).transpose()?,
        der_lemma: attrs.get("der_lemma").map(|s| parse_ps(s)).transpose()?,
        der_sense: attrs
            .get("der_sense")
            .map(|s| parse_senses(s))
            .transpose()?
            .unwrap_or_default(),
        der_morph: attrs
            .get("der_morph")
            .map(|s| parse_morphs(s))
            .unwrap_or_default(),
        der_cng: attrs
            .get("der_cng")
            .map(|s| {
                s.parse::<i32>()
                    .map(CngCode)
                    .map_err(|_| malformed(format!("{node_label}: bad der_cng")))
            })
            .transpose()?,
        char_pos,
        synthetic: match attrs.get("synthetic") {
            Some(s) => Provenance::parse(s)
                .ok_or_else(|| malformed(format!("{node_label}: bad synthetic {s:?}")))?,
            None => Provenance::None,
        },
    })
}

struct OpenNode {
    raw_id: String,
    id: NodeId,
    attrs: BTreeMap<String, String>,
}

fn get_attr(
    e: &quick_xml::events::BytesStart<'_>,
    name: &str,
) -> Result<Option<String>, GraphmlError> {
    Ok(e.try_get_attribute(name)
        .map_err(|err| malformed(err.to_string()))?
        .map(|a| a.unescape_value().map(|v| v.into_owned()))
        .transpose()?)
}

fn insert_node(
    nodes: &mut BTreeMap<NodeId, CandidateSegment>,
    seg: CandidateSegment,
) -> Result<(), GraphmlError> {
    let id = seg.id;
    if nodes.insert(id, seg).is_some() {
        return Err(malformed(format!("duplicate node id n{}", id.0)));
    }
    Ok(())
}

fn store_data(
    open_node: &mut Option<OpenNode>,
    open_edge: &mut Option<(NodeId, NodeId, Option<EdgeLabel>)>,
    key: &str,
    text: &str,
) -> Result<(), GraphmlError> {
    if let Some(node) = open_node.as_mut() {
        node.attrs.insert(key.to_string(), text.to_string());
    } else if let Some((a, b, label)) = open_edge.as_mut() {
        if key == "label" {
            *label = Some(
                EdgeLabel::parse(text.trim())
                    .ok_or_else(|| malformed(format!("edge n{}-n{}: label {text:?}", a.0, b.0)))?,
            );
        }
    }
    // data outside node/edge (graph-level metadata) is ignored
    Ok(())
}

/// Parse a GraphML document back into a graph. Nodes and edges are taken as
/// stored; the overlap rule is not re-derived.
pub fn read_graphml(doc: &str) -> Result<SegGraph, GraphmlError> {
    let mut reader = Reader::from_str(doc);
    reader.config_mut().trim_text(true);

    let mut nodes: BTreeMap<NodeId, CandidateSegment> = BTreeMap::new();
    let mut edges: BTreeMap<(NodeId, NodeId), EdgeLabel> = BTreeMap::new();
    let mut open_node: Option<OpenNode> = None;
    let mut open_edge: Option<(NodeId, NodeId, Option<EdgeLabel>)> = None;
    let mut open_data_key: Option<String> = None;
    let mut data_text = String::new();

    loop {
        match reader.read_event().map_err(GraphmlError::Xml)? {
            Event::Start(e) if e.name().as_ref() == b"node" => {
                let raw_id = get_attr(&e, "id")?.ok_or_else(|| malformed("node without id"))?;
                let id = parse_node_id(&raw_id)?;
                open_node = Some(OpenNode {
                    raw_id,
                    id,
                    attrs: BTreeMap::new(),
                });
            }
            Event::Empty(e) if e.name().as_ref() == b"node" => {
                // a childless node can never satisfy the required attributes
                let raw_id = get_attr(&e, "id")?.ok_or_else(|| malformed("node without id"))?;
                let id = parse_node_id(&raw_id)?;
                let seg = segment_from_attrs(&raw_id, id, &BTreeMap::new())?;
                insert_node(&mut nodes, seg)?;
            }
            Event::End(e) if e.name().as_ref() == b"node" => {
                let node = open_node
                    .take()
                    .ok_or_else(|| malformed("unmatched </node>"))?;
                let seg = segment_from_attrs(&node.raw_id, node.id, &node.attrs)?;
                insert_node(&mut nodes, seg)?;
            }
            Event::Start(e) if e.name().as_ref() == b"edge" => {
                let source =
                    get_attr(&e, "source")?.ok_or_else(|| malformed("edge without source"))?;
                let target =
                    get_attr(&e, "target")?.ok_or_else(|| malformed("edge without target"))?;
                open_edge = Some((parse_node_id(&source)?, parse_node_id(&target)?, None));
            }
            Event::Empty(e) if e.name().as_ref() == b"edge" => {
                // a self-closed edge carries no label element
                let source =
                    get_attr(&e, "source")?.ok_or_else(|| malformed("edge without source"))?;
                let target =
                    get_attr(&e, "target")?.ok_or_else(|| malformed("edge without target"))?;
                return Err(GraphmlError::MissingAttribute {
                    node: format!("edge {source}-{target}"),
                    attr: "label",
                });
            }
            Event::End(e) if e.name().as_ref() == b"edge" => {
                let (a, b, label) = open_edge
                    .take()
                    .ok_or_else(|| malformed("unmatched </edge>"))?;
                let label = label.ok_or(GraphmlError::MissingAttribute {
                    node: format!("edge n{}-n{}", a.0, b.0),
                    attr: "label",
                })?;
                let key = if a <= b { (a, b) } else { (b, a) };
                edges.insert(key, label);
            }
            Event::Start(e) if e.name().as_ref() == b"data" => {
                open_data_key = get_attr(&e, "key")?;
                data_text.clear();
            }
            Event::Empty(e) if e.name().as_ref() == b"data" => {
                if let Some(key) = get_attr(&e, "key")? {
                    store_data(&mut open_node, &mut open_edge, &key, "")?;
                }
            }
            Event::Text(t) => {
                if open_data_key.is_some() {
                    data_text.push_str(&t.xml_content().map_err(|e| malformed(e.to_string()))?);
                }
            }
            Event::End(e) if e.name().as_ref() == b"data" => {
                if let Some(key) = open_data_key.take() {
                    let text = std::mem::take(&mut data_text);
                    store_data(&mut open_node, &mut open_edge, &key, &text)?;
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if open_node.is_some() || open_edge.is_some() {
        return Err(malformed("document ended inside an element"));
    }
    Ok(SegGraph::from_parts(nodes, edges))
}
