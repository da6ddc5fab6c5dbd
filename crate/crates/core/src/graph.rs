//! Per-sentence candidate-segment graph: one node per analysis the segmenter
//! proposed, complete edge set labeled 1 (co-occurrence possible) or 2
//! (overlapping spans, conflicting). Nothing in this crate consumes the
//! edges beyond serialization and invariant checks, but they are
//! materialized for downstream use.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morph::{CngCode, MorphTag};
use crate::phonology::{normalize, GeminationRules, PhonemeString};

/// Identifier of one candidate segment within a sentence graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Half-open phoneme-offset interval into the normalized sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

impl From<(usize, usize)> for Span {
    fn from((start, end): (usize, usize)) -> Self {
        Span { start, end }
    }
}

impl From<Span> for (usize, usize) {
    fn from(s: Span) -> Self {
        (s.start, s.end)
    }
}

/// How a node came to exist: scraped from the segmenter, or synthesized by
/// one of the three modification passes.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    #[default]
    None,
    Causative,
    PreverbJoin,
    CompoundMerge,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::None => "none",
            Provenance::Causative => "causative",
            Provenance::PreverbJoin => "preverb_join",
            Provenance::CompoundMerge => "compound_merge",
        }
    }

    pub fn parse(s: &str) -> Option<Provenance> {
        match s {
            "none" => Some(Provenance::None),
            "causative" => Some(Provenance::Causative),
            "preverb_join" => Some(Provenance::PreverbJoin),
            "compound_merge" => Some(Provenance::CompoundMerge),
            _ => None,
        }
    }
}

/// One segmenter analysis with the full scraped attribute set, inflectional
/// and (when present) derivational.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSegment {
    pub id: NodeId,
    pub color_class: String,
    pub position: usize,
    pub chunk_no: usize,
    pub word: PhonemeString,
    pub lemma: PhonemeString,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub sense: BTreeSet<u32>,
    pub cng: CngCode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre_verb: Option<PhonemeString>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub morph: BTreeSet<MorphTag>,
    pub length_word: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub der_pre_verb: Option<PhonemeString>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub der_lemma: Option<PhonemeString>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub der_sense: BTreeSet<u32>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub der_morph: BTreeSet<MorphTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub der_cng: Option<CngCode>,
    pub char_pos: Span,
    #[serde(default, skip_serializing_if = "is_not_synthetic")]
    pub synthetic: Provenance,
}

fn is_not_synthetic(p: &Provenance) -> bool {
    *p == Provenance::None
}

impl CandidateSegment {
    /// Normalized copy; `length_word` is re-derived because dvitva collapse
    /// can shorten the word.
    pub fn normalized(&self, gemination: &GeminationRules) -> CandidateSegment {
        let n = |ps: &PhonemeString| normalize(ps, gemination);
        let word = n(&self.word);
        CandidateSegment {
            length_word: word.strip_boundaries().len(),
            word,
            lemma: n(&self.lemma),
            pre_verb: self.pre_verb.as_ref().map(&n),
            der_lemma: self.der_lemma.as_ref().map(&n),
            der_pre_verb: self.der_pre_verb.as_ref().map(&n),
            ..self.clone()
        }
    }

    /// Identity used by homonymy merging: every field except the node id and
    /// the two sense sets. Nodes that differ only in sense indices describe
    /// the same analysis of the same span.
    fn merge_key(&self) -> MergeKey {
        MergeKey {
            color_class: self.color_class.clone(),
            position: self.position,
            chunk_no: self.chunk_no,
            word: self.word.clone(),
            lemma: self.lemma.clone(),
            cng: self.cng,
            pre_verb: self.pre_verb.clone(),
            morph: self.morph.clone(),
            length_word: self.length_word,
            der_pre_verb: self.der_pre_verb.clone(),
            der_lemma: self.der_lemma.clone(),
            der_morph: self.der_morph.clone(),
            der_cng: self.der_cng,
            char_pos: self.char_pos,
            synthetic: self.synthetic,
        }
    }
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct MergeKey {
    color_class: String,
    position: usize,
    chunk_no: usize,
    word: PhonemeString,
    lemma: PhonemeString,
    cng: CngCode,
    pre_verb: Option<PhonemeString>,
    morph: BTreeSet<MorphTag>,
    length_word: usize,
    der_pre_verb: Option<PhonemeString>,
    der_lemma: Option<PhonemeString>,
    der_morph: BTreeSet<MorphTag>,
    der_cng: Option<CngCode>,
    char_pos: Span,
    synthetic: Provenance,
}

/// Edge label: 1 when the two nodes can co-exist in a solution, 2 when their
/// spans conflict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeLabel {
    Compatible,
    Conflict,
}

impl EdgeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeLabel::Compatible => "1",
            EdgeLabel::Conflict => "2",
        }
    }

    pub fn parse(s: &str) -> Option<EdgeLabel> {
        match s {
            "1" => Some(EdgeLabel::Compatible),
            "2" => Some(EdgeLabel::Conflict),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("duplicate node id {0}")]
    DuplicateNodeId(NodeId),
    #[error("node {id}: span [{start},{end}) out of range for sentence length {len}")]
    SpanOutOfRange {
        id: NodeId,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("node {id}: length_word {got} but word has {expected} phonemes")]
    BadLengthWord {
        id: NodeId,
        expected: usize,
        got: usize,
    },
    #[error("node {0}: synthetic insert requires a provenance other than none")]
    NotSynthetic(NodeId),
}

/// The conflict-labeled graph over one sentence's candidate segments.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SegGraph {
    nodes: BTreeMap<NodeId, CandidateSegment>,
    edges: BTreeMap<(NodeId, NodeId), EdgeLabel>,
}

fn edge_key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl SegGraph {
    /// Build the graph: validates ids and spans, then materializes the
    /// complete labeled edge set.
    pub fn build(
        segments: Vec<CandidateSegment>,
        sentence_len: usize,
    ) -> Result<SegGraph, GraphError> {
        let mut nodes = BTreeMap::new();
        for seg in segments {
            if seg.char_pos.is_empty() || seg.char_pos.end > sentence_len {
                return Err(GraphError::SpanOutOfRange {
                    id: seg.id,
                    start: seg.char_pos.start,
                    end: seg.char_pos.end,
                    len: sentence_len,
                });
            }
            let expected = seg.word.strip_boundaries().len();
            if seg.length_word != expected {
                return Err(GraphError::BadLengthWord {
                    id: seg.id,
                    expected,
                    got: seg.length_word,
                });
            }
            if nodes.insert(seg.id, seg.clone()).is_some() {
                return Err(GraphError::DuplicateNodeId(seg.id));
            }
        }
        let mut g = SegGraph {
            nodes,
            edges: BTreeMap::new(),
        };
        g.edges = g.derive_edges();
        Ok(g)
    }

    /// Assemble from already-validated parts (deserialization path); edges
    /// are taken as stored, not recomputed.
    pub fn from_parts(
        nodes: BTreeMap<NodeId, CandidateSegment>,
        edges: BTreeMap<(NodeId, NodeId), EdgeLabel>,
    ) -> SegGraph {
        SegGraph { nodes, edges }
    }

    fn derive_edges(&self) -> BTreeMap<(NodeId, NodeId), EdgeLabel> {
        let ids: Vec<NodeId> = self.nodes.keys().copied().collect();
        let mut edges = BTreeMap::new();
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                let label = if self.nodes[&a].char_pos.overlaps(&self.nodes[&b].char_pos) {
                    EdgeLabel::Conflict
                } else {
                    EdgeLabel::Compatible
                };
                edges.insert(edge_key(a, b), label);
            }
        }
        edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &CandidateSegment> {
        self.nodes.values()
    }

    pub fn node(&self, id: NodeId) -> Option<&CandidateSegment> {
        self.nodes.get(&id)
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, EdgeLabel)> + '_ {
        self.edges.iter().map(|(&(a, b), &l)| (a, b, l))
    }

    pub fn edge_label(&self, a: NodeId, b: NodeId) -> Option<EdgeLabel> {
        self.edges.get(&edge_key(a, b)).copied()
    }

    pub fn next_id(&self) -> NodeId {
        NodeId(self.nodes.keys().last().map_or(0, |id| id.0 + 1))
    }

    /// Collapse nodes identical in everything but sense indices into one
    /// node carrying the union of the indices (both inflectional and
    /// derivational). Node count never increases; spans are preserved.
    pub fn merge_homonyms(&self) -> SegGraph {
        let mut groups: BTreeMap<MergeKey, Vec<NodeId>> = BTreeMap::new();
        for (id, seg) in &self.nodes {
            groups.entry(seg.merge_key()).or_default().push(*id);
        }
        let mut nodes = BTreeMap::new();
        for (_, ids) in groups {
            let keep = *ids.iter().min().unwrap();
            let mut node = self.nodes[&keep].clone();
            for id in &ids {
                let other = &self.nodes[id];
                node.sense.extend(other.sense.iter().copied());
                node.der_sense.extend(other.der_sense.iter().copied());
            }
            nodes.insert(keep, node);
        }
        let mut g = SegGraph {
            nodes,
            edges: BTreeMap::new(),
        };
        g.edges = g.derive_edges();
        g
    }

    /// Insert a synthesized node, connecting it to every existing node under
    /// the overlap rule. Existing nodes and edges are untouched.
    pub fn add_synthetic_node(&self, node: CandidateSegment) -> Result<SegGraph, GraphError> {
        if node.synthetic == Provenance::None {
            return Err(GraphError::NotSynthetic(node.id));
        }
        if self.nodes.contains_key(&node.id) {
            return Err(GraphError::DuplicateNodeId(node.id));
        }
        let mut g = self.clone();
        for (&other, seg) in &self.nodes {
            let label = if node.char_pos.overlaps(&seg.char_pos) {
                EdgeLabel::Conflict
            } else {
                EdgeLabel::Compatible
            };
            g.edges.insert(edge_key(node.id, other), label);
        }
        g.nodes.insert(node.id, node);
        Ok(g)
    }

    /// Normalized copy of the whole graph (the segments; edges recomputed,
    /// though spans do not change under normalization).
    pub fn normalized(&self, gemination: &GeminationRules) -> SegGraph {
        let mut g = SegGraph {
            nodes: self
                .nodes
                .iter()
                .map(|(id, seg)| (*id, seg.normalized(gemination)))
                .collect(),
            edges: BTreeMap::new(),
        };
        g.edges = g.derive_edges();
        g
    }
}

/// One line of the analyses file: every candidate segment the segmenter
/// produced for a sentence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisSentence {
    pub sent_id: u64,
    pub segments: Vec<CandidateSegment>,
}

#[derive(Debug, Error)]
pub enum AnalysesError {
    #[error("line {line}: not an analyses record: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("duplicate analyses for sent_id {0}")]
    DuplicateId(u64),
    #[error("sentence {sent_id}: {source}")]
    Segment {
        sent_id: u64,
        #[source]
        source: GraphError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Read `analyses.jsonl`; segment-level structural checks (distinct ids,
/// span sanity against the word, length_word consistency) happen later at
/// graph build, but per-sentence id uniqueness is enforced here.
pub fn read_analyses<R: BufRead>(
    reader: R,
) -> Result<BTreeMap<u64, Vec<CandidateSegment>>, AnalysesError> {
    let mut out = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: AnalysisSentence =
            serde_json::from_str(&line).map_err(|source| AnalysesError::Json {
                line: i + 1,
                source,
            })?;
        if out.insert(rec.sent_id, rec.segments).is_some() {
            return Err(AnalysesError::DuplicateId(rec.sent_id));
        }
    }
    Ok(out)
}
