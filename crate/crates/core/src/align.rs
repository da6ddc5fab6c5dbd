//! Per-sentence alignment: four matching stages, three graph modifications
//! for the unmatched remainder, a 4-way categorization of the outcome, and
//! diagnostic codes for the known failure shapes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::GoldRecord;
use crate::graph::{CandidateSegment, NodeId, Provenance, SegGraph};
use crate::morph::{codes_of, is_derivational, tags_of, CngCode, CngTable, MorphTag};
use crate::partition::partition_ranges;
use crate::phonology::{apply_preverb, vowel_sandhi_join, Phoneme, PhonemeString};
use crate::rules::RuleSet;

const INDECLINABLE_TAG: &str = "ind.";
const MAX_CHAINS_PER_CHUNK: usize = 4096;

/// Which comparison first matched a slot: the four matching stages, or the
/// modification that synthesized the matched node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MatchStage {
    LemmaCng,
    DerivedStem,
    PronounTable,
    IicSegment,
    CausativePair,
    PreverbJoin,
    CompoundMerge,
}

impl MatchStage {
    fn from_provenance(p: Provenance) -> Option<MatchStage> {
        match p {
            Provenance::None => None,
            Provenance::Causative => Some(MatchStage::CausativePair),
            Provenance::PreverbJoin => Some(MatchStage::PreverbJoin),
            Provenance::CompoundMerge => Some(MatchStage::CompoundMerge),
        }
    }
}

/// Parallel nodes found for one (chunk, lemma occurrence) slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchSet {
    pub chunk: usize,
    pub lemma_index: usize,
    pub lemma: PhonemeString,
    pub stage: Option<MatchStage>,
    pub nodes: BTreeSet<NodeId>,
}

/// Alignment outcome class, 1 through 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Category(pub u8);

/// Category from match-set cardinalities alone: 1 all-unique, 2 some
/// multiple, 3 some missing, 4 both.
pub fn categorize(sets: &[MatchSet]) -> Category {
    let any_empty = sets.iter().any(|s| s.nodes.is_empty());
    let any_multi = sets.iter().any(|s| s.nodes.len() > 1);
    Category(match (any_empty, any_multi) {
        (false, false) => 1,
        (false, true) => 2,
        (true, false) => 3,
        (true, true) => 4,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DiagnosticCode {
    CngManyToOne,
    DerivInflMismatch,
    MultiCompoundSplit,
    UnanalyzedWord,
    SecondaryDerivative,
    IndeclinableClass,
    IicPfpMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub detail: String,
}

/// Lookup tables driving the modification passes.
#[derive(Debug, Clone, Default)]
pub struct ModificationTables {
    /// joined lemma -> base lemma, e.g. pūjay -> pūj
    pub causative_pairs: BTreeMap<PhonemeString, PhonemeString>,
    /// gold-corpus pronoun stem -> segmenter pronoun stem, e.g. tvad -> yuṣmad
    pub pronoun_map: BTreeMap<PhonemeString, PhonemeString>,
}

/// The per-sentence output row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub sent_id: u64,
    pub category_before: Category,
    pub category_after: Category,
    pub match_sets: Vec<MatchSet>,
    pub synthesized: Vec<NodeId>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Result plus the (possibly modified) graph it was computed against.
#[derive(Debug, Clone)]
pub struct AlignedSentence {
    pub result: AlignmentResult,
    pub graph: SegGraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModKind {
    Causative,
    PreverbJoin,
    CompoundMerge,
}

#[derive(Debug, Clone)]
pub struct AlignOptions {
    pub max_components: usize,
    pub mod_order: Vec<ModKind>,
}

impl Default for AlignOptions {
    fn default() -> Self {
        AlignOptions {
            max_components: crate::partition::DEFAULT_COMPONENT_CAP,
            mod_order: vec![
                ModKind::Causative,
                ModKind::PreverbJoin,
                ModKind::CompoundMerge,
            ],
        }
    }
}

fn lemma_eq(a: &PhonemeString, b: &PhonemeString) -> bool {
    a.strip_boundaries() == b.strip_boundaries()
}

fn cng_compatible(
    node_cng: CngCode,
    morphs: &BTreeSet<MorphTag>,
    gold: CngCode,
    table: &CngTable,
) -> bool {
    node_cng == gold || morphs.iter().any(|t| codes_of(t, table).contains(&gold))
}

fn match_slot(
    lemma: &PhonemeString,
    code: CngCode,
    candidates: &[&CandidateSegment],
    tables: &ModificationTables,
    cng: &CngTable,
) -> (Option<MatchStage>, BTreeSet<NodeId>) {
    // stage 1: lemma plus CNG compatibility
    let hits: BTreeSet<NodeId> = candidates
        .iter()
        .filter(|n| lemma_eq(&n.lemma, lemma) && cng_compatible(n.cng, &n.morph, code, cng))
        .map(|n| n.id)
        .collect();
    if !hits.is_empty() {
        return (Some(MatchStage::LemmaCng), hits);
    }
    // stage 2: derived stem
    let hits: BTreeSet<NodeId> = candidates
        .iter()
        .filter(|n| {
            n.der_lemma.as_ref().is_some_and(|dl| lemma_eq(dl, lemma))
                && (n.der_cng == Some(code)
                    || n.der_morph.iter().any(|t| codes_of(t, cng).contains(&code)))
        })
        .map(|n| n.id)
        .collect();
    if !hits.is_empty() {
        return (Some(MatchStage::DerivedStem), hits);
    }
    // stage 3: pronoun stem conventions, table lookup first
    if let Some(mapped) = tables.pronoun_map.get(&lemma.strip_boundaries()) {
        let hits: BTreeSet<NodeId> = candidates
            .iter()
            .filter(|n| lemma_eq(&n.lemma, mapped) && cng_compatible(n.cng, &n.morph, code, cng))
            .map(|n| n.id)
            .collect();
        if !hits.is_empty() {
            return (Some(MatchStage::PronounTable), hits);
        }
    }
    // stage 4: the gold corpus stores only the split point for compound
    // members, so compare the segment surface, ignoring the lemma
    let hits: BTreeSet<NodeId> = candidates
        .iter()
        .filter(|n| n.word.strip_boundaries() == lemma.strip_boundaries())
        .map(|n| n.id)
        .collect();
    if !hits.is_empty() {
        return (Some(MatchStage::IicSegment), hits);
    }
    (None, BTreeSet::new())
}

/// Run the four matching stages, first match wins, for every lemma slot of
/// the sentence. Candidates are the graph nodes of the slot's chunk.
pub fn match_lemma(
    rec: &GoldRecord,
    g: &SegGraph,
    tables: &ModificationTables,
    cng: &CngTable,
) -> Vec<MatchSet> {
    let mut by_chunk: BTreeMap<usize, Vec<&CandidateSegment>> = BTreeMap::new();
    for node in g.nodes() {
        by_chunk.entry(node.chunk_no).or_default().push(node);
    }
    let empty = Vec::new();
    rec.lemma_slots()
        .map(|(ci, li, lemma, code)| {
            let candidates = by_chunk.get(&ci).unwrap_or(&empty);
            let (stage, nodes) = match_slot(lemma, code, candidates, tables, cng);
            let stage = stage.map(|s| stage_label(s, &nodes, g));
            MatchSet {
                chunk: ci,
                lemma_index: li,
                lemma: lemma.clone(),
                stage,
                nodes,
            }
        })
        .collect()
}

/// When every matched node was synthesized, report the synthesis provenance
/// instead of the comparison that happened to hit.
fn stage_label(found: MatchStage, nodes: &BTreeSet<NodeId>, g: &SegGraph) -> MatchStage {
    let mut provenances: BTreeSet<Provenance> = BTreeSet::new();
    for id in nodes {
        match g.node(*id) {
            Some(n) if n.synthetic != Provenance::None => {
                provenances.insert(n.synthetic);
            }
            _ => return found,
        }
    }
    provenances
        .first()
        .and_then(|p| MatchStage::from_provenance(*p))
        .unwrap_or(found)
}

fn unmatched_by_chunk(sets: &[MatchSet]) -> BTreeMap<usize, BTreeSet<PhonemeString>> {
    let mut out: BTreeMap<usize, BTreeSet<PhonemeString>> = BTreeMap::new();
    for s in sets {
        if s.nodes.is_empty() {
            out.entry(s.chunk)
                .or_default()
                .insert(s.lemma.strip_boundaries());
        }
    }
    out
}

/// Causative modification: when an unmatched gold lemma has a causative-pair
/// entry whose base form appears as a node lemma in the same chunk, add a
/// synthetic node carrying the joined lemma.
pub fn modify_causative(
    g: &SegGraph,
    tables: &ModificationTables,
    unmatched: &BTreeMap<usize, BTreeSet<PhonemeString>>,
) -> SegGraph {
    let mut out = g.clone();
    let originals: Vec<CandidateSegment> = g.nodes().cloned().collect();
    for node in &originals {
        let Some(lemmas) = unmatched.get(&node.chunk_no) else {
            continue;
        };
        for lemma in lemmas {
            let Some(base) = tables.causative_pairs.get(lemma) else {
                continue;
            };
            if !lemma_eq(&node.lemma, base) {
                continue;
            }
            let mut synth = node.clone();
            synth.id = out.next_id();
            synth.lemma = lemma.clone();
            synth.synthetic = Provenance::Causative;
            out = out
                .add_synthetic_node(synth)
                .expect("fresh id cannot collide");
        }
    }
    out
}

/// Preverb modification: every node carrying a preverb grows a synthetic
/// twin whose lemma is the sandhied preverb+lemma; the derivational side is
/// joined the same way. Sandhi failures become diagnostics, never aborts.
pub fn modify_preverb_join(g: &SegGraph, rules: &RuleSet) -> (SegGraph, Vec<Diagnostic>) {
    let mut out = g.clone();
    let mut diags = Vec::new();
    let originals: Vec<CandidateSegment> = g.nodes().cloned().collect();
    for node in &originals {
        if node.pre_verb.is_none() && node.der_pre_verb.is_none() {
            continue;
        }
        let joined = node
            .pre_verb
            .as_ref()
            .map(|pv| apply_preverb(pv, &node.lemma, &rules.sandhi))
            .transpose();
        let der_joined = match (&node.der_pre_verb, &node.der_lemma) {
            (Some(pv), Some(dl)) => apply_preverb(pv, dl, &rules.sandhi).map(Some),
            _ => Ok(None),
        };
        match (joined, der_joined) {
            (Ok(lemma), Ok(der_lemma)) => {
                let mut synth = node.clone();
                synth.id = out.next_id();
                if let Some(l) = lemma {
                    synth.lemma = l;
                }
                if der_lemma.is_some() {
                    synth.der_lemma = der_lemma;
                }
                synth.pre_verb = None;
                synth.der_pre_verb = None;
                synth.synthetic = Provenance::PreverbJoin;
                out = out
                    .add_synthetic_node(synth)
                    .expect("fresh id cannot collide");
            }
            (Err(e), _) | (_, Err(e)) => diags.push(Diagnostic {
                code: DiagnosticCode::UnanalyzedWord,
                detail: format!("node {}: preverb join failed: {e}", node.id),
            }),
        }
    }
    (out, diags)
}

/// One candidate chain of adjacent (tiling) component nodes inside a chunk.
fn chunk_chains(nodes: &[&CandidateSegment], limit: usize) -> (Vec<Vec<NodeId>>, bool) {
    let mut sorted: Vec<&CandidateSegment> = nodes.to_vec();
    sorted.sort_by_key(|n| (n.char_pos.start, n.char_pos.end, n.id));
    let successors = |of: &CandidateSegment| {
        sorted
            .iter()
            .filter(|n| n.char_pos.start == of.char_pos.end)
            .copied()
            .collect::<Vec<_>>()
    };
    let has_predecessor =
        |of: &CandidateSegment| sorted.iter().any(|n| n.char_pos.end == of.char_pos.start);
    let mut chains = Vec::new();
    let mut truncated = false;
    let mut stack: Vec<(Vec<NodeId>, &CandidateSegment)> = sorted
        .iter()
        .filter(|n| !has_predecessor(n))
        .map(|n| (vec![n.id], *n))
        .collect();
    while let Some((path, last)) = stack.pop() {
        if chains.len() >= limit {
            truncated = true;
            break;
        }
        let next = successors(last);
        if next.is_empty() {
            if path.len() >= 2 {
                chains.push(path);
            }
            continue;
        }
        for n in next {
            let mut p = path.clone();
            p.push(n.id);
            stack.push((p, n));
        }
    }
    chains.sort();
    (chains, truncated)
}

/// Compound modification: group adjacent component nodes every contiguous
/// way, sandhi-join each group (surface forms plus the final member's
/// lemma), and synthesize a node wherever the join or the plain
/// concatenation reproduces an unmatched gold lemma. The synthesized word
/// keeps the components hyphen-separated.
pub fn modify_compound_merge(
    g: &SegGraph,
    rules: &RuleSet,
    unmatched: &BTreeMap<usize, BTreeSet<PhonemeString>>,
    max_components: usize,
) -> (SegGraph, Vec<Diagnostic>) {
    let mut out = g.clone();
    let mut diags = Vec::new();
    for (&chunk, lemmas) in unmatched {
        let nodes: Vec<&CandidateSegment> = g
            .nodes()
            .filter(|n| n.chunk_no == chunk && n.synthetic == Provenance::None)
            .collect();
        if nodes.len() < 2 {
            continue;
        }
        let (chains, truncated) = chunk_chains(&nodes, MAX_CHAINS_PER_CHUNK);
        if truncated {
            diags.push(Diagnostic {
                code: DiagnosticCode::UnanalyzedWord,
                detail: format!(
                    "chunk {chunk}: component lattice too dense, merge search truncated at {MAX_CHAINS_PER_CHUNK} chains"
                ),
            });
        }
        let mut seen_groups: BTreeSet<Vec<NodeId>> = BTreeSet::new();
        for chain in chains {
            let partitions = match partition_ranges(chain.len(), max_components) {
                Ok(p) => p,
                Err(e) => {
                    diags.push(Diagnostic {
                        code: DiagnosticCode::UnanalyzedWord,
                        detail: format!("chunk {chunk}: {e}"),
                    });
                    continue;
                }
            };
            for partition in partitions {
                for range in partition {
                    if range.len() < 2 {
                        continue;
                    }
                    let group: Vec<NodeId> = chain[range].to_vec();
                    if !seen_groups.insert(group.clone()) {
                        continue;
                    }
                    merge_group(&mut out, g, &group, lemmas, rules, chunk, &mut diags);
                }
            }
        }
    }
    (out, diags)
}

fn merge_group(
    out: &mut SegGraph,
    g: &SegGraph,
    group: &[NodeId],
    lemmas: &BTreeSet<PhonemeString>,
    rules: &RuleSet,
    chunk: usize,
    diags: &mut Vec<Diagnostic>,
) {
    let members: Vec<&CandidateSegment> = group.iter().map(|id| g.node(*id).unwrap()).collect();
    // surface forms for the non-final members, the lemma for the final one
    let parts: Vec<PhonemeString> = members
        .iter()
        .enumerate()
        .map(|(i, n)| {
            if i + 1 == members.len() {
                n.lemma.strip_boundaries()
            } else {
                n.word.strip_boundaries()
            }
        })
        .collect();
    let mut joined = parts[0].clone();
    for part in &parts[1..] {
        match vowel_sandhi_join(&joined, part, &rules.sandhi) {
            Ok(j) => joined = j,
            Err(e) => {
                diags.push(Diagnostic {
                    code: DiagnosticCode::UnanalyzedWord,
                    detail: format!("chunk {chunk}: compound join failed: {e}"),
                });
                return;
            }
        }
    }
    let mut concat = PhonemeString::default();
    for part in &parts {
        concat = concat.concat(part);
    }
    let matched = lemmas.iter().find(|l| **l == joined || **l == concat);
    let Some(lemma) = matched else {
        return;
    };
    let first = members.first().unwrap();
    let last = members.last().unwrap();
    let mut word = PhonemeString::default();
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            word.push(Phoneme::Hyphen);
        }
        word = word.concat(part);
    }
    let synth = CandidateSegment {
        id: out.next_id(),
        color_class: last.color_class.clone(),
        position: first.position,
        chunk_no: chunk,
        length_word: word.strip_boundaries().len(),
        word,
        lemma: lemma.clone(),
        sense: last.sense.clone(),
        cng: last.cng,
        pre_verb: None,
        morph: last.morph.clone(),
        der_pre_verb: None,
        der_lemma: last.der_lemma.clone(),
        der_sense: last.der_sense.clone(),
        der_morph: last.der_morph.clone(),
        der_cng: last.der_cng,
        char_pos: crate::graph::Span::new(first.char_pos.start, last.char_pos.end),
        synthetic: Provenance::CompoundMerge,
    };
    *out = out
        .add_synthetic_node(synth)
        .expect("fresh id cannot collide");
}

/// Full per-sentence alignment. Matching runs once; when lemmas are left
/// unmatched (categories 3 and 4) the modification passes run in the
/// configured order and matching is re-tried for the empty slots only, so
/// earlier matches are never lost.
pub fn align_sentence(
    rec: &GoldRecord,
    graph: &SegGraph,
    rules: &RuleSet,
    opts: &AlignOptions,
) -> AlignedSentence {
    let pre_sets = match_lemma(rec, graph, &rules.tables, &rules.cng);
    let category_before = categorize(&pre_sets);

    let mut final_graph = graph.clone();
    let mut final_sets = pre_sets.clone();
    let mut mod_diags = Vec::new();

    if category_before.0 >= 3 {
        let unmatched = unmatched_by_chunk(&pre_sets);
        for kind in &opts.mod_order {
            match kind {
                ModKind::Causative => {
                    final_graph = modify_causative(&final_graph, &rules.tables, &unmatched);
                }
                ModKind::PreverbJoin => {
                    let (g, d) = modify_preverb_join(&final_graph, rules);
                    final_graph = g;
                    mod_diags.extend(d);
                }
                ModKind::CompoundMerge => {
                    let (g, d) =
                        modify_compound_merge(&final_graph, rules, &unmatched, opts.max_components);
                    final_graph = g;
                    mod_diags.extend(d);
                }
            }
        }
        let rerun = match_lemma(rec, &final_graph, &rules.tables, &rules.cng);
        for (slot, new) in final_sets.iter_mut().zip(rerun) {
            if slot.nodes.is_empty() {
                *slot = new;
            }
        }
    }

    let category_after = categorize(&final_sets);
    let synthesized: Vec<NodeId> = final_graph
        .nodes()
        .filter(|n| graph.node(n.id).is_none())
        .map(|n| n.id)
        .collect();
    let mut diagnostics = diagnose(rec, &final_graph, &final_sets, &rules.cng);
    diagnostics.extend(mod_diags);

    AlignedSentence {
        result: AlignmentResult {
            sent_id: rec.sent_id,
            category_before,
            category_after,
            match_sets: final_sets,
            synthesized,
            diagnostics,
        },
        graph: final_graph,
    }
}

fn diagnose(rec: &GoldRecord, g: &SegGraph, sets: &[MatchSet], cng: &CngTable) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut secondary_chunks: BTreeSet<usize> = BTreeSet::new();
    for s in sets {
        let matched: Vec<&CandidateSegment> = s.nodes.iter().filter_map(|id| g.node(*id)).collect();
        let code = rec.cngs[s.chunk][s.lemma_index];
        if matched.is_empty() {
            diags.push(Diagnostic {
                code: DiagnosticCode::UnanalyzedWord,
                detail: format!("chunk {}: lemma {:?} has no parallel", s.chunk, s.lemma),
            });
            if rec.lemmas[s.chunk].len() >= 2 && !secondary_chunks.contains(&s.chunk) {
                if let Some(whole) = whole_chunk_node(g, s.chunk) {
                    secondary_chunks.insert(s.chunk);
                    diags.push(Diagnostic {
                        code: DiagnosticCode::SecondaryDerivative,
                        detail: format!(
                            "chunk {}: gold splits it but the engine analyses the whole span as {:?}",
                            s.chunk, whole.lemma
                        ),
                    });
                }
            }
            continue;
        }
        if matched.len() > 1 {
            if matched
                .iter()
                .all(|n| n.synthetic == Provenance::CompoundMerge)
            {
                diags.push(Diagnostic {
                    code: DiagnosticCode::MultiCompoundSplit,
                    detail: format!(
                        "chunk {}: {} merge candidates for lemma {:?}",
                        s.chunk,
                        matched.len(),
                        s.lemma
                    ),
                });
            }
            if s.stage == Some(MatchStage::DerivedStem)
                && is_derivational(code)
                && matched.iter().map(|n| n.cng).collect::<BTreeSet<_>>().len() > 1
            {
                diags.push(Diagnostic {
                    code: DiagnosticCode::DerivInflMismatch,
                    detail: format!(
                        "chunk {}: derivational code {} covers {} inflected entries",
                        s.chunk,
                        code,
                        matched.len()
                    ),
                });
            }
            if s.stage == Some(MatchStage::LemmaCng)
                && matched
                    .iter()
                    .map(|n| n.lemma.clone())
                    .collect::<BTreeSet<_>>()
                    .len()
                    == 1
                && tags_of(code, cng).len() > 1
            {
                diags.push(Diagnostic {
                    code: DiagnosticCode::CngManyToOne,
                    detail: format!(
                        "chunk {}: code {} maps to several analyses of {:?}",
                        s.chunk, code, s.lemma
                    ),
                });
            }
        }
        // class normalization of indeclinables: the gold side tags ind.,
        // the engine something else unified under the same code
        let class_tags = tags_of(code, cng);
        if class_tags.contains(&MorphTag::new(INDECLINABLE_TAG)) {
            for n in &matched {
                let other: Vec<&MorphTag> = n
                    .morph
                    .iter()
                    .filter(|t| class_tags.contains(*t) && t.as_str() != INDECLINABLE_TAG)
                    .collect();
                if !other.is_empty() {
                    diags.push(Diagnostic {
                        code: DiagnosticCode::IndeclinableClass,
                        detail: format!(
                            "chunk {}: {:?} tagged {} by the engine",
                            s.chunk,
                            s.lemma,
                            other
                                .iter()
                                .map(|t| t.as_str())
                                .collect::<Vec<_>>()
                                .join(", ")
                        ),
                    });
                    break;
                }
            }
        }
        if s.stage == Some(MatchStage::IicSegment) {
            if let Some(n) = matched.iter().find(|n| {
                n.morph
                    .iter()
                    .any(|t| t.as_str() != "iic." && t.as_str().contains("iic"))
            }) {
                diags.push(Diagnostic {
                    code: DiagnosticCode::IicPfpMismatch,
                    detail: format!(
                        "chunk {}: segment {:?} carries {}",
                        s.chunk,
                        n.word,
                        n.morph
                            .iter()
                            .map(|t| t.as_str())
                            .collect::<Vec<_>>()
                            .join("|")
                    ),
                });
            }
        }
    }
    diags
}

/// A single node covering the full extent of a chunk's candidates, if any.
fn whole_chunk_node(g: &SegGraph, chunk: usize) -> Option<&CandidateSegment> {
    let nodes: Vec<&CandidateSegment> = g.nodes().filter(|n| n.chunk_no == chunk).collect();
    let start = nodes.iter().map(|n| n.char_pos.start).min()?;
    let end = nodes.iter().map(|n| n.char_pos.end).max()?;
    nodes
        .into_iter()
        .find(|n| n.char_pos.start == start && n.char_pos.end == end)
}
