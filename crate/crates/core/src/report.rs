//! Aggregation of alignment results into the run report, and the gold /
//! ambiguous / unmatched output rows.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::align::{AlignmentResult, Category, MatchSet};
use crate::graph::{CandidateSegment, NodeId, SegGraph};
use crate::morph::{CngCode, MorphTag};
use crate::phonology::PhonemeString;

/// Corpus-level counts. `fully_matched` is cat1+cat2; the percentage fields
/// are derived at construction and rounded half-up to one decimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub total: u64,
    pub cat1: u64,
    pub cat2: u64,
    pub cat3: u64,
    pub cat4: u64,
    pub fully_matched: u64,
    pub modified_count: u64,
    pub unmodified_unmatched: u64,
    pub matched_pct: f64,
    pub single_pct: f64,
    pub diagnostics: BTreeMap<String, u64>,
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Fold a result stream into the report. Pure counting, so the stream order
/// never matters.
pub fn summarize<'a>(results: impl IntoIterator<Item = &'a AlignmentResult>) -> Report {
    let mut total = 0u64;
    let mut cats = [0u64; 4];
    let mut modified_count = 0u64;
    let mut unmodified_unmatched = 0u64;
    let mut diagnostics: BTreeMap<String, u64> = BTreeMap::new();
    for r in results {
        total += 1;
        cats[(r.category_after.0 - 1) as usize] += 1;
        if r.category_before.0 >= 3 {
            if r.synthesized.is_empty() {
                unmodified_unmatched += 1;
            } else {
                modified_count += 1;
            }
        }
        for d in &r.diagnostics {
            *diagnostics.entry(format!("{:?}", d.code)).or_insert(0) += 1;
        }
    }
    let fully_matched = cats[0] + cats[1];
    let matched_pct = if total == 0 {
        0.0
    } else {
        round1(100.0 * fully_matched as f64 / total as f64)
    };
    let single_pct = if fully_matched == 0 {
        0.0
    } else {
        round1(100.0 * cats[0] as f64 / fully_matched as f64)
    };
    Report {
        total,
        cat1: cats[0],
        cat2: cats[1],
        cat3: cats[2],
        cat4: cats[3],
        fully_matched,
        modified_count,
        unmodified_unmatched,
        matched_pct,
        single_pct,
        diagnostics,
    }
}

/// One fully disambiguated segment of a gold sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldSegment {
    pub word: PhonemeString,
    pub lemma: PhonemeString,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub sense: BTreeSet<u32>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub morph: BTreeSet<MorphTag>,
    pub cng: CngCode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre_verb: Option<PhonemeString>,
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
}

impl From<&CandidateSegment> for GoldSegment {
    fn from(n: &CandidateSegment) -> Self {
        GoldSegment {
            word: n.word.clone(),
            lemma: n.lemma.clone(),
            sense: n.sense.clone(),
            morph: n.morph.clone(),
            cng: n.cng,
            pre_verb: n.pre_verb.clone(),
            der_pre_verb: n.der_pre_verb.clone(),
            der_lemma: n.der_lemma.clone(),
            der_sense: n.der_sense.clone(),
            der_morph: n.der_morph.clone(),
            der_cng: n.der_cng,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldSentence {
    pub sent_id: u64,
    pub segments: Vec<GoldSegment>,
}

/// Sidecar row for a sentence kept out of the gold file because some lemma
/// has several parallels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguousSentence {
    pub sent_id: u64,
    pub category: Category,
    pub multiple: Vec<MatchSet>,
}

/// Sidecar row for a sentence with lemmas that found no parallel at all.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnmatchedSentence {
    pub sent_id: u64,
    pub category: Category,
    pub missing: Vec<MatchSet>,
}

/// Where a result lands in the three output files. Every sentence goes to
/// exactly one of them.
pub enum GoldDisposition {
    Gold(GoldSentence),
    Ambiguous(AmbiguousSentence),
    Unmatched(UnmatchedSentence),
}

/// Category 1 sentences become gold rows, with their matched segments in
/// surface order; category 2 goes to the ambiguous sidecar; 3 and 4 to the
/// unmatched sidecar.
pub fn emit_gold(result: &AlignmentResult, graph: &SegGraph) -> GoldDisposition {
    match result.category_after.0 {
        1 => {
            let mut ids: Vec<NodeId> = result
                .match_sets
                .iter()
                .filter_map(|s| s.nodes.first().copied())
                .collect();
            ids.sort_by_key(|id| {
                let n = graph.node(*id).expect("matched node in graph");
                (n.char_pos.start, n.char_pos.end, *id)
            });
            GoldDisposition::Gold(GoldSentence {
                sent_id: result.sent_id,
                segments: ids
                    .iter()
                    .map(|id| GoldSegment::from(graph.node(*id).unwrap()))
                    .collect(),
            })
        }
        2 => GoldDisposition::Ambiguous(AmbiguousSentence {
            sent_id: result.sent_id,
            category: result.category_after,
            multiple: result
                .match_sets
                .iter()
                .filter(|s| s.nodes.len() > 1)
                .cloned()
                .collect(),
        }),
        _ => GoldDisposition::Unmatched(UnmatchedSentence {
            sent_id: result.sent_id,
            category: result.category_after,
            missing: result
                .match_sets
                .iter()
                .filter(|s| s.nodes.is_empty())
                .cloned()
                .collect(),
        }),
    }
}
