//! Alignment of a morphologically tagged Sanskrit gold corpus with the
//! candidate segmentations of a lexicon-driven segmenter.
//!
//! The pipeline: parse both inputs into a phoneme-level representation,
//! normalize spelling variation (anunāsika, dvitva), build a conflict-labeled
//! graph over each sentence's candidate segments, merge homonym nodes, then
//! match every gold lemma against the graph in four stages. Sentences with
//! unmatched lemmas get three graph modifications (causative pairs, preverb
//! sandhi joining, compound merging) and a re-match. Each sentence lands in
//! one of four categories, and category-1 sentences are emitted as a fully
//! tagged gold segmentation.

pub mod align;
pub mod corpus;
pub mod graph;
pub mod graphml;
pub mod morph;
pub mod partition;
pub mod phonology;
pub mod pipeline;
pub mod report;
pub mod rules;

pub use align::{
    align_sentence, categorize, AlignOptions, AlignedSentence, AlignmentResult, Category,
    Diagnostic, DiagnosticCode, MatchSet, MatchStage, ModKind, ModificationTables,
};
pub use corpus::{parse_gold_record, read_corpus, validate_corpus, CorpusIssue, GoldRecord};
pub use graph::{
    read_analyses, AnalysisSentence, CandidateSegment, EdgeLabel, NodeId, Provenance, SegGraph,
    Span,
};
pub use graphml::{read_graphml, write_graphml};
pub use morph::{codes_of, is_derivational, tags_of, CngCode, CngTable, MorphTag};
pub use partition::{count_bracketings, enumerate_compound_partitions};
pub use phonology::{
    apply_preverb, normalize_anunasika, normalize_gemination, parse_iast, render_iast,
    vowel_sandhi_join, Phoneme, PhonemeString, SandhiRuleTable,
};
pub use pipeline::{align_corpus, align_corpus_seq, run_align, RunConfig, SentenceOutcome};
pub use report::{emit_gold, summarize, GoldSentence, Report};
pub use rules::RuleSet;

#[cfg(feature = "parallel")]
pub use pipeline::align_corpus_par;
