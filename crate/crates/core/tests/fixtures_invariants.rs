//! Cross-cutting invariants checked over the committed fixture corpus.

use std::collections::BTreeMap;
use std::io::BufReader;
use std::path::PathBuf;

use sandhi_align_core::align::AlignOptions;
use sandhi_align_core::corpus::{read_corpus, GoldRecord};
use sandhi_align_core::graph::{read_analyses, CandidateSegment};
use sandhi_align_core::graphml::{read_graphml, write_graphml};
use sandhi_align_core::pipeline::process_sentence;
use sandhi_align_core::rules::RuleSet;

fn fixtures() -> (Vec<GoldRecord>, BTreeMap<u64, Vec<CandidateSegment>>) {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let records = read_corpus(BufReader::new(
        std::fs::File::open(dir.join("corpus.jsonl")).unwrap(),
    ))
    .unwrap();
    let analyses = read_analyses(BufReader::new(
        std::fs::File::open(dir.join("analyses.jsonl")).unwrap(),
    ))
    .unwrap();
    (records, analyses)
}

/// Record 83 stores stem-like chunk strings; every other
/// fixture's text is its chunks joined by single spaces, up to
/// normalization.
#[test]
fn chunks_reassemble_into_the_text() {
    let (records, _) = fixtures();
    let gem = RuleSet::bundled().gemination;
    for rec in &records {
        let expected = rec.sent_id != 83;
        assert_eq!(
            rec.reassembles(&gem),
            expected,
            "sentence {} reassembly",
            rec.sent_id
        );
    }
}

/// Aligning already-normalized inputs gives the same results as normalizing
/// raw inputs on the way in.
#[test]
fn normalization_commutes_with_matching() {
    let (records, analyses) = fixtures();
    let rules = RuleSet::bundled();
    let opts = AlignOptions::default();
    let empty = Vec::new();
    for rec in &records {
        let segs = analyses.get(&rec.sent_id).unwrap_or(&empty);
        let raw = process_sentence(rec, segs, &rules, true, &opts).unwrap();
        let pre_rec = rec.normalized(&rules.gemination);
        let pre_segs: Vec<CandidateSegment> = segs
            .iter()
            .map(|s| s.normalized(&rules.gemination))
            .collect();
        let pre = process_sentence(&pre_rec, &pre_segs, &rules, true, &opts).unwrap();
        assert_eq!(raw.result, pre.result, "sentence {}", rec.sent_id);
    }
}

/// Every graph the pipeline produces survives GraphML serialization
/// field-for-field, synthesized nodes included.
#[test]
fn pipeline_graphs_round_trip_through_graphml() {
    let (records, analyses) = fixtures();
    let rules = RuleSet::bundled();
    let opts = AlignOptions::default();
    let empty = Vec::new();
    for rec in &records {
        let segs = analyses.get(&rec.sent_id).unwrap_or(&empty);
        let outcome = process_sentence(rec, segs, &rules, true, &opts).unwrap();
        let back = read_graphml(&write_graphml(&outcome.graph)).unwrap();
        assert_eq!(back, outcome.graph, "sentence {}", rec.sent_id);
    }
}
