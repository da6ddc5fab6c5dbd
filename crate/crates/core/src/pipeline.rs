//! Corpus driver: normalize both sides, build and merge the per-sentence
//! graphs, align, and write the run outputs. Sentences are independent, so
//! the driver fans them out over a rayon pool when the `parallel` feature is
//! on; results are emitted in sent_id order either way, so the outputs are
//! byte-identical at any parallelism degree.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::align::{align_sentence, AlignOptions, AlignmentResult, ModKind};
use crate::corpus::{read_corpus, CorpusError, GoldRecord};
use crate::graph::{read_analyses, AnalysesError, CandidateSegment, GraphError, SegGraph};
use crate::graphml::write_graphml;
use crate::report::{emit_gold, summarize, GoldDisposition, Report};
use crate::rules::{RuleError, RuleSet};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("corpus {path}: {source}")]
    Corpus {
        path: String,
        #[source]
        source: CorpusError,
    },
    #[error("analyses {path}: {source}")]
    Analyses {
        path: String,
        #[source]
        source: AnalysesError,
    },
    #[error(transparent)]
    Rules(#[from] RuleError),
    #[error("sentence {sent_id}: {source}")]
    Graph {
        sent_id: u64,
        #[source]
        source: GraphError,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[cfg(feature = "parallel")]
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

fn io_err(path: &Path, source: std::io::Error) -> PipelineError {
    PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Run configuration; paths are validated when the run starts.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub corpus: PathBuf,
    pub analyses: PathBuf,
    pub rules_dir: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub normalize: bool,
    pub max_components: usize,
    pub jobs: usize,
    pub mod_order: Vec<ModKind>,
}

impl RunConfig {
    pub fn new(corpus: PathBuf, analyses: PathBuf, out_dir: PathBuf) -> RunConfig {
        RunConfig {
            corpus,
            analyses,
            rules_dir: None,
            out_dir,
            normalize: true,
            max_components: crate::partition::DEFAULT_COMPONENT_CAP,
            jobs: 0,
            mod_order: AlignOptions::default().mod_order,
        }
    }

    fn align_options(&self) -> AlignOptions {
        AlignOptions {
            max_components: self.max_components,
            mod_order: self.mod_order.clone(),
        }
    }
}

/// Result plus final graph for one sentence.
#[derive(Debug, Clone)]
pub struct SentenceOutcome {
    pub result: AlignmentResult,
    pub graph: SegGraph,
}

/// Normalize, build, merge and align one sentence. A sentence absent from
/// the analyses gets an empty graph and every slot unmatched.
pub fn process_sentence(
    rec: &GoldRecord,
    segments: &[CandidateSegment],
    rules: &RuleSet,
    normalize: bool,
    opts: &AlignOptions,
) -> Result<SentenceOutcome, PipelineError> {
    let graph_err = |source| PipelineError::Graph {
        sent_id: rec.sent_id,
        source,
    };
    let rec_n = if normalize {
        rec.normalized(&rules.gemination)
    } else {
        rec.clone()
    };
    let segs_n: Vec<CandidateSegment> = if normalize {
        segments
            .iter()
            .map(|s| s.normalized(&rules.gemination))
            .collect()
    } else {
        segments.to_vec()
    };
    let graph = SegGraph::build(segs_n, rec_n.text.len()).map_err(graph_err)?;
    let merged = graph.merge_homonyms();
    let aligned = align_sentence(&rec_n, &merged, rules, opts);
    Ok(SentenceOutcome {
        result: aligned.result,
        graph: aligned.graph,
    })
}

type Job<'a> = (&'a GoldRecord, &'a [CandidateSegment]);

fn jobs_of<'a>(
    records: &'a [GoldRecord],
    analyses: &'a BTreeMap<u64, Vec<CandidateSegment>>,
) -> Vec<Job<'a>> {
    let mut sorted: Vec<&GoldRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.sent_id);
    sorted
        .into_iter()
        .map(|rec| {
            let segs = analyses
                .get(&rec.sent_id)
                .map(|v| v.as_slice())
                .unwrap_or(&[]);
            (rec, segs)
        })
        .collect()
}

/// Sequential driver, always available.
pub fn align_corpus_seq(
    records: &[GoldRecord],
    analyses: &BTreeMap<u64, Vec<CandidateSegment>>,
    rules: &RuleSet,
    normalize: bool,
    opts: &AlignOptions,
) -> Result<Vec<SentenceOutcome>, PipelineError> {
    jobs_of(records, analyses)
        .into_iter()
        .map(|(rec, segs)| process_sentence(rec, segs, rules, normalize, opts))
        .collect()
}

/// Data-parallel driver over a rayon pool. `jobs` = 0 uses the global pool;
/// any other value builds a scoped pool of that size. Output order is the
/// input (sent_id) order regardless of scheduling.
#[cfg(feature = "parallel")]
pub fn align_corpus_par(
    records: &[GoldRecord],
    analyses: &BTreeMap<u64, Vec<CandidateSegment>>,
    rules: &RuleSet,
    normalize: bool,
    opts: &AlignOptions,
    jobs: usize,
) -> Result<Vec<SentenceOutcome>, PipelineError> {
    let work = jobs_of(records, analyses);
    let run = || {
        work.par_iter()
            .map(|(rec, segs)| process_sentence(rec, segs, rules, normalize, opts))
            .collect::<Result<Vec<_>, _>>()
    };
    if jobs == 0 {
        run()
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
        pool.install(run)
    }
}

/// Dispatching driver: parallel when compiled in and not pinned to one job.
pub fn align_corpus(
    records: &[GoldRecord],
    analyses: &BTreeMap<u64, Vec<CandidateSegment>>,
    rules: &RuleSet,
    normalize: bool,
    opts: &AlignOptions,
    jobs: usize,
) -> Result<Vec<SentenceOutcome>, PipelineError> {
    #[cfg(feature = "parallel")]
    {
        if jobs != 1 {
            return align_corpus_par(records, analyses, rules, normalize, opts, jobs);
        }
    }
    let _ = jobs;
    align_corpus_seq(records, analyses, rules, normalize, opts)
}

fn write_file(path: &Path, contents: &str) -> Result<(), PipelineError> {
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| io_err(path, e))
}

/// Full run: read, align, and write `alignment.jsonl`, `report.json`,
/// `gold.jsonl`, `ambiguous.jsonl`, `unmatched.jsonl` and one GraphML file
/// per sentence under `graphs/`.
pub fn run_align(config: &RunConfig) -> Result<Report, PipelineError> {
    let rules = match &config.rules_dir {
        Some(dir) => RuleSet::load_dir(dir)?,
        None => RuleSet::bundled(),
    };

    let corpus_file = fs::File::open(&config.corpus).map_err(|e| io_err(&config.corpus, e))?;
    let records =
        read_corpus(BufReader::new(corpus_file)).map_err(|source| PipelineError::Corpus {
            path: config.corpus.display().to_string(),
            source,
        })?;
    let analyses_file =
        fs::File::open(&config.analyses).map_err(|e| io_err(&config.analyses, e))?;
    let analyses =
        read_analyses(BufReader::new(analyses_file)).map_err(|source| PipelineError::Analyses {
            path: config.analyses.display().to_string(),
            source,
        })?;

    let outcomes = align_corpus(
        &records,
        &analyses,
        &rules,
        config.normalize,
        &config.align_options(),
        config.jobs,
    )?;

    let graphs_dir = config.out_dir.join("graphs");
    fs::create_dir_all(&graphs_dir).map_err(|e| io_err(&graphs_dir, e))?;

    let mut alignment = String::new();
    let mut gold = String::new();
    let mut ambiguous = String::new();
    let mut unmatched = String::new();
    for outcome in &outcomes {
        alignment.push_str(&serde_json::to_string(&outcome.result).expect("serializable"));
        alignment.push('\n');
        match emit_gold(&outcome.result, &outcome.graph) {
            GoldDisposition::Gold(row) => {
                gold.push_str(&serde_json::to_string(&row).expect("serializable"));
                gold.push('\n');
            }
            GoldDisposition::Ambiguous(row) => {
                ambiguous.push_str(&serde_json::to_string(&row).expect("serializable"));
                ambiguous.push('\n');
            }
            GoldDisposition::Unmatched(row) => {
                unmatched.push_str(&serde_json::to_string(&row).expect("serializable"));
                unmatched.push('\n');
            }
        }
        let path = graphs_dir.join(format!("{}.graphml", outcome.result.sent_id));
        write_file(&path, &write_graphml(&outcome.graph))?;
    }

    write_file(&config.out_dir.join("alignment.jsonl"), &alignment)?;
    write_file(&config.out_dir.join("gold.jsonl"), &gold)?;
    write_file(&config.out_dir.join("ambiguous.jsonl"), &ambiguous)?;
    write_file(&config.out_dir.join("unmatched.jsonl"), &unmatched)?;

    let report = summarize(outcomes.iter().map(|o| &o.result));
    let mut report_json = serde_json::to_string_pretty(&report).expect("serializable");
    report_json.push('\n');
    write_file(&config.out_dir.join("report.json"), &report_json)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::Category;
    use crate::corpus::parse_gold_record;

    const SENTENCE: &str = r#"{"sent_id": 5, "text": "tvam eva", "chunks": ["tvam", "eva"], "lemmas": [["tvad"], ["eva"]], "cng": [[21], [2]]}"#;

    fn analyses_for(rec: &GoldRecord) -> Vec<CandidateSegment> {
        let line = format!(
            r#"{{"sent_id": {}, "segments": [
              {{"id": 0, "color_class": "Pron", "position": 0, "chunk_no": 0, "word": "tvam", "lemma": "yuṣmad", "cng": 21, "morph": ["sg. nom."], "length_word": 4, "char_pos": [0, 4]}},
              {{"id": 1, "color_class": "Inde", "position": 1, "chunk_no": 1, "word": "eva", "lemma": "eva", "cng": 2, "morph": ["ind."], "length_word": 3, "char_pos": [5, 8]}}]}}"#,
            rec.sent_id
        );
        let parsed: crate::graph::AnalysisSentence = serde_json::from_str(&line).unwrap();
        parsed.segments
    }

    #[test]
    fn sentence_without_analyses_is_fully_unmatched() {
        let rec = parse_gold_record(SENTENCE).unwrap();
        let rules = RuleSet::bundled();
        let outcome = process_sentence(&rec, &[], &rules, true, &AlignOptions::default()).unwrap();
        assert_eq!(outcome.result.category_after, Category(3));
        assert!(outcome.result.match_sets.iter().all(|s| s.nodes.is_empty()));
    }

    #[test]
    fn no_normalize_matches_on_normalization_free_input() {
        let rec = parse_gold_record(SENTENCE).unwrap();
        let segs = analyses_for(&rec);
        let rules = RuleSet::bundled();
        let opts = AlignOptions::default();
        let with = process_sentence(&rec, &segs, &rules, true, &opts).unwrap();
        let without = process_sentence(&rec, &segs, &rules, false, &opts).unwrap();
        assert_eq!(with.result, without.result);
        assert_eq!(with.result.category_after, Category(1));
    }

    #[test]
    fn driver_pairs_records_with_their_analyses_by_id() {
        let rec = parse_gold_record(SENTENCE).unwrap();
        let mut other = rec.clone();
        other.sent_id = 6;
        let analyses: BTreeMap<u64, Vec<CandidateSegment>> =
            [(5u64, analyses_for(&rec))].into_iter().collect();
        let rules = RuleSet::bundled();
        let outcomes = align_corpus(
            &[other, rec],
            &analyses,
            &rules,
            true,
            &AlignOptions::default(),
            1,
        )
        .unwrap();
        // sorted by sent_id; 6 has no analyses and stays unmatched
        assert_eq!(outcomes[0].result.sent_id, 5);
        assert_eq!(outcomes[0].result.category_after, Category(1));
        assert_eq!(outcomes[1].result.sent_id, 6);
        assert_eq!(outcomes[1].result.category_after, Category(3));
    }

    #[test]
    fn modification_order_is_configurable() {
        let rec = parse_gold_record(
            r#"{"sent_id": 7, "text": "devaṃ pūjayati", "chunks": ["devaṃ", "pūjayati"], "lemmas": [["deva"], ["pūjay"]], "cng": [[31], [430]]}"#,
        )
        .unwrap();
        let line = r#"{"sent_id": 7, "segments": [
          {"id": 0, "color_class": "Noun", "position": 0, "chunk_no": 0, "word": "devaṃ", "lemma": "deva", "cng": 31, "morph": ["m. sg. acc."], "length_word": 5, "char_pos": [0, 5]},
          {"id": 1, "color_class": "Verb", "position": 1, "chunk_no": 1, "word": "pūjayati", "lemma": "pūj", "cng": 430, "morph": ["pr. [10] ac. sg. 3"], "length_word": 8, "char_pos": [6, 14]}]}"#;
        let parsed: crate::graph::AnalysisSentence = serde_json::from_str(line).unwrap();
        let rules = RuleSet::bundled();
        let opts = AlignOptions {
            mod_order: vec![
                ModKind::CompoundMerge,
                ModKind::PreverbJoin,
                ModKind::Causative,
            ],
            ..AlignOptions::default()
        };
        let outcome = process_sentence(&rec, &parsed.segments, &rules, true, &opts).unwrap();
        assert_eq!(outcome.result.category_after, Category(1));
    }
}
