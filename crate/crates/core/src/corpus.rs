//! Gold-corpus records: one JSON line per sentence with its chunk split,
//! per-chunk lemma lists and per-chunk CNG code lists.

use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morph::CngCode;
use crate::phonology::{normalize, parse_iast, GeminationRules, PhonemeString, PhonologyError};

/// Wire form of one corpus line, before phoneme parsing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawRecord {
    pub sent_id: u64,
    pub text: String,
    pub chunks: Vec<String>,
    pub lemmas: Vec<Vec<String>>,
    pub cng: Vec<Vec<i32>>,
}

/// One validated gold sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldRecord {
    pub sent_id: u64,
    pub text: PhonemeString,
    pub chunks: Vec<PhonemeString>,
    pub lemmas: Vec<Vec<PhonemeString>>,
    pub cngs: Vec<Vec<CngCode>>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("sentence {sent_id}: malformed record: {reason}")]
    MalformedRecord { sent_id: u64, reason: String },
    #[error("sentence {sent_id}: {field}: {source}")]
    BadPhoneme {
        sent_id: u64,
        field: String,
        #[source]
        source: PhonologyError,
    },
    #[error("line {line}: not a corpus record: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("duplicate sent_id {0}")]
    DuplicateId(u64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IssueKind {
    LengthMismatch,
    EmptyChunk,
    BadPhoneme,
    DuplicateId,
}

/// A validation finding. Issues are data, not failures: a validation pass
/// reports all of them and mutates nothing.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusIssue {
    pub sent_id: u64,
    pub kind: IssueKind,
    pub detail: String,
}

fn digit_suffixed(s: &str) -> bool {
    match s.rsplit_once('_') {
        Some((_, tail)) => !tail.is_empty() && tail.bytes().all(|b| b.is_ascii_digit()),
        None => false,
    }
}

impl TryFrom<RawRecord> for GoldRecord {
    type Error = CorpusError;

    fn try_from(raw: RawRecord) -> Result<Self, CorpusError> {
        let sent_id = raw.sent_id;
        let malformed = |reason: &str| CorpusError::MalformedRecord {
            sent_id,
            reason: reason.to_string(),
        };
        if raw.chunks.len() != raw.lemmas.len() || raw.chunks.len() != raw.cng.len() {
            return Err(malformed("length mismatch"));
        }
        for (i, (lemmas, cngs)) in raw.lemmas.iter().zip(&raw.cng).enumerate() {
            if lemmas.is_empty() || cngs.is_empty() {
                return Err(malformed("empty chunk analysis"));
            }
            if lemmas.len() != cngs.len() {
                return Err(CorpusError::MalformedRecord {
                    sent_id,
                    reason: format!("chunk {i}: lemma/cng length mismatch"),
                });
            }
            if let Some(lemma) = lemmas.iter().find(|l| digit_suffixed(l)) {
                return Err(CorpusError::MalformedRecord {
                    sent_id,
                    reason: format!("homonym-suffixed lemma {lemma:?}"),
                });
            }
        }
        let field = |name: String, r: Result<PhonemeString, PhonologyError>| {
            r.map_err(|source| CorpusError::BadPhoneme {
                sent_id,
                field: name,
                source,
            })
        };
        Ok(GoldRecord {
            sent_id,
            text: field("text".into(), parse_iast(&raw.text))?,
            chunks: raw
                .chunks
                .iter()
                .enumerate()
                .map(|(i, c)| field(format!("chunks[{i}]"), parse_iast(c)))
                .collect::<Result<_, _>>()?,
            lemmas: raw
                .lemmas
                .iter()
                .enumerate()
                .map(|(i, ls)| {
                    ls.iter()
                        .map(|l| field(format!("lemmas[{i}]"), parse_iast(l)))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<_, _>>()?,
            cngs: raw
                .cng
                .into_iter()
                .map(|cs| cs.into_iter().map(CngCode).collect())
                .collect(),
        })
    }
}

impl GoldRecord {
    /// Normalized copy: anunāsika and dvitva applied to the text, chunk
    /// surfaces and lemmas.
    pub fn normalized(&self, gemination: &GeminationRules) -> GoldRecord {
        let n = |ps: &PhonemeString| normalize(ps, gemination);
        GoldRecord {
            sent_id: self.sent_id,
            text: n(&self.text),
            chunks: self.chunks.iter().map(n).collect(),
            lemmas: self
                .lemmas
                .iter()
                .map(|ls| ls.iter().map(n).collect())
                .collect(),
            cngs: self.cngs.clone(),
        }
    }

    /// Whether the text is exactly the chunks joined with single spaces,
    /// after normalization on both sides. Records whose chunk strings carry
    /// stem forms rather than surface forms do not reassemble.
    pub fn reassembles(&self, gemination: &GeminationRules) -> bool {
        let mut joined = PhonemeString::default();
        for (i, chunk) in self.chunks.iter().enumerate() {
            if i > 0 {
                joined.push(crate::phonology::Phoneme::Space);
            }
            joined = joined.concat(chunk);
        }
        normalize(&joined, gemination) == normalize(&self.text, gemination)
    }

    /// Flat iterator over (chunk index, lemma occurrence index, lemma, cng).
    pub fn lemma_slots(
        &self,
    ) -> impl Iterator<Item = (usize, usize, &PhonemeString, CngCode)> + '_ {
        self.lemmas.iter().enumerate().flat_map(move |(ci, ls)| {
            ls.iter()
                .enumerate()
                .map(move |(li, lemma)| (ci, li, lemma, self.cngs[ci][li]))
        })
    }
}

/// Parse one JSONL corpus line into a validated sentence.
pub fn parse_gold_record(line: &str) -> Result<GoldRecord, CorpusError> {
    let raw: RawRecord =
        serde_json::from_str(line).map_err(|source| CorpusError::Json { line: 0, source })?;
    raw.try_into()
}

/// Strict reader: every line must parse, ids must be unique.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<Vec<GoldRecord>, CorpusError> {
    let mut out: Vec<GoldRecord> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line).map_err(|source| CorpusError::Json {
            line: i + 1,
            source,
        })?;
        if !seen.insert(raw.sent_id) {
            return Err(CorpusError::DuplicateId(raw.sent_id));
        }
        out.push(raw.try_into()?);
    }
    Ok(out)
}

/// Non-failing validation pass over raw records: every problem becomes an
/// issue, clean corpora yield an empty list.
pub fn validate_corpus(records: impl IntoIterator<Item = RawRecord>) -> Vec<CorpusIssue> {
    let mut issues = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for raw in records {
        let sent_id = raw.sent_id;
        if !seen.insert(sent_id) {
            issues.push(CorpusIssue {
                sent_id,
                kind: IssueKind::DuplicateId,
                detail: format!("sent_id {sent_id} appears more than once"),
            });
        }
        match GoldRecord::try_from(raw) {
            Ok(_) => {}
            Err(CorpusError::MalformedRecord { reason, .. }) => {
                let kind = if reason.contains("empty chunk") {
                    IssueKind::EmptyChunk
                } else if reason.contains("homonym-suffixed") {
                    IssueKind::BadPhoneme
                } else {
                    IssueKind::LengthMismatch
                };
                issues.push(CorpusIssue {
                    sent_id,
                    kind,
                    detail: reason,
                });
            }
            Err(CorpusError::BadPhoneme { field, source, .. }) => {
                issues.push(CorpusIssue {
                    sent_id,
                    kind: IssueKind::BadPhoneme,
                    detail: format!("{field}: {source}"),
                });
            }
            Err(other) => issues.push(CorpusIssue {
                sent_id,
                kind: IssueKind::BadPhoneme,
                detail: other.to_string(),
            }),
        }
    }
    issues
}
