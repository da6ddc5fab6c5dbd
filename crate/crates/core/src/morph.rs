//! Morphological tags and the many-to-many map between tags and the gold
//! corpus's integer CNG codes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Textual morphological analysis, e.g. `n. sg. acc.` or `pr. [1] ac. pl. 3`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MorphTag(pub String);

impl MorphTag {
    pub fn new(s: impl Into<String>) -> Self {
        MorphTag(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for MorphTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Integer code for case/number/gender (nominals) or tense/person/number
/// (verbs). Negative codes are derivational-level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CngCode(pub i32);

impl fmt::Display for CngCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// True iff the code describes the derivational level rather than an
/// inflected form.
pub fn is_derivational(code: CngCode) -> bool {
    code.0 < 0
}

/// Bidirectional tag/code multimap. The two directions are kept as mutual
/// inverses by construction.
#[derive(Debug, Clone, Default)]
pub struct CngTable {
    tag_to_codes: BTreeMap<MorphTag, BTreeSet<CngCode>>,
    code_to_tags: BTreeMap<CngCode, BTreeSet<MorphTag>>,
}

impl CngTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, tag: MorphTag, code: CngCode) {
        self.tag_to_codes
            .entry(tag.clone())
            .or_default()
            .insert(code);
        self.code_to_tags.entry(code).or_default().insert(tag);
    }

    pub fn is_empty(&self) -> bool {
        self.tag_to_codes.is_empty()
    }

    pub fn tags(&self) -> impl Iterator<Item = &MorphTag> {
        self.tag_to_codes.keys()
    }

    pub fn codes(&self) -> impl Iterator<Item = CngCode> + '_ {
        self.code_to_tags.keys().copied()
    }
}

/// Codes mapped to by a tag; empty when the tag is unmapped. No fallback
/// guessing happens here.
pub fn codes_of(tag: &MorphTag, table: &CngTable) -> BTreeSet<CngCode> {
    table.tag_to_codes.get(tag).cloned().unwrap_or_default()
}

/// Inverse direction of [`codes_of`] as a relation.
pub fn tags_of(code: CngCode, table: &CngTable) -> BTreeSet<MorphTag> {
    table.code_to_tags.get(&code).cloned().unwrap_or_default()
}
