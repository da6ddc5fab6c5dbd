//! Rule tables are data files, not code: sandhi chart, preverb inventory,
//! gemination triggers, tag/code table, causative pairs and the pronoun stem
//! map. A copy of each ships inside the crate so the library works with no
//! setup; a rules directory can override all of them.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::align::ModificationTables;
use crate::morph::{CngCode, CngTable, MorphTag};
use crate::phonology::{parse_iast, GeminationRules, PhonemeString, PreverbFlags, SandhiRuleTable};

pub const SANDHI_RULES_FILE: &str = "sandhi_rules.txt";
pub const PREVERBS_FILE: &str = "preverbs.txt";
pub const GEMINATION_FILE: &str = "gemination.txt";
pub const CNG_TABLE_FILE: &str = "cng_table.tsv";
pub const CAUSATIVE_PAIRS_FILE: &str = "causative_pairs.tsv";
pub const PRONOUN_MAP_FILE: &str = "pronoun_map.tsv";

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("{file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("cannot read rule file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn parse_err(file: &str, line: usize, msg: impl Into<String>) -> RuleError {
    RuleError::Parse {
        file: file.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Everything the aligner needs, loaded once and shared read-only.
#[derive(Debug, Clone)]
pub struct RuleSet {
    pub sandhi: SandhiRuleTable,
    pub gemination: GeminationRules,
    pub cng: CngTable,
    pub tables: ModificationTables,
}

impl RuleSet {
    /// The tables compiled into the crate from `data/`.
    pub fn bundled() -> RuleSet {
        Self::from_texts(
            include_str!("../data/sandhi_rules.txt"),
            include_str!("../data/preverbs.txt"),
            include_str!("../data/gemination.txt"),
            include_str!("../data/cng_table.tsv"),
            include_str!("../data/causative_pairs.tsv"),
            include_str!("../data/pronoun_map.tsv"),
        )
        .expect("bundled rule files parse")
    }

    /// Load all six files from one directory.
    pub fn load_dir(dir: &Path) -> Result<RuleSet, RuleError> {
        let read = |name: &str| {
            std::fs::read_to_string(dir.join(name)).map_err(|source| RuleError::Io {
                path: dir.join(name).display().to_string(),
                source,
            })
        };
        Self::from_texts(
            &read(SANDHI_RULES_FILE)?,
            &read(PREVERBS_FILE)?,
            &read(GEMINATION_FILE)?,
            &read(CNG_TABLE_FILE)?,
            &read(CAUSATIVE_PAIRS_FILE)?,
            &read(PRONOUN_MAP_FILE)?,
        )
    }

    pub fn from_texts(
        sandhi_rules: &str,
        preverbs: &str,
        gemination: &str,
        cng_table: &str,
        causative_pairs: &str,
        pronoun_map: &str,
    ) -> Result<RuleSet, RuleError> {
        let mut sandhi = parse_sandhi_rules(sandhi_rules)?;
        parse_preverbs(preverbs, &mut sandhi)?;
        Ok(RuleSet {
            sandhi,
            gemination: parse_gemination(gemination)?,
            cng: parse_cng_table(cng_table)?,
            tables: ModificationTables {
                causative_pairs: parse_pair_file(causative_pairs, CAUSATIVE_PAIRS_FILE)?,
                pronoun_map: parse_pair_file(pronoun_map, PRONOUN_MAP_FILE)?,
            },
        })
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_sandhi_rules(text: &str) -> Result<SandhiRuleTable, RuleError> {
    let file = SANDHI_RULES_FILE;
    let mut table = SandhiRuleTable::new();
    for (line_no, line) in content_lines(text) {
        let (junction, replacement) = line
            .split_once('=')
            .ok_or_else(|| parse_err(file, line_no, "expected <final>+<initial>=<replacement>"))?;
        let (final_s, initial_s) = junction
            .split_once('+')
            .ok_or_else(|| parse_err(file, line_no, "expected <final>+<initial> before '='"))?;
        let one = |s: &str| -> Result<_, RuleError> {
            let ps = parse_iast(s.trim()).map_err(|e| parse_err(file, line_no, e.to_string()))?;
            if ps.len() != 1 || !ps.first().unwrap().is_vowel() {
                return Err(parse_err(file, line_no, format!("{s:?} is not one vowel")));
            }
            Ok(ps.first().unwrap())
        };
        let final_ = one(final_s)?;
        let initial = one(initial_s)?;
        let repl =
            parse_iast(replacement.trim()).map_err(|e| parse_err(file, line_no, e.to_string()))?;
        table
            .add_vowel_rule(final_, initial, repl.as_slice().to_vec())
            .map_err(|e| parse_err(file, line_no, e.to_string()))?;
    }
    Ok(table)
}

fn parse_preverbs(text: &str, table: &mut SandhiRuleTable) -> Result<(), RuleError> {
    let file = PREVERBS_FILE;
    for (line_no, line) in content_lines(text) {
        let mut fields = line.split('\t');
        let head = fields.next().unwrap().trim();
        let preverb = parse_iast(head).map_err(|e| parse_err(file, line_no, e.to_string()))?;
        let mut flags = PreverbFlags::default();
        for flag in fields.flat_map(|f| f.split_whitespace()) {
            match flag {
                "natva" => flags.natva = true,
                "satva" => flags.satva = true,
                other => return Err(parse_err(file, line_no, format!("unknown flag {other:?}"))),
            }
        }
        table.add_preverb(preverb, flags);
    }
    Ok(())
}

fn parse_gemination(text: &str) -> Result<GeminationRules, RuleError> {
    let file = GEMINATION_FILE;
    let mut triggers = std::collections::BTreeSet::new();
    for (line_no, line) in content_lines(text) {
        let ps = parse_iast(line.trim()).map_err(|e| parse_err(file, line_no, e.to_string()))?;
        if ps.len() != 1 {
            return Err(parse_err(file, line_no, "expected one phoneme per line"));
        }
        triggers.insert(ps.first().unwrap());
    }
    Ok(GeminationRules { triggers })
}

fn parse_cng_table(text: &str) -> Result<CngTable, RuleError> {
    let file = CNG_TABLE_FILE;
    let mut table = CngTable::new();
    for (line_no, line) in content_lines(text) {
        let (tag, code) = line
            .split_once('\t')
            .ok_or_else(|| parse_err(file, line_no, "expected <tag>\\t<code>"))?;
        let tag = tag.trim();
        if tag.is_empty() {
            return Err(parse_err(file, line_no, "empty tag"));
        }
        let code: i32 = code
            .trim()
            .parse()
            .map_err(|_| parse_err(file, line_no, format!("bad code {code:?}")))?;
        table.insert(MorphTag::new(tag), CngCode(code));
    }
    Ok(table)
}

fn parse_pair_file(
    text: &str,
    file: &str,
) -> Result<BTreeMap<PhonemeString, PhonemeString>, RuleError> {
    let mut map = BTreeMap::new();
    let mut seen_values = std::collections::BTreeSet::new();
    for (line_no, line) in content_lines(text) {
        let (left, right) = line
            .split_once('\t')
            .ok_or_else(|| parse_err(file, line_no, "expected two tab-separated forms"))?;
        let left = parse_iast(left.trim()).map_err(|e| parse_err(file, line_no, e.to_string()))?;
        let right =
            parse_iast(right.trim()).map_err(|e| parse_err(file, line_no, e.to_string()))?;
        if map.insert(left.clone(), right.clone()).is_some() {
            return Err(parse_err(file, line_no, format!("duplicate key {left:?}")));
        }
        if !seen_values.insert(right.clone()) {
            return Err(parse_err(
                file,
                line_no,
                format!("duplicate value {right:?}"),
            ));
        }
    }
    Ok(map)
}
