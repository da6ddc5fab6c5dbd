//! External sandhi at a single junction: vowel-vowel replacement rules for
//! compound joining, and preverb attachment with the retroflexion
//! transformations (ṇatva, ṣatva) some preverbs trigger.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Phoneme, PhonemeString};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SandhiError {
    #[error("no sandhi rule for junction {final_:?}+{initial:?}")]
    MissingRule { final_: Phoneme, initial: Phoneme },
    #[error("duplicate sandhi rule for junction {final_:?}+{initial:?}")]
    DuplicateRule { final_: Phoneme, initial: Phoneme },
    #[error("unknown preverb {0:?}")]
    UnknownPreverb(String),
}

/// Retroflexion triggers carried by a preverb: ṇatva for preverbs containing
/// r/ṛ/ṣ, ṣatva for preverbs ending in an i/u-class vowel.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PreverbFlags {
    pub natva: bool,
    pub satva: bool,
}

/// Junction rules keyed on (final vowel, initial vowel), plus the configured
/// preverb set. Read-only after load; lookups of missing pairs are an error,
/// never a fallback.
#[derive(Debug, Clone, Default)]
pub struct SandhiRuleTable {
    vowel_rules: BTreeMap<(Phoneme, Phoneme), Vec<Phoneme>>,
    preverbs: BTreeMap<PhonemeString, PreverbFlags>,
}

impl SandhiRuleTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vowel_rule(
        &mut self,
        final_: Phoneme,
        initial: Phoneme,
        replacement: Vec<Phoneme>,
    ) -> Result<(), SandhiError> {
        if self.vowel_rules.contains_key(&(final_, initial)) {
            return Err(SandhiError::DuplicateRule { final_, initial });
        }
        self.vowel_rules.insert((final_, initial), replacement);
        Ok(())
    }

    pub fn add_preverb(&mut self, preverb: PhonemeString, flags: PreverbFlags) {
        self.preverbs.insert(preverb, flags);
    }

    pub fn vowel_rule(&self, final_: Phoneme, initial: Phoneme) -> Option<&[Phoneme]> {
        self.vowel_rules
            .get(&(final_, initial))
            .map(|v| v.as_slice())
    }

    pub fn preverb_flags(&self, preverb: &PhonemeString) -> Option<PreverbFlags> {
        self.preverbs.get(preverb).copied()
    }

    pub fn preverbs(&self) -> impl Iterator<Item = (&PhonemeString, PreverbFlags)> {
        self.preverbs.iter().map(|(p, f)| (p, *f))
    }

    pub fn vowel_rule_count(&self) -> usize {
        self.vowel_rules.len()
    }
}

/// Join two forms at their junction. Boundary pseudo-phonemes touching the
/// junction are dropped first. A vowel-vowel junction must have exactly one
/// table rule, which replaces both junction phonemes; any other junction is
/// plain concatenation. No phoneme away from the junction changes.
pub fn vowel_sandhi_join(
    left: &PhonemeString,
    right: &PhonemeString,
    rules: &SandhiRuleTable,
) -> Result<PhonemeString, SandhiError> {
    let mut l: Vec<Phoneme> = left.as_slice().to_vec();
    while l.last().is_some_and(|p| p.is_boundary()) {
        l.pop();
    }
    let mut r: Vec<Phoneme> = right.as_slice().to_vec();
    let lead = r.iter().take_while(|p| p.is_boundary()).count();
    r.drain(..lead);

    match (l.last().copied(), r.first().copied()) {
        (Some(last), Some(first)) if last.is_vowel() && first.is_vowel() => {
            let replacement = rules
                .vowel_rule(last, first)
                .ok_or(SandhiError::MissingRule {
                    final_: last,
                    initial: first,
                })?
                .to_vec();
            l.pop();
            l.extend(replacement);
            l.extend(r.into_iter().skip(1));
        }
        _ => l.extend(r),
    }
    Ok(PhonemeString::new(l))
}

/// Attach a preverb to a stem. The preverb must be in the configured set.
/// A ṇatva-flagged preverb retroflexes the first n inside the stem's first
/// syllable; a ṣatva-flagged one retroflexes stem-initial s before a vowel
/// or t/th/m/y/v. The junction itself then goes through
/// [`vowel_sandhi_join`].
pub fn apply_preverb(
    preverb: &PhonemeString,
    stem: &PhonemeString,
    rules: &SandhiRuleTable,
) -> Result<PhonemeString, SandhiError> {
    let key = preverb.strip_boundaries();
    let flags = rules
        .preverb_flags(&key)
        .ok_or_else(|| SandhiError::UnknownPreverb(key.render()))?;
    let mut stem_ph: Vec<Phoneme> = stem.strip_boundaries().as_slice().to_vec();
    if flags.natva {
        apply_natva(&mut stem_ph);
    }
    if flags.satva {
        apply_satva(&mut stem_ph);
    }
    vowel_sandhi_join(&key, &PhonemeString::new(stem_ph), rules)
}

/// Retroflex the first n lying in the first syllable. The first syllable
/// ends just before the onset of the second one, i.e. one phoneme before the
/// second vowel; a stem with fewer than two vowels is a single syllable.
fn apply_natva(stem: &mut [Phoneme]) {
    let mut vowels = stem
        .iter()
        .enumerate()
        .filter(|(_, p)| p.is_vowel())
        .map(|(i, _)| i);
    let _first = vowels.next();
    let limit = match vowels.next() {
        Some(second) => second.saturating_sub(1),
        None => stem.len(),
    };
    for p in stem.iter_mut().take(limit) {
        if *p == Phoneme::N {
            *p = Phoneme::RetroN;
            return;
        }
    }
}

fn apply_satva(stem: &mut [Phoneme]) {
    use Phoneme::*;
    if stem.first() != Some(&S) {
        return;
    }
    match stem.get(1) {
        Some(p) if p.is_vowel() || matches!(p, T | Th | M | Y | V) => stem[0] = RetroS,
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phonology::parse_iast;

    fn table() -> SandhiRuleTable {
        crate::rules::RuleSet::bundled().sandhi
    }

    fn join(l: &str, r: &str) -> String {
        vowel_sandhi_join(&parse_iast(l).unwrap(), &parse_iast(r).unwrap(), &table())
            .unwrap()
            .render()
    }

    fn prev(p: &str, s: &str) -> String {
        apply_preverb(&parse_iast(p).unwrap(), &parse_iast(s).unwrap(), &table())
            .unwrap()
            .render()
    }

    #[test]
    fn yan_sandhi_i_u() {
        assert_eq!(join("śukti", "udbhavam"), "śuktyudbhavam");
    }

    #[test]
    fn consonant_initial_right_concatenates() {
        assert_eq!(join("mahā", "deva"), "mahādeva");
    }

    #[test]
    fn savarna_a_a() {
        // hand-checked vowel chart: a + a lengthens
        assert_eq!(join("deva", "alaya"), "devālaya");
    }

    #[test]
    fn missing_rule_is_error() {
        let empty = SandhiRuleTable::new();
        let err = vowel_sandhi_join(
            &parse_iast("deva").unwrap(),
            &parse_iast("alaya").unwrap(),
            &empty,
        )
        .unwrap_err();
        assert!(matches!(err, SandhiError::MissingRule { .. }));
    }

    #[test]
    fn preverb_triples() {
        assert_eq!(prev("pra", "nam"), "praṇam");
        assert_eq!(prev("pra", "śaṃs"), "praśaṃs");
        assert_eq!(prev("vi", "rāj"), "virāj");
    }

    #[test]
    fn natva_reaches_coda_of_single_syllable() {
        // pra + an: the coda n of the single syllable retroflexes
        assert_eq!(prev("pra", "an"), "prāṇ");
    }

    #[test]
    fn natva_stops_at_second_syllable_onset() {
        assert_eq!(prev("pra", "manas"), "pramanas");
    }

    #[test]
    fn satva_initial_s() {
        assert_eq!(prev("ni", "sad"), "niṣad");
        assert_eq!(prev("ni", "sthā"), "niṣthā");
        // s before k is not in the trigger set
        assert_eq!(prev("ni", "skand"), "niskand");
    }

    #[test]
    fn unknown_preverb_rejected() {
        let err = apply_preverb(
            &parse_iast("pra").unwrap(),
            &parse_iast("nam").unwrap(),
            &SandhiRuleTable::new(),
        )
        .unwrap_err();
        assert!(matches!(err, SandhiError::UnknownPreverb(_)));
    }

    #[test]
    fn join_is_local_on_random_junctions() {
        let rules = table();
        let vowels: Vec<Phoneme> = ["a", "ā", "i", "ī", "u", "ū", "ṛ", "e", "o"]
            .iter()
            .map(|s| parse_iast(s).unwrap().first().unwrap())
            .collect();
        let body: Vec<Phoneme> = ["k", "t", "p", "m", "r", "s", "a", "i", "u"]
            .iter()
            .map(|s| parse_iast(s).unwrap().first().unwrap())
            .collect();
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = |n: usize| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % n as u64) as usize
        };
        for _ in 0..500 {
            let mut left = Vec::new();
            for _ in 0..(1 + next(6)) {
                left.push(body[next(body.len())]);
            }
            left.push(vowels[next(vowels.len())]);
            let mut right = vec![vowels[next(vowels.len())]];
            for _ in 0..next(6) {
                right.push(body[next(body.len())]);
            }
            let l = PhonemeString::new(left.clone());
            let r = PhonemeString::new(right.clone());
            let joined = vowel_sandhi_join(&l, &r, &rules).unwrap();
            let j = joined.as_slice();
            // left prefix minus its final vowel is verbatim
            assert_eq!(&j[..left.len() - 1], &left[..left.len() - 1]);
            // right suffix minus its initial vowel is verbatim
            assert_eq!(&j[j.len() - (right.len() - 1)..], &right[1..]);
        }
    }
}
