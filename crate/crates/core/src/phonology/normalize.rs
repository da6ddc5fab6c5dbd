//! Spelling normalization applied to both corpora before any comparison:
//! anusvāra to homorganic nasal, and collapse of optional consonant doubling
//! (dvitva). Both passes are fixed points.

use std::collections::BTreeSet;

use super::{Phoneme, PhonemeString};

/// Replace every anusvāra that stands immediately before a varga consonant
/// with that row's class nasal. Anusvāra before semivowels, sibilants, h, a
/// boundary, or at the end of the string is left alone, so chunk-final ṃ
/// survives and chunk reassembly stays exact. The scan runs right to left:
/// a replacement can put a class nasal after an earlier anusvāra, and that
/// one must cascade within the same pass for the result to be a fixed point.
pub fn normalize_anunasika(ps: &PhonemeString) -> PhonemeString {
    let mut out: Vec<Phoneme> = ps.as_slice().to_vec();
    for i in (0..out.len()).rev() {
        if out[i] == Phoneme::Anusvara {
            if let Some(varga) = out.get(i + 1).and_then(|next| next.varga()) {
                out[i] = varga.nasal();
            }
        }
    }
    PhonemeString::new(out)
}

/// Which phonemes license the optional doubling that gets collapsed. The
/// classical cases are r and h; the set is data-driven so corpus variants can
/// be added without a rebuild.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeminationRules {
    pub triggers: BTreeSet<Phoneme>,
}

impl Default for GeminationRules {
    fn default() -> Self {
        GeminationRules {
            triggers: [Phoneme::R, Phoneme::H].into_iter().collect(),
        }
    }
}

/// Collapse trigger-C-C (identical C) to trigger-C, e.g. dharmma to dharma,
/// with the default r/h trigger set.
pub fn normalize_gemination(ps: &PhonemeString) -> PhonemeString {
    normalize_gemination_with(ps, &GeminationRules::default())
}

pub fn normalize_gemination_with(ps: &PhonemeString, rules: &GeminationRules) -> PhonemeString {
    let mut cur: Vec<Phoneme> = ps.as_slice().to_vec();
    loop {
        let mut out = Vec::with_capacity(cur.len());
        let mut i = 0;
        let mut changed = false;
        while i < cur.len() {
            out.push(cur[i]);
            if rules.triggers.contains(&cur[i])
                && i + 2 < cur.len()
                && cur[i + 1] == cur[i + 2]
                && cur[i + 1].is_consonant()
            {
                out.push(cur[i + 1]);
                i += 3;
                changed = true;
            } else {
                i += 1;
            }
        }
        if !changed {
            return PhonemeString::new(out);
        }
        cur = out;
    }
}

/// Full normalization pass: anunāsika then dvitva.
pub fn normalize(ps: &PhonemeString, gemination: &GeminationRules) -> PhonemeString {
    normalize_gemination_with(&normalize_anunasika(ps), gemination)
}
