//! IAST text and its phoneme-level internal representation.
//!
//! All comparison and sandhi logic in this crate works on [`PhonemeString`]s,
//! one token per Sanskrit phoneme, so that window rules (anunāsika, dvitva,
//! vowel sandhi) never have to reason about multi-byte diacritics. External
//! I/O stays IAST UTF-8.

mod normalize;
mod sandhi;

pub use normalize::{normalize, normalize_anunasika, normalize_gemination, GeminationRules};
pub use sandhi::{apply_preverb, vowel_sandhi_join, PreverbFlags, SandhiError, SandhiRuleTable};

use std::collections::HashMap;
use std::fmt;
use std::sync::LazyLock;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

/// Place of articulation for the five stop rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Varga {
    Velar,
    Palatal,
    Retroflex,
    Dental,
    Labial,
}

impl Varga {
    /// The class nasal of this row.
    pub fn nasal(self) -> Phoneme {
        match self {
            Varga::Velar => Phoneme::VelarN,
            Varga::Palatal => Phoneme::PalatalN,
            Varga::Retroflex => Phoneme::RetroN,
            Varga::Dental => Phoneme::N,
            Varga::Labial => Phoneme::M,
        }
    }
}

/// One element of the closed Sanskrit sound inventory, plus the two boundary
/// pseudo-phonemes (space, hyphen) that are kept through parsing and stripped
/// by comparison routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phoneme {
    // simple and compound vowels
    A,
    LongA,
    I,
    LongI,
    U,
    LongU,
    VocalicR,
    LongVocalicR,
    VocalicL,
    LongVocalicL,
    E,
    Ai,
    O,
    Au,
    // velar row
    K,
    Kh,
    G,
    Gh,
    VelarN,
    // palatal row
    C,
    Ch,
    J,
    Jh,
    PalatalN,
    // retroflex row
    RetroT,
    RetroTh,
    RetroD,
    RetroDh,
    RetroN,
    // dental row
    T,
    Th,
    D,
    Dh,
    N,
    // labial row
    P,
    Ph,
    B,
    Bh,
    M,
    // semivowels
    Y,
    R,
    L,
    V,
    // sibilants and h
    PalatalS,
    RetroS,
    S,
    H,
    // signs
    Anusvara,
    Visarga,
    Avagraha,
    // boundary pseudo-phonemes
    Space,
    Hyphen,
}

impl Phoneme {
    /// IAST spelling (NFC).
    pub fn iast(self) -> &'static str {
        use Phoneme::*;
        match self {
            A => "a",
            LongA => "\u{101}",
            I => "i",
            LongI => "\u{12b}",
            U => "u",
            LongU => "\u{16b}",
            VocalicR => "\u{1e5b}",
            LongVocalicR => "\u{1e5d}",
            VocalicL => "\u{1e37}",
            LongVocalicL => "\u{1e39}",
            E => "e",
            Ai => "ai",
            O => "o",
            Au => "au",
            K => "k",
            Kh => "kh",
            G => "g",
            Gh => "gh",
            VelarN => "\u{1e45}",
            C => "c",
            Ch => "ch",
            J => "j",
            Jh => "jh",
            PalatalN => "\u{f1}",
            RetroT => "\u{1e6d}",
            RetroTh => "\u{1e6d}h",
            RetroD => "\u{1e0d}",
            RetroDh => "\u{1e0d}h",
            RetroN => "\u{1e47}",
            T => "t",
            Th => "th",
            D => "d",
            Dh => "dh",
            N => "n",
            P => "p",
            Ph => "ph",
            B => "b",
            Bh => "bh",
            M => "m",
            Y => "y",
            R => "r",
            L => "l",
            V => "v",
            PalatalS => "\u{15b}",
            RetroS => "\u{1e63}",
            S => "s",
            H => "h",
            Anusvara => "\u{1e43}",
            Visarga => "\u{1e25}",
            Avagraha => "'",
            Space => " ",
            Hyphen => "-",
        }
    }

    pub fn is_vowel(self) -> bool {
        use Phoneme::*;
        matches!(
            self,
            A | LongA
                | I
                | LongI
                | U
                | LongU
                | VocalicR
                | LongVocalicR
                | VocalicL
                | LongVocalicL
                | E
                | Ai
                | O
                | Au
        )
    }

    /// Stop row this phoneme belongs to, nasals included.
    pub fn varga(self) -> Option<Varga> {
        use Phoneme::*;
        match self {
            K | Kh | G | Gh | VelarN => Some(Varga::Velar),
            C | Ch | J | Jh | PalatalN => Some(Varga::Palatal),
            RetroT | RetroTh | RetroD | RetroDh | RetroN => Some(Varga::Retroflex),
            T | Th | D | Dh | N => Some(Varga::Dental),
            P | Ph | B | Bh | M => Some(Varga::Labial),
            _ => None,
        }
    }

    pub fn is_semivowel(self) -> bool {
        matches!(self, Phoneme::Y | Phoneme::R | Phoneme::L | Phoneme::V)
    }

    pub fn is_sibilant(self) -> bool {
        matches!(self, Phoneme::PalatalS | Phoneme::RetroS | Phoneme::S)
    }

    pub fn is_consonant(self) -> bool {
        self.varga().is_some() || self.is_semivowel() || self.is_sibilant() || self == Phoneme::H
    }

    pub fn is_boundary(self) -> bool {
        matches!(self, Phoneme::Space | Phoneme::Hyphen)
    }
}

/// Every phoneme keyed by its IAST spelling. The parser does longest-match
/// by probing two characters before one, so digraphs need no special flag.
static PARSE_MAP: LazyLock<HashMap<&'static str, Phoneme>> = LazyLock::new(|| {
    use Phoneme::*;
    [
        ("ai", Ai),
        ("au", Au),
        ("kh", Kh),
        ("gh", Gh),
        ("ch", Ch),
        ("jh", Jh),
        ("\u{1e6d}h", RetroTh),
        ("\u{1e0d}h", RetroDh),
        ("th", Th),
        ("dh", Dh),
        ("ph", Ph),
        ("bh", Bh),
        ("a", A),
        ("\u{101}", LongA),
        ("i", I),
        ("\u{12b}", LongI),
        ("u", U),
        ("\u{16b}", LongU),
        ("\u{1e5b}", VocalicR),
        ("\u{1e5d}", LongVocalicR),
        ("\u{1e37}", VocalicL),
        ("\u{1e39}", LongVocalicL),
        ("e", E),
        ("o", O),
        ("k", K),
        ("g", G),
        ("\u{1e45}", VelarN),
        ("c", C),
        ("j", J),
        ("\u{f1}", PalatalN),
        ("\u{1e6d}", RetroT),
        ("\u{1e0d}", RetroD),
        ("\u{1e47}", RetroN),
        ("t", T),
        ("d", D),
        ("n", N),
        ("p", P),
        ("b", B),
        ("m", M),
        ("y", Y),
        ("r", R),
        ("l", L),
        ("v", V),
        ("\u{15b}", PalatalS),
        ("\u{1e63}", RetroS),
        ("s", S),
        ("h", H),
        ("\u{1e43}", Anusvara),
        ("\u{1e25}", Visarga),
        ("'", Avagraha),
        (" ", Space),
        ("-", Hyphen),
    ]
    .into_iter()
    .collect()
});

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PhonologyError {
    #[error("unknown symbol {symbol:?} at position {position}")]
    UnknownSymbol { position: usize, symbol: char },
}

/// Declared canonical form of IAST input: NFC, typographic apostrophe folded
/// to the plain avagraha apostrophe, whitespace runs collapsed to one space.
pub fn canonicalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut in_space = false;
    for ch in text.nfc() {
        let ch = if ch == '\u{2019}' { '\'' } else { ch };
        if ch.is_whitespace() {
            if !in_space {
                out.push(' ');
            }
            in_space = true;
        } else {
            in_space = false;
            out.push(ch);
        }
    }
    out
}

/// Ordered sequence of phonemes; the carrier type for every comparison in
/// this crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PhonemeString(Vec<Phoneme>);

impl PhonemeString {
    pub fn new(phonemes: Vec<Phoneme>) -> Self {
        PhonemeString(phonemes)
    }

    pub fn parse(text: &str) -> Result<Self, PhonologyError> {
        parse_iast(text)
    }

    pub fn render(&self) -> String {
        render_iast(self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Phoneme] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Phoneme> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<Phoneme> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Phoneme> {
        self.0.last().copied()
    }

    pub fn push(&mut self, p: Phoneme) {
        self.0.push(p);
    }

    /// Copy with space and hyphen pseudo-phonemes removed; comparison
    /// routines work on this form.
    pub fn strip_boundaries(&self) -> PhonemeString {
        PhonemeString(self.iter().filter(|p| !p.is_boundary()).collect())
    }

    /// Split on hyphens, dropping spaces; used to take compound components
    /// back apart from a hyphen-joined word.
    pub fn hyphen_components(&self) -> Vec<PhonemeString> {
        let mut parts = vec![PhonemeString::default()];
        for p in self.iter() {
            match p {
                Phoneme::Hyphen => parts.push(PhonemeString::default()),
                Phoneme::Space => {}
                other => parts.last_mut().unwrap().push(other),
            }
        }
        parts.retain(|p| !p.is_empty());
        parts
    }

    /// Concatenation without any junction rule.
    pub fn concat(&self, other: &PhonemeString) -> PhonemeString {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        PhonemeString(v)
    }
}

impl From<Vec<Phoneme>> for PhonemeString {
    fn from(v: Vec<Phoneme>) -> Self {
        PhonemeString(v)
    }
}

impl FromIterator<Phoneme> for PhonemeString {
    fn from_iter<T: IntoIterator<Item = Phoneme>>(iter: T) -> Self {
        PhonemeString(iter.into_iter().collect())
    }
}

impl fmt::Display for PhonemeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for PhonemeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self.render())
    }
}

impl Serialize for PhonemeString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for PhonemeString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        PhonemeString::parse(&s).map_err(D::Error::custom)
    }
}

/// Tokenize canonicalized IAST into phonemes, digraph-first. Any character
/// outside the inventory is rejected with its position in the canonical
/// string.
pub fn parse_iast(text: &str) -> Result<PhonemeString, PhonologyError> {
    let canonical = canonicalize(text);
    let chars: Vec<char> = canonical.chars().collect();
    let mut out = Vec::with_capacity(chars.len());
    let mut i = 0;
    let mut buf = String::new();
    while i < chars.len() {
        buf.clear();
        if i + 1 < chars.len() {
            buf.push(chars[i]);
            buf.push(chars[i + 1]);
            if let Some(&p) = PARSE_MAP.get(buf.as_str()) {
                out.push(p);
                i += 2;
                continue;
            }
            buf.clear();
        }
        buf.push(chars[i]);
        match PARSE_MAP.get(buf.as_str()) {
            Some(&p) => {
                out.push(p);
                i += 1;
            }
            None => {
                return Err(PhonologyError::UnknownSymbol {
                    position: i,
                    symbol: chars[i],
                })
            }
        }
    }
    Ok(PhonemeString(out))
}

/// Inverse of [`parse_iast`]: spell the sequence back as IAST.
pub fn render_iast(ps: &PhonemeString) -> String {
    ps.iter().map(Phoneme::iast).collect()
}
