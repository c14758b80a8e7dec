//! Word-frequency lexicons and per-user adaptation profiles.
//!
//! # Corpus text format
//!
//! UTF-8, one record per line. Blank lines and lines whose first
//! non-blank character is `#` are ignored. Records before any section
//! header, or after `[unigrams]`, are `word<TAB>frequency`. Records after
//! `[bigrams]` are `word<TAB>next_word<TAB>count`. Frequencies and counts
//! are positive decimal integers. Repeated words (and repeated bigrams) sum
//! their counts. Every bigram endpoint must also appear as a unigram.
//!
//! ```text
//! # lesson vocabulary
//! [unigrams]
//! my	9
//! cat	5
//! car	3
//! [bigrams]
//! my	cat	4
//! my	car	1
//! ```
//!
//! # Profile text format
//!
//! ```text
//! # wordpred profile
//! [meta]
//! username=somchai
//! corpus_tag=lesson
//! [deltas]
//! cat=2
//! [custom]
//! zyzzyva=1
//! [end]
//! ```
//!
//! `[meta]` must come first and carry both keys. Meta lines split at the
//! first `=`; delta and custom lines split at the last `=` (words may
//! contain `=`, values never do). The closing `[end]` line is mandatory so
//! that a file cut short at a line boundary is rejected rather than read
//! as a smaller profile.

// the corpus example above is literally tab-separated
#![allow(clippy::tabs_in_doc_comments)]

use alloc::borrow::Cow;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::num::NonZeroU64;

use unicode_normalization::{is_nfc, UnicodeNormalization};

/// Errors raised while reading lexicons and profiles or validating words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexiconError {
    /// A corpus line that is not a valid record or header.
    MalformedLine { line: usize, reason: &'static str },
    /// A frequency or count field that is not a positive integer.
    MalformedFrequency { line: usize, value: String },
    /// Empty word, or one containing whitespace or control characters.
    InvalidWord { line: Option<usize>, word: String },
    /// A bigram naming a word that has no unigram entry.
    UnknownBigramWord { line: usize, word: String },
    /// Empty corpus tag, or one containing whitespace or control characters.
    InvalidCorpusTag(String),
    /// Empty username, or one containing control characters or edge whitespace.
    InvalidUsername(String),
    /// Profile text that does not follow the profile grammar.
    MalformedProfile { line: Option<usize>, reason: &'static str },
}

impl fmt::Display for LexiconError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexiconError::MalformedLine { line, reason } => {
                write!(f, "line {line}: malformed line ({reason})")
            }
            LexiconError::MalformedFrequency { line, value } => {
                write!(f, "line {line}: frequency must be a positive integer, got {value:?}")
            }
            LexiconError::InvalidWord { line: Some(line), word } => {
                write!(f, "line {line}: invalid word {word:?}")
            }
            LexiconError::InvalidWord { line: None, word } => write!(f, "invalid word {word:?}"),
            LexiconError::UnknownBigramWord { line, word } => {
                write!(f, "line {line}: bigram word {word:?} has no unigram entry")
            }
            LexiconError::InvalidCorpusTag(tag) => write!(f, "invalid corpus tag {tag:?}"),
            LexiconError::InvalidUsername(name) => write!(f, "invalid username {name:?}"),
            LexiconError::MalformedProfile { line: Some(line), reason } => {
                write!(f, "line {line}: malformed profile ({reason})")
            }
            LexiconError::MalformedProfile { line: None, reason } => {
                write!(f, "malformed profile ({reason})")
            }
        }
    }
}

impl core::error::Error for LexiconError {}

/// NFC form of `s`, borrowing when it is already normalized.
pub fn normalize(s: &str) -> Cow<'_, str> {
    if is_nfc(s) {
        Cow::Borrowed(s)
    } else {
        Cow::Owned(s.nfc().collect())
    }
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !c.is_control()
}

/// A validated, NFC-normalized word: nonempty, without whitespace or
/// control characters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(String);

impl Word {
    pub fn new(raw: &str) -> Result<Self, LexiconError> {
        Self::parse_at(raw, None)
    }

    fn parse_at(raw: &str, line: Option<usize>) -> Result<Self, LexiconError> {
        if raw.is_empty() || !raw.chars().all(is_word_char) {
            return Err(LexiconError::InvalidWord { line, word: raw.to_string() });
        }
        Ok(Word(normalize(raw).into_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Length in Unicode scalar values, the unit every keystroke count uses.
    pub fn char_len(&self) -> usize {
        self.0.chars().count()
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Word {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Label naming a vocabulary database, e.g. `general` or `lesson`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CorpusTag(Arc<str>);

impl CorpusTag {
    pub fn new(raw: &str) -> Result<Self, LexiconError> {
        if raw.is_empty() || !raw.chars().all(is_word_char) {
            return Err(LexiconError::InvalidCorpusTag(raw.to_string()));
        }
        Ok(CorpusTag(Arc::from(raw)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CorpusTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub frequency: u64,
    /// Corpus the word was first loaded from.
    pub corpus_tag: CorpusTag,
}

/// Base word frequencies and bigram follow counts for one corpus.
///
/// Immutable once built; share it behind an `Arc`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    tag: CorpusTag,
    entries: BTreeMap<String, LexiconEntry>,
    bigrams: BTreeMap<String, BTreeMap<String, u64>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Unigrams,
    Bigrams,
}

fn parse_count(field: &str, line: usize) -> Result<u64, LexiconError> {
    match field.trim().parse::<u64>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(LexiconError::MalformedFrequency { line, value: field.to_string() }),
    }
}

/// Parse corpus text into a [`Lexicon`] tagged `tag`.
pub fn load_corpus(source: &str, tag: CorpusTag) -> Result<Lexicon, LexiconError> {
    Lexicon::parse(source, tag)
}

impl Lexicon {
    pub fn new(tag: CorpusTag) -> Self {
        Lexicon { tag, entries: BTreeMap::new(), bigrams: BTreeMap::new() }
    }

    /// Parse corpus text; see the module docs for the grammar.
    pub fn parse(source: &str, tag: CorpusTag) -> Result<Self, LexiconError> {
        let mut lexicon = Lexicon::new(tag);
        let mut section = Section::Unigrams;
        // (line, first, second, count), checked once all unigrams are known
        let mut pending_bigrams: Vec<(usize, String, String, u64)> = Vec::new();

        for (idx, raw) in source.lines().enumerate() {
            let line = idx + 1;
            let text = raw.strip_suffix('\r').unwrap_or(raw);
            let trimmed = text.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if trimmed.starts_with('[') {
                section = match trimmed {
                    "[unigrams]" => Section::Unigrams,
                    "[bigrams]" => Section::Bigrams,
                    _ => return Err(LexiconError::MalformedLine { line, reason: "unknown section header" }),
                };
                continue;
            }
            let fields: Vec<&str> = text.split('\t').collect();
            match section {
                Section::Unigrams => {
                    if fields.len() != 2 {
                        return Err(LexiconError::MalformedLine {
                            line,
                            reason: "expected word<TAB>frequency",
                        });
                    }
                    let word = Word::parse_at(fields[0], Some(line))?;
                    let frequency = parse_count(fields[1], line)?;
                    lexicon.add_frequency(word, frequency);
                }
                Section::Bigrams => {
                    if fields.len() != 3 {
                        return Err(LexiconError::MalformedLine {
                            line,
                            reason: "expected word<TAB>next_word<TAB>count",
                        });
                    }
                    let first = Word::parse_at(fields[0], Some(line))?;
                    let second = Word::parse_at(fields[1], Some(line))?;
                    let count = parse_count(fields[2], line)?;
                    pending_bigrams.push((line, first.into_string(), second.into_string(), count));
                }
            }
        }

        for (line, first, second, count) in pending_bigrams {
            for w in [&first, &second] {
                if !lexicon.entries.contains_key(w.as_str()) {
                    return Err(LexiconError::UnknownBigramWord { line, word: w.clone() });
                }
            }
            let slot = lexicon.bigrams.entry(first).or_default().entry(second).or_insert(0);
            *slot = slot.saturating_add(count);
        }
        Ok(lexicon)
    }

    /// Add `frequency` to `word`, creating the entry if needed.
    pub fn add_frequency(&mut self, word: Word, frequency: u64) {
        let tag = self.tag.clone();
        let entry = self
            .entries
            .entry(word.into_string())
            .or_insert(LexiconEntry { frequency: 0, corpus_tag: tag });
        entry.frequency = entry.frequency.saturating_add(frequency);
    }

    /// Add `count` to the bigram `(first, second)`. Both words must already
    /// have unigram entries.
    pub fn add_bigram(&mut self, first: &Word, second: &Word, count: NonZeroU64) -> Result<(), LexiconError> {
        for w in [first, second] {
            if !self.contains(w.as_str()) {
                return Err(LexiconError::UnknownBigramWord { line: 0, word: w.to_string() });
            }
        }
        let slot = self
            .bigrams
            .entry(first.as_str().to_string())
            .or_default()
            .entry(second.as_str().to_string())
            .or_insert(0);
        *slot = slot.saturating_add(count.get());
        Ok(())
    }

    /// Fold `other` into `self`, summing frequencies and bigram counts.
    /// Words new to `self` keep `other`'s corpus tag on their entry.
    pub fn merge(&mut self, other: &Lexicon) {
        for (word, entry) in &other.entries {
            let slot = self.entries.entry(word.clone()).or_insert(LexiconEntry {
                frequency: 0,
                corpus_tag: entry.corpus_tag.clone(),
            });
            slot.frequency = slot.frequency.saturating_add(entry.frequency);
        }
        for (first, followers) in &other.bigrams {
            let row = self.bigrams.entry(first.clone()).or_default();
            for (second, count) in followers {
                let slot = row.entry(second.clone()).or_insert(0);
                *slot = slot.saturating_add(*count);
            }
        }
    }

    pub fn tag(&self) -> &CorpusTag {
        &self.tag
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(normalize(word).as_ref())
    }

    pub fn entry(&self, word: &str) -> Option<&LexiconEntry> {
        self.entries.get(normalize(word).as_ref())
    }

    /// Base frequency of `word`, 0 when absent.
    pub fn frequency(&self, word: &str) -> u64 {
        self.entry(word).map_or(0, |e| e.frequency)
    }

    pub(crate) fn frequency_nfc(&self, word: &str) -> u64 {
        self.entries.get(word).map_or(0, |e| e.frequency)
    }

    /// Words with their entries, in codepoint order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &LexiconEntry)> {
        self.entries.iter().map(|(w, e)| (w.as_str(), e))
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Follow counts recorded after `word`, if any.
    pub fn followers(&self, word: &str) -> Option<&BTreeMap<String, u64>> {
        self.bigrams.get(normalize(word).as_ref()).filter(|row| !row.is_empty())
    }

    /// All bigrams as `(first, second, count)` in codepoint order.
    pub fn bigrams(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.bigrams
            .iter()
            .flat_map(|(a, row)| row.iter().map(move |(b, n)| (a.as_str(), b.as_str(), *n)))
    }

    pub fn total_frequency(&self) -> u64 {
        self.entries.values().fold(0u64, |acc, e| acc.saturating_add(e.frequency))
    }

    /// Canonical corpus text: header comment, sorted unigrams, then sorted
    /// bigrams when there are any. Parsing it back yields an equal lexicon.
    pub fn to_corpus_text(&self) -> String {
        use core::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "# corpus: {}", self.tag);
        out.push_str("[unigrams]\n");
        for (word, entry) in &self.entries {
            let _ = writeln!(out, "{word}\t{}", entry.frequency);
        }
        if !self.bigrams.is_empty() {
            out.push_str("[bigrams]\n");
            for (a, b, n) in self.bigrams() {
                let _ = writeln!(out, "{a}\t{b}\t{n}");
            }
        }
        out
    }
}

/// Per-user adaptation: reinforcement deltas and user-added words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserProfile {
    username: String,
    corpus_tag: CorpusTag,
    deltas: BTreeMap<String, u64>,
    custom_words: BTreeMap<String, u64>,
}

/// Initial frequency given to a word the user adds.
pub const CUSTOM_WORD_INITIAL_FREQUENCY: u64 = 1;

fn validate_username(name: &str) -> Result<(), LexiconError> {
    if name.is_empty()
        || name.chars().any(char::is_control)
        || name.trim() != name
    {
        return Err(LexiconError::InvalidUsername(name.to_string()));
    }
    Ok(())
}

impl UserProfile {
    pub fn new(username: &str, corpus_tag: CorpusTag) -> Result<Self, LexiconError> {
        validate_username(username)?;
        Ok(UserProfile {
            username: username.to_string(),
            corpus_tag,
            deltas: BTreeMap::new(),
            custom_words: BTreeMap::new(),
        })
    }

    pub fn username(&self) -> &str {
        &self.username
    }

    pub fn corpus_tag(&self) -> &CorpusTag {
        &self.corpus_tag
    }

    /// Add `word` as a custom word at the initial frequency.
    ///
    /// Returns `Ok(true)` if the word was new, `Ok(false)` if it was already
    /// a custom word (the profile is left untouched).
    pub fn add_word(&mut self, word: &str) -> Result<bool, LexiconError> {
        let word = Word::new(word)?;
        if self.custom_words.contains_key(word.as_str()) {
            return Ok(false);
        }
        self.custom_words.insert(word.into_string(), CUSTOM_WORD_INITIAL_FREQUENCY);
        Ok(true)
    }

    /// Raise the reinforcement delta of `word` by `increment`.
    pub fn reinforce(&mut self, word: &str, increment: NonZeroU64) {
        let slot = self.deltas.entry(normalize(word).into_owned()).or_insert(0);
        *slot = slot.saturating_add(increment.get());
    }

    pub fn delta(&self, word: &str) -> u64 {
        self.delta_nfc(&normalize(word))
    }

    pub(crate) fn delta_nfc(&self, word: &str) -> u64 {
        self.deltas.get(word).copied().unwrap_or(0)
    }

    pub fn deltas(&self) -> impl Iterator<Item = (&str, u64)> {
        self.deltas.iter().map(|(w, d)| (w.as_str(), *d))
    }

    /// Initial frequency of a custom word, `None` when `word` is not custom.
    pub fn custom_frequency(&self, word: &str) -> Option<u64> {
        self.custom_frequency_nfc(&normalize(word))
    }

    pub(crate) fn custom_frequency_nfc(&self, word: &str) -> Option<u64> {
        self.custom_words.get(word).copied()
    }

    pub fn is_custom(&self, word: &str) -> bool {
        self.custom_frequency(word).is_some()
    }

    pub fn custom_words(&self) -> impl Iterator<Item = (&str, u64)> {
        self.custom_words.iter().map(|(w, f)| (w.as_str(), *f))
    }

    /// Serialize to profile text; see the module docs.
    pub fn to_text(&self) -> String {
        use core::fmt::Write;
        let mut out = String::from("# wordpred profile\n[meta]\n");
        let _ = writeln!(out, "username={}", self.username);
        let _ = writeln!(out, "corpus_tag={}", self.corpus_tag);
        out.push_str("[deltas]\n");
        for (word, delta) in &self.deltas {
            let _ = writeln!(out, "{word}={delta}");
        }
        out.push_str("[custom]\n");
        for (word, freq) in &self.custom_words {
            let _ = writeln!(out, "{word}={freq}");
        }
        out.push_str("[end]\n");
        out
    }

    /// Parse profile text produced by [`UserProfile::to_text`].
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        #[derive(Clone, Copy, PartialEq, Eq)]
        enum Part {
            Start,
            Meta,
            Deltas,
            Custom,
            End,
        }
        let bad = |line: usize, reason: &'static str| LexiconError::MalformedProfile { line: Some(line), reason };

        let mut part = Part::Start;
        let mut username: Option<String> = None;
        let mut corpus_tag: Option<CorpusTag> = None;
        let mut deltas = BTreeMap::new();
        let mut custom_words = BTreeMap::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let text = raw.strip_suffix('\r').unwrap_or(raw);
            if text.trim().is_empty() || text.trim_start().starts_with('#') {
                continue;
            }
            if part == Part::End {
                return Err(bad(line, "content after [end]"));
            }
            match text {
                "[meta]" if part == Part::Start => {
                    part = Part::Meta;
                    continue;
                }
                "[deltas]" if part == Part::Meta => {
                    part = Part::Deltas;
                    continue;
                }
                "[custom]" if part == Part::Deltas => {
                    part = Part::Custom;
                    continue;
                }
                "[end]" if part != Part::Start => {
                    part = Part::End;
                    continue;
                }
                _ if text.starts_with('[') => return Err(bad(line, "unexpected section header")),
                _ => {}
            }
            match part {
                Part::Start => return Err(bad(line, "expected [meta]")),
                Part::Meta => {
                    let (key, value) = text.split_once('=').ok_or_else(|| bad(line, "expected key=value"))?;
                    match key {
                        "username" if username.is_none() => {
                            validate_username(value).map_err(|_| bad(line, "invalid username"))?;
                            username = Some(value.to_string());
                        }
                        "corpus_tag" if corpus_tag.is_none() => {
                            corpus_tag = Some(CorpusTag::new(value).map_err(|_| bad(line, "invalid corpus tag"))?);
                        }
                        _ => return Err(bad(line, "unknown or repeated meta key")),
                    }
                }
                Part::Deltas | Part::Custom => {
                    let (word, value) = text.rsplit_once('=').ok_or_else(|| bad(line, "expected word=value"))?;
                    let word = Word::new(word).map_err(|_| bad(line, "invalid word"))?;
                    if value.is_empty() || !value.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(bad(line, "value must be a non-negative integer"));
                    }
                    let value: u64 = value.parse().map_err(|_| bad(line, "value out of range"))?;
                    let map = if part == Part::Deltas { &mut deltas } else { &mut custom_words };
                    if part == Part::Custom && value == 0 {
                        return Err(bad(line, "custom word frequency must be positive"));
                    }
                    if map.insert(word.into_string(), value).is_some() {
                        return Err(bad(line, "duplicate word"));
                    }
                }
                Part::End => unreachable!(),
            }
        }

        if part != Part::End {
            return Err(LexiconError::MalformedProfile { line: None, reason: "truncated: missing [end]" });
        }
        let (Some(username), Some(corpus_tag)) = (username, corpus_tag) else {
            return Err(LexiconError::MalformedProfile { line: None, reason: "missing username or corpus_tag" });
        };
        Ok(UserProfile { username, corpus_tag, deltas, custom_words })
    }
}

/// Base frequency + reinforcement delta + custom initial frequency.
/// Unknown words score 0.
pub fn effective_frequency(lexicon: &Lexicon, profile: &UserProfile, word: &str) -> u64 {
    effective_frequency_nfc(lexicon, profile, &normalize(word))
}

/// [`effective_frequency`] for a word already in NFC.
pub(crate) fn effective_frequency_nfc(lexicon: &Lexicon, profile: &UserProfile, word: &str) -> u64 {
    lexicon
        .frequency_nfc(word)
        .saturating_add(profile.delta_nfc(word))
        .saturating_add(profile.custom_frequency_nfc(word).unwrap_or(0))
}
