//! Ranked word completion and next-word prediction.
//!
//! Completions are every indexed word extending the typed prefix, ordered by
//! effective frequency (highest first) with ties broken by codepoint order.
//! Predictions are the recorded followers of the previous word ordered by
//! follow count; without follow data they fall back to the global frequency
//! ranking. Either list is served one fixed-size page at a time.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::cmp::Ordering;
use core::fmt;
use core::num::{NonZeroU64, NonZeroUsize};

use crate::lexicon::{effective_frequency, effective_frequency_nfc, normalize, Lexicon, LexiconError, UserProfile, Word};
use crate::trie::PrefixIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CandidateKind {
    /// Extends the partial word being typed.
    Completion,
    /// Whole next word after a committed word.
    Prediction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub word: String,
    /// The value the ranking sorted on: effective frequency for completions
    /// and fallback predictions, follow count for bigram predictions.
    pub score: u64,
    pub kind: CandidateKind,
}

/// One window of a ranked candidate list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePage {
    pub items: Vec<Candidate>,
    pub page_index: usize,
    pub total_pages: usize,
    pub page_size: NonZeroUsize,
    /// Length of the full ranked list.
    pub total_candidates: usize,
    pub kind: CandidateKind,
}

impl CandidatePage {
    pub fn empty(kind: CandidateKind, page_size: NonZeroUsize) -> Self {
        CandidatePage { items: Vec::new(), page_index: 0, total_pages: 0, page_size, total_candidates: 0, kind }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn has_next(&self) -> bool {
        self.page_index + 1 < self.total_pages
    }

    pub fn has_prev(&self) -> bool {
        self.page_index > 0
    }

    /// Slot of `word` on this page.
    pub fn position(&self, word: &str) -> Option<usize> {
        self.items.iter().position(|c| c.word == word)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PageError {
    pub requested: usize,
    pub total_pages: usize,
}

impl fmt::Display for PageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "page {} out of range ({} pages)", self.requested, self.total_pages)
    }
}

impl core::error::Error for PageError {}

/// Cut page `page_index` out of a fully ranked list.
pub fn paginate(
    ranked: Vec<Candidate>,
    kind: CandidateKind,
    page_index: usize,
    page_size: NonZeroUsize,
) -> Result<CandidatePage, PageError> {
    let size = page_size.get();
    let total = ranked.len();
    let total_pages = total.div_ceil(size);
    if page_index >= total_pages.max(1) {
        return Err(PageError { requested: page_index, total_pages });
    }
    let items = ranked.into_iter().skip(page_index * size).take(size).collect();
    Ok(CandidatePage { items, page_index, total_pages, page_size, total_candidates: total, kind })
}

/// Index the union of lexicon words and the profile's custom words.
pub fn build_index(lexicon: &Lexicon, profile: &UserProfile) -> PrefixIndex {
    PrefixIndex::build(lexicon, profile)
}

/// Unordered `(word, score)` pairs; every word is NFC.
type Scored<'a> = Vec<(&'a str, u64)>;

fn completions<'a>(index: &'a PrefixIndex, lexicon: &Lexicon, profile: &UserProfile, prefix: &str) -> Scored<'a> {
    index.matches(prefix).into_iter().map(|w| (w, effective_frequency_nfc(lexicon, profile, w))).collect()
}

fn predictions<'a>(
    index: &'a PrefixIndex,
    lexicon: &'a Lexicon,
    profile: &UserProfile,
    previous: Option<&str>,
) -> Scored<'a> {
    match previous.and_then(|w| lexicon.followers(w)) {
        Some(row) => row.iter().map(|(w, &count)| (w.as_str(), count)).collect(),
        None => completions(index, lexicon, profile, ""),
    }
}

fn scored_order(a: &(&str, u64), b: &(&str, u64)) -> Ordering {
    b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0))
}

fn candidates(scored: &[(&str, u64)], kind: CandidateKind) -> Vec<Candidate> {
    scored.iter().map(|&(w, score)| Candidate { word: String::from(w), score, kind }).collect()
}

fn ranked(mut scored: Scored<'_>, kind: CandidateKind) -> Vec<Candidate> {
    scored.sort_unstable_by(scored_order);
    candidates(&scored, kind)
}

/// `(start, end, total_pages)` of a page, or the error for a missing one.
fn page_bounds(total: usize, page_index: usize, page_size: NonZeroUsize) -> Result<(usize, usize, usize), PageError> {
    let size = page_size.get();
    let total_pages = total.div_ceil(size);
    if page_index >= total_pages.max(1) {
        return Err(PageError { requested: page_index, total_pages });
    }
    let start = page_index * size;
    Ok((start, (start + size).min(total), total_pages))
}

/// One page of an unordered list. Only the candidates up to the end of the
/// requested page get sorted.
fn page_of(
    mut scored: Scored<'_>,
    kind: CandidateKind,
    page_index: usize,
    page_size: NonZeroUsize,
) -> Result<CandidatePage, PageError> {
    let total = scored.len();
    let (start, end, total_pages) = page_bounds(total, page_index, page_size)?;
    if end < total {
        scored.select_nth_unstable_by(end, scored_order);
        scored.truncate(end);
    }
    scored.sort_unstable_by(scored_order);
    let items = candidates(&scored[start..], kind);
    Ok(CandidatePage { items, page_index, total_pages, page_size, total_candidates: total, kind })
}

/// Full completion ranking for `prefix`.
pub fn ranked_completions(
    index: &PrefixIndex,
    lexicon: &Lexicon,
    profile: &UserProfile,
    prefix: &str,
) -> Vec<Candidate> {
    ranked(completions(index, lexicon, profile, prefix), CandidateKind::Completion)
}

/// Full prediction ranking after `previous` (`None` at the start of text).
pub fn ranked_predictions(
    index: &PrefixIndex,
    lexicon: &Lexicon,
    profile: &UserProfile,
    previous: Option<&str>,
) -> Vec<Candidate> {
    ranked(predictions(index, lexicon, profile, previous), CandidateKind::Prediction)
}

/// One page of completions for `prefix`. The empty prefix ranks the whole
/// vocabulary.
pub fn complete(
    index: &PrefixIndex,
    lexicon: &Lexicon,
    profile: &UserProfile,
    prefix: &str,
    page_index: usize,
    page_size: NonZeroUsize,
) -> Result<CandidatePage, PageError> {
    page_of(completions(index, lexicon, profile, prefix), CandidateKind::Completion, page_index, page_size)
}

/// One page of next-word predictions after `previous`.
pub fn predict_next(
    index: &PrefixIndex,
    lexicon: &Lexicon,
    profile: &UserProfile,
    previous: Option<&str>,
    page_index: usize,
    page_size: NonZeroUsize,
) -> Result<CandidatePage, PageError> {
    page_of(predictions(index, lexicon, profile, previous), CandidateKind::Prediction, page_index, page_size)
}

/// Give `word` additional frequency in the user's profile.
pub fn reinforce(profile: &mut UserProfile, word: &str, increment: NonZeroU64) {
    profile.reinforce(word, increment);
}

pub const DEFAULT_PAGE_SIZE: NonZeroUsize = NonZeroUsize::new(5).unwrap();
pub const DEFAULT_INCREMENT: NonZeroU64 = NonZeroU64::MIN;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub page_size: NonZeroUsize,
    /// Frequency added to a word each time it is selected.
    pub increment: NonZeroU64,
    /// Whether selections reinforce the profile at all.
    pub adaptive: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { page_size: DEFAULT_PAGE_SIZE, increment: DEFAULT_INCREMENT, adaptive: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum RankingKey {
    Completion(String),
    Prediction(Option<String>),
}

/// The last full ranking an engine served, kept so that paging through it
/// does not rank again.
#[derive(Debug, Clone)]
struct RankingCache {
    key: RankingKey,
    ranked: Vec<(String, u64)>,
}

impl RankingCache {
    fn page(&self, kind: CandidateKind, page_index: usize, page_size: NonZeroUsize) -> Result<CandidatePage, PageError> {
        let total = self.ranked.len();
        let (start, end, total_pages) = page_bounds(total, page_index, page_size)?;
        let items = self.ranked[start..end]
            .iter()
            .map(|(w, score)| Candidate { word: w.clone(), score: *score, kind })
            .collect();
        Ok(CandidatePage { items, page_index, total_pages, page_size, total_candidates: total, kind })
    }
}

/// A lexicon, one user's profile and the index over both.
///
/// The lexicon is shared; the profile and index belong to this engine.
#[derive(Debug, Clone)]
pub struct Engine {
    lexicon: Arc<Lexicon>,
    profile: UserProfile,
    index: PrefixIndex,
    config: EngineConfig,
    cache: RefCell<Option<RankingCache>>,
}

impl Engine {
    pub fn new(lexicon: Arc<Lexicon>, profile: UserProfile, config: EngineConfig) -> Self {
        let index = build_index(&lexicon, &profile);
        Engine { lexicon, profile, index, config, cache: RefCell::new(None) }
    }

    fn cached_page<'a>(
        &'a self,
        key: RankingKey,
        kind: CandidateKind,
        page_index: usize,
        rank: impl FnOnce() -> Scored<'a>,
    ) -> Result<CandidatePage, PageError> {
        let mut cache = self.cache.borrow_mut();
        if let Some(hit) = cache.as_ref().filter(|c| c.key == key) {
            return hit.page(kind, page_index, self.config.page_size);
        }
        let mut scored = rank();
        scored.sort_unstable_by(scored_order);
        let ranked = scored.into_iter().map(|(w, s)| (String::from(w), s)).collect();
        cache.insert(RankingCache { key, ranked }).page(kind, page_index, self.config.page_size)
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn shared_lexicon(&self) -> &Arc<Lexicon> {
        &self.lexicon
    }

    pub fn profile(&self) -> &UserProfile {
        &self.profile
    }

    pub fn into_profile(self) -> UserProfile {
        self.profile
    }

    pub fn index(&self) -> &PrefixIndex {
        &self.index
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn set_config(&mut self, config: EngineConfig) {
        self.config = config;
    }

    pub fn effective_frequency(&self, word: &str) -> u64 {
        effective_frequency(&self.lexicon, &self.profile, word)
    }

    pub fn knows(&self, word: &str) -> bool {
        self.index.contains(word)
    }

    pub fn ranked_completions(&self, prefix: &str) -> Vec<Candidate> {
        ranked_completions(&self.index, &self.lexicon, &self.profile, prefix)
    }

    pub fn ranked_predictions(&self, previous: Option<&str>) -> Vec<Candidate> {
        ranked_predictions(&self.index, &self.lexicon, &self.profile, previous)
    }

    /// Same pages as [`complete`]. Paging through one prefix ranks it once.
    pub fn complete(&self, prefix: &str, page_index: usize) -> Result<CandidatePage, PageError> {
        let key = RankingKey::Completion(normalize(prefix).into_owned());
        self.cached_page(key, CandidateKind::Completion, page_index, || {
            completions(&self.index, &self.lexicon, &self.profile, prefix)
        })
    }

    /// Same pages as [`predict_next`]. Paging through one list ranks it once.
    pub fn predict_next(&self, previous: Option<&str>, page_index: usize) -> Result<CandidatePage, PageError> {
        let key = RankingKey::Prediction(previous.map(|w| normalize(w).into_owned()));
        self.cached_page(key, CandidateKind::Prediction, page_index, || {
            predictions(&self.index, &self.lexicon, &self.profile, previous)
        })
    }

    /// Reinforce `word` by the configured increment (no-op when not adaptive).
    pub fn reinforce(&mut self, word: &str) {
        if self.config.adaptive {
            reinforce(&mut self.profile, word, self.config.increment);
            self.cache.take();
        }
    }

    /// Add a user word. A word already in the lexicon or the profile is left
    /// alone so it never gets a second entry; returns whether it was added.
    pub fn add_word(&mut self, word: &str) -> Result<bool, LexiconError> {
        let word = Word::new(word)?;
        if self.lexicon.contains(word.as_str()) || self.profile.is_custom(word.as_str()) {
            return Ok(false);
        }
        self.profile.add_word(word.as_str())?;
        self.index.insert(&word);
        self.cache.take();
        Ok(true)
    }

    /// NFC form of `s`, as the index stores it.
    pub fn normalize(s: &str) -> String {
        normalize(s).into_owned()
    }
}
