//! The live typing loop: keystroke events in, committed text out.
//!
//! Committed text is append-only. Only the pending prefix (the word being
//! typed) can be edited. Every physical action is counted: typed keys
//! (characters, separators, backspaces) in `keys_typed`, candidate picks in
//! `selection_keys`, page switches in `paging_keys`. `chars_saved` counts
//! characters that reached the committed text without being typed.
//!
//! With no backspaces the counters satisfy
//! `chars(committed) == keys_typed - chars(pending) + chars_saved`.

use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use crate::predictor::{CandidateKind, CandidatePage, Engine, PageError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub keys_typed: u64,
    pub selection_keys: u64,
    pub paging_keys: u64,
    pub chars_saved: u64,
}

impl Counters {
    /// Every physical action taken: typed keys, selections and page flips.
    pub fn aided_keystrokes(&self) -> u64 {
        self.keys_typed + self.selection_keys + self.paging_keys
    }
}

/// Word boundary keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Separator {
    Space,
    Newline,
}

impl Separator {
    pub fn as_char(self) -> char {
        match self {
            Separator::Space => ' ',
            Separator::Newline => '\n',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            ' ' => Some(Separator::Space),
            '\n' => Some(Separator::Newline),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlipDirection {
    Next,
    Prev,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    Char(char),
    Separator(Separator),
    Select(usize),
    Flip(FlipDirection),
    Backspace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionError {
    /// Whitespace or control character sent as a word character.
    InvalidChar(char),
    SlotOutOfRange { slot: usize, len: usize },
    PageOutOfRange(PageError),
    NothingToDelete,
}

impl fmt::Display for SessionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SessionError::InvalidChar(c) => write!(f, "{c:?} is not a word character"),
            SessionError::SlotOutOfRange { slot, len } => {
                write!(f, "slot {slot} out of range (page has {len} candidates)")
            }
            SessionError::PageOutOfRange(e) => e.fmt(f),
            SessionError::NothingToDelete => f.write_str("nothing to delete: pending word is empty"),
        }
    }
}

impl core::error::Error for SessionError {}

impl From<PageError> for SessionError {
    fn from(e: PageError) -> Self {
        SessionError::PageOutOfRange(e)
    }
}

/// Hook called with each word the user selects. The default does nothing.
pub trait Pronounce {
    fn pronounce(&mut self, word: &str);
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Silent;

impl Pronounce for Silent {
    fn pronounce(&mut self, _word: &str) {}
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionState {
    pub committed_text: String,
    pub pending_prefix: String,
    pub last_committed_word: Option<String>,
    pub current_page: CandidatePage,
    pub counters: Counters,
}

pub struct Session {
    state: SessionState,
    pronouncer: Box<dyn Pronounce + Send>,
}

impl fmt::Debug for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Session").field("state", &self.state).finish_non_exhaustive()
    }
}

impl Session {
    /// Fresh session showing the start-of-text predictions.
    pub fn new(engine: &Engine) -> Self {
        Self::with_pronouncer(engine, Box::new(Silent))
    }

    pub fn with_pronouncer(engine: &Engine, pronouncer: Box<dyn Pronounce + Send>) -> Self {
        let current_page = engine
            .predict_next(None, 0)
            .expect("page 0 always exists");
        Session {
            state: SessionState {
                committed_text: String::new(),
                pending_prefix: String::new(),
                last_committed_word: None,
                current_page,
                counters: Counters::default(),
            },
            pronouncer,
        }
    }

    pub fn state(&self) -> &SessionState {
        &self.state
    }

    pub fn committed_text(&self) -> &str {
        &self.state.committed_text
    }

    pub fn pending_prefix(&self) -> &str {
        &self.state.pending_prefix
    }

    pub fn current_page(&self) -> &CandidatePage {
        &self.state.current_page
    }

    pub fn counters(&self) -> Counters {
        self.state.counters
    }

    fn page_for(&self, engine: &Engine, page_index: usize) -> Result<CandidatePage, PageError> {
        if self.state.pending_prefix.is_empty() {
            engine.predict_next(self.state.last_committed_word.as_deref(), page_index)
        } else {
            engine.complete(&self.state.pending_prefix, page_index)
        }
    }

    fn refresh(&mut self, engine: &Engine) {
        self.state.current_page = self.page_for(engine, 0).expect("page 0 always exists");
    }

    /// Recompute the visible page for the current context, keeping the page
    /// index when it still exists. Use after the engine changed underneath
    /// this session (another session reinforced or added a word).
    pub fn resync(&mut self, engine: &Engine) {
        let index = self.state.current_page.page_index;
        self.state.current_page = self
            .page_for(engine, index)
            .or_else(|_| self.page_for(engine, 0))
            .expect("page 0 always exists");
    }

    pub fn apply(&mut self, engine: &mut Engine, event: Event) -> Result<(), SessionError> {
        match event {
            Event::Char(c) => self.key_char(engine, c),
            Event::Separator(s) => {
                self.key_separator(engine, s);
                Ok(())
            }
            Event::Select(slot) => self.select(engine, slot),
            Event::Flip(dir) => self.flip_page(engine, dir),
            Event::Backspace => self.backspace(engine),
        }
    }

    pub fn key_char(&mut self, engine: &Engine, c: char) -> Result<(), SessionError> {
        if c.is_whitespace() || c.is_control() {
            return Err(SessionError::InvalidChar(c));
        }
        self.state.pending_prefix.push(c);
        self.state.counters.keys_typed += 1;
        self.refresh(engine);
        Ok(())
    }

    /// Commit the pending word verbatim followed by the separator.
    pub fn key_separator(&mut self, engine: &Engine, separator: Separator) {
        self.commit_pending();
        self.state.committed_text.push(separator.as_char());
        self.state.counters.keys_typed += 1;
        self.refresh(engine);
    }

    fn commit_pending(&mut self) {
        if !self.state.pending_prefix.is_empty() {
            let word = core::mem::take(&mut self.state.pending_prefix);
            self.state.committed_text.push_str(&word);
            self.state.last_committed_word = Some(word);
        }
    }

    /// Pick the candidate in `slot` of the visible page.
    pub fn select(&mut self, engine: &mut Engine, slot: usize) -> Result<(), SessionError> {
        let page = &self.state.current_page;
        let Some(candidate) = page.items.get(slot) else {
            return Err(SessionError::SlotOutOfRange { slot, len: page.items.len() });
        };
        let word = candidate.word.clone();
        let word_len = word.chars().count() as u64;
        let saved = match page.kind {
            CandidateKind::Completion => {
                word_len.saturating_sub(self.state.pending_prefix.chars().count() as u64)
            }
            CandidateKind::Prediction => word_len,
        };
        self.state.pending_prefix.clear();
        self.state.committed_text.push_str(&word);
        self.state.counters.selection_keys += 1;
        self.state.counters.chars_saved += saved;
        engine.reinforce(&word);
        self.pronouncer.pronounce(&word);
        self.state.last_committed_word = Some(word);
        self.refresh(engine);
        Ok(())
    }

    pub fn flip_page(&mut self, engine: &Engine, direction: FlipDirection) -> Result<(), SessionError> {
        let page = &self.state.current_page;
        let target = match direction {
            FlipDirection::Next => page.page_index + 1,
            FlipDirection::Prev => match page.page_index.checked_sub(1) {
                Some(t) => t,
                None => {
                    return Err(PageError { requested: 0, total_pages: page.total_pages }.into());
                }
            },
        };
        if target >= page.total_pages {
            return Err(PageError { requested: target, total_pages: page.total_pages }.into());
        }
        self.state.current_page = self.page_for(engine, target)?;
        self.state.counters.paging_keys += 1;
        Ok(())
    }

    pub fn backspace(&mut self, engine: &Engine) -> Result<(), SessionError> {
        if self.state.pending_prefix.pop().is_none() {
            return Err(SessionError::NothingToDelete);
        }
        self.state.counters.keys_typed += 1;
        self.refresh(engine);
        Ok(())
    }

    /// End of input: commit the pending word without a trailing separator.
    /// Costs no key.
    pub fn finish(&mut self, engine: &Engine) {
        self.commit_pending();
        self.refresh(engine);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{load_corpus, CorpusTag, UserProfile};
    use crate::predictor::EngineConfig;
    use alloc::sync::Arc;
    use alloc::vec::Vec;
    use core::num::NonZeroUsize;

    fn engine_with(src: &str, page_size: usize) -> Engine {
        let tag = CorpusTag::new("g").unwrap();
        let lex = Arc::new(load_corpus(src, tag.clone()).unwrap());
        let profile = UserProfile::new("u", tag).unwrap();
        let config = EngineConfig { page_size: NonZeroUsize::new(page_size).unwrap(), ..EngineConfig::default() };
        Engine::new(lex, profile, config)
    }

    fn engine() -> Engine {
        engine_with("cat\t5\ncar\t3\ncab\t3\ndog\t2", 5)
    }

    fn page_words(s: &Session) -> Vec<&str> {
        s.current_page().items.iter().map(|c| c.word.as_str()).collect()
    }

    #[test]
    fn typing_extends_prefix_and_refreshes() {
        let e = engine();
        let mut s = Session::new(&e);
        s.key_char(&e, 'c').unwrap();
        s.key_char(&e, 'a').unwrap();
        assert_eq!(s.pending_prefix(), "ca");
        assert_eq!(page_words(&s), ["cat", "cab", "car"]);
        assert_eq!(s.counters().keys_typed, 2);
        assert_eq!(s.current_page().page_index, 0);
        assert_eq!(s.key_char(&e, ' '), Err(SessionError::InvalidChar(' ')));
        assert_eq!(s.counters().keys_typed, 2);
    }

    #[test]
    fn separator_commits_and_predicts() {
        let e = engine();
        let mut s = Session::new(&e);
        for c in "cat".chars() {
            s.key_char(&e, c).unwrap();
        }
        s.key_separator(&e, Separator::Space);
        assert_eq!(s.committed_text(), "cat ");
        assert_eq!(s.pending_prefix(), "");
        assert_eq!(s.state().last_committed_word.as_deref(), Some("cat"));
        assert_eq!(s.current_page().kind, CandidateKind::Prediction);

        s.key_separator(&e, Separator::Newline);
        assert_eq!(s.committed_text(), "cat \n");
        assert_eq!(s.counters().keys_typed, 5);
    }

    #[test]
    fn select_completion_saves_the_tail() {
        let mut e = engine();
        let mut s = Session::new(&e);
        s.key_char(&e, 'c').unwrap();
        s.key_char(&e, 'a').unwrap();
        s.select(&mut e, 0).unwrap();
        assert_eq!(s.committed_text(), "cat");
        // len("cat") - len("ca")
        assert_eq!(s.counters().chars_saved, 1);
        assert_eq!(s.counters().selection_keys, 1);
        assert_eq!(e.effective_frequency("cat"), 6);
        assert_eq!(s.current_page().kind, CandidateKind::Prediction);
    }

    #[test]
    fn select_prediction_saves_whole_word() {
        let mut e = engine();
        let mut s = Session::new(&e);
        assert_eq!(page_words(&s)[0], "cat");
        s.select(&mut e, 0).unwrap();
        assert_eq!(s.committed_text(), "cat");
        assert_eq!(s.counters().chars_saved, 3);
    }

    #[test]
    fn select_out_of_range() {
        let mut e = engine();
        let mut s = Session::new(&e);
        s.key_char(&e, 'c').unwrap();
        s.key_char(&e, 'a').unwrap();
        let before = s.state().clone();
        assert_eq!(s.select(&mut e, 9), Err(SessionError::SlotOutOfRange { slot: 9, len: 3 }));
        assert_eq!(s.state(), &before);
    }

    #[test]
    fn paging_moves_and_costs() {
        let src = "a1\t7\na2\t6\na3\t5\na4\t4\na5\t3\na6\t2\na7\t1";
        let e = engine_with(src, 5);
        let mut s = Session::new(&e);
        s.key_char(&e, 'a').unwrap();
        let first = s.current_page().clone();
        assert_eq!(first.len(), 5);
        s.flip_page(&e, FlipDirection::Next).unwrap();
        assert_eq!(page_words(&s), ["a6", "a7"]);
        assert_eq!(s.counters().paging_keys, 1);
        assert!(matches!(s.flip_page(&e, FlipDirection::Next), Err(SessionError::PageOutOfRange(_))));
        assert_eq!(s.counters().paging_keys, 1);
        s.flip_page(&e, FlipDirection::Prev).unwrap();
        assert_eq!(s.current_page(), &first);
        assert!(matches!(s.flip_page(&e, FlipDirection::Prev), Err(SessionError::PageOutOfRange(_))));
    }

    #[test]
    fn backspace_edits_prefix_only() {
        let e = engine();
        let mut s = Session::new(&e);
        assert_eq!(s.backspace(&e), Err(SessionError::NothingToDelete));
        s.key_char(&e, 'c').unwrap();
        s.key_char(&e, 'a').unwrap();
        s.backspace(&e).unwrap();
        assert_eq!(s.pending_prefix(), "c");
        assert_eq!(s.counters().keys_typed, 3);
        assert_eq!(page_words(&s), ["cat", "cab", "car"]);
    }

    #[test]
    fn finish_flushes_pending_for_free() {
        let e = engine();
        let mut s = Session::new(&e);
        s.key_char(&e, 'd').unwrap();
        s.finish(&e);
        assert_eq!(s.committed_text(), "d");
        assert_eq!(s.counters().keys_typed, 1);
    }

    #[test]
    fn pronouncer_hears_selections() {
        use alloc::sync::Arc as StdArc;
        use core::sync::atomic::{AtomicUsize, Ordering};
        struct Count(StdArc<AtomicUsize>);
        impl Pronounce for Count {
            fn pronounce(&mut self, _word: &str) {
                self.0.fetch_add(1, Ordering::SeqCst);
            }
        }
        let heard = StdArc::new(AtomicUsize::new(0));
        let mut e = engine();
        let mut s = Session::with_pronouncer(&e, Box::new(Count(heard.clone())));
        s.select(&mut e, 0).unwrap();
        s.select(&mut e, 0).unwrap();
        assert_eq!(heard.load(Ordering::SeqCst), 2);
    }

    #[test]
    fn resync_picks_up_foreign_reinforcement() {
        let mut e = engine();
        let mut s = Session::new(&e);
        s.key_char(&e, 'c').unwrap();
        s.key_char(&e, 'a').unwrap();
        for _ in 0..5 {
            e.reinforce("car");
        }
        assert_eq!(page_words(&s)[0], "cat");
        s.resync(&e);
        assert_eq!(page_words(&s)[0], "car");
    }
}
