//! JSON bodies of the local HTTP API.
//!
//! | Method | Path                      | Body                                   | Response                 |
//! |--------|---------------------------|----------------------------------------|--------------------------|
//! | GET    | `/corpora`                |                                        | [`CorporaResponse`]      |
//! | POST   | `/sessions`               | [`CreateSessionRequest`]               | [`SessionResponse`]      |
//! | GET    | `/sessions/{id}`          |                                        | [`SessionResponse`]      |
//! | DELETE | `/sessions/{id}`          |                                        | [`EndSessionResponse`]   |
//! | POST   | `/sessions/{id}/events`   | [`EventRequest`]                       | [`View`]                 |
//! | POST   | `/sessions/{id}/words`    | [`AddWordRequest`]                     | [`AddWordResponse`]      |
//! | GET    | `/sessions/{id}/stats`    |                                        | [`Stats`]                |
//!
//! Every failure answers with an [`ErrorBody`] and a 4xx/5xx status.
//!
//! Event requests are `{"type": ..., "payload": ...}`:
//!
//! | `type`          | `payload`                                              |
//! |-----------------|--------------------------------------------------------|
//! | `key_char`      | `{"char": "c"}` (exactly one character)                |
//! | `key_separator` | `{"separator": "space" \| "newline"}`, or omitted (space) |
//! | `select`        | `{"slot": 0}` (0-based slot on the visible page)       |
//! | `flip_page`     | `{"direction": "next" \| "prev"}`                      |
//! | `backspace`     | omitted                                                |

use serde::{Deserialize, Serialize};
use serde_json::Value;
use wordpred_core::session::{Counters, SessionState};
use wordpred_core::{CandidatePage, SavingsReport};

use crate::format::kind_name;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error_code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusInfo {
    pub tag: String,
    pub words: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorporaResponse {
    pub corpora: Vec<CorpusInfo>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreateSessionRequest {
    pub username: String,
    pub corpus_tag: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionHandle {
    pub session_id: String,
    pub username: String,
    pub corpus_tag: String,
    /// Unix seconds.
    pub created_at: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionResponse {
    #[serde(flatten)]
    pub handle: SessionHandle,
    pub view: View,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndSessionResponse {
    pub session_id: String,
    pub ended: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRequest {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub payload: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddWordRequest {
    pub word: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AddWordResponse {
    /// NFC form as stored.
    pub word: String,
    /// False when the word was already known.
    pub added: bool,
    pub effective_frequency: u64,
    pub view: View,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateView {
    pub slot: usize,
    pub word: String,
    pub score: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageView {
    /// `completion` or `prediction`.
    pub kind: String,
    pub page_index: usize,
    pub total_pages: usize,
    pub page_size: usize,
    pub total_candidates: usize,
    pub has_prev: bool,
    pub has_next: bool,
    pub items: Vec<CandidateView>,
}

impl From<&CandidatePage> for PageView {
    fn from(page: &CandidatePage) -> Self {
        PageView {
            kind: kind_name(page.kind).to_string(),
            page_index: page.page_index,
            total_pages: page.total_pages,
            page_size: page.page_size.get(),
            total_candidates: page.total_candidates,
            has_prev: page.has_prev(),
            has_next: page.has_next(),
            items: page
                .items
                .iter()
                .enumerate()
                .map(|(slot, c)| CandidateView { slot, word: c.word.clone(), score: c.score })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountersView {
    pub keys_typed: u64,
    pub selection_keys: u64,
    pub paging_keys: u64,
    pub chars_saved: u64,
}

impl From<Counters> for CountersView {
    fn from(c: Counters) -> Self {
        CountersView {
            keys_typed: c.keys_typed,
            selection_keys: c.selection_keys,
            paging_keys: c.paging_keys,
            chars_saved: c.chars_saved,
        }
    }
}

/// Everything a client needs to draw the pad after an event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct View {
    pub committed_text: String,
    pub pending_prefix: String,
    pub last_committed_word: Option<String>,
    pub page: PageView,
    pub counters: CountersView,
}

impl From<&SessionState> for View {
    fn from(s: &SessionState) -> Self {
        View {
            committed_text: s.committed_text.clone(),
            pending_prefix: s.pending_prefix.clone(),
            last_committed_word: s.last_committed_word.clone(),
            page: PageView::from(&s.current_page),
            counters: s.counters.into(),
        }
    }
}

/// Live keystroke accounting for a session.
///
/// `unaided_keystrokes` is what the produced text would have cost typed
/// key by key (`keys_typed + chars_saved`); the percentages are `null`
/// while undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub keys_typed: u64,
    pub selection_keys: u64,
    pub paging_keys: u64,
    pub chars_saved: u64,
    pub aided_keystrokes: u64,
    pub unaided_keystrokes: u64,
    pub keystrokes_reduced: i64,
    pub reduction_pct_paper: Option<f64>,
    pub savings_pct_standard: Option<f64>,
}

impl From<Counters> for Stats {
    fn from(c: Counters) -> Self {
        let unaided = c.keys_typed + c.chars_saved;
        let aided = c.aided_keystrokes();
        let report = SavingsReport::new(unaided, c).ok();
        Stats {
            keys_typed: c.keys_typed,
            selection_keys: c.selection_keys,
            paging_keys: c.paging_keys,
            chars_saved: c.chars_saved,
            aided_keystrokes: aided,
            unaided_keystrokes: unaided,
            keystrokes_reduced: unaided as i64 - aided as i64,
            reduction_pct_paper: report.as_ref().map(|r| r.reduction_pct_paper),
            savings_pct_standard: report.as_ref().map(|r| r.savings_pct_standard),
        }
    }
}
