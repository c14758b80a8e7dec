//! Core of the `wordpred` word-prediction engine.
//!
//! Everything in this crate is pure computation over in-memory data and
//! builds without `std` (an allocator is required). File access, the CLI and
//! the HTTP service live in the `wordpred` crate.
//!
//! The pieces, bottom up:
//!
//! - [`lexicon`]: word-frequency corpora, bigram follow counts and per-user
//!   adaptation profiles, with their plain-text formats.
//! - [`trie`]: the prefix index used for completion lookups.
//! - [`predictor`]: ranked, paged completion and next-word prediction, and
//!   selection reinforcement.
//! - [`session`]: the live typing loop with keystroke accounting.
//! - [`evaluator`]: savings and improvement metrics, the problem-discovery
//!   curve, and the ideal-user simulator.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod evaluator;
pub mod lexicon;
pub mod predictor;
pub mod session;
pub mod trie;

pub use evaluator::{MetricError, SavingsReport, SimulationConfig};
pub use lexicon::{CorpusTag, Lexicon, LexiconEntry, LexiconError, UserProfile, Word};
pub use predictor::{Candidate, CandidateKind, CandidatePage, Engine, EngineConfig, PageError};
pub use session::{Counters, FlipDirection, Session, SessionError};
pub use trie::PrefixIndex;
