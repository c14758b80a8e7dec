//! Standard-library side of `wordpred`: corpus and profile files, the CLI
//! and the local HTTP service. The algorithms live in [`wordpred_core`].

pub mod api;
pub mod cli;
pub mod files;
pub mod format;
pub mod service;

pub use wordpred_core as core;
