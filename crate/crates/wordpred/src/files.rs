//! Corpus, profile and message files on disk.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;
use wordpred_core::{CorpusTag, Lexicon, LexiconError, UserProfile};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: LexiconError },
    #[error("{}: file is not valid UTF-8", path.display())]
    NotUtf8 { path: PathBuf },
    #[error("{}: no messages", path.display())]
    NoMessages { path: PathBuf },
    #[error("invalid corpus argument {0:?}: {1}")]
    CorpusArg(String, LexiconError),
    #[error("no corpus given")]
    NoCorpus,
}

/// A `--corpus` argument: `TAG=PATH`, or a bare path tagged by its file stem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSource {
    pub tag: CorpusTag,
    pub path: PathBuf,
}

impl CorpusSource {
    pub fn parse(arg: &str) -> Result<Self, FileError> {
        if let Some((tag, path)) = arg.split_once('=') {
            if !tag.is_empty() && !tag.contains(['/', '\\']) {
                let tag = CorpusTag::new(tag).map_err(|e| FileError::CorpusArg(arg.into(), e))?;
                return Ok(CorpusSource { tag, path: PathBuf::from(path) });
            }
        }
        let path = PathBuf::from(arg);
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let tag = CorpusTag::new(stem).map_err(|e| FileError::CorpusArg(arg.into(), e))?;
        Ok(CorpusSource { tag, path })
    }

    pub fn load(&self) -> Result<Lexicon, FileError> {
        let text = read_text(&self.path)?;
        Lexicon::parse(&text, self.tag.clone()).map_err(|source| FileError::Parse { path: self.path.clone(), source })
    }
}

fn read_text(path: &Path) -> Result<String, FileError> {
    let bytes = fs::read(path).map_err(|source| FileError::Io { path: path.into(), source })?;
    String::from_utf8(bytes).map_err(|_| FileError::NotUtf8 { path: path.into() })
}

/// Load every source and merge them (counts summed) under the first tag.
pub fn load_merged(sources: &[CorpusSource]) -> Result<Lexicon, FileError> {
    let (first, rest) = sources.split_first().ok_or(FileError::NoCorpus)?;
    let mut lexicon = first.load()?;
    for source in rest {
        lexicon.merge(&source.load()?);
    }
    Ok(lexicon)
}

pub fn read_profile(path: &Path) -> Result<UserProfile, FileError> {
    let text = read_text(path)?;
    UserProfile::parse(&text).map_err(|source| FileError::Parse { path: path.into(), source })
}

/// Write through a sibling temp file and rename, so readers never see a
/// half-written profile.
pub fn write_profile(path: &Path, profile: &UserProfile) -> Result<(), FileError> {
    let io_err = |source| FileError::Io { path: path.into(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, profile.to_text()).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

/// File name for a user's profile under a profile directory. Bytes outside
/// `[A-Za-z0-9_-]` are percent-encoded so any username maps to one flat,
/// portable file name.
pub fn profile_file_name(username: &str, tag: &CorpusTag) -> String {
    fn encode(out: &mut String, s: &str) {
        for b in s.bytes() {
            if b.is_ascii_alphanumeric() || b == b'_' || b == b'-' {
                out.push(b as char);
            } else {
                out.push_str(&format!("%{b:02X}"));
            }
        }
    }
    let mut name = String::new();
    encode(&mut name, username);
    name.push('@');
    encode(&mut name, tag.as_str());
    name.push_str(".profile");
    name
}

/// Messages file: one message per line, words separated by whitespace.
/// Blank lines are skipped.
pub fn read_messages(path: &Path) -> Result<Vec<Vec<String>>, FileError> {
    let text = read_text(path)?;
    let messages: Vec<Vec<String>> = text
        .lines()
        .map(|l| l.split_whitespace().map(String::from).collect::<Vec<_>>())
        .filter(|words| !words.is_empty())
        .collect();
    if messages.is_empty() {
        return Err(FileError::NoMessages { path: path.into() });
    }
    Ok(messages)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_argument_forms() {
        let s = CorpusSource::parse("lesson=data/thai.txt").unwrap();
        assert_eq!(s.tag.as_str(), "lesson");
        assert_eq!(s.path, PathBuf::from("data/thai.txt"));

        let s = CorpusSource::parse("data/general.txt").unwrap();
        assert_eq!(s.tag.as_str(), "general");

        let s = CorpusSource::parse("./a=b/general.txt").unwrap();
        assert_eq!(s.tag.as_str(), "general");
        assert_eq!(s.path, PathBuf::from("./a=b/general.txt"));
    }

    #[test]
    fn profile_names_are_flat() {
        let tag = CorpusTag::new("lesson").unwrap();
        assert_eq!(profile_file_name("somchai", &tag), "somchai@lesson.profile");
        assert_eq!(profile_file_name("../x y", &tag), "%2E%2E%2Fx%20y@lesson.profile");
        assert_eq!(profile_file_name("ก", &tag), "%E0%B8%81@lesson.profile");
    }

    #[test]
    fn profile_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("u.profile");
        let mut p = UserProfile::new("u", CorpusTag::new("g").unwrap()).unwrap();
        p.add_word("zyzzyva").unwrap();
        write_profile(&path, &p).unwrap();
        assert_eq!(read_profile(&path).unwrap(), p);
        assert!(!path.with_extension("profile.tmp").exists());
    }

    #[test]
    fn messages_skip_blank_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.txt");
        fs::write(&path, "the cat\n\n  my   dog \n").unwrap();
        assert_eq!(read_messages(&path).unwrap(), vec![vec!["the", "cat"], vec!["my", "dog"]]);
        fs::write(&path, "\n \n").unwrap();
        assert!(matches!(read_messages(&path), Err(FileError::NoMessages { .. })));
    }

    #[test]
    fn corpus_errors_carry_path_and_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        fs::write(&path, "cat\t5\ndog\t0\n").unwrap();
        let err = CorpusSource::parse(path.to_str().unwrap()).unwrap().load().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bad.txt") && msg.contains("line 2"), "{msg}");
    }
}
