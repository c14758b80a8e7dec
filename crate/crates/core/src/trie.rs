//! Codepoint trie over the effective vocabulary.

use alloc::string::String;
use alloc::vec::Vec;

use crate::lexicon::{normalize, Lexicon, UserProfile, Word};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Node {
    // sorted by char so traversal order is codepoint-lexicographic
    children: Vec<(char, u32)>,
    /// Index into `PrefixIndex::words` when a word ends here.
    word: Option<u32>,
}

impl Node {
    fn child(&self, c: char) -> Option<u32> {
        self.children
            .binary_search_by_key(&c, |&(k, _)| k)
            .ok()
            .map(|i| self.children[i].1)
    }
}

/// Prefix index over NFC codepoint sequences.
///
/// Every indexed word is a terminal node reached by walking its characters;
/// no other node is terminal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixIndex {
    nodes: Vec<Node>,
    words: Vec<String>,
}

impl Default for PrefixIndex {
    fn default() -> Self {
        Self::new()
    }
}

impl PrefixIndex {
    pub fn new() -> Self {
        PrefixIndex { nodes: alloc::vec![Node::default()], words: Vec::new() }
    }

    /// Index the union of lexicon words and the profile's custom words.
    pub fn build(lexicon: &Lexicon, profile: &UserProfile) -> Self {
        let mut index = PrefixIndex::new();
        for word in lexicon.words() {
            index.insert_normalized(word);
        }
        for (word, _) in profile.custom_words() {
            index.insert_normalized(word);
        }
        index
    }

    /// Insert a word. Returns `true` if it was not already present.
    pub fn insert(&mut self, word: &Word) -> bool {
        self.insert_normalized(word.as_str())
    }

    fn insert_normalized(&mut self, word: &str) -> bool {
        let mut at = 0usize;
        for c in word.chars() {
            at = match self.nodes[at].child(c) {
                Some(next) => next as usize,
                None => {
                    let next = self.nodes.len() as u32;
                    self.nodes.push(Node::default());
                    let children = &mut self.nodes[at].children;
                    let pos = children.partition_point(|&(k, _)| k < c);
                    children.insert(pos, (c, next));
                    next as usize
                }
            };
        }
        let node = &mut self.nodes[at];
        if node.word.is_some() {
            false
        } else {
            node.word = Some(self.words.len() as u32);
            self.words.push(String::from(word));
            true
        }
    }

    fn find(&self, prefix: &str) -> Option<usize> {
        let mut at = 0usize;
        for c in prefix.chars() {
            at = self.nodes[at].child(c)? as usize;
        }
        Some(at)
    }

    pub fn contains(&self, word: &str) -> bool {
        let word = normalize(word);
        !word.is_empty() && self.find(&word).is_some_and(|n| self.nodes[n].word.is_some())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Every indexed word that starts with `prefix`, in codepoint order.
    /// The empty prefix matches every word.
    pub fn lookup(&self, prefix: &str) -> Vec<String> {
        self.matches(prefix).into_iter().map(String::from).collect()
    }

    /// [`lookup`](Self::lookup) without copying the words.
    pub fn matches(&self, prefix: &str) -> Vec<&str> {
        let mut out = Vec::new();
        if let Some(start) = self.find(&normalize(prefix)) {
            self.collect(start, &mut out);
        }
        out
    }

    fn collect<'a>(&'a self, node: usize, out: &mut Vec<&'a str>) {
        let node = &self.nodes[node];
        if let Some(id) = node.word {
            out.push(&self.words[id as usize]);
        }
        for &(_, child) in &node.children {
            self.collect(child as usize, out);
        }
    }
}
