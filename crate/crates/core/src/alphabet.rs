//! Tag interning. Tags are opaque strings; each distinct string gets a small
//! integer id in first-seen order.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PosToken(pub u32);

impl PosToken {
    #[inline]
    pub fn id(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Default)]
pub struct Alphabet {
    tags: Vec<String>,
    index: HashMap<String, u32>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn get_or_insert(&mut self, tag: &str) -> PosToken {
        if let Some(&id) = self.index.get(tag) {
            return PosToken(id);
        }
        let id = u32::try_from(self.tags.len()).expect("alphabet exceeds u32 ids");
        self.tags.push(tag.to_owned());
        self.index.insert(tag.to_owned(), id);
        PosToken(id)
    }

    pub fn lookup(&self, tag: &str) -> Option<PosToken> {
        self.index.get(tag).map(|&id| PosToken(id))
    }

    pub fn tag(&self, token: PosToken) -> Option<&str> {
        self.tags.get(token.id()).map(String::as_str)
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    /// Interns `tags` and returns the resulting sequence.
    pub fn intern<S: AsRef<str>>(&mut self, tags: &[S]) -> TokenSeq {
        TokenSeq { tokens: tags.iter().map(|t| self.get_or_insert(t.as_ref())).collect(), source_id: None }
    }

    /// Maps a sequence back to its tag strings.
    pub fn resolve(&self, seq: &TokenSeq) -> Vec<String> {
        seq.tokens.iter().map(|&t| self.tag(t).expect("token from a different alphabet").to_owned()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSeq {
    pub tokens: Vec<PosToken>,
    pub source_id: Option<String>,
}

impl TokenSeq {
    pub fn from_ids(ids: &[u32]) -> Self {
        Self { tokens: ids.iter().map(|&i| PosToken(i)).collect(), source_id: None }
    }

    pub fn with_source(mut self, id: impl Into<String>) -> Self {
        self.source_id = Some(id.into());
        self
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// 1-based access, matching DP cell coordinates.
    #[inline]
    pub(crate) fn at(&self, i: usize) -> PosToken {
        self.tokens[i - 1]
    }
}
