//! Sentence-level corpus files and POS tagging helpers.
//!
//! A corpus is UTF-8 text with one JSON object per line:
//!
//! ```text
//! {"id":"s1","label":"causal","tokens":["Smoking","causes","cancer"],"pos":["NN","VBZ","NN"]}
//! ```
//!
//! `label` is `"causal"`, `"noncausal"`, or absent; `tokens` is optional;
//! `pos` is required. Unknown fields are carried through unchanged.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Causal,
    #[serde(rename = "noncausal")]
    NonCausal,
    #[default]
    Unlabeled,
}

impl Label {
    fn is_unlabeled(&self) -> bool {
        *self == Label::Unlabeled
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Label::is_unlabeled")]
    pub label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<Vec<String>>,
    pub pos: Vec<String>,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl SentenceRecord {
    pub fn new(id: impl Into<String>, label: Label, pos: Vec<String>) -> Self {
        SentenceRecord { id: id.into(), label, tokens: None, pos, extra: Default::default() }
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.pos.is_empty() {
            return Err(format!("record {:?} has an empty pos list", self.id));
        }
        if let Some(tokens) = &self.tokens {
            if tokens.len() != self.pos.len() {
                return Err(format!("record {:?} has {} tokens but {} tags", self.id, tokens.len(), self.pos.len()));
            }
        }
        Ok(())
    }
}

/// Records read from a corpus plus any lines skipped in lenient mode.
#[derive(Debug, Default)]
pub struct Corpus {
    pub records: Vec<SentenceRecord>,
    pub skipped: Vec<(usize, String)>,
}

pub fn read_corpus(path: impl AsRef<Path>, strict: bool) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path)?;
    parse_corpus(BufReader::new(file), &path.display().to_string(), strict)
}

/// Parses line-delimited records. Blank lines are ignored. In strict mode
/// the first malformed line is an error naming it; otherwise it is skipped
/// with a warning.
pub fn parse_corpus<R: BufRead>(reader: R, name: &str, strict: bool) -> Result<Corpus> {
    let mut corpus = Corpus::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed =
            serde_json::from_str::<SentenceRecord>(&line).map_err(|e| e.to_string()).and_then(|r| r.check().map(|_| r));
        match parsed {
            Ok(r) => corpus.records.push(r),
            Err(msg) if strict => {
                return Err(Error::Record { path: name.to_owned(), line: lineno, msg });
            }
            Err(msg) => {
                warn!("{name}:{lineno}: skipping record: {msg}");
                corpus.skipped.push((lineno, msg));
            }
        }
    }
    Ok(corpus)
}

pub fn write_corpus<W: Write>(records: &[SentenceRecord], writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Word-to-tag lookup with a fallback tag.
#[derive(Debug, Clone)]
pub struct Lexicon {
    map: HashMap<String, String>,
    pub default_tag: String,
}

impl Lexicon {
    pub fn new(default_tag: impl Into<String>) -> Self {
        Lexicon { map: HashMap::new(), default_tag: default_tag.into() }
    }

    pub fn insert(&mut self, word: &str, tag: impl Into<String>) {
        self.map.insert(word.to_lowercase(), tag.into());
    }

    /// Reads `word<TAB>tag` lines.
    pub fn from_tsv<R: Read>(reader: R, default_tag: &str) -> Result<Self> {
        let mut lex = Lexicon::new(default_tag);
        for (idx, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tag) = line
                .split_once('\t')
                .ok_or_else(|| Error::Config(format!("lexicon line {}: expected word<TAB>tag", idx + 1)))?;
            lex.insert(word.trim(), tag.trim());
        }
        Ok(lex)
    }

    pub fn tag(&self, word: &str) -> &str {
        self.map.get(&word.to_lowercase()).unwrap_or(&self.default_tag)
    }
}

pub fn lexicon_tag<S: AsRef<str>>(tokens: &[S], lex: &Lexicon) -> Vec<String> {
    tokens.iter().map(|t| lex.tag(t.as_ref()).to_owned()).collect()
}

#[derive(Debug, Error)]
pub enum TaggerError {
    #[error("tagger unavailable: {0}")]
    Connection(String),
    #[error("tagger protocol error: {0}")]
    Protocol(String),
    #[error("tagger did not answer within {0:?}")]
    Timeout(Duration),
}

/// A child process that answers each line of space-joined tokens with one
/// line of space-joined tags.
pub struct ExternalTagger {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
}

impl ExternalTagger {
    pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

    pub fn spawn(program: &str, args: &[&str], timeout: Duration) -> std::result::Result<Self, TaggerError> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| TaggerError::Connection(format!("{program}: {e}")))?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(ExternalTagger { child, stdin, lines: rx, timeout })
    }

    pub fn tag<S: AsRef<str>>(&mut self, tokens: &[S]) -> std::result::Result<Vec<String>, TaggerError> {
        let request = tokens.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ");
        let stdin = self.stdin.as_mut().ok_or_else(|| TaggerError::Connection("stdin closed".into()))?;
        writeln!(stdin, "{request}").and_then(|_| stdin.flush()).map_err(|e| TaggerError::Connection(e.to_string()))?;
        let line = match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => return Err(TaggerError::Connection(e.to_string())),
            Err(RecvTimeoutError::Timeout) => {
                let _ = self.child.kill();
                return Err(TaggerError::Timeout(self.timeout));
            }
            Err(RecvTimeoutError::Disconnected) => {
                return Err(TaggerError::Connection("tagger closed its output".into()));
            }
        };
        let tags: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
        if tags.len() != tokens.len() {
            return Err(TaggerError::Protocol(format!("sent {} tokens, received {} tags", tokens.len(), tags.len())));
        }
        Ok(tags)
    }
}

impl Drop for ExternalTagger {
    fn drop(&mut self) {
        drop(self.stdin.take());
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Tags via the child process.
pub fn external_tag<S: AsRef<str>>(
    tokens: &[S],
    tagger: &mut ExternalTagger,
) -> std::result::Result<Vec<String>, TaggerError> {
    tagger.tag(tokens)
}
