//! Nearest-neighbor causal sentence classification.
//!
//! A sentence is causal when its best match among the positive examples
//! beats its best negative match and also clears `delta_c`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, TokenSeq};
use crate::corpus::{Label, SentenceRecord};
use crate::error::{Error, Result};
use crate::opberg::opberg_align;
use crate::result::AlignmentResult;
use crate::scoring::{GapModel, OpbergParams, Score, ScoringScheme};

#[derive(Debug, Clone, Default)]
pub struct LabeledCorpus {
    pub positives: Vec<TokenSeq>,
    pub negatives: Vec<TokenSeq>,
}

impl LabeledCorpus {
    /// Interns every record into `alphabet`. Unlabeled records are rejected.
    pub fn from_records(records: &[SentenceRecord], alphabet: &mut Alphabet) -> Result<Self> {
        let mut corpus = LabeledCorpus::default();
        for r in records {
            let seq = alphabet.intern(&r.pos).with_source(r.id.clone());
            match r.label {
                Label::Causal => corpus.positives.push(seq),
                Label::NonCausal => corpus.negatives.push(seq),
                Label::Unlabeled => return Err(Error::Config(format!("training record {:?} has no label", r.id))),
            }
        }
        Ok(corpus)
    }

    fn check(&self) -> Result<()> {
        if self.positives.is_empty() || self.negatives.is_empty() {
            return Err(Error::Config(format!(
                "training data needs both classes (causal: {}, noncausal: {})",
                self.positives.len(),
                self.negatives.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    None,
    #[default]
    ByShorter,
    ByLonger,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::None => "none",
            Normalization::ByShorter => "by_shorter",
            Normalization::ByLonger => "by_longer",
        })
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "none" => Ok(Normalization::None),
            "by_shorter" | "shorter" => Ok(Normalization::ByShorter),
            "by_longer" | "longer" => Ok(Normalization::ByLonger),
            _ => Err(Error::Config(format!("unknown normalization {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierParams {
    /// Similarity threshold. May be infinite.
    pub delta_c: f64,
    pub scheme: ScoringScheme,
    pub gaps: GapModel,
    pub opberg: OpbergParams,
    pub normalization: Normalization,
    pub abstain_as_negative: bool,
}

impl Default for ClassifierParams {
    fn default() -> Self {
        ClassifierParams {
            delta_c: 0.0,
            scheme: ScoringScheme::default(),
            gaps: GapModel::default(),
            opberg: OpbergParams::default(),
            normalization: Normalization::ByShorter,
            abstain_as_negative: true,
        }
    }
}

impl ClassifierParams {
    /// Multiplies every score parameter and the threshold by `factor`.
    pub fn scaled(&self, factor: Score) -> Self {
        ClassifierParams {
            delta_c: self.delta_c * factor as f64,
            scheme: self.scheme.scaled(factor),
            gaps: self.gaps.scaled(factor),
            opberg: self.opberg.scaled(factor),
            ..self.clone()
        }
    }
}

/// Alignment score divided by a length, kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Similarity {
    pub raw: Score,
    pub len: u32,
}

impl Similarity {
    pub fn value(self) -> f64 {
        if self.len == 0 {
            0.0
        } else {
            self.raw as f64 / self.len as f64
        }
    }

    /// `self > delta`, compared without dividing.
    pub fn exceeds(self, delta: f64) -> bool {
        if self.len == 0 {
            return 0.0 > delta;
        }
        self.raw as f64 > delta * self.len as f64
    }

    fn key(self) -> (i64, i64) {
        if self.len == 0 {
            (0, 1)
        } else {
            (self.raw as i64, self.len as i64)
        }
    }
}

impl Ord for Similarity {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = self.key();
        let (c, d) = other.key();
        (a * d).cmp(&(c * b))
    }
}

impl PartialOrd for Similarity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

fn similarity_with(s: &TokenSeq, c: &TokenSeq, params: &ClassifierParams) -> Result<(Similarity, AlignmentResult)> {
    let res = opberg_align(s, c, &params.scheme, &params.gaps, &params.opberg)?;
    let len = match params.normalization {
        Normalization::None => 1,
        Normalization::ByShorter => s.len().min(c.len()),
        Normalization::ByLonger => s.len().max(c.len()),
    };
    Ok((Similarity { raw: res.total_score, len: len as u32 }, res))
}

pub fn similarity(s: &TokenSeq, c: &TokenSeq, params: &ClassifierParams) -> Result<Similarity> {
    similarity_with(s, c, params).map(|(sim, _)| sim)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionLabel {
    Causal,
    NonCausal,
    Abstain,
}

impl fmt::Display for DecisionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecisionLabel::Causal => "causal",
            DecisionLabel::NonCausal => "noncausal",
            DecisionLabel::Abstain => "abstain",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestMatch {
    pub source_id: String,
    pub similarity: Similarity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub label: DecisionLabel,
    pub best_positive: BestMatch,
    pub best_negative: BestMatch,
    pub evidence: AlignmentResult,
}

/// The decision rule on two best similarities.
pub fn decide(best_pos: Similarity, best_neg: Similarity, delta_c: f64, abstain_as_negative: bool) -> DecisionLabel {
    if best_neg >= best_pos {
        DecisionLabel::NonCausal
    } else if best_pos.exceeds(delta_c) {
        DecisionLabel::Causal
    } else if abstain_as_negative {
        DecisionLabel::NonCausal
    } else {
        DecisionLabel::Abstain
    }
}

struct Candidate {
    sim: Similarity,
    id: String,
    index: usize,
    result: AlignmentResult,
}

// Higher similarity wins; ties go to the smaller source id, then position.
fn better(x: Candidate, y: Candidate) -> Candidate {
    let order = x.sim.cmp(&y.sim).then_with(|| y.id.cmp(&x.id)).then_with(|| y.index.cmp(&x.index));
    if order == Ordering::Less {
        y
    } else {
        x
    }
}

fn best_of(s: &TokenSeq, pool: &[TokenSeq], params: &ClassifierParams) -> Result<Candidate> {
    pool.par_iter()
        .enumerate()
        .map(|(index, c)| {
            let (sim, result) = similarity_with(s, c, params)?;
            Ok(Candidate { sim, id: c.source_id.clone().unwrap_or_default(), index, result })
        })
        .try_reduce_with(|x, y| Ok(better(x, y)))
        .expect("pool checked non-empty")
}

pub fn classify(s: &TokenSeq, corpus: &LabeledCorpus, params: &ClassifierParams) -> Result<Decision> {
    corpus.check()?;
    params.opberg.validate()?;
    let (pos, neg) = rayon::join(|| best_of(s, &corpus.positives, params), || best_of(s, &corpus.negatives, params));
    let (pos, neg) = (pos?, neg?);
    let label = decide(pos.sim, neg.sim, params.delta_c, params.abstain_as_negative);
    let evidence = if pos.sim > neg.sim { pos.result } else { neg.result };
    Ok(Decision {
        label,
        best_positive: BestMatch { source_id: pos.id, similarity: pos.sim },
        best_negative: BestMatch { source_id: neg.id, similarity: neg.sim },
        evidence,
    })
}

/// Classifies every input, preserving input order.
pub fn classify_all(inputs: &[TokenSeq], corpus: &LabeledCorpus, params: &ClassifierParams) -> Result<Vec<Decision>> {
    corpus.check()?;
    inputs.par_iter().map(|s| classify(s, corpus, params)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub abstained: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
}

impl Metrics {
    /// Abstentions count as negative predictions.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (bool, DecisionLabel)>) -> Self {
        let mut m = Metrics::default();
        for (truth, label) in pairs {
            if label == DecisionLabel::Abstain {
                m.abstained += 1;
            }
            match (truth, label == DecisionLabel::Causal) {
                (true, true) => m.tp += 1,
                (false, true) => m.fp += 1,
                (false, false) => m.tn += 1,
                (true, false) => m.fn_ += 1,
            }
        }
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        m.precision = ratio(m.tp, m.tp + m.fp);
        m.recall = ratio(m.tp, m.tp + m.fn_);
        m.f1 =
            if m.precision + m.recall == 0.0 { 0.0 } else { 2.0 * m.precision * m.recall / (m.precision + m.recall) };
        m.accuracy = ratio(m.tp + m.tn, m.tp + m.fp + m.tn + m.fn_);
        m
    }
}

/// Classifies labeled test sequences. Returns per-item decisions in input
/// order along with the summary.
pub fn evaluate(
    test: &[(TokenSeq, bool)],
    train: &LabeledCorpus,
    params: &ClassifierParams,
) -> Result<(Vec<Decision>, Metrics)> {
    let seqs: Vec<TokenSeq> = test.iter().map(|(s, _)| s.clone()).collect();
    let decisions = classify_all(&seqs, train, params)?;
    let metrics = Metrics::from_pairs(test.iter().zip(&decisions).map(|((_, t), d)| (*t, d.label)));
    Ok((decisions, metrics))
}
