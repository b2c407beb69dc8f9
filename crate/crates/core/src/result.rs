//! Alignment output types and the consistency checks every engine's output
//! must pass.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::alphabet::TokenSeq;
use crate::scoring::{GammaSpec, GapModel, OpbergParams, Score, ScoringScheme, Threshold};

/// One alignment column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlignOp {
    /// Diagonal move: `a_i` paired with `b_j` (match or mismatch).
    Pair,
    /// Consumes `a_i` only.
    Ins,
    /// Consumes `b_j` only.
    Del,
}

impl AlignOp {
    fn code(self) -> char {
        match self {
            AlignOp::Pair => 'M',
            AlignOp::Ins => 'I',
            AlignOp::Del => 'D',
        }
    }
}

/// Run-length encoding of `ops`, e.g. `3M1I2M`.
pub fn cigar(ops: &[AlignOp]) -> String {
    let mut out = String::new();
    let mut iter = ops.iter().peekable();
    while let Some(&op) = iter.next() {
        let mut run = 1;
        while iter.peek() == Some(&&op) {
            iter.next();
            run += 1;
        }
        out.push_str(&run.to_string());
        out.push(op.code());
    }
    out
}

pub fn parse_cigar(s: &str) -> Result<Vec<AlignOp>, String> {
    let mut ops = Vec::new();
    let mut run = String::new();
    for c in s.chars() {
        if c.is_ascii_digit() {
            run.push(c);
            continue;
        }
        let op = match c {
            'M' => AlignOp::Pair,
            'I' => AlignOp::Ins,
            'D' => AlignOp::Del,
            other => return Err(format!("unknown op {other:?} in {s:?}")),
        };
        let n: usize = run.parse().map_err(|_| format!("missing run length in {s:?}"))?;
        ops.extend(std::iter::repeat_n(op, n));
        run.clear();
    }
    if !run.is_empty() {
        return Err(format!("dangling run length in {s:?}"));
    }
    Ok(ops)
}

fn ser_ops<S: Serializer>(ops: &[AlignOp], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&cigar(ops))
}

fn de_ops<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<AlignOp>, D::Error> {
    let s = String::deserialize(d)?;
    parse_cigar(&s).map_err(serde::de::Error::custom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentStart {
    /// Started from an empty alignment; nothing before it counts.
    Fresh,
    /// Entered from the max state, paying the jump penalty.
    Jump,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    /// 1-based inclusive coordinates.
    pub a_start: usize,
    pub a_end: usize,
    pub b_start: usize,
    pub b_end: usize,
    pub segment_score: Score,
    pub score_length: Score,
    pub start: SegmentStart,
    /// The segment fed the max state through the sub-threshold weighting.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub gated: bool,
    #[serde(rename = "cigar", serialize_with = "ser_ops", deserialize_with = "de_ops")]
    pub ops: Vec<AlignOp>,
}

impl Segment {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_ops(
        a_start: usize,
        b_start: usize,
        ops: Vec<AlignOp>,
        start: SegmentStart,
        a: &TokenSeq,
        b: &TokenSeq,
        scheme: &ScoringScheme,
        gaps: &GapModel,
    ) -> Self {
        let a_len = ops.iter().filter(|&&o| o != AlignOp::Del).count();
        let b_len = ops.iter().filter(|&&o| o != AlignOp::Ins).count();
        let mut seg = Segment {
            a_start,
            a_end: a_start + a_len - 1,
            b_start,
            b_end: b_start + b_len - 1,
            segment_score: 0,
            score_length: 0,
            start,
            gated: false,
            ops,
        };
        seg.segment_score = seg.rescore(a, b, scheme, gaps);
        seg.score_length = seg.segment_score;
        seg
    }

    /// Scores the columns directly against the sequences. Gap runs cost
    /// `open + len * extend`.
    pub fn rescore(&self, a: &TokenSeq, b: &TokenSeq, scheme: &ScoringScheme, gaps: &GapModel) -> Score {
        let (mut i, mut j) = (self.a_start, self.b_start);
        let mut total = 0;
        let mut prev = AlignOp::Pair;
        for &op in &self.ops {
            match op {
                AlignOp::Pair => {
                    total += scheme.score_unchecked(a.at(i), b.at(j));
                    i += 1;
                    j += 1;
                }
                AlignOp::Ins | AlignOp::Del => {
                    if prev != op {
                        total += gaps.open;
                    }
                    total += gaps.extend;
                    if op == AlignOp::Ins {
                        i += 1;
                    } else {
                        j += 1;
                    }
                }
            }
            prev = op;
        }
        total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sw,
    Naive,
    Opberg,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sw => "sw",
            Mode::Naive => "naive",
            Mode::Opberg => "opberg",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "sw" => Ok(Mode::Sw),
            "naive" => Ok(Mode::Naive),
            "opberg" => Ok(Mode::Opberg),
            _ => Err(crate::Error::Config(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub total_score: Score,
    pub k: usize,
    pub segments: Vec<Segment>,
    pub breakpoints: Vec<(usize, usize)>,
    pub mode: Mode,
}

impl AlignmentResult {
    pub(crate) fn empty(mode: Mode) -> Self {
        AlignmentResult { total_score: 0, k: 0, segments: Vec::new(), breakpoints: Vec::new(), mode }
    }

    pub fn segment_sum(&self) -> Score {
        self.segments.iter().map(|s| s.segment_score).sum()
    }

    pub fn jumps(&self) -> usize {
        self.segments.iter().filter(|s| s.start == SegmentStart::Jump).count()
    }

    /// Segment ends plus the entry cell of each jump, in path order. This is
    /// what the max-state breakpoint chain records.
    pub fn derived_breakpoints(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(2 * self.segments.len());
        for s in &self.segments {
            if s.start == SegmentStart::Jump {
                out.push((s.a_start, s.b_start));
            }
            out.push((s.a_end, s.b_end));
        }
        out
    }

    /// Recomputes the objective from the segments alone, applying the jump
    /// penalty on jump-started segments and the sub-threshold weighting where a
    /// segment is marked gated.
    pub fn replay_total(&self, jump_penalty: Score, gamma: &GammaSpec, beta: Threshold) -> Score {
        let mut running = 0;
        for s in &self.segments {
            let base = match s.start {
                SegmentStart::Fresh => 0,
                SegmentStart::Jump => running + jump_penalty,
            };
            let value = base + s.segment_score;
            running = if s.gated { gamma.apply(value, beta.finite(), Score::MIN / 2) } else { value };
        }
        running
    }

    /// Checks every structural invariant of the result against the inputs it
    /// was computed from. `params` is `None` for single-segment runs.
    pub fn verify(
        &self,
        a: &TokenSeq,
        b: &TokenSeq,
        scheme: &ScoringScheme,
        gaps: &GapModel,
        params: Option<&OpbergParams>,
    ) -> Result<(), String> {
        if self.k != self.segments.len() {
            return Err(format!("k = {} but {} segments", self.k, self.segments.len()));
        }
        for (idx, s) in self.segments.iter().enumerate() {
            if s.a_start < 1 || s.b_start < 1 || s.a_end > a.len() || s.b_end > b.len() {
                return Err(format!("segment {idx} out of bounds: {s:?}"));
            }
            if s.a_start > s.a_end || s.b_start > s.b_end {
                return Err(format!("segment {idx} has inverted coordinates"));
            }
            if s.ops.first() != Some(&AlignOp::Pair) || s.ops.last() != Some(&AlignOp::Pair) {
                return Err(format!("segment {idx} does not start and end on a diagonal move"));
            }
            let a_len = s.ops.iter().filter(|&&o| o != AlignOp::Del).count();
            let b_len = s.ops.iter().filter(|&&o| o != AlignOp::Ins).count();
            if s.a_end + 1 - s.a_start != a_len || s.b_end + 1 - s.b_start != b_len {
                return Err(format!("segment {idx} columns disagree with its coordinates"));
            }
            let rescored = s.rescore(a, b, scheme, gaps);
            if rescored != s.segment_score {
                return Err(format!("segment {idx} scores {rescored}, reported {}", s.segment_score));
            }
            if idx > 0 {
                let prev = &self.segments[idx - 1];
                if prev.a_end >= s.a_start || prev.b_end >= s.b_start {
                    return Err(format!("segments {} and {idx} are not colinear", idx - 1));
                }
                if s.start != SegmentStart::Jump {
                    return Err(format!("segment {idx} follows another without a jump"));
                }
            }
        }
        match self.mode {
            Mode::Sw => {
                if self.k > 1 || !self.breakpoints.is_empty() {
                    return Err("single-segment result with breakpoints".into());
                }
                if self.total_score != self.segment_sum() {
                    return Err(format!("total {} != segment score {}", self.total_score, self.segment_sum()));
                }
            }
            Mode::Naive | Mode::Opberg => {
                let params = params.ok_or("multi-segment result needs its parameters")?;
                if self.breakpoints != self.derived_breakpoints() {
                    return Err(format!(
                        "breakpoints {:?} disagree with segments {:?}",
                        self.breakpoints,
                        self.derived_breakpoints()
                    ));
                }
                let p = match params.jump_penalty {
                    Threshold::Finite(p) => p,
                    _ if self.jumps() == 0 => 0,
                    _ => return Err("jump taken with jumps disabled".into()),
                };
                let expected = if self.segments.iter().any(|s| s.gated) {
                    self.replay_total(p, &params.gamma, params.beta)
                } else {
                    self.segment_sum() + p * self.jumps() as Score
                };
                if expected != self.total_score {
                    return Err(format!("total {} but segments reconstruct {expected}", self.total_score));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cigar_round_trip() {
        let ops = vec![AlignOp::Pair, AlignOp::Pair, AlignOp::Ins, AlignOp::Del, AlignOp::Del, AlignOp::Pair];
        assert_eq!(cigar(&ops), "2M1I2D1M");
        assert_eq!(parse_cigar("2M1I2D1M").unwrap(), ops);
        assert!(parse_cigar("2X").is_err());
        assert!(parse_cigar("M").is_err());
    }

    #[test]
    fn rescore_affine_runs() {
        let a = TokenSeq::from_ids(&[0, 1, 1, 0]);
        let b = TokenSeq::from_ids(&[0, 0]);
        let seg = Segment {
            a_start: 1,
            a_end: 4,
            b_start: 1,
            b_end: 2,
            segment_score: 0,
            score_length: 0,
            start: SegmentStart::Fresh,
            gated: false,
            ops: vec![AlignOp::Pair, AlignOp::Ins, AlignOp::Ins, AlignOp::Pair],
        };
        let scheme = ScoringScheme::uniform(2, -1);
        assert_eq!(seg.rescore(&a, &b, &scheme, &GapModel::affine(-2, -1)), 2 - 2 - 2 + 2);
        assert_eq!(seg.rescore(&a, &b, &scheme, &GapModel::linear(-1)), 2); // two matches, two gap columns
    }
}
