//! Substitution scores, gap penalties and the parameters that shape the
//! multi-segment objective.

use std::fmt;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, PosToken};
use crate::error::{Error, Result};

/// All DP arithmetic happens in this type. See [`ScoreBounds`] for the range
/// guarantee.
pub type Score = i32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScoringScheme {
    Uniform {
        match_score: Score,
        mismatch_score: Score,
    },
    /// Row-major `size x size` table indexed by token id.
    Matrix {
        size: usize,
        table: Vec<Score>,
    },
}

impl Default for ScoringScheme {
    fn default() -> Self {
        ScoringScheme::Uniform { match_score: 2, mismatch_score: -1 }
    }
}

impl ScoringScheme {
    pub fn uniform(match_score: Score, mismatch_score: Score) -> Self {
        if match_score <= 0 || mismatch_score > 0 {
            warn!("uniform scheme with match={match_score} mismatch={mismatch_score} is unusual");
        }
        ScoringScheme::Uniform { match_score, mismatch_score }
    }

    pub fn matrix(rows: Vec<Vec<Score>>) -> Result<Self> {
        let size = rows.len();
        let mut table = Vec::with_capacity(size * size);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(Error::Config(format!(
                    "scoring matrix row {r} has {} entries, expected {size}",
                    row.len()
                )));
            }
            table.extend(row);
        }
        Ok(ScoringScheme::Matrix { size, table })
    }

    /// Parses a whitespace-separated table whose first non-comment line lists
    /// the column tags and whose remaining lines are `TAG v1 v2 ...`. Tags are
    /// interned into `alphabet` and the table is laid out by the resulting ids,
    /// so the alphabet should be fresh (or already agree with the header).
    pub fn parse_matrix(text: &str, alphabet: &mut Alphabet) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header: Vec<&str> =
            lines.next().ok_or_else(|| Error::Config("empty scoring matrix".into()))?.split_whitespace().collect();
        let ids: Vec<usize> = header.iter().map(|t| alphabet.get_or_insert(t).id()).collect();
        let size = alphabet.len();
        if ids.iter().copied().ne(0..header.len()) || size != header.len() {
            return Err(Error::Config(
                "scoring matrix header must list each tag of the alphabet once, in id order".into(),
            ));
        }
        let mut table = vec![0; size * size];
        let mut seen = vec![false; size];
        for line in lines {
            let mut fields = line.split_whitespace();
            let tag = fields.next().unwrap_or_default();
            let row = alphabet.lookup(tag).ok_or_else(|| Error::UnknownTag(tag.to_owned()))?.id();
            let values = fields
                .map(|v| v.parse::<Score>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Error::Config(format!("scoring matrix row {tag}: {e}")))?;
            if values.len() != size {
                return Err(Error::Config(format!(
                    "scoring matrix row {tag} has {} values, expected {size}",
                    values.len()
                )));
            }
            table[row * size..(row + 1) * size].copy_from_slice(&values);
            seen[row] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Config(format!("scoring matrix has no row for {}", header[missing])));
        }
        Ok(ScoringScheme::Matrix { size, table })
    }

    pub fn score(&self, a: PosToken, b: PosToken) -> Result<Score> {
        match self {
            ScoringScheme::Uniform { .. } => Ok(self.score_unchecked(a, b)),
            ScoringScheme::Matrix { size, .. } => {
                for id in [a.id(), b.id()] {
                    if id >= *size {
                        return Err(Error::AlphabetMismatch { id, size: *size });
                    }
                }
                Ok(self.score_unchecked(a, b))
            }
        }
    }

    /// Callers must have run [`ScoringScheme::check_tokens`] first.
    #[inline]
    pub(crate) fn score_unchecked(&self, a: PosToken, b: PosToken) -> Score {
        match self {
            ScoringScheme::Uniform { match_score, mismatch_score } => {
                if a == b {
                    *match_score
                } else {
                    *mismatch_score
                }
            }
            ScoringScheme::Matrix { size, table } => table[a.id() * size + b.id()],
        }
    }

    pub fn check_tokens(&self, tokens: &[PosToken]) -> Result<()> {
        if let ScoringScheme::Matrix { size, .. } = self {
            if let Some(t) = tokens.iter().find(|t| t.id() >= *size) {
                return Err(Error::AlphabetMismatch { id: t.id(), size: *size });
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> i64 {
        match self {
            ScoringScheme::Uniform { match_score, mismatch_score } => {
                i64::from(*match_score).abs().max(i64::from(*mismatch_score).abs())
            }
            ScoringScheme::Matrix { table, .. } => table.iter().map(|&v| i64::from(v).abs()).max().unwrap_or(0),
        }
    }

    /// Largest score any single aligned pair can earn.
    pub fn max_score(&self) -> Score {
        match self {
            ScoringScheme::Uniform { match_score, mismatch_score } => (*match_score).max(*mismatch_score),
            ScoringScheme::Matrix { table, .. } => table.iter().copied().max().unwrap_or(0),
        }
    }

    pub fn scaled(&self, factor: Score) -> Self {
        match self {
            ScoringScheme::Uniform { match_score, mismatch_score } => {
                ScoringScheme::Uniform { match_score: match_score * factor, mismatch_score: mismatch_score * factor }
            }
            ScoringScheme::Matrix { size, table } => {
                ScoringScheme::Matrix { size: *size, table: table.iter().map(|v| v * factor).collect() }
            }
        }
    }

    /// Applies a token relabeling `perm[old] = new` to the table.
    pub fn relabeled(&self, perm: &[u32]) -> Self {
        match self {
            ScoringScheme::Uniform { .. } => self.clone(),
            ScoringScheme::Matrix { size, table } => {
                let mut out = vec![0; table.len()];
                for a in 0..*size {
                    for b in 0..*size {
                        out[perm[a] as usize * size + perm[b] as usize] = table[a * size + b];
                    }
                }
                ScoringScheme::Matrix { size: *size, table: out }
            }
        }
    }
}

/// Linear (`linear`, Q) and affine (`open` O, `extend` E) gap penalties. A gap
/// run of length L costs `open + L * extend` under the affine model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapModel {
    pub linear: Score,
    pub open: Score,
    pub extend: Score,
}

impl Default for GapModel {
    fn default() -> Self {
        GapModel { linear: -1, open: -2, extend: -1 }
    }
}

impl GapModel {
    pub fn affine(open: Score, extend: Score) -> Self {
        GapModel { linear: extend, open, extend }.warned()
    }

    /// Linear gaps expressed in affine form (`open = 0`, `extend = q`).
    pub fn linear(q: Score) -> Self {
        GapModel { linear: q, open: 0, extend: q }.warned()
    }

    fn warned(self) -> Self {
        if self.linear > 0 || self.open > 0 || self.extend > 0 {
            warn!("positive gap penalty in {self:?}");
        }
        self
    }

    pub fn scaled(self, factor: Score) -> Self {
        GapModel { linear: self.linear * factor, open: self.open * factor, extend: self.extend * factor }
    }
}

/// A score bound that may be infinite in either direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Threshold {
    NegInf,
    Finite(Score),
    PosInf,
}

impl Threshold {
    pub fn finite(self) -> Option<Score> {
        match self {
            Threshold::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// `x <= self`
    #[inline]
    pub fn admits_le(self, x: i64) -> bool {
        match self {
            Threshold::NegInf => false,
            Threshold::Finite(t) => x <= i64::from(t),
            Threshold::PosInf => true,
        }
    }

    /// `x >= self`
    #[inline]
    pub fn admits_ge(self, x: i64) -> bool {
        match self {
            Threshold::NegInf => true,
            Threshold::Finite(t) => x >= i64::from(t),
            Threshold::PosInf => false,
        }
    }

    pub fn scaled(self, factor: Score) -> Self {
        match self {
            Threshold::Finite(v) => Threshold::Finite(v * factor),
            other => other,
        }
    }

    fn magnitude(self) -> i64 {
        self.finite().map_or(0, |v| i64::from(v).abs())
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::NegInf => f.write_str("-inf"),
            Threshold::Finite(v) => write!(f, "{v}"),
            Threshold::PosInf => f.write_str("inf"),
        }
    }
}

impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" => Ok(Threshold::PosInf),
            "-inf" | "-infinity" => Ok(Threshold::NegInf),
            other => other
                .parse::<Score>()
                .map(Threshold::Finite)
                .map_err(|e| Error::Config(format!("bad threshold {s:?}: {e}"))),
        }
    }
}

impl From<Threshold> for String {
    fn from(t: Threshold) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for Threshold {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Weighting applied to an alignment score that falls short of the start
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GammaSpec {
    Zero,
    Identity,
    /// `x - beta`
    Shortfall,
    /// `floor(c * x)`, `0 <= c <= 1`
    Linear(f64),
}

impl GammaSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            GammaSpec::Linear(c) if !(0.0..=1.0).contains(c) => {
                Err(Error::Config(format!("gamma linear coefficient {c} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }

    /// Assumes `validate` passed. `beta` is `None` for an infinite threshold.
    #[inline]
    pub(crate) fn apply(&self, x: Score, beta: Option<Score>, neg_inf: Score) -> Score {
        match self {
            GammaSpec::Zero => 0,
            GammaSpec::Identity => x,
            GammaSpec::Shortfall => beta.map_or(neg_inf, |b| x - b),
            GammaSpec::Linear(c) => (c * f64::from(x)).floor() as Score,
        }
    }
}

impl fmt::Display for GammaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaSpec::Zero => f.write_str("zero"),
            GammaSpec::Identity => f.write_str("identity"),
            GammaSpec::Shortfall => f.write_str("shortfall"),
            GammaSpec::Linear(c) => write!(f, "linear:{c}"),
        }
    }
}

impl FromStr for GammaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let spec = match s.as_str() {
            "zero" => GammaSpec::Zero,
            "identity" => GammaSpec::Identity,
            "shortfall" => GammaSpec::Shortfall,
            other => {
                let coef = other
                    .strip_prefix("linear:")
                    .or_else(|| other.strip_prefix("linear(").and_then(|r| r.strip_suffix(')')))
                    .ok_or_else(|| Error::Config(format!("unknown gamma {s:?}")))?;
                let c =
                    coef.parse::<f64>().map_err(|e| Error::Config(format!("bad gamma coefficient {coef:?}: {e}")))?;
                GammaSpec::Linear(c)
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Evaluates the sub-threshold weighting for a finite `beta`.
pub fn gamma_eval(spec: &GammaSpec, x: Score, beta: Score) -> Result<Score> {
    spec.validate()?;
    Ok(spec.apply(x, Some(beta), Score::MIN))
}

/// What the start threshold is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaMode {
    /// The alignment-state value itself.
    #[default]
    Absolute,
    /// The alignment-state value minus the score recorded at the alignment's start.
    Relative,
}

impl FromStr for BetaMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "absolute" => Ok(BetaMode::Absolute),
            "relative" => Ok(BetaMode::Relative),
            _ => Err(Error::Config(format!("unknown beta mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpbergParams {
    /// Penalty for every segment after the first. `NegInf` disables jumps.
    pub jump_penalty: Threshold,
    /// Break threshold on the current alignment's score length.
    pub alpha: Threshold,
    /// Start threshold for feeding the max state at full value.
    pub beta: Threshold,
    pub beta_mode: BetaMode,
    pub gamma: GammaSpec,
    /// Upper bound on the segment count for the k-indexed engine; `None` means
    /// `max(|A|, |B|)`.
    pub k_max: Option<usize>,
}

impl Default for OpbergParams {
    fn default() -> Self {
        OpbergParams {
            jump_penalty: Threshold::Finite(-3),
            alpha: Threshold::Finite(4),
            beta: Threshold::Finite(3),
            beta_mode: BetaMode::Absolute,
            gamma: GammaSpec::Shortfall,
            k_max: None,
        }
    }
}

impl OpbergParams {
    /// Parameters under which the single-pass engine reproduces the k-indexed
    /// objective: no break or start thresholds, identity weighting.
    pub fn unconstrained(jump_penalty: Score) -> Self {
        OpbergParams {
            jump_penalty: Threshold::Finite(jump_penalty),
            alpha: Threshold::PosInf,
            beta: Threshold::NegInf,
            beta_mode: BetaMode::Absolute,
            gamma: GammaSpec::Identity,
            k_max: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.gamma.validate()?;
        if self.jump_penalty == Threshold::PosInf {
            return Err(Error::Config("jump penalty cannot be +inf".into()));
        }
        if let Threshold::Finite(p) = self.jump_penalty {
            if p > 0 {
                warn!("positive jump penalty {p} rewards fragmentation");
            }
        }
        match self.alpha {
            Threshold::Finite(a) if a < 0 => return Err(Error::Config(format!("alpha must be non-negative, got {a}"))),
            Threshold::NegInf => return Err(Error::Config("alpha must be non-negative".into())),
            _ => {}
        }
        if self.k_max == Some(0) {
            return Err(Error::Config("k-max must be positive".into()));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: Score) -> Self {
        OpbergParams {
            jump_penalty: self.jump_penalty.scaled(factor),
            alpha: self.alpha.scaled(factor),
            beta: self.beta.scaled(factor),
            ..*self
        }
    }
}

/// Range guarantee for one alignment call.
///
/// `reach` bounds the magnitude of every value a DP cell can take on a real
/// path. `neg_inf` sits at `-2 * reach`, so sentinel-derived sums stay below
/// `-reach` and above `Score::MIN`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreBounds {
    pub reach: Score,
    pub neg_inf: Score,
}

impl ScoreBounds {
    pub fn new(
        n: usize,
        m: usize,
        scheme: &ScoringScheme,
        gaps: &GapModel,
        params: Option<&OpbergParams>,
    ) -> Result<Self> {
        let mut step =
            scheme.max_abs() + i64::from(gaps.linear).abs() + i64::from(gaps.open).abs() + i64::from(gaps.extend).abs();
        if let Some(p) = params {
            step += p.jump_penalty.magnitude() + p.beta.magnitude();
        }
        let step = step.max(1);
        let reach = (n as i64 + m as i64 + 2)
            .checked_mul(step)
            .filter(|r| r.saturating_mul(4) < i64::from(Score::MAX))
            .ok_or(Error::Overflow { n, m, step })?;
        Ok(ScoreBounds { reach: reach as Score, neg_inf: -2 * reach as Score })
    }
}
