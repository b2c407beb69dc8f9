//! Exhaustive reference for the multi-segment objective on tiny inputs.
//!
//! Every colinear set of segments is enumerated explicitly. Each segment's
//! score is the best gapped alignment of its two substrings whose first and
//! last columns are diagonal, found by a forward recursion over the
//! substrings alone. Nothing here shares code with the DP engines.

use std::collections::HashMap;

use crate::alphabet::TokenSeq;
use crate::error::{Error, Result};
use crate::scoring::{GapModel, Score, ScoringScheme, Threshold};

pub const ORACLE_LIMIT: usize = 8;

const NONE: i64 = i64::MIN / 4;

/// Optimum of `sum(segment scores) + P * (k - 1)` over all colinear segment
/// sets with `k >= 1`, or 0 for the empty set. Linear gaps `q`.
pub fn brute_force_oracle(a: &TokenSeq, b: &TokenSeq, scheme: &ScoringScheme, q: Score, p: Threshold) -> Result<Score> {
    brute_force_affine(a, b, scheme, &GapModel::linear(q), p)
}

/// As [`brute_force_oracle`] with affine gap runs costing `open + len * extend`.
pub fn brute_force_affine(
    a: &TokenSeq,
    b: &TokenSeq,
    scheme: &ScoringScheme,
    gaps: &GapModel,
    p: Threshold,
) -> Result<Score> {
    let (n, m) = (a.len(), b.len());
    if n > ORACLE_LIMIT || m > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge { n, m, limit: ORACLE_LIMIT });
    }
    scheme.check_tokens(&a.tokens)?;
    scheme.check_tokens(&b.tokens)?;
    let seg = SegmentTable::build(a, b, scheme, gaps);
    let jump = match p {
        Threshold::Finite(v) => Some(i64::from(v)),
        Threshold::NegInf => None,
        Threshold::PosInf => return Err(Error::Config("jump penalty cannot be +inf".into())),
    };
    let best = enumerate(&seg, 0, 0, None, jump).max(0);
    Ok(Score::try_from(best).expect("oracle score out of range"))
}

/// Best segment score for every `(a_lo, a_hi, b_lo, b_hi)`, 0-based inclusive.
struct SegmentTable {
    n: usize,
    m: usize,
    scores: Vec<i64>,
}

impl SegmentTable {
    fn build(a: &TokenSeq, b: &TokenSeq, scheme: &ScoringScheme, gaps: &GapModel) -> Self {
        let (n, m) = (a.len(), b.len());
        let mut scores = vec![NONE; n * n * m * m];
        for a_lo in 0..n {
            for a_hi in a_lo..n {
                for b_lo in 0..m {
                    for b_hi in b_lo..m {
                        let sa = &a.tokens[a_lo..=a_hi];
                        let sb = &b.tokens[b_lo..=b_hi];
                        let v = best_pinned_alignment(sa, sb, scheme, gaps);
                        scores[((a_lo * n + a_hi) * m + b_lo) * m + b_hi] = v;
                    }
                }
            }
        }
        SegmentTable { n, m, scores }
    }

    fn get(&self, a_lo: usize, a_hi: usize, b_lo: usize, b_hi: usize) -> i64 {
        self.scores[((a_lo * self.n + a_hi) * self.m + b_lo) * self.m + b_hi]
    }
}

/// Best score among segment sets that use only `a[ia..]` and `b[ib..]`,
/// given the running score `prefix` of the segments already placed (`None`
/// before the first). Explores every choice of the next segment.
fn enumerate(seg: &SegmentTable, ia: usize, ib: usize, prefix: Option<i64>, jump: Option<i64>) -> i64 {
    let mut best = prefix.unwrap_or(NONE);
    let base = match (prefix, jump) {
        (None, _) => 0,
        (Some(v), Some(p)) => v + p,
        (Some(_), None) => return best,
    };
    for a_lo in ia..seg.n {
        for a_hi in a_lo..seg.n {
            for b_lo in ib..seg.m {
                for b_hi in b_lo..seg.m {
                    let s = seg.get(a_lo, a_hi, b_lo, b_hi);
                    if s == NONE {
                        continue;
                    }
                    let v = enumerate(seg, a_hi + 1, b_hi + 1, Some(base + s), jump);
                    best = best.max(v);
                }
            }
        }
    }
    best
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Last {
    Pair,
    Ins,
    Del,
}

/// Global alignment of `sa` and `sb` that opens and closes with a diagonal
/// column; `NONE` when impossible.
fn best_pinned_alignment(
    sa: &[crate::alphabet::PosToken],
    sb: &[crate::alphabet::PosToken],
    scheme: &ScoringScheme,
    gaps: &GapModel,
) -> i64 {
    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        j: usize,
        last: Last,
        sa: &[crate::alphabet::PosToken],
        sb: &[crate::alphabet::PosToken],
        scheme: &ScoringScheme,
        gaps: &GapModel,
        memo: &mut HashMap<(usize, usize, Last), i64>,
    ) -> i64 {
        if i == sa.len() && j == sb.len() {
            return if last == Last::Pair { 0 } else { NONE };
        }
        if let Some(&v) = memo.get(&(i, j, last)) {
            return v;
        }
        let mut best = NONE;
        if i < sa.len() && j < sb.len() {
            let rest = go(i + 1, j + 1, Last::Pair, sa, sb, scheme, gaps, memo);
            if rest != NONE {
                best = best.max(i64::from(scheme.score_unchecked(sa[i], sb[j])) + rest);
            }
        }
        if i < sa.len() {
            let rest = go(i + 1, j, Last::Ins, sa, sb, scheme, gaps, memo);
            if rest != NONE {
                let open = if last == Last::Ins { 0 } else { i64::from(gaps.open) };
                best = best.max(open + i64::from(gaps.extend) + rest);
            }
        }
        if j < sb.len() {
            let rest = go(i, j + 1, Last::Del, sa, sb, scheme, gaps, memo);
            if rest != NONE {
                let open = if last == Last::Del { 0 } else { i64::from(gaps.open) };
                best = best.max(open + i64::from(gaps.extend) + rest);
            }
        }
        memo.insert((i, j, last), best);
        best
    }
    let mut memo = HashMap::new();
    let rest = go(1, 1, Last::Pair, sa, sb, scheme, gaps, &mut memo);
    if rest == NONE {
        NONE
    } else {
        i64::from(scheme.score_unchecked(sa[0], sb[0])) + rest
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(ids: &[u32]) -> TokenSeq {
        TokenSeq::from_ids(ids)
    }

    #[test]
    fn empty_is_zero() {
        let v = brute_force_oracle(&seq(&[]), &seq(&[]), &ScoringScheme::default(), -1, Threshold::Finite(-3)).unwrap();
        assert_eq!(v, 0);
    }

    #[test]
    fn single_shared_token() {
        // The first segment is not charged, so the lone match always counts.
        for p in [-5, -1, 0] {
            let v =
                brute_force_oracle(&seq(&[0]), &seq(&[0]), &ScoringScheme::uniform(2, -1), -1, Threshold::Finite(p))
                    .unwrap();
            assert_eq!(v, 2);
        }
    }

    #[test]
    fn refuses_large_inputs() {
        let big = TokenSeq::from_ids(&[0; 9]);
        assert!(matches!(
            brute_force_oracle(&big, &seq(&[0]), &ScoringScheme::default(), -1, Threshold::Finite(0)),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn pinned_alignment_needs_diagonal_ends() {
        let s = ScoringScheme::uniform(2, -1);
        let g = GapModel::linear(-1);
        // A B A vs A A: A - A pairs around one insertion.
        assert_eq!(best_pinned_alignment(&seq(&[0, 1, 0]).tokens, &seq(&[0, 0]).tokens, &s, &g), 3);
        // A vs A B cannot close on a diagonal after consuming B... except as
        // the mismatch-free pair A/A followed by a trailing deletion, which is
        // not allowed.
        assert_eq!(best_pinned_alignment(&seq(&[0]).tokens, &seq(&[0, 1]).tokens, &s, &g), NONE);
    }

    #[test]
    fn split_beats_gapped_run() {
        // A A X X B B vs A A B B with q = -1, P = -1:
        // one segment 4 - 2 + 4 = 6, two segments 4 + 4 - 1 = 7.
        let v = brute_force_oracle(
            &seq(&[0, 0, 9, 9, 1, 1]),
            &seq(&[0, 0, 1, 1]),
            &ScoringScheme::uniform(2, -1),
            -1,
            Threshold::Finite(-1),
        )
        .unwrap();
        assert_eq!(v, 7);
    }
}
