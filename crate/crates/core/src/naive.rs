//! The k-indexed reference engine. For every segment budget `k` it fills a
//! plane of the local-alignment tensor `L` and the running-max tensor `M`
//! (linear gaps), then picks the budget that maximizes the penalized score.
//! Cubic in time and in backpointer memory; used as the exact reference for
//! the single-pass engine.

use crate::alphabet::TokenSeq;
use crate::error::Result;
use crate::grid::Grid;
use crate::result::{AlignOp, AlignmentResult, Mode, Segment, SegmentStart};
use crate::scoring::{GapModel, Score, ScoreBounds, ScoringScheme, Threshold};

// L case codes, in the recurrence's listed order.
const L_INS: u8 = 0;
const L_DIAG: u8 = 1;
const L_DEL: u8 = 2;
const L_JUMP: u8 = 3;
const L_ZERO: u8 = 4;
// M case codes.
const M_UP: u8 = 0;
const M_TAKE: u8 = 1;
const M_LEFT: u8 = 2;

/// Fully retained tensors, indexed `[k]` then `(i, j)`.
#[derive(Debug, Clone)]
pub struct NaiveState {
    pub l: Vec<Grid<Score>>,
    pub m: Vec<Grid<Score>>,
    /// Per level: bits 0-2 the `L` case, bits 3-4 the `M` case.
    pub bp: Vec<Grid<u8>>,
    pub k_max: usize,
}

impl NaiveState {
    pub fn l_case(&self, i: usize, j: usize, k: usize) -> u8 {
        self.bp[k].get(i, j) & 0b111
    }

    pub fn m_case(&self, i: usize, j: usize, k: usize) -> u8 {
        self.bp[k].get(i, j) >> 3
    }
}

type Levels = Vec<Grid<Score>>;

struct Fill {
    bp: Vec<Grid<u8>>,
    /// `M(|A|, |B|, k)` for every level.
    corner: Vec<Score>,
    retained: Option<(Levels, Levels)>,
}

fn fill(a: &TokenSeq, b: &TokenSeq, scheme: &ScoringScheme, q: Score, k_max: usize, retain: bool) -> Result<Fill> {
    scheme.check_tokens(&a.tokens)?;
    scheme.check_tokens(&b.tokens)?;
    ScoreBounds::new(a.len(), b.len(), scheme, &GapModel::linear(q), None)?;
    let (rows, cols) = (a.len() + 1, b.len() + 1);
    let mut bp = Vec::with_capacity(k_max + 1);
    let mut corner = Vec::with_capacity(k_max + 1);
    let mut kept_l = Vec::new();
    let mut kept_m = Vec::new();

    let mut l_prev = Grid::new(rows, cols, 0);
    let mut l_cur = Grid::new(rows, cols, 0);
    let mut m_cur = Grid::new(rows, cols, 0);

    for k in 0..=k_max {
        let mut codes = Grid::new(rows, cols, 0u8);
        if k == 0 {
            fill_l(a, b, scheme, q, &mut l_cur, None, &mut codes);
            fill_m(&mut m_cur, &l_cur, &mut codes);
        } else {
            fill_m(&mut m_cur, &l_prev, &mut codes);
            fill_l(a, b, scheme, q, &mut l_cur, Some(&m_cur), &mut codes);
        }
        corner.push(m_cur.get(rows - 1, cols - 1));
        bp.push(codes);
        if retain {
            kept_l.push(l_cur.clone());
            kept_m.push(m_cur.clone());
        }
        std::mem::swap(&mut l_prev, &mut l_cur);
    }
    Ok(Fill { bp, corner, retained: retain.then_some((kept_l, kept_m)) })
}

fn fill_l(
    a: &TokenSeq,
    b: &TokenSeq,
    scheme: &ScoringScheme,
    q: Score,
    l: &mut Grid<Score>,
    m: Option<&Grid<Score>>,
    codes: &mut Grid<u8>,
) {
    for i in 1..l.rows() {
        let ai = a.at(i);
        for j in 1..l.cols() {
            let s = scheme.score_unchecked(ai, b.at(j));
            let mut best = l.get(i - 1, j) + q;
            let mut case = L_INS;
            let diag = l.get(i - 1, j - 1) + s;
            if diag > best {
                best = diag;
                case = L_DIAG;
            }
            let left = l.get(i, j - 1) + q;
            if left > best {
                best = left;
                case = L_DEL;
            }
            if let Some(m) = m {
                let jump = m.get(i - 1, j - 1) + s;
                if jump > best {
                    best = jump;
                    case = L_JUMP;
                }
            }
            if 0 > best {
                best = 0;
                case = L_ZERO;
            }
            l.set(i, j, best);
            let c = codes.get(i, j);
            codes.set(i, j, (c & !0b111) | case);
        }
    }
}

fn fill_m(m: &mut Grid<Score>, source: &Grid<Score>, codes: &mut Grid<u8>) {
    for i in 1..m.rows() {
        for j in 1..m.cols() {
            let mut best = m.get(i - 1, j);
            let mut case = M_UP;
            let take = source.get(i, j);
            if take > best {
                best = take;
                case = M_TAKE;
            }
            let left = m.get(i, j - 1);
            if left > best {
                best = left;
                case = M_LEFT;
            }
            m.set(i, j, best);
            let c = codes.get(i, j);
            codes.set(i, j, c | (case << 3));
        }
    }
}

fn default_k_max(a: &TokenSeq, b: &TokenSeq, requested: Option<usize>) -> usize {
    let cap = a.len().max(b.len()).max(1);
    requested.map_or(cap, |k| k.clamp(1, cap))
}

/// Fills every tensor level and retains it. Memory is cubic; intended for
/// inspection and small inputs.
pub fn naive_fill(a: &TokenSeq, b: &TokenSeq, scheme: &ScoringScheme, q: Score, k_max: usize) -> Result<NaiveState> {
    let k_max = k_max.max(1);
    let f = fill(a, b, scheme, q, k_max, true)?;
    let (l, m) = f.retained.expect("retained");
    Ok(NaiveState { l, m, bp: f.bp, k_max })
}

/// Best penalized multi-segment alignment by explicit enumeration of the
/// segment budget. The jump penalty is charged for every segment after the
/// first; among budgets with equal objective the smallest wins.
pub fn naive_optimal(
    a: &TokenSeq,
    b: &TokenSeq,
    scheme: &ScoringScheme,
    q: Score,
    jump_penalty: Threshold,
    k_max: Option<usize>,
) -> Result<AlignmentResult> {
    if a.is_empty() || b.is_empty() {
        scheme.check_tokens(&a.tokens)?;
        scheme.check_tokens(&b.tokens)?;
        return Ok(AlignmentResult::empty(Mode::Naive));
    }
    let p = match jump_penalty {
        Threshold::Finite(p) => Some(p),
        Threshold::NegInf => None,
        Threshold::PosInf => {
            return Err(crate::Error::Config("jump penalty cannot be +inf".into()));
        }
    };
    let k_max = if p.is_none() { 1 } else { default_k_max(a, b, k_max) };
    let f = fill(a, b, scheme, q, k_max, false)?;

    let mut best_k = 1;
    let mut best = f.corner[1];
    for k in 2..=k_max {
        let v = p.unwrap_or(0) * (k as Score - 1) + f.corner[k];
        if v > best {
            best = v;
            best_k = k;
        }
    }
    if best == 0 {
        return Ok(AlignmentResult::empty(Mode::Naive));
    }

    let gaps = GapModel::linear(q);
    let segments = trace(&f.bp, a, b, scheme, &gaps, best_k);
    let mut result =
        AlignmentResult { total_score: best, k: segments.len(), segments, breakpoints: Vec::new(), mode: Mode::Naive };
    result.breakpoints = result.derived_breakpoints();
    Ok(result)
}

fn trace(
    bp: &[Grid<u8>],
    a: &TokenSeq,
    b: &TokenSeq,
    scheme: &ScoringScheme,
    gaps: &GapModel,
    k: usize,
) -> Vec<Segment> {
    let (mut i, mut j) = (a.len(), b.len());
    let mut level = k;
    let mut segments = Vec::new();
    'outer: loop {
        // Max state at `level`.
        loop {
            if i == 0 || j == 0 {
                break 'outer;
            }
            match bp[level].get(i, j) >> 3 {
                M_UP => i -= 1,
                M_LEFT => j -= 1,
                M_TAKE => break,
                c => unreachable!("corrupt max-state backpointer {c}"),
            }
        }
        level = level.saturating_sub(1);
        // Alignment state at `level`, ending at (i, j).
        let mut ops = Vec::new();
        let start = loop {
            if i == 0 || j == 0 {
                break SegmentStart::Fresh;
            }
            match bp[level].get(i, j) & 0b111 {
                L_ZERO => break SegmentStart::Fresh,
                L_DIAG => {
                    ops.push(AlignOp::Pair);
                    i -= 1;
                    j -= 1;
                }
                L_INS => {
                    ops.push(AlignOp::Ins);
                    i -= 1;
                }
                L_DEL => {
                    ops.push(AlignOp::Del);
                    j -= 1;
                }
                L_JUMP => {
                    ops.push(AlignOp::Pair);
                    i -= 1;
                    j -= 1;
                    break SegmentStart::Jump;
                }
                c => unreachable!("corrupt alignment-state backpointer {c}"),
            }
        };
        ops.reverse();
        let (mut a_start, mut b_start) = (i + 1, j + 1);
        // Zero-cost gap columns at either end only appear on ties with q = 0.
        while let Some(&op) = ops.first().filter(|&&o| o != AlignOp::Pair) {
            if op == AlignOp::Ins {
                a_start += 1;
            } else {
                b_start += 1;
            }
            ops.remove(0);
        }
        while ops.last().is_some_and(|&o| o != AlignOp::Pair) {
            ops.pop();
        }
        segments.push(Segment::from_ops(a_start, b_start, ops, start, a, b, scheme, gaps));
        if start == SegmentStart::Fresh {
            break;
        }
    }
    segments.reverse();
    segments
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(ids: &[u32]) -> TokenSeq {
        TokenSeq::from_ids(ids)
    }

    #[test]
    fn single_match_cell() {
        let st = naive_fill(&seq(&[0]), &seq(&[0]), &ScoringScheme::uniform(2, -1), -1, 1).unwrap();
        assert_eq!(st.l[0].get(1, 1), 2);
    }

    #[test]
    fn empty_a_is_all_zero() {
        let st = naive_fill(&seq(&[]), &seq(&[0, 1, 2]), &ScoringScheme::default(), -1, 2).unwrap();
        for k in 0..=2 {
            assert!(st.l[k].row(0).iter().all(|&v| v == 0));
            assert!(st.m[k].row(0).iter().all(|&v| v == 0));
        }
    }

    /// Every filled cell equals the first maximum of its listed alternatives.
    #[test]
    fn literal_recurrences() {
        let a = seq(&[0, 1, 1, 0, 2]);
        let b = seq(&[0, 0, 2, 1]);
        let scheme = ScoringScheme::uniform(2, -1);
        let q = -1;
        let st = naive_fill(&a, &b, &scheme, q, 3).unwrap();
        for k in 0..=3 {
            for i in 1..=a.len() {
                for j in 1..=b.len() {
                    let s = scheme.score_unchecked(a.at(i), b.at(j));
                    let mut alts =
                        vec![st.l[k].get(i - 1, j) + q, st.l[k].get(i - 1, j - 1) + s, st.l[k].get(i, j - 1) + q];
                    if k > 0 {
                        alts.push(st.m[k].get(i - 1, j - 1) + s);
                    }
                    alts.push(0);
                    assert_eq!(st.l[k].get(i, j), *alts.iter().max().unwrap());
                    let take = if k == 0 { st.l[0].get(i, j) } else { st.l[k - 1].get(i, j) };
                    let m_alts = [st.m[k].get(i - 1, j), take, st.m[k].get(i, j - 1)];
                    assert_eq!(st.m[k].get(i, j), *m_alts.iter().max().unwrap());
                    assert!(st.m[k].get(i, j) >= st.m[k].get(i - 1, j));
                    assert!(st.m[k].get(i, j) >= st.m[k].get(i, j - 1));
                    assert!(st.l[k].get(i, j) >= 0);
                }
            }
        }
    }

    #[test]
    fn identical_sequences_use_one_segment() {
        let a = seq(&[0, 1, 2, 3, 1]);
        let r = naive_optimal(&a, &a, &ScoringScheme::uniform(2, -1), -1, Threshold::Finite(-3), None).unwrap();
        assert_eq!(r.k, 1);
        assert_eq!(r.total_score, 10);
        let s = &r.segments[0];
        assert_eq!((s.a_start, s.a_end, s.b_start, s.b_end), (1, 5, 1, 5));
    }

    #[test]
    fn priced_out_jumps_force_one_segment() {
        let a = seq(&[0, 0, 3, 3, 1, 1]);
        let b = seq(&[0, 0, 1, 1]);
        let p = -(2 * 4 * 2) - 1;
        let r = naive_optimal(&a, &b, &ScoringScheme::uniform(2, -1), -1, Threshold::Finite(p), None).unwrap();
        assert_eq!(r.k, 1);
    }

    #[test]
    fn k_max_is_clamped() {
        let a = seq(&[0, 1]);
        let r = naive_optimal(&a, &a, &ScoringScheme::default(), -1, Threshold::Finite(0), Some(50)).unwrap();
        assert_eq!(r.total_score, 4);
    }
}
