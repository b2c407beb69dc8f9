//! Single-segment local alignment with affine gaps (three-state Gotoh
//! formulation). Linear gaps are the `open = 0` special case.

use crate::alphabet::TokenSeq;
use crate::error::Result;
use crate::grid::Grid;
use crate::result::{AlignmentResult, Mode, Segment};
use crate::scoring::{GapModel, Score, ScoreBounds, ScoringScheme};
use crate::trace::{trace_segment, DiagCase, GapCase, StateBacktrack};

/// Filled matrices of one local alignment. `h` is the diagonal (match or
/// mismatch) state, `ins`/`del` the gap states.
#[derive(Debug, Clone)]
pub struct SwMatrices {
    pub h: Grid<Score>,
    pub ins: Grid<Score>,
    pub del: Grid<Score>,
    /// bits 0-1: ins case, 2-3: del case, 4-5: diagonal case
    bp: Grid<u8>,
}

impl StateBacktrack for SwMatrices {
    fn diag_case(&self, i: usize, j: usize) -> DiagCase {
        DiagCase::from_code((self.bp.get(i, j) >> 4) & 0b11)
    }
    fn ins_case(&self, i: usize, j: usize) -> GapCase {
        GapCase::from_code(self.bp.get(i, j) & 0b11)
    }
    fn del_case(&self, i: usize, j: usize) -> GapCase {
        GapCase::from_code((self.bp.get(i, j) >> 2) & 0b11)
    }
}

/// First maximum in listed order.
#[inline]
pub(crate) fn max3(x: Score, y: Score, z: Score) -> (Score, u8) {
    let mut best = (x, 0);
    if y > best.0 {
        best = (y, 1);
    }
    if z > best.0 {
        best = (z, 2);
    }
    best
}

pub fn sw_fill(a: &TokenSeq, b: &TokenSeq, scheme: &ScoringScheme, gaps: &GapModel) -> Result<SwMatrices> {
    scheme.check_tokens(&a.tokens)?;
    scheme.check_tokens(&b.tokens)?;
    let bounds = ScoreBounds::new(a.len(), b.len(), scheme, gaps, None)?;
    let (rows, cols) = (a.len() + 1, b.len() + 1);
    let mut h = Grid::new(rows, cols, 0);
    let mut ins = Grid::new(rows, cols, bounds.neg_inf);
    let mut del = Grid::new(rows, cols, bounds.neg_inf);
    let mut bp = Grid::new(rows, cols, 0u8);
    let (open_ext, ext) = (gaps.open + gaps.extend, gaps.extend);

    for i in 1..rows {
        let ai = a.at(i);
        for j in 1..cols {
            let s = scheme.score_unchecked(ai, b.at(j));

            let (vi, ci) = max3(ins.get(i - 1, j) + ext, h.get(i - 1, j) + open_ext, del.get(i - 1, j) + open_ext);
            let (vd, cd) = max3(ins.get(i, j - 1) + open_ext, h.get(i, j - 1) + open_ext, del.get(i, j - 1) + ext);

            let mut vh = 0;
            let mut ch = DiagCase::Zero;
            for (v, c) in [
                (ins.get(i - 1, j - 1) + s, DiagCase::FromIns),
                (h.get(i - 1, j - 1) + s, DiagCase::FromDiag),
                (del.get(i - 1, j - 1) + s, DiagCase::FromDel),
            ] {
                if v > vh {
                    vh = v;
                    ch = c;
                }
            }

            ins.set(i, j, vi);
            del.set(i, j, vd);
            h.set(i, j, vh);
            bp.set(i, j, ci | (cd << 2) | ((ch as u8) << 4));
        }
    }
    Ok(SwMatrices { h, ins, del, bp })
}

/// Best single local alignment. Ties on the end cell go to the row-major
/// first cell; ties along the path follow the recurrence case order, which
/// restarts at zero before extending.
pub fn smith_waterman(a: &TokenSeq, b: &TokenSeq, scheme: &ScoringScheme, gaps: &GapModel) -> Result<AlignmentResult> {
    let mats = sw_fill(a, b, scheme, gaps)?;
    let (ei, ej) = mats.h.first_argmax();
    let best = mats.h.get(ei, ej);
    if best <= 0 {
        return Ok(AlignmentResult::empty(Mode::Sw));
    }
    let path = trace_segment(&mats, ei, ej);
    let mut seg = Segment::from_ops(path.a_start, path.b_start, path.ops, path.start, a, b, scheme, gaps);
    debug_assert_eq!(seg.segment_score, best);
    seg.score_length = mats.h.get(ei, ej) - mats.h.get(seg.a_start - 1, seg.b_start - 1);
    Ok(AlignmentResult { total_score: best, k: 1, segments: vec![seg], breakpoints: Vec::new(), mode: Mode::Sw })
}
