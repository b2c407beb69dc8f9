//! Single-pass multi-segment alignment with affine gaps.
//!
//! Three alignment states (`ins`, `diag`, `del`) run a local alignment; the
//! max state `m` carries the best penalized score seen so far to the right
//! and downward, and a new segment may start from it at any diagonal step at
//! the price of the jump penalty. The `h_*` matrices hold the score recorded
//! when the current alignment started, which drives the break threshold
//! (alpha). The start threshold (beta) and its weighting (gamma) decide what
//! an alignment is worth when it feeds the max state.
//!
//! Breakpoint chains are persistent linked lists in an arena: `X` chains ride
//! along each alignment state and `N` chains along the max state, so a cell
//! costs one arena node at most per chain event instead of a copied list.

use crate::alphabet::TokenSeq;
use crate::error::Result;
use crate::grid::Grid;
use crate::result::{AlignmentResult, Mode, Segment, SegmentStart};
use crate::scoring::{BetaMode, GapModel, OpbergParams, Score, ScoreBounds, ScoringScheme, Threshold};
use crate::sw::max3;
use crate::trace::{trace_segment, DiagCase, GapCase, StateBacktrack};

const EMPTY: u32 = u32::MAX;

const BP_INS: u16 = 0;
const BP_DEL: u16 = 2;
const BP_DIAG: u16 = 4;
const BP_MAX: u16 = 7;
const BP_GATED: u16 = 9;

/// How the max state was reached at a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxCase {
    /// Took the alignment value through the start threshold.
    Zeta,
    Up,
    Left,
}

#[derive(Debug, Clone, Copy)]
struct ChainNode {
    parent: u32,
    cell: u32,
}

/// Append-only store of breakpoint chains.
#[derive(Debug, Clone, Default)]
pub struct ChainArena {
    nodes: Vec<ChainNode>,
    cols: usize,
}

impl ChainArena {
    fn push(&mut self, parent: u32, i: usize, j: usize) -> u32 {
        let id = u32::try_from(self.nodes.len()).expect("breakpoint arena exhausted");
        let cell = u32::try_from(i * self.cols + j).expect("matrix too large for chain cells");
        self.nodes.push(ChainNode { parent, cell });
        id
    }

    /// Cells of the chain ending at `id`, oldest first.
    pub fn cells(&self, mut id: u32) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        while id != EMPTY {
            let node = self.nodes[id as usize];
            out.push((node.cell as usize / self.cols, node.cell as usize % self.cols));
            id = node.parent;
        }
        out.reverse();
        out
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Every matrix of one single-pass run.
#[derive(Debug, Clone)]
pub struct DpState {
    pub l_ins: Grid<Score>,
    pub l_diag: Grid<Score>,
    pub l_del: Grid<Score>,
    pub m: Grid<Score>,
    pub h_ins: Grid<Score>,
    pub h_diag: Grid<Score>,
    pub h_del: Grid<Score>,
    bp: Grid<u16>,
    pub chains: ChainArena,
    /// Row-major first cell holding the global maximum of `m`.
    pub end_cell: (usize, usize),
    /// `N` chain of the end cell.
    end_chain: u32,
    pub bounds: ScoreBounds,
}

impl StateBacktrack for DpState {
    fn diag_case(&self, i: usize, j: usize) -> DiagCase {
        DiagCase::from_code(((self.bp.get(i, j) >> BP_DIAG) & 0b111) as u8)
    }
    fn ins_case(&self, i: usize, j: usize) -> GapCase {
        GapCase::from_code(((self.bp.get(i, j) >> BP_INS) & 0b11) as u8)
    }
    fn del_case(&self, i: usize, j: usize) -> GapCase {
        GapCase::from_code(((self.bp.get(i, j) >> BP_DEL) & 0b11) as u8)
    }
}

impl DpState {
    pub fn objective(&self) -> Score {
        self.m.get(self.end_cell.0, self.end_cell.1)
    }

    pub fn max_case(&self, i: usize, j: usize) -> MaxCase {
        match (self.bp.get(i, j) >> BP_MAX) & 0b11 {
            0 => MaxCase::Zeta,
            1 => MaxCase::Up,
            2 => MaxCase::Left,
            c => unreachable!("corrupt max-state backpointer {c}"),
        }
    }

    /// Whether the max-state candidate at `(i, j)` went through gamma.
    pub fn gated(&self, i: usize, j: usize) -> bool {
        (self.bp.get(i, j) >> BP_GATED) & 1 == 1
    }

    /// The breakpoint chain stored for the end cell.
    pub fn end_breakpoints(&self) -> Vec<(usize, usize)> {
        self.chains.cells(self.end_chain)
    }

    /// Bytes held by all retained matrices and the chain arena.
    pub fn heap_bytes(&self) -> usize {
        [&self.l_ins, &self.l_diag, &self.l_del, &self.m, &self.h_ins, &self.h_diag, &self.h_del]
            .iter()
            .map(|g| g.heap_bytes())
            .sum::<usize>()
            + self.bp.heap_bytes()
            + self.chains.nodes.capacity() * std::mem::size_of::<ChainNode>()
    }
}

#[inline]
fn pick<T: Copy>(case: u8, ins: T, diag: T, del: T) -> T {
    match case {
        0 => ins,
        1 => diag,
        _ => del,
    }
}

pub fn opberg_fill(
    a: &TokenSeq,
    b: &TokenSeq,
    scheme: &ScoringScheme,
    gaps: &GapModel,
    params: &OpbergParams,
) -> Result<DpState> {
    params.validate()?;
    scheme.check_tokens(&a.tokens)?;
    scheme.check_tokens(&b.tokens)?;
    let bounds = ScoreBounds::new(a.len(), b.len(), scheme, gaps, Some(params))?;
    let neg_inf = bounds.neg_inf;
    let (rows, cols) = (a.len() + 1, b.len() + 1);

    let mut l_ins = Grid::new(rows, cols, neg_inf);
    let mut l_diag = Grid::new(rows, cols, 0);
    let mut l_del = Grid::new(rows, cols, neg_inf);
    let mut m = Grid::new(rows, cols, 0);
    let mut h_ins = Grid::new(rows, cols, 0);
    let mut h_diag = Grid::new(rows, cols, 0);
    let mut h_del = Grid::new(rows, cols, 0);
    let mut bp = Grid::new(rows, cols, 0u16);
    let mut chains = ChainArena { nodes: Vec::new(), cols };

    // Chain ids for the previous and current row: X per alignment state, N.
    let mut x_prev = vec![[EMPTY; 3]; cols];
    let mut x_cur = vec![[EMPTY; 3]; cols];
    let mut n_prev = vec![EMPTY; cols];
    let mut n_cur = vec![EMPTY; cols];

    let jump = params.jump_penalty.finite();
    let beta_finite = params.beta.finite();
    let (open_ext, ext) = (gaps.open + gaps.extend, gaps.extend);

    let mut best = 0;
    let mut end_cell = (0, 0);
    let mut end_chain = EMPTY;

    for i in 1..rows {
        let ai = a.at(i);
        n_cur[0] = EMPTY;
        x_cur[0] = [EMPTY; 3];
        for j in 1..cols {
            let s = scheme.score_unchecked(ai, b.at(j));

            let (vi, ci) =
                max3(l_ins.get(i - 1, j) + ext, l_diag.get(i - 1, j) + open_ext, l_del.get(i - 1, j) + open_ext);
            let hi = pick(ci, h_ins.get(i - 1, j), h_diag.get(i - 1, j), h_del.get(i - 1, j));
            let xi = x_prev[j][ci as usize];

            let theta = m.get(i - 1, j).max(m.get(i, j - 1));

            let mut delta = 0;
            let mut dcase = DiagCase::Zero;
            for (v, c) in [
                (l_ins.get(i - 1, j - 1) + s, DiagCase::FromIns),
                (l_diag.get(i - 1, j - 1) + s, DiagCase::FromDiag),
                (l_del.get(i - 1, j - 1) + s, DiagCase::FromDel),
            ] {
                if v > delta {
                    delta = v;
                    dcase = c;
                }
            }
            let psi = match dcase {
                DiagCase::FromIns => h_ins.get(i - 1, j - 1),
                DiagCase::FromDiag => h_diag.get(i - 1, j - 1),
                DiagCase::FromDel => h_del.get(i - 1, j - 1),
                _ => theta,
            };

            let mut lg = delta;
            let mut gcase = dcase;
            if let Some(p) = jump {
                if params.alpha.admits_le(i64::from(delta) - i64::from(psi)) {
                    let pi = m.get(i - 1, j - 1) + s + p;
                    if pi > lg {
                        lg = pi;
                        gcase = DiagCase::Jump;
                    }
                }
            }
            let (hg, xg) = match gcase {
                DiagCase::Zero => (theta, EMPTY),
                DiagCase::FromIns => (h_ins.get(i - 1, j - 1), x_prev[j - 1][0]),
                DiagCase::FromDiag => (h_diag.get(i - 1, j - 1), x_prev[j - 1][1]),
                DiagCase::FromDel => (h_del.get(i - 1, j - 1), x_prev[j - 1][2]),
                DiagCase::Jump => (theta, chains.push(n_prev[j - 1], i, j)),
            };

            let (vd, cd) =
                max3(l_ins.get(i, j - 1) + open_ext, l_diag.get(i, j - 1) + open_ext, l_del.get(i, j - 1) + ext);
            let hd = pick(cd, h_ins.get(i, j - 1), h_diag.get(i, j - 1), h_del.get(i, j - 1));
            let xd = x_cur[j - 1][cd as usize];

            let measure = match params.beta_mode {
                BetaMode::Absolute => i64::from(lg),
                BetaMode::Relative => i64::from(lg) - i64::from(hg),
            };
            let gated = !params.beta.admits_ge(measure);
            let zeta = if gated { params.gamma.apply(lg, beta_finite, neg_inf) } else { lg };

            let mut mv = zeta;
            let mut mcase = 0u16;
            if m.get(i - 1, j) > mv {
                mv = m.get(i - 1, j);
                mcase = 1;
            }
            if m.get(i, j - 1) > mv {
                mv = m.get(i, j - 1);
                mcase = 2;
            }
            let nv = match mcase {
                0 => chains.push(xg, i, j),
                1 => n_prev[j],
                _ => n_cur[j - 1],
            };

            l_ins.set(i, j, vi);
            h_ins.set(i, j, hi);
            l_diag.set(i, j, lg);
            h_diag.set(i, j, hg);
            l_del.set(i, j, vd);
            h_del.set(i, j, hd);
            m.set(i, j, mv);
            bp.set(
                i,
                j,
                (u16::from(ci) << BP_INS)
                    | (u16::from(cd) << BP_DEL)
                    | ((gcase as u16) << BP_DIAG)
                    | (mcase << BP_MAX)
                    | (u16::from(gated) << BP_GATED),
            );
            x_cur[j] = [xi, xg, xd];
            n_cur[j] = nv;

            if mv > best {
                best = mv;
                end_cell = (i, j);
                end_chain = nv;
            }
        }
        std::mem::swap(&mut x_prev, &mut x_cur);
        std::mem::swap(&mut n_prev, &mut n_cur);
    }
    debug_assert_eq!(m.get(rows - 1, cols - 1), best);

    Ok(DpState { l_ins, l_diag, l_del, m, h_ins, h_diag, h_del, bp, chains, end_cell, end_chain, bounds })
}

/// Reconstructs the segments ending at `end_cell` by walking backpointers
/// through the max and alignment states. Segments come back in sequence
/// order.
pub fn traceback(
    state: &DpState,
    end_cell: (usize, usize),
    a: &TokenSeq,
    b: &TokenSeq,
    scheme: &ScoringScheme,
    gaps: &GapModel,
) -> Vec<Segment> {
    let (mut i, mut j) = end_cell;
    let mut segments = Vec::new();
    if state.m.get(i, j) <= 0 {
        return segments;
    }
    loop {
        if i == 0 || j == 0 {
            break;
        }
        match state.max_case(i, j) {
            MaxCase::Up => i -= 1,
            MaxCase::Left => j -= 1,
            MaxCase::Zeta => {
                let path = trace_segment(state, i, j);
                if path.ops.is_empty() {
                    break;
                }
                debug_assert!(path.start == SegmentStart::Fresh || path.trimmed == 0);
                let mut seg = Segment::from_ops(path.a_start, path.b_start, path.ops, path.start, a, b, scheme, gaps);
                seg.gated = state.gated(i, j);
                seg.score_length = state.l_diag.get(i, j) - state.h_diag.get(i, j);
                let start = seg.start;
                i = seg.a_start - 1;
                j = seg.b_start - 1;
                segments.push(seg);
                if start == SegmentStart::Fresh {
                    break;
                }
            }
        }
    }
    segments.reverse();
    segments
}

/// Optimal multi-segment alignment in one quadratic pass.
pub fn opberg_align(
    a: &TokenSeq,
    b: &TokenSeq,
    scheme: &ScoringScheme,
    gaps: &GapModel,
    params: &OpbergParams,
) -> Result<AlignmentResult> {
    let state = opberg_fill(a, b, scheme, gaps, params)?;
    Ok(result_from_state(&state, a, b, scheme, gaps))
}

pub fn result_from_state(
    state: &DpState,
    a: &TokenSeq,
    b: &TokenSeq,
    scheme: &ScoringScheme,
    gaps: &GapModel,
) -> AlignmentResult {
    let total = state.objective();
    if total <= 0 {
        return AlignmentResult { total_score: total.max(0), ..AlignmentResult::empty(Mode::Opberg) };
    }
    let segments = traceback(state, state.end_cell, a, b, scheme, gaps);
    AlignmentResult {
        total_score: total,
        k: segments.len(),
        segments,
        breakpoints: state.end_breakpoints(),
        mode: Mode::Opberg,
    }
}

/// Jump penalty low enough that no second segment can ever pay for itself.
pub fn priced_out_penalty(a: &TokenSeq, b: &TokenSeq, scheme: &ScoringScheme) -> Threshold {
    let n = a.len().min(b.len()) as Score;
    Threshold::Finite(-(2 * n * scheme.max_score().max(1)) - 1)
}
