//! Backtracking through the three alignment states shared by the affine
//! engines.

use crate::result::{AlignOp, SegmentStart};

/// How the diagonal state was reached. Discriminants are the packed codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum DiagCase {
    Zero = 0,
    FromIns = 1,
    FromDiag = 2,
    FromDel = 3,
    Jump = 4,
}

impl DiagCase {
    #[inline]
    pub(crate) fn from_code(c: u8) -> Self {
        match c {
            0 => DiagCase::Zero,
            1 => DiagCase::FromIns,
            2 => DiagCase::FromDiag,
            3 => DiagCase::FromDel,
            4 => DiagCase::Jump,
            _ => unreachable!("corrupt diagonal backpointer {c}"),
        }
    }
}

/// Predecessor state of a gap cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
#[allow(clippy::enum_variant_names)]
pub enum GapCase {
    FromIns = 0,
    FromDiag = 1,
    FromDel = 2,
}

impl GapCase {
    #[inline]
    pub(crate) fn from_code(c: u8) -> Self {
        match c {
            0 => GapCase::FromIns,
            1 => GapCase::FromDiag,
            2 => GapCase::FromDel,
            _ => unreachable!("corrupt gap backpointer {c}"),
        }
    }
}

pub(crate) trait StateBacktrack {
    fn diag_case(&self, i: usize, j: usize) -> DiagCase;
    fn ins_case(&self, i: usize, j: usize) -> GapCase;
    fn del_case(&self, i: usize, j: usize) -> GapCase;
}

pub(crate) struct TracedPath {
    pub a_start: usize,
    pub b_start: usize,
    pub ops: Vec<AlignOp>,
    pub start: SegmentStart,
    /// Leading gap columns dropped from `ops`; they only arise on zero-cost ties.
    pub trimmed: usize,
}

#[derive(Clone, Copy)]
enum State {
    Ins,
    Diag,
    Del,
}

/// Walks back from the diagonal state at `(i, j)` to the segment start.
pub(crate) fn trace_segment<B: StateBacktrack>(bt: &B, mut i: usize, mut j: usize) -> TracedPath {
    let mut ops = Vec::new();
    let mut state = State::Diag;
    let start = loop {
        match state {
            State::Diag => {
                if i == 0 || j == 0 {
                    break SegmentStart::Fresh;
                }
                let case = bt.diag_case(i, j);
                if case == DiagCase::Zero {
                    break SegmentStart::Fresh;
                }
                ops.push(AlignOp::Pair);
                i -= 1;
                j -= 1;
                state = match case {
                    DiagCase::FromIns => State::Ins,
                    DiagCase::FromDiag => State::Diag,
                    DiagCase::FromDel => State::Del,
                    DiagCase::Jump => break SegmentStart::Jump,
                    DiagCase::Zero => unreachable!(),
                };
            }
            State::Ins => {
                assert!(i > 0 && j > 0, "gap state reached the boundary at ({i}, {j})");
                ops.push(AlignOp::Ins);
                let case = bt.ins_case(i, j);
                i -= 1;
                state = gap_pred(case);
            }
            State::Del => {
                assert!(i > 0 && j > 0, "gap state reached the boundary at ({i}, {j})");
                ops.push(AlignOp::Del);
                let case = bt.del_case(i, j);
                j -= 1;
                state = gap_pred(case);
            }
        }
    };
    ops.reverse();
    // `(i, j)` is now the cell before the first column.
    let (mut a_start, mut b_start) = (i + 1, j + 1);
    let lead = ops.iter().take_while(|&&o| o != AlignOp::Pair).count();
    for op in &ops[..lead] {
        match op {
            AlignOp::Ins => a_start += 1,
            AlignOp::Del => b_start += 1,
            AlignOp::Pair => unreachable!(),
        }
    }
    ops.drain(..lead);
    TracedPath { a_start, b_start, ops, start, trimmed: lead }
}

fn gap_pred(case: GapCase) -> State {
    match case {
        GapCase::FromIns => State::Ins,
        GapCase::FromDiag => State::Diag,
        GapCase::FromDel => State::Del,
    }
}
