use crate::error::{Error, Result};
use crate::scoring::Score;

/// Dense `(|A|+1) x (|B|+1)` matrix, row-major, row 0 and column 0 being the
/// boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy> Grid<T> {
    pub fn new(rows: usize, cols: usize, fill: T) -> Self {
        Grid { rows, cols, data: vec![fill; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn try_get(&self, i: usize, j: usize) -> Result<T> {
        if i < self.rows && j < self.cols {
            Ok(self.get(i, j))
        } else {
            Err(Error::Index { i, j, rows: self.rows, cols: self.cols })
        }
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn heap_bytes(&self) -> usize {
        self.data.capacity() * std::mem::size_of::<T>()
    }
}

impl Grid<Score> {
    /// Row-major first cell holding the maximum value.
    pub fn first_argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        let mut best_v = self.data.first().copied().unwrap_or(0);
        for (idx, &v) in self.data.iter().enumerate() {
            if v > best_v {
                best_v = v;
                best = (idx / self.cols, idx % self.cols);
            }
        }
        best
    }
}

/// Score length between cells `(i, j)` and `(i + d1, j + d2)` of `m`.
pub fn score_length(m: &Grid<Score>, i: usize, j: usize, d1: usize, d2: usize) -> Result<Score> {
    let end = m.try_get(i + d1, j + d2)?;
    let start = m.try_get(i, j)?;
    Ok(end - start)
}
