use crate::error::{Error, Result};
use crate::scalar::Real;

use super::CsrMatrix;

/// Accumulates `(row, col, value)` contributions in insertion order.
#[derive(Debug, Clone)]
pub struct TripletBuffer<T> {
    nrows: usize,
    ncols: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> TripletBuffer<T> {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            rows: Vec::new(),
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        Self {
            nrows,
            ncols,
            rows: Vec::with_capacity(cap),
            cols: Vec::with_capacity(cap),
            vals: Vec::with_capacity(cap),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: T) {
        self.rows.push(row);
        self.cols.push(col);
        self.vals.push(value);
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    /// Sums duplicates and produces a CSR matrix with sorted, unique column
    /// indices. Duplicates are summed in insertion order, so the result is
    /// bit-reproducible for a fixed push sequence.
    pub fn compact(&self) -> Result<CsrMatrix<T>> {
        for (&r, &c) in self.rows.iter().zip(&self.cols) {
            if r >= self.nrows || c >= self.ncols {
                return Err(Error::IndexOutOfRange {
                    row: r,
                    col: c,
                    nrows: self.nrows,
                    ncols: self.ncols,
                });
            }
        }
        // stable counting sort by row
        let mut start = vec![0usize; self.nrows + 1];
        for &r in &self.rows {
            start[r + 1] += 1;
        }
        for i in 0..self.nrows {
            start[i + 1] += start[i];
        }
        let mut next = start.clone();
        let mut order = vec![0usize; self.len()];
        for (k, &r) in self.rows.iter().enumerate() {
            order[next[r]] = k;
            next[r] += 1;
        }

        let mut indptr = Vec::with_capacity(self.nrows + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        let mut row_buf: Vec<usize> = Vec::new();
        for r in 0..self.nrows {
            row_buf.clear();
            row_buf.extend_from_slice(&order[start[r]..start[r + 1]]);
            row_buf.sort_by_key(|&k| self.cols[k]);
            let mut last: Option<usize> = None;
            for &k in &row_buf {
                let c = self.cols[k];
                if last == Some(c) {
                    *data.last_mut().unwrap() += self.vals[k];
                } else {
                    indices.push(c);
                    data.push(self.vals[k]);
                    last = Some(c);
                }
            }
            indptr.push(indices.len());
        }
        Ok(CsrMatrix::from_parts_unchecked(
            self.nrows, self.ncols, indptr, indices, data,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let mut t = TripletBuffer::new(1, 1);
        t.push(0, 0, 1.0);
        t.push(0, 0, 2.0);
        let a = t.compact().unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 0), 3.0);
    }

    #[test]
    fn empty_buffer_gives_zero_matrix() {
        let t = TripletBuffer::<f64>::new(3, 3);
        let a = t.compact().unwrap();
        assert_eq!(a.nnz(), 0);
        assert_eq!(a.nrows(), 3);
        assert_eq!(a.matvec(&[1.0, 2.0, 3.0]), vec![0.0; 3]);
    }

    #[test]
    fn out_of_range_rejected() {
        let mut t = TripletBuffer::new(2, 2);
        t.push(2, 0, 1.0);
        assert!(matches!(t.compact(), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn columns_sorted_and_unique() {
        let mut t = TripletBuffer::new(2, 4);
        for &(r, c) in &[(1, 3), (0, 2), (1, 0), (0, 2), (1, 3), (0, 1)] {
            t.push(r, c, 1.0);
        }
        let a = t.compact().unwrap();
        assert_eq!(a.row_indices(0), &[1, 2]);
        assert_eq!(a.row_indices(1), &[0, 3]);
        assert_eq!(a.row_values(1), &[1.0, 2.0]);
    }
}
