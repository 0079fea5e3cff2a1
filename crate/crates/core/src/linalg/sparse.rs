use super::{check_len, ColumnMatrix, DenseMatrix};
use crate::error::{Error, Result};

/// Compressed sparse column matrix.
///
/// Row indices within each column are strictly increasing and no explicit
/// zeros are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    col_start: Vec<usize>,
    row_index: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Assembles from `(row, col, value)` triplets. Duplicates are summed and
    /// entries that end up zero are dropped.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimensions(format!("{rows}x{cols} matrix")));
        }
        for &(i, j, _) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::InvalidDimensions(format!(
                    "entry ({i}, {j}) outside {rows}x{cols}"
                )));
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|&(i, j, _)| (j, i));

        let mut col_start = vec![0usize; cols + 1];
        let mut row_index = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut k = 0;
        for j in 0..cols {
            while k < sorted.len() && sorted[k].1 == j {
                let i = sorted[k].0;
                let mut v = 0.0;
                while k < sorted.len() && sorted[k].1 == j && sorted[k].0 == i {
                    v += sorted[k].2;
                    k += 1;
                }
                if v != 0.0 {
                    row_index.push(i);
                    values.push(v);
                }
            }
            col_start[j + 1] = row_index.len();
        }
        Ok(Self {
            rows,
            cols,
            col_start,
            row_index,
            values,
        })
    }

    /// Adopts raw CSC arrays after validating them; stored zeros are dropped.
    pub fn from_csc(
        rows: usize,
        cols: usize,
        col_start: Vec<usize>,
        row_index: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimensions(format!("{rows}x{cols} matrix")));
        }
        check_len(cols + 1, col_start.len())?;
        check_len(row_index.len(), values.len())?;
        if col_start[0] != 0 || col_start[cols] != row_index.len() {
            return Err(Error::InvalidDimensions("column pointers do not span entries".into()));
        }
        for j in 0..cols {
            if col_start[j] > col_start[j + 1] {
                return Err(Error::InvalidDimensions("column pointers decrease".into()));
            }
            let rows_j = &row_index[col_start[j]..col_start[j + 1]];
            if rows_j.windows(2).any(|w| w[0] >= w[1]) || rows_j.iter().any(|&i| i >= rows) {
                return Err(Error::InvalidDimensions(format!(
                    "row indices of column {j} are not strictly increasing within range"
                )));
            }
        }
        let mut m = Self {
            rows,
            cols,
            col_start,
            row_index,
            values,
        };
        m.drop_zeros();
        Ok(m)
    }

    pub fn from_dense(d: &DenseMatrix) -> Self {
        let mut col_start = vec![0usize; d.cols() + 1];
        let mut row_index = Vec::new();
        let mut values = Vec::new();
        for j in 0..d.cols() {
            for (i, &v) in d.column(j).iter().enumerate() {
                if v != 0.0 {
                    row_index.push(i);
                    values.push(v);
                }
            }
            col_start[j + 1] = row_index.len();
        }
        Self {
            rows: d.rows(),
            cols: d.cols(),
            col_start,
            row_index,
            values,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut data = vec![0.0; self.rows * self.cols];
        for j in 0..self.cols {
            self.scatter_column(j, &mut data[j * self.rows..(j + 1) * self.rows]);
        }
        DenseMatrix::new(self.rows, self.cols, data).expect("shape already validated")
    }

    pub fn col_start(&self) -> &[usize] {
        &self.col_start
    }

    pub fn row_index(&self) -> &[usize] {
        &self.row_index
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Stored `(row, value)` pairs of column `j`.
    pub fn column_entries(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.col_start[j]..self.col_start[j + 1];
        self.row_index[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    fn drop_zeros(&mut self) {
        if self.values.iter().all(|&v| v != 0.0) {
            return;
        }
        let mut write = 0;
        let mut start = 0;
        for j in 0..self.cols {
            let end = self.col_start[j + 1];
            for k in start..end {
                if self.values[k] != 0.0 {
                    self.row_index[write] = self.row_index[k];
                    self.values[write] = self.values[k];
                    write += 1;
                }
            }
            start = end;
            self.col_start[j + 1] = write;
        }
        self.row_index.truncate(write);
        self.values.truncate(write);
    }
}

impl ColumnMatrix for SparseMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn nnz(&self) -> usize {
        self.values.len()
    }

    fn column_norms_sq(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|j| self.column_entries(j).map(|(_, v)| v * v).sum())
            .collect()
    }

    fn column_dot_unchecked(&self, j: usize, r: &[f64]) -> f64 {
        self.column_entries(j).map(|(i, v)| v * r[i]).sum()
    }

    fn axpy_column_unchecked(&self, r: &mut [f64], j: usize, alpha: f64) {
        if alpha == 0.0 {
            return;
        }
        for (i, v) in self.column_entries(j) {
            r[i] += alpha * v;
        }
    }

    fn scatter_column(&self, j: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, v) in self.column_entries(j) {
            out[i] = v;
        }
    }

    fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                self.axpy_column_unchecked(out, j, xj);
            }
        }
    }
}
