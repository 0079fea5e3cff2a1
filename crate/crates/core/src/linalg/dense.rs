use super::{check_len, ColumnMatrix};
use crate::error::{Error, Result};

/// Dense matrix in column-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimensions(format!("{rows}x{cols} matrix")));
        }
        check_len(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row slices (convenient for small literals).
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        let mut data = vec![0.0; m * n];
        for (i, row) in rows.iter().enumerate() {
            check_len(n, row.len())?;
            for (j, &v) in row.iter().enumerate() {
                data[j * m + i] = v;
            }
        }
        Self::new(m, n, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { rows: n, cols: n, data }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    fn columns(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.rows)
    }
}

impl ColumnMatrix for DenseMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn nnz(&self) -> usize {
        self.data.len()
    }

    fn column_norms_sq(&self) -> Vec<f64> {
        self.columns().map(|c| c.iter().map(|v| v * v).sum()).collect()
    }

    fn column_dot_unchecked(&self, j: usize, r: &[f64]) -> f64 {
        super::dot(self.column(j), r)
    }

    fn axpy_column_unchecked(&self, r: &mut [f64], j: usize, alpha: f64) {
        if alpha == 0.0 {
            return;
        }
        for (ri, &a) in r.iter_mut().zip(self.column(j)) {
            *ri += alpha * a;
        }
    }

    fn scatter_column(&self, j: usize, out: &mut [f64]) {
        out.copy_from_slice(self.column(j));
    }

    fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (col, &xj) in self.columns().zip(x) {
            if xj != 0.0 {
                for (o, &a) in out.iter_mut().zip(col) {
                    *o += a * xj;
                }
            }
        }
    }

    fn transpose_matvec_into(&self, r: &[f64], out: &mut [f64]) {
        for (o, col) in out.iter_mut().zip(self.columns()) {
            *o = super::dot(col, r);
        }
    }
}
