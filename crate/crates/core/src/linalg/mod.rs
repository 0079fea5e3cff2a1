//! Column-oriented matrix storage and the kernels the coordinate-descent
//! solvers run on.
//!
//! Both representations walk one column at a time: dense storage is
//! column-major and sparse storage is compressed sparse column (CSC).

mod dense;
mod sparse;

pub use dense::DenseMatrix;
pub use sparse::SparseMatrix;

use crate::error::{Error, Result};

/// Column-level operations shared by dense and CSC storage.
pub trait ColumnMatrix {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// Number of stored entries (`rows * cols` for dense storage).
    fn nnz(&self) -> usize;

    /// Squared Euclidean norm of every column.
    fn column_norms_sq(&self) -> Vec<f64>;

    /// `A_j^T r` without bounds checks on `j`; callers validate.
    fn column_dot_unchecked(&self, j: usize, r: &[f64]) -> f64;

    /// `r += alpha * A_j` without bounds checks on `j`.
    fn axpy_column_unchecked(&self, r: &mut [f64], j: usize, alpha: f64);

    /// Writes column `j` densely into `out` (length `rows`).
    fn scatter_column(&self, j: usize, out: &mut [f64]);

    /// `out = A x`.
    fn matvec_into(&self, x: &[f64], out: &mut [f64]);

    /// `out = A^T r`.
    fn transpose_matvec_into(&self, r: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.column_dot_unchecked(j, r);
        }
    }

    fn column_dot(&self, j: usize, r: &[f64]) -> Result<f64> {
        self.check_column(j)?;
        check_len(self.rows(), r.len())?;
        Ok(self.column_dot_unchecked(j, r))
    }

    fn axpy_column(&self, r: &mut [f64], j: usize, alpha: f64) -> Result<()> {
        self.check_column(j)?;
        check_len(self.rows(), r.len())?;
        self.axpy_column_unchecked(r, j, alpha);
        Ok(())
    }

    fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols(), x.len())?;
        let mut out = vec![0.0; self.rows()];
        self.matvec_into(x, &mut out);
        Ok(out)
    }

    fn transpose_matvec(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows(), r.len())?;
        let mut out = vec![0.0; self.cols()];
        self.transpose_matvec_into(r, &mut out);
        Ok(out)
    }

    /// The `n x n` Gram matrix `A^T A`, column-major.
    fn gram(&self) -> Vec<f64> {
        let n = self.cols();
        let mut g = vec![0.0; n * n];
        let mut col = vec![0.0; self.rows()];
        for j in 0..n {
            col.iter_mut().for_each(|v| *v = 0.0);
            self.scatter_column(j, &mut col);
            for i in 0..=j {
                let v = self.column_dot_unchecked(i, &col);
                g[j * n + i] = v;
                g[i * n + j] = v;
            }
        }
        g
    }

    fn check_column(&self, j: usize) -> Result<()> {
        if j < self.cols() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: j,
                cols: self.cols(),
            })
        }
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Either storage, chosen at load time.
#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Dense(DenseMatrix),
    Sparse(SparseMatrix),
}

macro_rules! dispatch {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            Matrix::Dense($m) => $body,
            Matrix::Sparse($m) => $body,
        }
    };
}

impl ColumnMatrix for Matrix {
    fn rows(&self) -> usize {
        dispatch!(self, m => m.rows())
    }
    fn cols(&self) -> usize {
        dispatch!(self, m => m.cols())
    }
    fn nnz(&self) -> usize {
        dispatch!(self, m => m.nnz())
    }
    fn column_norms_sq(&self) -> Vec<f64> {
        dispatch!(self, m => m.column_norms_sq())
    }
    fn column_dot_unchecked(&self, j: usize, r: &[f64]) -> f64 {
        dispatch!(self, m => m.column_dot_unchecked(j, r))
    }
    fn axpy_column_unchecked(&self, r: &mut [f64], j: usize, alpha: f64) {
        dispatch!(self, m => m.axpy_column_unchecked(r, j, alpha))
    }
    fn scatter_column(&self, j: usize, out: &mut [f64]) {
        dispatch!(self, m => m.scatter_column(j, out))
    }
    fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        dispatch!(self, m => m.matvec_into(x, out))
    }
    fn transpose_matvec_into(&self, r: &[f64], out: &mut [f64]) {
        dispatch!(self, m => m.transpose_matvec_into(r, out))
    }
    fn gram(&self) -> Vec<f64> {
        dispatch!(self, m => m.gram())
    }
}

impl From<DenseMatrix> for Matrix {
    fn from(m: DenseMatrix) -> Self {
        Matrix::Dense(m)
    }
}

impl From<SparseMatrix> for Matrix {
    fn from(m: SparseMatrix) -> Self {
        Matrix::Sparse(m)
    }
}

impl Matrix {
    /// Fraction of stored entries, `nnz / (m n)`.
    pub fn density(&self) -> f64 {
        self.nnz() as f64 / (self.rows() as f64 * self.cols() as f64)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Matrix::Dense(d) => d.clone(),
            Matrix::Sparse(s) => s.to_dense(),
        }
    }
}

/// `||A||_F^2`, summed over the cached column norms in column order.
pub fn frobenius_norm_sq<M: ColumnMatrix + ?Sized>(a: &M) -> f64 {
    a.column_norms_sq().iter().sum()
}

/// Energy-norm error `||x - x_ref||^2_{A^T A} = ||A (x - x_ref)||_2^2`.
pub fn energy_error_sq<M: ColumnMatrix + ?Sized>(a: &M, x: &[f64], x_ref: &[f64]) -> Result<f64> {
    check_len(a.cols(), x.len())?;
    check_len(a.cols(), x_ref.len())?;
    let diff: Vec<f64> = x.iter().zip(x_ref).map(|(u, v)| u - v).collect();
    let mut ad = vec![0.0; a.rows()];
    a.matvec_into(&diff, &mut ad);
    Ok(norm_sq(&ad))
}

/// Dot product with eight independent accumulators so the reduction
/// pipelines instead of serializing on one running sum.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().min(b.len());
    let (a, b) = (&a[..len], &b[..len]);
    let mut acc = [0.0f64; 8];
    let mut ca = a.chunks_exact(8);
    let mut cb = b.chunks_exact(8);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

pub fn norm_sq(v: &[f64]) -> f64 {
    dot(v, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn worked() -> DenseMatrix {
        DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 2.0], &[0.0, 0.0]]).unwrap()
    }

    /// Deterministic pseudo-random matrix with a few exact zeros.
    fn sample(rows: usize, cols: usize, salt: u64) -> DenseMatrix {
        let mut rng = crate::rng::seeded(salt);
        let data = (0..rows * cols)
            .map(|k| {
                let v = crate::rng::standard_normal(&mut rng);
                if k % 4 == 1 {
                    0.0
                } else {
                    v
                }
            })
            .collect();
        DenseMatrix::new(rows, cols, data).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())), "{x} vs {y}");
        }
    }

    #[test]
    fn column_norms_examples() {
        assert_eq!(worked().column_norms_sq(), vec![1.0, 4.0]);
        assert_eq!(DenseMatrix::identity(2).column_norms_sq(), vec![1.0, 1.0]);
        let d = sample(5, 3, 1);
        let s = SparseMatrix::from_dense(&d);
        close(&d.column_norms_sq(), &s.column_norms_sq(), 1e-14);
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(frobenius_norm_sq(&worked()), 5.0);
        assert_eq!(frobenius_norm_sq(&DenseMatrix::identity(7)), 7.0);
        let row = DenseMatrix::from_rows(&[&[3.0, 4.0]]).unwrap();
        assert_eq!(frobenius_norm_sq(&row), 25.0);
    }

    #[test]
    fn matvec_examples() {
        assert_eq!(worked().matvec(&[1.0, 1.0]).unwrap(), vec![1.0, 2.0, 0.0]);
        let x = [0.5, -2.0, 3.0];
        assert_eq!(DenseMatrix::identity(3).matvec(&x).unwrap(), x.to_vec());
        let d = sample(6, 4, 2);
        let s = SparseMatrix::from_dense(&d);
        let x = [1.0, -0.5, 0.25, 2.0];
        close(&d.matvec(&x).unwrap(), &s.matvec(&x).unwrap(), 1e-14);
        assert!(matches!(
            worked().matvec(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn transpose_matvec_examples() {
        let a = worked();
        assert_eq!(a.transpose_matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 4.0]);
        assert_eq!(a.transpose_matvec(&[0.0; 3]).unwrap(), vec![0.0, 0.0]);
        let d = sample(6, 4, 3);
        let r = [1.0, 2.0, -1.0, 0.5, 0.0, 3.0];
        let by_column: Vec<f64> = (0..4).map(|j| d.column_dot(j, &r).unwrap()).collect();
        close(&d.transpose_matvec(&r).unwrap(), &by_column, 1e-14);
        assert!(a.transpose_matvec(&[1.0]).is_err());
    }

    #[test]
    fn column_dot_examples() {
        let a = worked();
        assert_eq!(a.column_dot(1, &[1.0, 2.0, 3.0]).unwrap(), 4.0);
        assert_eq!(a.column_dot(0, &[0.0, 5.0, 7.0]).unwrap(), 0.0);
        assert!(matches!(
            a.column_dot(2, &[1.0, 2.0, 3.0]),
            Err(Error::IndexOutOfRange { index: 2, cols: 2 })
        ));
        let d = sample(8, 5, 4);
        let s = SparseMatrix::from_dense(&d);
        let r: Vec<f64> = (0..8).map(|i| i as f64 - 3.5).collect();
        let full = d.transpose_matvec(&r).unwrap();
        for j in 0..5 {
            close(&[s.column_dot(j, &r).unwrap()], &[full[j]], 1e-14);
        }
    }

    #[test]
    fn axpy_column_examples() {
        let a = worked();
        let mut r = vec![1.0, 2.0, 3.0];
        a.axpy_column(&mut r, 0, 0.0).unwrap();
        assert_eq!(r, vec![1.0, 2.0, 3.0]);
        a.axpy_column(&mut r, 1, -1.0).unwrap();
        assert_eq!(r, vec![1.0, 0.0, 3.0]);
        assert!(a.axpy_column(&mut r, 5, 1.0).is_err());
    }

    #[test]
    fn axpy_with_projection_coefficient_orthogonalizes() {
        let d = sample(9, 4, 5);
        let norms = d.column_norms_sq();
        let mut r: Vec<f64> = (0..9).map(|i| (i as f64).sin()).collect();
        for j in 0..4 {
            let alpha = d.column_dot(j, &r).unwrap() / norms[j];
            d.axpy_column(&mut r, j, -alpha).unwrap();
            let after = d.column_dot(j, &r).unwrap();
            assert!(after.abs() <= 1e-10 * norms[j].sqrt() * norm_sq(&r).sqrt());
        }
    }

    #[test]
    fn energy_error_examples() {
        let a = worked();
        assert_eq!(energy_error_sq(&a, &[1.0, 1.0], &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(energy_error_sq(&a, &[0.0, 0.0], &[1.0, 1.0]).unwrap(), 5.0);
        let id = DenseMatrix::identity(3);
        assert_eq!(energy_error_sq(&id, &[1.0, 2.0, 3.0], &[0.0, 0.0, 1.0]).unwrap(), 9.0);
        assert!(energy_error_sq(&a, &[0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn gram_matches_explicit_products() {
        let d = sample(7, 3, 6);
        let g = d.gram();
        let gs = SparseMatrix::from_dense(&d).gram();
        for i in 0..3 {
            for j in 0..3 {
                let expect: f64 = (0..7).map(|k| d.get(k, i) * d.get(k, j)).sum();
                close(&[g[j * 3 + i]], &[expect], 1e-14);
                close(&[gs[j * 3 + i]], &[expect], 1e-14);
            }
        }
    }

    fn dense_strategy() -> impl Strategy<Value = DenseMatrix> {
        (1usize..8, 1usize..6).prop_flat_map(|(m, n)| {
            proptest::collection::vec(prop_oneof![3 => -10.0f64..10.0, 1 => Just(0.0)], m * n)
                .prop_map(move |data| DenseMatrix::new(m, n, data).unwrap())
        })
    }

    proptest! {
        #[test]
        fn dense_and_sparse_agree(d in dense_strategy(), seed in any::<u64>()) {
            let s = SparseMatrix::from_dense(&d);
            let mut rng = crate::rng::seeded(seed);
            let x = crate::rng::normal_vec(&mut rng, d.cols());
            let r = crate::rng::normal_vec(&mut rng, d.rows());
            let tol = 1e-13;
            close(&d.column_norms_sq(), &s.column_norms_sq(), tol);
            close(&[frobenius_norm_sq(&d)], &[frobenius_norm_sq(&s)], tol);
            close(&d.matvec(&x).unwrap(), &s.matvec(&x).unwrap(), tol);
            let td = d.transpose_matvec(&r).unwrap();
            close(&td, &s.transpose_matvec(&r).unwrap(), tol);
            for j in 0..d.cols() {
                prop_assert_eq!(td[j], d.column_dot(j, &r).unwrap());
                let mut rd = r.clone();
                let mut rs = r.clone();
                d.axpy_column(&mut rd, j, 0.7).unwrap();
                s.axpy_column(&mut rs, j, 0.7).unwrap();
                close(&rd, &rs, tol);
                d.axpy_column(&mut rd, j, -0.7).unwrap();
                close(&rd, &r, tol);
            }
            let x_ref = vec![0.5; d.cols()];
            close(
                &[energy_error_sq(&d, &x, &x_ref).unwrap()],
                &[energy_error_sq(&s, &x, &x_ref).unwrap()],
                tol,
            );
        }

        #[test]
        fn frobenius_matches_entrywise_sum(d in dense_strategy()) {
            let direct: f64 = d.data().iter().map(|v| v * v).sum();
            let via_columns = frobenius_norm_sq(&d);
            prop_assert!((direct - via_columns).abs() <= 1e-13 * direct.max(1.0));
        }
    }
}
