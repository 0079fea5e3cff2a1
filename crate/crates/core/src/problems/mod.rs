//! Test problems: Gaussian matrices, consistent and inconsistent right-hand
//! sides, MatrixMarket ingestion, and the normal-equation reference solution.

mod manifest;
mod mtx;
mod vector;

use nalgebra::{DMatrix, DVector};

pub use manifest::{parse_manifest, read_manifest, ManifestEntry, ProblemSource};
pub use mtx::{load_matrix_market, parse_matrix_market, read_matrix_market, write_matrix_market};
pub use vector::{parse_vector, read_vector, write_vector};

use crate::analysis::eigen::symmetric_eigenvalues;
use crate::error::{Error, Result};
use crate::linalg::{self, check_len, ColumnMatrix, DenseMatrix, Matrix};
use crate::rng::{self, STREAM_MATRIX, STREAM_NULL_SPACE, STREAM_SOLUTION};

/// A least-squares instance `min ||b - A x||`.
#[derive(Debug, Clone, PartialEq)]
pub struct LsqProblem {
    pub matrix: Matrix,
    pub rhs: Vec<f64>,
    pub known_solution: Option<Vec<f64>>,
    /// `b` lies in the range of `A`.
    pub consistent: bool,
    pub label: String,
    pub density: f64,
    pub condition_estimate: Option<f64>,
}

impl LsqProblem {
    /// Wraps a matrix and right-hand side. Consistency is read off the data:
    /// the problem is consistent when a known solution reproduces `b`.
    pub fn new(
        matrix: Matrix,
        rhs: Vec<f64>,
        known_solution: Option<Vec<f64>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        check_len(matrix.rows(), rhs.len())?;
        let consistent = match &known_solution {
            Some(xs) => {
                check_len(matrix.cols(), xs.len())?;
                let ax = matrix.matvec(xs)?;
                let gap: f64 = ax.iter().zip(&rhs).map(|(u, v)| (u - v) * (u - v)).sum();
                gap.sqrt() <= 1e-12 * linalg::norm_sq(&rhs).sqrt().max(f64::MIN_POSITIVE)
            }
            None => false,
        };
        let density = matrix.density();
        Ok(Self {
            matrix,
            rhs,
            known_solution,
            consistent,
            label: label.into(),
            density,
            condition_estimate: None,
        })
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }
}

/// `m x n` matrix of i.i.d. standard normal entries, filled in column-major
/// order from the seed's matrix stream.
pub fn gen_gaussian(m: usize, n: usize, seed: u64) -> Result<DenseMatrix> {
    if n == 0 || m < n {
        return Err(Error::InvalidDimensions(format!(
            "Gaussian test matrices need m >= n >= 1, got {m}x{n}"
        )));
    }
    let mut rng = rng::seeded(rng::derive_seed(seed, STREAM_MATRIX));
    DenseMatrix::new(m, n, rng::normal_vec(&mut rng, m * n))
}

/// Standard normal `x_*` drawn from the seed's solution stream.
pub fn random_solution(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng::seeded(rng::derive_seed(seed, STREAM_SOLUTION));
    rng::normal_vec(&mut rng, n)
}

/// `b = A x_*` with a random `x_*`.
pub fn make_consistent(a: Matrix, seed: u64, label: impl Into<String>) -> Result<LsqProblem> {
    let x_star = random_solution(a.cols(), seed);
    let b = a.matvec(&x_star)?;
    let mut p = LsqProblem::new(a, b, Some(x_star), label)?;
    p.consistent = true;
    Ok(p)
}

const NULL_SPACE_ATTEMPTS: u64 = 8;

/// `b = A x_* + r_0` with `r_0` a nonzero vector in the null space of `A^T`,
/// so `x_*` stays the least-squares solution while `b` leaves the range.
pub fn make_inconsistent(a: Matrix, seed: u64, label: impl Into<String>) -> Result<LsqProblem> {
    let (m, n) = (a.rows(), a.cols());
    if m <= n {
        return Err(Error::NullSpaceEmpty);
    }
    let gram = GramFactor::new(&a)?;
    let mut r0 = None;
    for attempt in 0..NULL_SPACE_ATTEMPTS {
        let stream = rng::derive_seed(seed, STREAM_NULL_SPACE).wrapping_add(attempt);
        let z = rng::normal_vec(&mut rng::seeded(stream), m);
        let candidate = gram.project_out(&a, &z)?;
        if linalg::norm_sq(&candidate).sqrt() > 1e-8 * linalg::norm_sq(&z).sqrt() {
            r0 = Some(candidate);
            break;
        }
    }
    let r0 = r0.ok_or(Error::NullSpaceEmpty)?;
    let x_star = random_solution(n, seed);
    let mut b = a.matvec(&x_star)?;
    b.iter_mut().zip(&r0).for_each(|(bi, ri)| *bi += ri);
    let mut p = LsqProblem::new(a, b, Some(x_star), label)?;
    p.consistent = false;
    Ok(p)
}

/// Component of `z` orthogonal to the range of `A`: `z - A w` with
/// `A^T A w = A^T z`.
pub fn null_space_component<M: ColumnMatrix + ?Sized>(a: &M, z: &[f64]) -> Result<Vec<f64>> {
    GramFactor::new(a)?.project_out(a, z)
}

/// Gaussian matrix plus right-hand side, all derived from one seed.
pub fn random_problem(m: usize, n: usize, seed: u64, consistent: bool) -> Result<LsqProblem> {
    let a: Matrix = gen_gaussian(m, n, seed)?.into();
    let label = format!("{m}x{n}");
    if consistent {
        make_consistent(a, seed, label)
    } else {
        make_inconsistent(a, seed, label)
    }
}

/// Solves the normal equations `A^T A x = A^T b` by Cholesky factorization
/// of the Gram matrix, with one step of iterative refinement.
pub fn reference_solution(problem: &LsqProblem) -> Result<Vec<f64>> {
    least_squares(&problem.matrix, &problem.rhs)
}

pub fn least_squares<M: ColumnMatrix + ?Sized>(a: &M, b: &[f64]) -> Result<Vec<f64>> {
    check_len(a.rows(), b.len())?;
    let gram = GramFactor::new(a)?;
    let atb = a.transpose_matvec(b)?;
    let mut x = gram.solve(&atb);
    // Refine against the normal-equation residual.
    let ax = a.matvec(&x)?;
    let r: Vec<f64> = b.iter().zip(&ax).map(|(u, v)| u - v).collect();
    let correction = gram.solve(&a.transpose_matvec(&r)?);
    x.iter_mut().zip(&correction).for_each(|(xi, ci)| *xi += ci);
    Ok(x)
}

/// Euclidean condition number `sqrt(lambda_max / lambda_min)` of `A`, from
/// the eigenvalues of `A^T A`. Fails when `lambda_min <= 1e-12 lambda_max`.
///
/// The Gram route squares the condition number, so this is meant for the
/// moderate `n` and conditioning of the bundled test sets.
pub fn assert_full_column_rank<M: ColumnMatrix + ?Sized>(a: &M) -> Result<f64> {
    let n = a.cols();
    let eig = symmetric_eigenvalues(&a.gram(), n, f64::EPSILON);
    let (lo, hi) = (eig[0], eig[n - 1]);
    if !(lo > 1e-12 * hi) {
        return Err(Error::RankDeficient { lambda_min: lo });
    }
    Ok((hi / lo).sqrt())
}

/// Cholesky factor of `A^T A`.
struct GramFactor {
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl GramFactor {
    fn new<M: ColumnMatrix + ?Sized>(a: &M) -> Result<Self> {
        let n = a.cols();
        let g = DMatrix::from_column_slice(n, n, &a.gram());
        let chol = g.cholesky().ok_or(Error::RankDeficient { lambda_min: 0.0 })?;
        // Cholesky can succeed on numerically singular Gram matrices.
        let diag = chol.l_dirty().diagonal();
        let (lo, hi) = diag
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(*d), hi.max(*d)));
        if !(lo > 1e-7 * hi) {
            return Err(Error::RankDeficient { lambda_min: lo * lo });
        }
        Ok(Self { chol })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        self.chol.solve(&DVector::from_column_slice(rhs)).as_slice().to_vec()
    }

    fn project_out<M: ColumnMatrix + ?Sized>(&self, a: &M, z: &[f64]) -> Result<Vec<f64>> {
        check_len(a.rows(), z.len())?;
        let mut r = z.to_vec();
        // Two passes: the second removes what rounding left in the range.
        for _ in 0..2 {
            let w = self.solve(&a.transpose_matvec(&r)?);
            let aw = a.matvec(&w)?;
            r.iter_mut().zip(&aw).for_each(|(ri, v)| *ri -= v);
        }
        Ok(r)
    }
}
