//! Linear-convergence bounds for greedy Gauss-Seidel and their check
//! against recorded solver traces.
//!
//! All bounds are stated in the energy norm `||e||^2_{A^T A} = ||A e||^2`
//! and scale with `lambda_min`, the smallest eigenvalue of `A^T A`.

pub mod eigen;

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, ColumnMatrix};
use crate::solvers::Trace;
use eigen::symmetric_eigenvalues;

/// Absolute slack on measured contraction ratios.
pub const RATIO_SLACK: f64 = 1e-9;

/// Default relative tolerance for [`lambda_min_pos`].
pub const LAMBDA_TOLERANCE: f64 = 1e-10;

/// Smallest eigenvalue of `A^T A`, from Jacobi iteration on the explicit
/// Gram matrix.
///
/// Fails with [`Error::RankDeficient`] when the estimate is at most
/// `tolerance * ||A||_F^2`.
pub fn lambda_min_pos<M: ColumnMatrix + ?Sized>(a: &M, tolerance: f64) -> Result<f64> {
    let n = a.cols();
    let gram = a.gram();
    // Jacobi converges quadratically; run it to machine precision and keep
    // `tolerance` for the rank decision.
    let eig = symmetric_eigenvalues(&gram, n, f64::EPSILON);
    let lambda = eig[0];
    if !(lambda > tolerance * linalg::frobenius_norm_sq(a)) {
        return Err(Error::RankDeficient { lambda_min: lambda });
    }
    Ok(lambda)
}

/// Contraction factor for the first step:
/// `1 - lambda_min / (|R_0| * sum_{j in R_0} ||A_j||^2 * n)`.
pub fn ggs_first_step_factor(lambda_min: f64, n: usize, set_size: usize, set_norm_sum: f64) -> Result<f64> {
    check_positive(lambda_min, n, set_size, set_norm_sum)?;
    in_unit_interval(1.0 - lambda_min / (set_size as f64 * set_norm_sum * n as f64))
}

/// Contraction factor for steps `k >= 1`, where the previous column is
/// already orthogonal to the residual:
/// `1 - lambda_min / (|R_k| * sum_{j in R_k} ||A_j||^2 * (n - 1))`.
pub fn ggs_per_step_factor(lambda_min: f64, n: usize, set_size: usize, set_norm_sum: f64) -> Result<f64> {
    if n == 1 {
        return Err(Error::NotApplicable("single column converges in one step"));
    }
    check_positive(lambda_min, n, set_size, set_norm_sum)?;
    in_unit_interval(1.0 - lambda_min / (set_size as f64 * set_norm_sum * (n - 1) as f64))
}

/// Uniform per-step rate `1 - lambda_min / (alpha * beta * (n - 1))`.
pub fn ggs_uniform_rate(lambda_min: f64, n: usize, alpha: usize, beta: f64) -> Result<f64> {
    ggs_per_step_factor(lambda_min, n, alpha, beta)
}

/// Envelope after `k` steps: `per_step_worst^(k-1) * first_factor * e_0`.
pub fn ggs_cumulative_bound(first_factor: f64, per_step_worst: f64, k: usize, initial_energy_error_sq: f64) -> f64 {
    if k == 0 {
        return initial_energy_error_sq;
    }
    per_step_worst.powi((k - 1) as i32) * first_factor * initial_energy_error_sq
}

/// Expected one-step factor of greedy randomized coordinate descent:
/// `1 - (1/(||A||_F^2 - min_j ||A_j||^2) + 1/||A||_F^2) * lambda_min / 2`.
pub fn grcd_expected_factor<M: ColumnMatrix + ?Sized>(a: &M, lambda_min: f64) -> Result<f64> {
    let norms = a.column_norms_sq();
    grcd_expected_factor_from_norms(&norms, lambda_min)
}

pub fn grcd_expected_factor_from_norms(col_norms_sq: &[f64], lambda_min: f64) -> Result<f64> {
    if col_norms_sq.len() < 2 {
        return Err(Error::NotApplicable("the expectation bound needs at least two columns"));
    }
    let frob: f64 = col_norms_sq.iter().sum();
    let min = col_norms_sq.iter().copied().fold(f64::INFINITY, f64::min);
    in_unit_interval(1.0 - 0.5 * (1.0 / (frob - min) + 1.0 / frob) * lambda_min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// One-step contraction exceeded its factor.
    Step,
    /// Error exceeded the cumulative envelope.
    Envelope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub iteration: usize,
    pub kind: ViolationKind,
    /// `e_{k+1} / e_k` for step checks, `e_k / e_0` for envelope checks.
    pub measured_ratio: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundReport {
    pub lambda_min: f64,
    pub n: usize,
    /// Largest candidate-set size over the trace.
    pub alpha: usize,
    /// Largest candidate-set norm sum over the trace.
    pub beta: f64,
    pub first_step_factor: Option<f64>,
    /// Factor applied at each recorded step (first-step form at `k = 0`).
    pub per_step_factors: Vec<f64>,
    pub measured_ratios: Vec<f64>,
    /// `(1 - lambda / (alpha beta (n-1)))^(K-1) * first_step_factor`.
    pub cumulative_factor: Option<f64>,
    pub grcd_expected_factor: Option<f64>,
    pub initial_energy_error_sq: f64,
    pub final_energy_error_sq: f64,
    pub violations: Vec<Violation>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every step of a GGS trace against its one-step factor and every
/// iterate against the cumulative envelope.
pub fn verify_trace(trace: &Trace, lambda_min: f64, n: usize) -> Result<BoundReport> {
    let mut report = BoundReport {
        lambda_min,
        n,
        ..BoundReport::default()
    };
    if trace.steps.is_empty() {
        report.initial_energy_error_sq = trace.final_energy_error_sq.unwrap_or(0.0);
        report.final_energy_error_sq = report.initial_energy_error_sq;
        return Ok(report);
    }
    let energy = trace.energy_errors().ok_or(Error::MissingEnergyError)?;

    report.alpha = trace.steps.iter().map(|s| s.candidate_set_size).max().unwrap_or(0);
    report.beta = trace.steps.iter().map(|s| s.candidate_norm_sum).fold(0.0, f64::max);

    for (k, rec) in trace.steps.iter().enumerate() {
        let factor = if rec.iteration == 0 || n == 1 {
            ggs_first_step_factor(lambda_min, n, rec.candidate_set_size, rec.candidate_norm_sum)?
        } else {
            ggs_per_step_factor(lambda_min, n, rec.candidate_set_size, rec.candidate_norm_sum)?
        };
        let (before, after) = (energy[k], energy[k + 1]);
        let measured = if before > 0.0 {
            after / before
        } else if after > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if measured > factor + RATIO_SLACK {
            report.violations.push(Violation {
                iteration: rec.iteration,
                kind: ViolationKind::Step,
                measured_ratio: measured,
                bound: factor,
            });
        }
        report.per_step_factors.push(factor);
        report.measured_ratios.push(measured);
    }

    let first = report.per_step_factors[0];
    report.first_step_factor = Some(first);
    let worst = if n >= 2 {
        ggs_uniform_rate(lambda_min, n, report.alpha, report.beta)?
    } else {
        first
    };
    let e0 = energy[0];
    for (k, &ek) in energy.iter().enumerate().skip(1) {
        let envelope = ggs_cumulative_bound(first, worst, k, e0);
        if ek > envelope + RATIO_SLACK * e0 {
            report.violations.push(Violation {
                iteration: k,
                kind: ViolationKind::Envelope,
                measured_ratio: if e0 > 0.0 { ek / e0 } else { f64::INFINITY },
                bound: if e0 > 0.0 { envelope / e0 } else { 0.0 },
            });
        }
    }
    report.cumulative_factor = Some(ggs_cumulative_bound(first, worst, trace.steps.len(), 1.0));
    report.initial_energy_error_sq = e0;
    report.final_energy_error_sq = *energy.last().expect("nonempty");
    Ok(report)
}

/// Computes `lambda_min` for `a`, verifies the trace, and adds the GRCD
/// comparison factor.
pub fn analyze_trace<M: ColumnMatrix + ?Sized>(a: &M, trace: &Trace) -> Result<BoundReport> {
    let lambda = lambda_min_pos(a, LAMBDA_TOLERANCE)?;
    let mut report = verify_trace(trace, lambda, a.cols())?;
    report.grcd_expected_factor = grcd_expected_factor(a, lambda).ok();
    Ok(report)
}

/// Aggregate check of measured GRCD contraction ratios against the
/// expectation bound: passes when the mean is at most the bound plus three
/// standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationCheck {
    pub samples: usize,
    pub mean_ratio: f64,
    pub standard_error: f64,
    pub bound: f64,
}

impl ExpectationCheck {
    pub fn new(ratios: &[f64], bound: f64) -> Self {
        let len = ratios.len();
        let mean = ratios.iter().sum::<f64>() / len.max(1) as f64;
        let var = if len > 1 {
            ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (len - 1) as f64
        } else {
            0.0
        };
        Self {
            samples: len,
            mean_ratio: mean,
            standard_error: (var / len.max(1) as f64).sqrt(),
            bound,
        }
    }

    pub fn passed(&self) -> bool {
        self.mean_ratio <= self.bound + 3.0 * self.standard_error
    }
}

/// Step ratios `e_{k+1} / e_k` for `k >= 1` of any trace with energy data.
pub fn step_ratios(trace: &Trace) -> Result<Vec<f64>> {
    let energy = trace.energy_errors().ok_or(Error::MissingEnergyError)?;
    Ok(energy
        .windows(2)
        .skip(1)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect())
}

fn check_positive(lambda_min: f64, n: usize, set_size: usize, set_norm_sum: f64) -> Result<()> {
    if !(lambda_min > 0.0) || n == 0 || set_size == 0 || !(set_norm_sum > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bound inputs must be positive (lambda {lambda_min}, n {n}, |R| {set_size}, sum {set_norm_sum})"
        )));
    }
    Ok(())
}

/// Factors may reach 0 (exact convergence) or round to 1 (vanishing
/// `lambda_min`); anything outside `[0, 1]` means inconsistent inputs.
fn in_unit_interval(f: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&f) {
        Ok(f)
    } else {
        Err(Error::FactorOutOfRange(f))
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6e}"));
        writeln!(f, "lambda_min: {:.6e}", self.lambda_min)?;
        writeln!(f, "n: {}", self.n)?;
        writeln!(f, "steps: {}", self.per_step_factors.len())?;
        writeln!(f, "alpha: {}", self.alpha)?;
        writeln!(f, "beta: {:.6e}", self.beta)?;
        writeln!(f, "first_step_factor: {}", opt(self.first_step_factor))?;
        writeln!(f, "cumulative_factor: {}", opt(self.cumulative_factor))?;
        writeln!(f, "grcd_expected_factor: {}", opt(self.grcd_expected_factor))?;
        writeln!(f, "initial_energy_error_sq: {:.6e}", self.initial_energy_error_sq)?;
        writeln!(f, "final_energy_error_sq: {:.6e}", self.final_energy_error_sq)?;
        let max_margin = self
            .per_step_factors
            .iter()
            .zip(&self.measured_ratios)
            .map(|(b, m)| m - b)
            .fold(f64::NEG_INFINITY, f64::max);
        if max_margin.is_finite() {
            writeln!(f, "max_ratio_minus_factor: {max_margin:.6e}")?;
        }
        let shown = self.per_step_factors.len().min(10);
        for (k, (b, m)) in self
            .per_step_factors
            .iter()
            .zip(&self.measured_ratios)
            .take(shown)
            .enumerate()
        {
            writeln!(f, "step {k}: factor {b:.6} measured {m:.6}")?;
        }
        writeln!(f, "violations: {}", self.violations.len())?;
        for v in &self.violations {
            writeln!(
                f,
                "violation: iteration {} {:?} measured {:.6e} bound {:.6e}",
                v.iteration, v.kind, v.measured_ratio, v.bound
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    #[test]
    fn lambda_examples() {
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!((lambda_min_pos(&a, 1e-10).unwrap() - 1.0).abs() < 1e-14);
        assert!((lambda_min_pos(&DenseMatrix::identity(6), 1e-10).unwrap() - 1.0).abs() < 1e-14);
        let b = DenseMatrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let expected = (3.0 - 5f64.sqrt()) / 2.0;
        assert!((lambda_min_pos(&b, 1e-10).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.381966).abs() < 1e-6);
        let dup = DenseMatrix::from_rows(&[&[1.0, 1.0], &[2.0, 2.0]]).unwrap();
        assert!(matches!(lambda_min_pos(&dup, 1e-10), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn first_step_examples() {
        assert_eq!(ggs_first_step_factor(1.0, 2, 1, 4.0).unwrap(), 0.875);
        assert_eq!(ggs_first_step_factor(1.0, 2, 1, 1.0).unwrap(), 0.5);
        let f = ggs_first_step_factor(1e-300, 2, 1, 1.0).unwrap();
        assert!(f <= 1.0 && f > 1.0 - 1e-12);
        assert!(matches!(
            ggs_first_step_factor(10.0, 2, 1, 1.0),
            Err(Error::FactorOutOfRange(_))
        ));
        assert!(ggs_first_step_factor(0.0, 2, 1, 1.0).is_err());
        assert!(ggs_first_step_factor(1.0, 2, 0, 1.0).is_err());
    }

    #[test]
    fn per_step_examples() {
        assert_eq!(ggs_per_step_factor(1.0, 2, 1, 1.0).unwrap(), 0.0);
        let f = ggs_per_step_factor(1.0, 5, 1, 1e300).unwrap();
        assert!(f > 1.0 - 1e-12);
        for (size, sum) in [(1, 4.0), (2, 7.5), (3, 100.0)] {
            assert!(
                ggs_per_step_factor(0.7, 4, size, sum).unwrap() < ggs_first_step_factor(0.7, 4, size, sum).unwrap()
            );
        }
        assert!(matches!(
            ggs_per_step_factor(1.0, 1, 1, 1.0),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn cumulative_examples() {
        assert_eq!(ggs_cumulative_bound(0.6, 0.9, 1, 2.0), 1.2);
        assert!((ggs_cumulative_bound(0.875, 0.875, 3, 5.0) - 3.349609375).abs() < 1e-15);
        assert_eq!(ggs_cumulative_bound(0.875, 0.5, 7, 0.0), 0.0);
        let mut prev = f64::INFINITY;
        for k in 1..20 {
            let v = ggs_cumulative_bound(0.9, 0.95, k, 3.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn grcd_factor_examples() {
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!((grcd_expected_factor(&a, 1.0).unwrap() - 0.775).abs() < 1e-15);
        assert!((grcd_expected_factor(&DenseMatrix::identity(2), 1.0).unwrap() - 0.25).abs() < 1e-15);
        let scaled: Vec<f64> = a.data().iter().map(|v| v * 3.0).collect();
        let a3 = DenseMatrix::new(3, 2, scaled).unwrap();
        assert!((grcd_expected_factor(&a3, 9.0).unwrap() - 0.775).abs() < 1e-15);
        let col = DenseMatrix::from_rows(&[&[1.0], &[2.0]]).unwrap();
        assert!(matches!(grcd_expected_factor(&col, 5.0), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn empty_trace_report() {
        let r = verify_trace(&Trace::default(), 1.0, 3).unwrap();
        assert!(r.passed());
        assert!(r.per_step_factors.is_empty());
    }

    #[test]
    fn expectation_check() {
        let c = ExpectationCheck::new(&[0.5, 0.6, 0.7], 0.55);
        assert!((c.mean_ratio - 0.6).abs() < 1e-15);
        assert!(c.passed());
        assert!(!ExpectationCheck::new(&[0.9, 0.9, 0.9], 0.5).passed());
    }
}
