//! The coordinate-descent iteration shared by every selection rule.

mod select;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub use select::{ggs_randomized_select, ggs_select, grcd_select, rgs_select, step, GgsChoice, GrcdChoice};

use crate::error::{Error, Result};
use crate::linalg::{self, check_len, ColumnMatrix, Matrix};
use crate::problems::LsqProblem;
use crate::rng::{self, Rng};
use select::ColumnSampler;

/// Column-selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Greedy Gauss-Seidel.
    Ggs,
    /// Greedy Gauss-Seidel with the second stage sampled instead of maximized.
    GgsRandomized,
    /// Greedy randomized coordinate descent.
    Grcd,
    /// Randomized Gauss-Seidel.
    Rgs,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Ggs, Method::GgsRandomized, Method::Grcd, Method::Rgs];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ggs => "ggs",
            Method::GgsRandomized => "ggs-randomized",
            Method::Grcd => "grcd",
            Method::Rgs => "rgs",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Ggs => "GGS",
            Method::GgsRandomized => "GGS-R",
            Method::Grcd => "GRCD",
            Method::Rgs => "RGS",
        }
    }

    pub fn is_randomized(self) -> bool {
        !matches!(self, Method::Ggs)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ggs" => Ok(Method::Ggs),
            "ggs-randomized" | "ggs_randomized" | "ggsr" | "ggs-r" => Ok(Method::GgsRandomized),
            "grcd" => Ok(Method::Grcd),
            "rgs" => Ok(Method::Rgs),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub max_iterations: usize,
    /// Threshold on RES when the solution is known, otherwise on the relative
    /// squared normal-equation gradient.
    pub res_tolerance: f64,
    /// Relative slack used to treat near-maximal `|A_j^T r|` as ties.
    pub tie_tolerance_rel: f64,
    pub seed: u64,
    pub record_trace: bool,
    /// Initial iterate; `None` starts from zero.
    pub warm_start: Option<Vec<f64>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::Ggs,
            max_iterations: 200_000,
            res_tolerance: 1e-6,
            tie_tolerance_rel: 1e-12,
            seed: 0,
            record_trace: false,
            warm_start: None,
        }
    }
}

impl SolverConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.res_tolerance > 0.0) {
            return Err(Error::InvalidConfig("res_tolerance must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.tie_tolerance_rel) {
            return Err(Error::InvalidConfig("tie_tolerance_rel must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// State at the start of one iteration plus the choice made in it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub iteration: usize,
    pub chosen_index: usize,
    /// Size of the candidate set (1 for RGS).
    pub candidate_set_size: usize,
    /// Sum of squared column norms over the candidate set.
    pub candidate_norm_sum: f64,
    /// `||x_k - x_*||^2_{A^T A}`, when the solution is known.
    pub energy_error_sq: Option<f64>,
    /// `||A^T r_k||^2`.
    pub residual_gradient_norm_sq: f64,
    pub res: Option<f64>,
    /// Threshold of the GRCD rule.
    pub delta_k: Option<f64>,
}

/// Per-iteration records plus the state after the final step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub steps: Vec<StepRecord>,
    pub final_energy_error_sq: Option<f64>,
    pub final_gradient_norm_sq: f64,
    pub final_res: Option<f64>,
}

impl Trace {
    /// Energy errors `e_0, ..., e_K` including the terminal state.
    pub fn energy_errors(&self) -> Option<Vec<f64>> {
        let mut out: Vec<f64> = self.steps.iter().map(|s| s.energy_error_sq).collect::<Option<_>>()?;
        out.push(self.final_energy_error_sq?);
        Some(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ResReached,
    GradientReached,
    IterationCap,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::ResReached => "RES_REACHED",
            StopReason::GradientReached => "GRADIENT_REACHED",
            StopReason::IterationCap => "ITERATION_CAP",
        }
    }

    pub fn converged(self) -> bool {
        !matches!(self, StopReason::IterationCap)
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub elapsed_seconds: f64,
    pub trace: Option<Trace>,
    /// RES at the stop when the solution is known, otherwise
    /// `||A^T r||^2 / ||A^T b||^2`.
    pub final_res: f64,
    /// `||A^T r||^2` at the stop.
    pub final_gradient_norm_sq: f64,
    /// Largest `||r_k - (b - A x_k)|| / ||b||` seen at the periodic checks.
    pub max_residual_drift: f64,
}

/// Iterations between checks of the incremental residual against `b - A x`.
pub const DRIFT_CHECK_INTERVAL: usize = 1000;

/// Solves `min ||b - A x||` for the problem with the configured rule.
pub fn solve(problem: &LsqProblem, config: &SolverConfig) -> Result<SolveReport> {
    let x_star = problem.known_solution.as_deref();
    match &problem.matrix {
        Matrix::Dense(a) => solve_system(a, &problem.rhs, x_star, config),
        Matrix::Sparse(a) => solve_system(a, &problem.rhs, x_star, config),
    }
}

/// Generic driver over any column storage.
pub fn solve_system<M: ColumnMatrix + ?Sized>(
    a: &M,
    b: &[f64],
    x_star: Option<&[f64]>,
    config: &SolverConfig,
) -> Result<SolveReport> {
    config.validate()?;
    let (m, n) = (a.rows(), a.cols());
    check_len(m, b.len())?;
    if let Some(xs) = x_star {
        check_len(n, xs.len())?;
    }
    if let Some(w) = &config.warm_start {
        check_len(n, w.len())?;
    }

    let start = Instant::now();
    let norms = a.column_norms_sq();
    let frob_sq: f64 = norms.iter().sum();
    let mut rng: Rng = rng::seeded(config.seed);
    let rgs_sampler = (config.method == Method::Rgs).then(|| ColumnSampler::new(&norms));

    let mut x = config.warm_start.clone().unwrap_or_else(|| vec![0.0; n]);
    let mut r = b.to_vec();
    if x.iter().any(|&v| v != 0.0) {
        let ax = a.matvec(&x)?;
        r.iter_mut().zip(&ax).for_each(|(ri, v)| *ri -= v);
    }
    let b_norm = linalg::norm_sq(b).sqrt();
    let x_star_norm_sq = x_star.map(linalg::norm_sq);
    let atb_norm_sq = if x_star.is_none() {
        linalg::norm_sq(&a.transpose_matvec(b)?)
    } else {
        0.0
    };

    let res_of = |x: &[f64]| -> Option<f64> {
        let xs = x_star?;
        let err: f64 = x.iter().zip(xs).map(|(u, v)| (u - v) * (u - v)).sum();
        let scale = x_star_norm_sq.unwrap_or(0.0);
        Some(if scale > 0.0 { err / scale } else { err })
    };
    let energy_of = |x: &[f64]| -> Result<Option<f64>> {
        match x_star {
            Some(xs) => Ok(Some(linalg::energy_error_sq(a, x, xs)?)),
            None => Ok(None),
        }
    };

    let mut s = vec![0.0; n];
    let mut candidates: Vec<usize> = Vec::with_capacity(n);
    let mut steps = Vec::new();
    let mut max_drift = 0.0f64;
    let mut k = 0usize;

    // GGS only needs `||s||^2` for the gradient stopping rule or a trace;
    // the other rules read it (or an all-zero test) every iteration.
    let track_gradient = x_star.is_none() || config.record_trace || config.method == Method::Rgs;

    let stop_reason = loop {
        a.transpose_matvec_into(&r, &mut s);
        let grad_sq = if track_gradient { linalg::norm_sq(&s) } else { f64::NAN };
        let res = res_of(&x);
        match res {
            Some(res) if res <= config.res_tolerance => break StopReason::ResReached,
            None if grad_sq <= config.res_tolerance * atb_norm_sq => break StopReason::GradientReached,
            _ => {}
        }
        if grad_sq == 0.0 {
            break StopReason::GradientReached;
        }
        if k >= config.max_iterations {
            break StopReason::IterationCap;
        }

        let mut delta_k = None;
        let j = match config.method {
            Method::Ggs => select::ggs_select_into(&s, &norms, config.tie_tolerance_rel, &mut candidates),
            Method::GgsRandomized => {
                select::ggs_randomized_select_into(&s, &norms, config.tie_tolerance_rel, &mut rng, &mut candidates)
            }
            Method::Grcd => select::grcd_select_into(&s, &norms, frob_sq, &mut rng, &mut candidates).map(|(j, d)| {
                delta_k = Some(d);
                j
            }),
            Method::Rgs => {
                let j = rgs_sampler.as_ref().expect("built for RGS").sample(&mut rng);
                candidates.clear();
                candidates.push(j);
                Ok(j)
            }
        };
        let j = match j {
            Ok(j) => j,
            Err(Error::AllZeroGradient) => break StopReason::GradientReached,
            Err(e) => return Err(e),
        };

        if config.record_trace {
            steps.push(StepRecord {
                iteration: k,
                chosen_index: j,
                candidate_set_size: candidates.len(),
                candidate_norm_sum: candidates.iter().map(|&c| norms[c]).sum(),
                energy_error_sq: energy_of(&x)?,
                residual_gradient_norm_sq: grad_sq,
                res,
                delta_k,
            });
        }

        step(&mut x, &mut r, a, j, norms[j])?;
        k += 1;

        if k.is_multiple_of(DRIFT_CHECK_INTERVAL) {
            max_drift = max_drift.max(residual_drift(a, b, &x, &r, b_norm));
        }
    };

    let elapsed_seconds = start.elapsed().as_secs_f64();
    // `s` still holds `A^T r` for the final iterate.
    let grad_sq = linalg::norm_sq(&s);
    let final_res = res_of(&x).unwrap_or_else(|| relative(grad_sq, atb_norm_sq));
    let trace = if config.record_trace {
        Some(Trace {
            steps,
            final_energy_error_sq: energy_of(&x)?,
            final_gradient_norm_sq: grad_sq,
            final_res: res_of(&x),
        })
    } else {
        None
    };

    Ok(SolveReport {
        solution: x,
        iterations: k,
        stop_reason,
        elapsed_seconds,
        trace,
        final_res,
        final_gradient_norm_sq: grad_sq,
        max_residual_drift: max_drift,
    })
}

fn relative(value: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        value / scale
    } else {
        value
    }
}

fn residual_drift<M: ColumnMatrix + ?Sized>(a: &M, b: &[f64], x: &[f64], r: &[f64], b_norm: f64) -> f64 {
    let mut fresh = vec![0.0; a.rows()];
    a.matvec_into(x, &mut fresh);
    let diff: f64 = b
        .iter()
        .zip(&fresh)
        .zip(r)
        .map(|((bi, axi), ri)| {
            let d = (bi - axi) - ri;
            d * d
        })
        .sum();
    relative(diff.sqrt(), b_norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::problems::LsqProblem;

    fn worked_problem(x_star: Option<Vec<f64>>) -> LsqProblem {
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        LsqProblem::new(a.into(), vec![1.0, 2.0, 3.0], x_star, "worked").unwrap()
    }

    #[test]
    fn worked_system_two_steps() {
        let p = worked_problem(Some(vec![1.0, 1.0]));
        let cfg = SolverConfig {
            record_trace: true,
            ..SolverConfig::new(Method::Ggs)
        };
        let rep = solve(&p, &cfg).unwrap();
        assert_eq!(rep.solution, vec![1.0, 1.0]);
        assert_eq!(rep.iterations, 2);
        assert_eq!(rep.stop_reason, StopReason::ResReached);
        assert_eq!(rep.final_res, 0.0);
        let trace = rep.trace.unwrap();
        let chosen: Vec<usize> = trace.steps.iter().map(|s| s.chosen_index).collect();
        assert_eq!(chosen, vec![1, 0]);
        assert_eq!(trace.energy_errors().unwrap(), vec![5.0, 1.0, 0.0]);
        assert_eq!(trace.steps[0].candidate_norm_sum, 4.0);
        assert_eq!(trace.steps[1].candidate_norm_sum, 1.0);
    }

    #[test]
    fn worked_system_without_known_solution() {
        let rep = solve(&worked_problem(None), &SolverConfig::new(Method::Ggs)).unwrap();
        assert_eq!(rep.solution, vec![1.0, 1.0]);
        assert_eq!(rep.iterations, 2);
        assert_eq!(rep.stop_reason, StopReason::GradientReached);
        assert_eq!(rep.final_gradient_norm_sq, 0.0);
    }

    #[test]
    fn zero_rhs_stops_immediately() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 7.0]]).unwrap();
        let p = LsqProblem::new(a.into(), vec![0.0; 3], None, "zero").unwrap();
        for method in Method::ALL {
            let rep = solve(&p, &SolverConfig::new(method)).unwrap();
            assert_eq!(rep.iterations, 0);
            assert_eq!(rep.solution, vec![0.0, 0.0]);
            assert_eq!(rep.stop_reason, StopReason::GradientReached);
        }
    }

    #[test]
    fn iteration_cap_is_a_stop_reason() {
        let a = DenseMatrix::from_rows(&[&[1.0, 0.9], &[0.9, 1.0], &[0.1, 0.2]]).unwrap();
        let p = LsqProblem::new(a.into(), vec![1.0, 2.0, 3.0], Some(vec![5.0, -3.0]), "cap").unwrap();
        let cfg = SolverConfig {
            max_iterations: 3,
            ..SolverConfig::new(Method::Ggs)
        };
        let rep = solve(&p, &cfg).unwrap();
        assert_eq!(rep.iterations, 3);
        assert_eq!(rep.stop_reason, StopReason::IterationCap);
    }

    #[test]
    fn config_validation() {
        let p = worked_problem(None);
        for cfg in [
            SolverConfig {
                max_iterations: 0,
                ..SolverConfig::default()
            },
            SolverConfig {
                res_tolerance: 0.0,
                ..SolverConfig::default()
            },
            SolverConfig {
                tie_tolerance_rel: 1.0,
                ..SolverConfig::default()
            },
            SolverConfig {
                warm_start: Some(vec![0.0; 3]),
                ..SolverConfig::default()
            },
        ] {
            assert!(solve(&p, &cfg).is_err());
        }
    }

    #[test]
    fn warm_start_at_solution() {
        let p = worked_problem(Some(vec![1.0, 1.0]));
        let cfg = SolverConfig {
            warm_start: Some(vec![1.0, 1.0]),
            ..SolverConfig::new(Method::Grcd)
        };
        let rep = solve(&p, &cfg).unwrap();
        assert_eq!(rep.iterations, 0);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("kaczmarz".parse::<Method>().is_err());
    }
}
