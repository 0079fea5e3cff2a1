//! Repeated-trial experiments comparing selection rules.
//!
//! Trial `t` builds its problem once (random matrices from `seed + t`), then
//! runs every method on that same instance with solver seed
//! `base_seed + t`. Only the solve itself is timed.

mod table;

use rayon::prelude::*;

pub use table::{emit_bound_rows, emit_convergence_curve, emit_table, write_convergence_curve, TableFormat};

use crate::error::{Error, Result};
use crate::problems::ManifestEntry;
use crate::solvers::{solve, Method, SolverConfig, StopReason};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub problem: ManifestEntry,
    pub methods: Vec<Method>,
    pub repeats: usize,
    pub base_seed: u64,
    pub res_tolerance: f64,
    pub max_iterations: usize,
    /// Worker threads for trials; 1 runs serially.
    pub jobs: usize,
}

impl ExperimentSpec {
    pub fn new(problem: ManifestEntry) -> Self {
        Self {
            problem,
            methods: vec![Method::Ggs, Method::Grcd],
            repeats: 50,
            base_seed: 0,
            res_tolerance: 1e-6,
            max_iterations: 200_000,
            jobs: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidConfig("repeats must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("at least one method is required".into()));
        }
        if self.jobs == 0 {
            return Err(Error::InvalidConfig("jobs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub method: Method,
    pub iterations: usize,
    pub cpu_seconds: f64,
    pub stop_reason: StopReason,
    pub final_res: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialFailure {
    pub trial: usize,
    pub method: Option<Method>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub trials: usize,
    pub mean_iterations: f64,
    pub std_iterations: f64,
    pub mean_cpu_seconds: f64,
    pub std_cpu_seconds: f64,
    /// Trials that stopped on the iteration cap (included in the means).
    pub capped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub label: String,
    pub rows: usize,
    pub cols: usize,
    pub density: f64,
    pub consistent: bool,
    pub summaries: Vec<MethodSummary>,
    /// Mean GRCD iterations over mean GGS iterations.
    pub it_speedup: Option<f64>,
    /// Mean GRCD time over mean GGS time.
    pub cpu_speedup: Option<f64>,
    pub trials: Vec<TrialRecord>,
    pub failures: Vec<TrialFailure>,
}

impl ExperimentResult {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }
}

type TrialOutcome = (
    usize,
    Vec<TrialRecord>,
    Vec<TrialFailure>,
    Option<(usize, usize, f64, bool)>,
);

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let run = |t: usize| run_trial(spec, t);
    let mut outcomes: Vec<TrialOutcome> = if spec.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        pool.install(|| (0..spec.repeats).into_par_iter().map(run).collect())
    } else {
        (0..spec.repeats).map(run).collect()
    };
    outcomes.sort_by_key(|o| o.0);

    let mut trials = Vec::new();
    let mut failures = Vec::new();
    let mut shape = None;
    for (_, recs, fails, s) in outcomes {
        trials.extend(recs);
        failures.extend(fails);
        shape = shape.or(s);
    }
    let (rows, cols, density, consistent) = shape.unwrap_or((0, 0, 0.0, spec.problem.consistent));

    let summaries: Vec<MethodSummary> = spec
        .methods
        .iter()
        .map(|&m| summarize(m, trials.iter().filter(|r| r.method == m)))
        .collect();
    let ratio = |f: fn(&MethodSummary) -> f64| {
        let ggs = summaries.iter().find(|s| s.method == Method::Ggs && s.trials > 0)?;
        let grcd = summaries.iter().find(|s| s.method == Method::Grcd && s.trials > 0)?;
        let denom = f(ggs);
        (denom > 0.0).then(|| f(grcd) / denom)
    };
    let it_speedup = ratio(|s| s.mean_iterations);
    let cpu_speedup = ratio(|s| s.mean_cpu_seconds);

    Ok(ExperimentResult {
        label: spec.problem.label.clone(),
        rows,
        cols,
        density,
        consistent,
        summaries,
        it_speedup,
        cpu_speedup,
        trials,
        failures,
    })
}

fn run_trial(spec: &ExperimentSpec, t: usize) -> TrialOutcome {
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let problem = match spec.problem.build(t as u64) {
        Ok(p) => p,
        Err(e) => {
            failures.push(TrialFailure {
                trial: t,
                method: None,
                message: e.to_string(),
            });
            return (t, records, failures, None);
        }
    };
    let shape = Some((problem.rows(), problem.cols(), problem.density, problem.consistent));
    // Rotate the run order per trial so no method always runs on a cold cache.
    let count = spec.methods.len();
    for &method in spec.methods.iter().cycle().skip(t % count).take(count) {
        let cfg = SolverConfig {
            method,
            max_iterations: spec.max_iterations,
            res_tolerance: spec.res_tolerance,
            seed: spec.base_seed.wrapping_add(t as u64),
            ..SolverConfig::default()
        };
        match solve(&problem, &cfg) {
            Ok(rep) => records.push(TrialRecord {
                trial: t,
                method,
                iterations: rep.iterations,
                cpu_seconds: rep.elapsed_seconds,
                stop_reason: rep.stop_reason,
                final_res: rep.final_res,
            }),
            Err(e) => failures.push(TrialFailure {
                trial: t,
                method: Some(method),
                message: e.to_string(),
            }),
        }
    }
    records.sort_by_key(|r| spec.methods.iter().position(|&m| m == r.method));
    (t, records, failures, shape)
}

fn summarize<'a>(method: Method, records: impl Iterator<Item = &'a TrialRecord>) -> MethodSummary {
    let recs: Vec<&TrialRecord> = records.collect();
    let its: Vec<f64> = recs.iter().map(|r| r.iterations as f64).collect();
    let cpus: Vec<f64> = recs.iter().map(|r| r.cpu_seconds).collect();
    let (mean_iterations, std_iterations) = mean_std(&its);
    let (mean_cpu_seconds, std_cpu_seconds) = mean_std(&cpus);
    MethodSummary {
        method,
        trials: recs.len(),
        mean_iterations,
        std_iterations,
        mean_cpu_seconds,
        std_cpu_seconds,
        capped: recs
            .iter()
            .filter(|r| r.stop_reason == StopReason::IterationCap)
            .count(),
    }
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    } else {
        0.0
    };
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::parse_manifest;

    fn spec(line: &str, repeats: usize) -> ExperimentSpec {
        ExperimentSpec {
            repeats,
            ..ExperimentSpec::new(parse_manifest(line).unwrap().remove(0))
        }
    }

    #[test]
    fn single_repeat_means_equal_trial() {
        let r = run_experiment(&spec("s random:60x6 consistent 3", 1)).unwrap();
        assert_eq!(r.trials.len(), 2);
        for s in &r.summaries {
            let t = r.trials.iter().find(|t| t.method == s.method).unwrap();
            assert_eq!(s.mean_iterations, t.iterations as f64);
            assert_eq!(s.mean_cpu_seconds, t.cpu_seconds);
            assert_eq!(s.std_iterations, 0.0);
        }
        let ggs = r.summary(Method::Ggs).unwrap().mean_iterations;
        let grcd = r.summary(Method::Grcd).unwrap().mean_iterations;
        assert_eq!(r.it_speedup, Some(grcd / ggs));
        assert_eq!((r.rows, r.cols, r.density), (60, 6, 1.0));
    }

    #[test]
    fn parallel_matches_serial_iterations() {
        let serial = run_experiment(&spec("p random:80x8 inconsistent 9", 6)).unwrap();
        let parallel = run_experiment(&ExperimentSpec {
            jobs: 3,
            ..spec("p random:80x8 inconsistent 9", 6)
        })
        .unwrap();
        let its = |r: &ExperimentResult| {
            r.trials
                .iter()
                .map(|t| (t.trial, t.method, t.iterations))
                .collect::<Vec<_>>()
        };
        assert_eq!(its(&serial), its(&parallel));
        assert_eq!(serial.it_speedup, parallel.it_speedup);
    }

    #[test]
    fn failures_are_reported() {
        let r = run_experiment(&spec("missing file:/nonexistent/m.mtx consistent", 2)).unwrap();
        assert_eq!(r.failures.len(), 2);
        assert!(r.trials.is_empty());
        assert_eq!(r.it_speedup, None);
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(run_experiment(&spec("s random:10x2 consistent", 0)).is_err());
        let mut s = spec("s random:10x2 consistent", 1);
        s.methods.clear();
        assert!(run_experiment(&s).is_err());
    }
}
