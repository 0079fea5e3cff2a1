use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ggs::analysis::analyze_trace;
use ggs::bench::{emit_bound_rows, emit_convergence_curve, emit_table, run_experiment, ExperimentSpec, TableFormat};
use ggs::problems::{
    self, gen_gaussian, load_matrix_market, make_consistent, make_inconsistent, read_manifest, read_vector,
    write_matrix_market, write_vector, LsqProblem,
};
use ggs::solvers::{solve as run_solver, Method, SolverConfig, StopReason};
use ggs::{ColumnMatrix, Error, Matrix};

use crate::{GenArgs, InfoArgs, RhsArgs, SolveArgs, SourceArgs, VerifyArgs, EXIT_CAPPED, EXIT_NO_INPUT, EXIT_USAGE};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::File { source, .. } if source.kind() == io::ErrorKind::NotFound => EXIT_NO_INPUT,
            Error::InvalidConfig(_) => EXIT_USAGE,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

enum Rhs<'a> {
    File(&'a Path),
    Consistent,
    Inconsistent,
}

/// Loads or generates `A`, returning it with its label and the seed implied
/// by `--random`.
fn load_source(source: &SourceArgs) -> Result<(Matrix, String, Option<u64>), Failure> {
    match (&source.matrix, &source.random) {
        (Some(path), None) => {
            let label = path
                .file_stem()
                .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
            Ok((load_matrix_market(path)?.into(), label, None))
        }
        (None, Some(v)) => {
            let (m, n, seed) = random_triple(v)?;
            Ok((gen_gaussian(m, n, seed)?.into(), format!("{m}x{n}"), Some(seed)))
        }
        _ => Err(usage("give either a matrix file or --random M N SEED")),
    }
}

fn random_triple(v: &[u64]) -> Result<(usize, usize, u64), Failure> {
    match v {
        [m, n, seed] => {
            let m = usize::try_from(*m).map_err(|_| usage("row count too large"))?;
            let n = usize::try_from(*n).map_err(|_| usage("column count too large"))?;
            if n == 0 || m < n {
                return Err(usage(format!("--random needs M >= N >= 1, got {m} {n}")));
            }
            Ok((m, n, *seed))
        }
        _ => Err(usage("--random takes M N SEED")),
    }
}

fn build_problem(a: Matrix, label: String, rhs: Rhs<'_>, seed: u64) -> Result<LsqProblem, Failure> {
    Ok(match rhs {
        Rhs::File(path) => {
            let b = read_vector(path)?;
            LsqProblem::new(a, b, None, label)?
        }
        Rhs::Consistent => make_consistent(a, seed, label)?,
        Rhs::Inconsistent => make_inconsistent(a, seed, label)?,
    })
}

fn rhs_choice(args: &RhsArgs) -> Rhs<'_> {
    match (&args.rhs, args.inconsistent) {
        (Some(path), _) => Rhs::File(path),
        (None, true) => Rhs::Inconsistent,
        (None, false) => Rhs::Consistent,
    }
}

fn parse_method(s: &str) -> Result<Method, Failure> {
    s.parse().map_err(|e: Error| usage(e.to_string()))
}

pub fn solve(args: SolveArgs) -> Outcome {
    let method = parse_method(&args.method)?;
    let (a, label, random_seed) = load_source(&args.source)?;
    let seed = args.seed.or(random_seed).unwrap_or(0);
    let problem = build_problem(a, label, rhs_choice(&args.rhs), seed)?;
    let config = SolverConfig {
        method,
        max_iterations: args.max_iters,
        res_tolerance: args.tol,
        seed,
        record_trace: args.trace.is_some(),
        ..SolverConfig::default()
    };
    let report = run_solver(&problem, &config)?;

    let mut out = String::new();
    writeln!(out, "problem: {}", problem.label).unwrap();
    writeln!(out, "size: {}x{}", problem.rows(), problem.cols()).unwrap();
    writeln!(out, "method: {method}").unwrap();
    writeln!(out, "iterations: {}", report.iterations).unwrap();
    writeln!(out, "stop_reason: {}", report.stop_reason).unwrap();
    let res_name = if problem.known_solution.is_some() {
        "final_res"
    } else {
        "final_relative_gradient"
    };
    writeln!(out, "{res_name}: {:.6e}", report.final_res).unwrap();
    writeln!(out, "gradient_norm_sq: {:.6e}", report.final_gradient_norm_sq).unwrap();
    io::stdout().write_all(out.as_bytes())?;
    eprintln!("elapsed_seconds: {:.6}", report.elapsed_seconds);

    if let (Some(path), Some(trace)) = (&args.trace, &report.trace) {
        emit_convergence_curve(trace, path)?;
    }
    Ok(if report.stop_reason == StopReason::IterationCap {
        EXIT_CAPPED
    } else {
        0
    })
}

pub fn bench(args: crate::BenchArgs) -> Outcome {
    let format: TableFormat = args.format.parse().map_err(|e: Error| usage(e.to_string()))?;
    let methods = args
        .methods
        .split(',')
        .map(|m| parse_method(m.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    if args.repeats == 0 || args.jobs == 0 {
        return Err(usage("--repeats and --jobs must be at least 1"));
    }
    let entries = read_manifest(&args.manifest)?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
    }

    let mut results = Vec::new();
    let mut bound_rows = Vec::new();
    let mut trial_rows = String::from("problem,trial,method,iterations,cpu_seconds,stop_reason,final_res\n");
    let mut any_failed = false;
    for entry in entries {
        let spec = ExperimentSpec {
            methods: methods.clone(),
            repeats: args.repeats,
            base_seed: args.seed,
            res_tolerance: args.tol,
            max_iterations: args.max_iters,
            jobs: args.jobs,
            ..ExperimentSpec::new(entry.clone())
        };
        let result = run_experiment(&spec)?;
        for f in &result.failures {
            any_failed = true;
            let method = f.method.map_or_else(|| "problem".to_string(), |m| m.to_string());
            eprintln!(
                "warning: {} trial {} ({method}) failed: {}",
                result.label, f.trial, f.message
            );
        }
        for s in &result.summaries {
            if s.capped > 0 {
                eprintln!(
                    "warning: {} {}: {} of {} trials hit the iteration cap",
                    result.label, s.method, s.capped, s.trials
                );
            }
        }
        for t in &result.trials {
            writeln!(
                trial_rows,
                "{},{},{},{},{:e},{},{:e}",
                result.label, t.trial, t.method, t.iterations, t.cpu_seconds, t.stop_reason, t.final_res
            )
            .unwrap();
        }
        if let Some(dir) = &args.out {
            if let Some(row) = write_curves(dir, &entry, &spec)? {
                bound_rows.push(row);
            }
        }
        results.push(result);
    }

    let table = emit_table(&results, format);
    print!("{}", emit_table(&results, TableFormat::Markdown));
    if let Some(dir) = &args.out {
        let name = match format {
            TableFormat::Csv => "table.csv",
            TableFormat::Markdown => "table.md",
        };
        fs::write(dir.join(name), table)?;
        fs::write(dir.join("trials.csv"), trial_rows)?;
        fs::write(dir.join("bounds.csv"), emit_bound_rows(&bound_rows))?;
    }
    Ok(if any_failed { 1 } else { 0 })
}

/// Traced trial-0 runs for plotting, plus the bound check of the GGS run.
fn write_curves(
    dir: &Path,
    entry: &problems::ManifestEntry,
    spec: &ExperimentSpec,
) -> Result<Option<(String, ggs::analysis::BoundReport)>, Failure> {
    let Ok(problem) = entry.build(0) else {
        return Ok(None);
    };
    let mut bound = None;
    for &method in &spec.methods {
        let config = SolverConfig {
            method,
            max_iterations: spec.max_iterations,
            res_tolerance: spec.res_tolerance,
            seed: spec.base_seed,
            record_trace: true,
            ..SolverConfig::default()
        };
        let Ok(report) = run_solver(&problem, &config) else {
            continue;
        };
        let trace = report.trace.expect("trace requested");
        let path: PathBuf = dir.join(format!("curve_{}_{}.csv", sanitize(&entry.label), method));
        emit_convergence_curve(&trace, path)?;
        if method == Method::Ggs {
            if let Ok(r) = analyze_trace(&problem.matrix, &trace) {
                bound = Some((entry.label.clone(), r));
            }
        }
    }
    Ok(bound)
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn verify_bounds(args: VerifyArgs) -> Outcome {
    if parse_method(&args.method)? != Method::Ggs {
        return Err(usage("verify-bounds supports --method ggs only"));
    }
    let (a, label, random_seed) = load_source(&args.source)?;
    let seed = args.seed.or(random_seed).unwrap_or(0);
    // Fail on rank deficiency before generating anything.
    let lambda = ggs::analysis::lambda_min_pos(&a, ggs::analysis::LAMBDA_TOLERANCE)?;
    let mut problem = build_problem(a, label, rhs_choice(&args.rhs), seed)?;
    if problem.known_solution.is_none() {
        problem.known_solution = Some(problems::reference_solution(&problem)?);
    }
    let config = SolverConfig {
        method: Method::Ggs,
        max_iterations: args.max_iters,
        record_trace: true,
        ..SolverConfig::default()
    };
    let report = run_solver(&problem, &config)?;
    let trace = report.trace.as_ref().expect("trace requested");
    let mut bounds = ggs::analysis::verify_trace(trace, lambda, problem.cols())?;
    bounds.grcd_expected_factor = ggs::analysis::grcd_expected_factor(&problem.matrix, lambda).ok();

    let mut text = String::new();
    writeln!(text, "problem: {}", problem.label).unwrap();
    writeln!(text, "size: {}x{}", problem.rows(), problem.cols()).unwrap();
    writeln!(text, "iterations: {}", report.iterations).unwrap();
    writeln!(text, "stop_reason: {}", report.stop_reason).unwrap();
    text.push_str(&bounds.to_string());
    writeln!(text, "result: {}", if bounds.passed() { "PASS" } else { "FAIL" }).unwrap();
    io::stdout().write_all(text.as_bytes())?;
    if let Some(path) = &args.out {
        fs::write(path, &text)?;
    }
    Ok(if bounds.passed() { 0 } else { 1 })
}

pub fn gen(args: GenArgs) -> Outcome {
    let (m, n, seed) = random_triple(&args.random)?;
    let a: Matrix = gen_gaussian(m, n, seed)?.into();
    let label = format!("{m}x{n}");
    let problem = if args.inconsistent {
        make_inconsistent(a, seed, label)?
    } else {
        make_consistent(a, seed, label)?
    };
    fs::create_dir_all(&args.out)?;
    write_matrix_market(&problem.matrix, fs::File::create(args.out.join("matrix.mtx"))?)?;
    write_vector(
        &problem.rhs,
        io::BufWriter::new(fs::File::create(args.out.join("rhs.txt"))?),
    )?;
    let x_star = problem.known_solution.as_deref().expect("generated problems carry x*");
    write_vector(
        x_star,
        io::BufWriter::new(fs::File::create(args.out.join("solution.txt"))?),
    )?;
    println!(
        "wrote {} ({}x{}, {})",
        args.out.display(),
        m,
        n,
        if problem.consistent {
            "consistent"
        } else {
            "inconsistent"
        }
    );
    Ok(0)
}

pub fn info(args: InfoArgs) -> Outcome {
    let a: Matrix = load_matrix_market(&args.matrix)?.into();
    println!("rows: {}", a.rows());
    println!("cols: {}", a.cols());
    println!("nnz: {}", a.nnz());
    println!("density: {:.2}%", 100.0 * a.density());
    match problems::assert_full_column_rank(&a) {
        Ok(cond) => println!("cond: {cond:.2}"),
        Err(e) => println!("cond: {e}"),
    }
    Ok(0)
}
