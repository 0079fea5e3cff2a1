//! Result tables and convergence-curve data.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use super::ExperimentResult;
use crate::analysis::BoundReport;
use crate::error::{Error, Result};
use crate::solvers::{Method, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            other => Err(Error::InvalidConfig(format!("unknown table format `{other}`"))),
        }
    }
}

fn fixed4(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.4}"),
        _ => "n/a".to_string(),
    }
}

/// Methods in first-seen order across all results.
fn method_columns(results: &[ExperimentResult]) -> Vec<Method> {
    let mut out: Vec<Method> = Vec::new();
    for r in results {
        for s in &r.summaries {
            if !out.contains(&s.method) {
                out.push(s.method);
            }
        }
    }
    if out.is_empty() {
        out = vec![Method::Ggs, Method::Grcd];
    }
    out
}

fn table_cells(results: &[ExperimentResult]) -> (Vec<String>, Vec<Vec<String>>) {
    let methods = method_columns(results);
    let mut header = vec!["problem".to_string()];
    header.extend(methods.iter().map(|m| format!("IT {}", m.label())));
    header.push("IT speed-up".into());
    header.extend(methods.iter().map(|m| format!("CPU {}", m.label())));
    header.push("CPU speed-up".into());

    let rows = results
        .iter()
        .map(|r| {
            let mut row = vec![r.label.clone()];
            row.extend(methods.iter().map(|&m| fixed4(r.summary(m).map(|s| s.mean_iterations))));
            row.push(fixed4(r.it_speedup));
            row.extend(
                methods
                    .iter()
                    .map(|&m| fixed4(r.summary(m).map(|s| s.mean_cpu_seconds))),
            );
            row.push(fixed4(r.cpu_speedup));
            row
        })
        .collect();
    (header, rows)
}

/// Renders mean IT, mean CPU seconds, and speed-ups, four decimals each.
pub fn emit_table(results: &[ExperimentResult], format: TableFormat) -> String {
    let (header, rows) = table_cells(results);
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header).expect("in-memory write");
            for row in &rows {
                w.write_record(row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
        }
        TableFormat::Markdown => {
            let mut out = String::new();
            let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
            out.push_str(&line(&header));
            out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
            for row in &rows {
                out.push_str(&line(row));
            }
            out
        }
    }
}

/// `iteration,gradient_norm_sq[,res]` rows for `k = 0..=K`.
pub fn write_convergence_curve<W: Write>(trace: &Trace, writer: W) -> Result<()> {
    let with_res = trace.final_res.is_some();
    let mut w = csv::Writer::from_writer(writer);
    if with_res {
        w.write_record(["iteration", "gradient_norm_sq", "res"])?;
    } else {
        w.write_record(["iteration", "gradient_norm_sq"])?;
    }
    let mut emit = |k: usize, grad: f64, res: Option<f64>| -> Result<()> {
        let mut row = vec![k.to_string(), format!("{grad:e}")];
        if with_res {
            row.push(format!("{:e}", res.unwrap_or(f64::NAN)));
        }
        w.write_record(&row)?;
        Ok(())
    };
    if !trace.steps.is_empty() {
        for s in &trace.steps {
            emit(s.iteration, s.residual_gradient_norm_sq, s.res)?;
        }
        let last = trace.steps.last().expect("nonempty").iteration + 1;
        emit(last, trace.final_gradient_norm_sq, trace.final_res)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_convergence_curve(trace: &Trace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::file(path, e))?;
    write_convergence_curve(trace, io::BufWriter::new(file))
}

/// One CSV row per bound report.
pub fn emit_bound_rows(reports: &[(String, BoundReport)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "problem",
        "lambda_min",
        "alpha",
        "beta",
        "first_step_factor",
        "cumulative_factor",
        "grcd_expected_factor",
        "steps",
        "violations",
    ])
    .expect("in-memory write");
    let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:e}"));
    for (label, r) in reports {
        w.write_record([
            label.clone(),
            format!("{:e}", r.lambda_min),
            r.alpha.to_string(),
            format!("{:e}", r.beta),
            opt(r.first_step_factor),
            opt(r.cumulative_factor),
            opt(r.grcd_expected_factor),
            r.per_step_factors.len().to_string(),
            r.violations.len().to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::MethodSummary;

    fn synthetic(ggs_it: f64, grcd_it: f64) -> ExperimentResult {
        let summary = |method, it: f64, cpu: f64| MethodSummary {
            method,
            trials: 50,
            mean_iterations: it,
            std_iterations: 0.0,
            mean_cpu_seconds: cpu,
            std_cpu_seconds: 0.0,
            capped: 0,
        };
        ExperimentResult {
            label: "1000x50".into(),
            rows: 1000,
            cols: 50,
            density: 1.0,
            consistent: true,
            summaries: vec![
                summary(Method::Ggs, ggs_it, 0.0138),
                summary(Method::Grcd, grcd_it, 0.0631),
            ],
            it_speedup: Some(grcd_it / ggs_it),
            cpu_speedup: Some(0.0631 / 0.0138),
            trials: vec![],
            failures: vec![],
        }
    }

    #[test]
    fn empty_table_is_header_only() {
        let csv = emit_table(&[], TableFormat::Csv);
        assert_eq!(
            csv,
            "problem,IT GGS,IT GRCD,IT speed-up,CPU GGS,CPU GRCD,CPU speed-up\n"
        );
        assert_eq!(emit_table(&[], TableFormat::Markdown).lines().count(), 2);
    }

    #[test]
    fn table_row_matches_published_layout() {
        let csv = emit_table(&[synthetic(126.0, 128.24)], TableFormat::Csv);
        let row = csv.lines().nth(1).unwrap();
        assert_eq!(row, "1000x50,126.0000,128.2400,1.0178,0.0138,0.0631,4.5725");
    }

    #[test]
    fn formats_share_numbers() {
        let results = [synthetic(126.0, 128.24), synthetic(374.0, 361.5)];
        let csv = emit_table(&results, TableFormat::Csv);
        let md = emit_table(&results, TableFormat::Markdown);
        let csv_cells: Vec<Vec<String>> = csv
            .lines()
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        let md_cells: Vec<Vec<String>> = md
            .lines()
            .filter(|l| !l.starts_with("|---"))
            .map(|l| l.trim_matches('|').split('|').map(|c| c.trim().to_string()).collect())
            .collect();
        assert_eq!(csv_cells, md_cells);
    }

    #[test]
    fn empty_curve_is_header_only() {
        let mut buf = Vec::new();
        write_convergence_curve(&Trace::default(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "iteration,gradient_norm_sq\n");
    }
}
