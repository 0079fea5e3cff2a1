//! Experiment manifests.
//!
//! One problem per line, whitespace separated:
//!
//! ```text
//! # label        source            rhs            seed
//! 1000x50        random:1000x50    consistent     7
//! divorce        file:divorce.mtx  inconsistent   1
//! ```
//!
//! `source` is `random:<m>x<n>` for a Gaussian matrix or `file:<path>` (or a
//! bare path) for a MatrixMarket file; relative paths resolve against the
//! manifest's directory. `rhs` is `consistent` or `inconsistent`. The seed is
//! optional and defaults to 0. `#` starts a comment.

use std::fs;
use std::path::{Path, PathBuf};

use super::{load_matrix_market, make_consistent, make_inconsistent, random_problem, LsqProblem};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemSource {
    Random { rows: usize, cols: usize },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub label: String,
    pub source: ProblemSource,
    pub consistent: bool,
    pub seed: u64,
}

impl ManifestEntry {
    /// Builds the problem for one trial. Random matrices are regenerated from
    /// `seed + trial`; file matrices keep the entry seed for `x_*` so every
    /// trial sees the same system.
    pub fn build(&self, trial: u64) -> Result<LsqProblem> {
        match &self.source {
            ProblemSource::Random { rows, cols } => {
                let mut p = random_problem(*rows, *cols, self.seed.wrapping_add(trial), self.consistent)?;
                p.label = self.label.clone();
                Ok(p)
            }
            ProblemSource::File(path) => {
                let a: Matrix = load_matrix_market(path)?.into();
                if self.consistent {
                    make_consistent(a, self.seed, self.label.clone())
                } else {
                    make_inconsistent(a, self.seed, self.label.clone())
                }
            }
        }
    }

    /// `m x n` for random sources, the label otherwise.
    pub fn shape_label(&self) -> String {
        match self.source {
            ProblemSource::Random { rows, cols } => format!("{rows}x{cols}"),
            ProblemSource::File(_) => self.label.clone(),
        }
    }
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        if !(3..=4).contains(&tok.len()) {
            return Err(Error::parse(no, "expected `label source rhs [seed]`"));
        }
        let source = parse_source(no, tok[1])?;
        let consistent = match tok[2].to_ascii_lowercase().as_str() {
            "consistent" => true,
            "inconsistent" => false,
            other => {
                return Err(Error::parse(
                    no,
                    format!("rhs must be consistent or inconsistent, got `{other}`"),
                ))
            }
        };
        let seed = match tok.get(3) {
            Some(t) => t.parse().map_err(|_| Error::parse(no, format!("invalid seed `{t}`")))?,
            None => 0,
        };
        out.push(ManifestEntry {
            label: tok[0].to_string(),
            source,
            consistent,
            seed,
        });
    }
    Ok(out)
}

/// Reads a manifest file, resolving relative matrix paths against its
/// directory.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut entries = parse_manifest(&text)?;
    for e in &mut entries {
        if let ProblemSource::File(p) = &mut e.source {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
    Ok(entries)
}

fn parse_source(no: usize, tok: &str) -> Result<ProblemSource> {
    if let Some(shape) = tok.strip_prefix("random:") {
        let (m, n) = shape
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::parse(no, format!("random source needs <m>x<n>, got `{shape}`")))?;
        let rows: usize = m
            .parse()
            .map_err(|_| Error::parse(no, format!("invalid row count `{m}`")))?;
        let cols: usize = n
            .parse()
            .map_err(|_| Error::parse(no, format!("invalid column count `{n}`")))?;
        if cols == 0 || rows < cols {
            return Err(Error::parse(
                no,
                format!("random source needs m >= n >= 1, got {rows}x{cols}"),
            ));
        }
        return Ok(ProblemSource::Random { rows, cols });
    }
    let path = tok.strip_prefix("file:").unwrap_or(tok);
    if path.is_empty() {
        return Err(Error::parse(no, "empty file path"));
    }
    Ok(ProblemSource::File(PathBuf::from(path)))
}
