//! Plain-text vectors: one value per line; blank lines and lines starting
//! with `%` or `#` are skipped.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') || t.starts_with('#') {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("invalid value `{t}`")))?;
        if !v.is_finite() {
            return Err(Error::parse(i + 1, format!("non-finite value `{t}`")));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    parse_vector(&text)
}

pub fn write_vector<W: Write>(v: &[f64], mut w: W) -> io::Result<()> {
    for x in v {
        writeln!(w, "{x:?}")?;
    }
    Ok(())
}
