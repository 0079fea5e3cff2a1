//! MatrixMarket reader and writer.
//!
//! Reads `coordinate` and `array` files with `real`, `integer`, or `pattern`
//! fields and `general`, `symmetric`, or `skew-symmetric` storage. Symmetric
//! storage is expanded to both triangles, pattern entries become ones, and
//! duplicate coordinates are summed.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{ColumnMatrix, Matrix, SparseMatrix};

/// Largest accepted column count. Bounds the column-pointer allocation for
/// headers that declare absurd shapes.
const MAX_COLUMNS: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    read_matrix_market(BufReader::new(file))
}

pub fn read_matrix_market<R: Read>(mut reader: R) -> Result<SparseMatrix> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| Error::parse(0, format!("unreadable input: {e}")))?;
    parse_matrix_market(&text)
}

pub fn parse_matrix_market(text: &str) -> Result<SparseMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (header_no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let (layout, field, symmetry) = parse_header(header_no, header)?;

    let mut content = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_no, size_line) = content
        .next()
        .ok_or_else(|| Error::parse(header_no, "missing size line"))?;
    let sizes = parse_usizes(size_no, size_line)?;
    let (rows, cols) = match (layout, sizes.as_slice()) {
        (Layout::Coordinate, [m, n, _]) | (Layout::Array, [m, n]) => (*m, *n),
        _ => return Err(Error::parse(size_no, "malformed size line")),
    };
    if rows == 0 || cols == 0 {
        return Err(Error::parse(size_no, "matrix dimensions must be positive"));
    }
    if cols > MAX_COLUMNS {
        return Err(Error::parse(
            size_no,
            format!("column count {cols} exceeds {MAX_COLUMNS}"),
        ));
    }
    if symmetry != Symmetry::General && rows != cols {
        return Err(Error::parse(size_no, "symmetric storage requires a square matrix"));
    }

    let mut triplets = Vec::new();
    let mut push = |i: usize, j: usize, v: f64| {
        triplets.push((i, j, v));
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => triplets.push((j, i, v)),
                Symmetry::SkewSymmetric => triplets.push((j, i, -v)),
            }
        }
    };

    match layout {
        Layout::Coordinate => {
            let declared = sizes[2];
            let mut seen = 0usize;
            for (no, line) in content {
                let mut tok = line.split_whitespace();
                let i = parse_index(no, tok.next(), rows)?;
                let j = parse_index(no, tok.next(), cols)?;
                let v = match field {
                    Field::Pattern => 1.0,
                    Field::Real => parse_real(no, tok.next())?,
                };
                if tok.next().is_some() {
                    return Err(Error::parse(no, "trailing tokens in entry"));
                }
                if symmetry != Symmetry::General && i < j {
                    return Err(Error::parse(no, "symmetric storage lists the lower triangle only"));
                }
                if symmetry == Symmetry::SkewSymmetric && i == j {
                    return Err(Error::parse(no, "skew-symmetric storage has no diagonal"));
                }
                seen += 1;
                if seen > declared {
                    return Err(Error::parse(no, format!("more than the declared {declared} entries")));
                }
                push(i, j, v);
            }
            if seen != declared {
                return Err(Error::parse(
                    size_no,
                    format!("declared {declared} entries, found {seen}"),
                ));
            }
        }
        Layout::Array => {
            // Column-major; symmetric variants store the lower triangle,
            // skew-symmetric without the diagonal.
            let mut slots = (0..cols).flat_map(|j| {
                let first = match symmetry {
                    Symmetry::General => 0,
                    Symmetry::Symmetric => j,
                    Symmetry::SkewSymmetric => j + 1,
                };
                (first..rows).map(move |i| (i, j))
            });
            let mut last_no = size_no;
            for (no, line) in content {
                last_no = no;
                let mut tok = line.split_whitespace();
                let v = parse_real(no, tok.next())?;
                if tok.next().is_some() {
                    return Err(Error::parse(no, "array entries hold one value per line"));
                }
                let (i, j) = slots
                    .next()
                    .ok_or_else(|| Error::parse(no, "more values than the matrix holds"))?;
                if v != 0.0 {
                    push(i, j, v);
                }
            }
            if slots.next().is_some() {
                return Err(Error::parse(last_no, "fewer values than the matrix holds"));
            }
        }
    }

    SparseMatrix::from_triplets(rows, cols, &triplets).map_err(|e| Error::parse(size_no, e.to_string()))
}

fn parse_header(no: usize, line: &str) -> Result<(Layout, Field, Symmetry)> {
    let tok: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tok.len() != 5 || tok[0] != "%%matrixmarket" {
        return Err(Error::parse(
            no,
            "expected `%%MatrixMarket matrix <layout> <field> <symmetry>`",
        ));
    }
    if tok[1] != "matrix" {
        return Err(Error::parse(no, format!("unsupported object `{}`", tok[1])));
    }
    let layout = match tok[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(Error::parse(no, format!("unknown layout `{other}`"))),
    };
    let field = match tok[3].as_str() {
        "real" | "double" | "integer" => Field::Real,
        "pattern" => Field::Pattern,
        "complex" => return Err(Error::UnsupportedField(tok[3].clone())),
        other => return Err(Error::parse(no, format!("unknown field `{other}`"))),
    };
    let symmetry = match tok[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => return Err(Error::UnsupportedField(tok[4].clone())),
        other => return Err(Error::parse(no, format!("unknown symmetry `{other}`"))),
    };
    if layout == Layout::Array && field == Field::Pattern {
        return Err(Error::parse(no, "pattern field requires coordinate layout"));
    }
    Ok((layout, field, symmetry))
}

fn parse_usizes(no: usize, line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::parse(no, format!("invalid size `{t}`")))
        })
        .collect()
}

fn parse_index(no: usize, tok: Option<&str>, bound: usize) -> Result<usize> {
    let t = tok.ok_or_else(|| Error::parse(no, "missing index"))?;
    let i: usize = t
        .parse()
        .map_err(|_| Error::parse(no, format!("invalid index `{t}`")))?;
    if i == 0 || i > bound {
        return Err(Error::parse(no, format!("index {i} outside 1..={bound}")));
    }
    Ok(i - 1)
}

fn parse_real(no: usize, tok: Option<&str>) -> Result<f64> {
    let t = tok.ok_or_else(|| Error::parse(no, "missing value"))?;
    let v: f64 = t
        .parse()
        .map_err(|_| Error::parse(no, format!("invalid value `{t}`")))?;
    if !v.is_finite() {
        return Err(Error::parse(no, format!("non-finite value `{t}`")));
    }
    Ok(v)
}

/// Writes `coordinate real general` for sparse input and `array real general`
/// for dense input. Values use the shortest representation that parses back
/// to the same bits.
pub fn write_matrix_market<W: Write>(matrix: &Matrix, writer: W) -> io::Result<()> {
    let mut w = BufWriter::new(writer);
    match matrix {
        Matrix::Sparse(s) => {
            writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
            writeln!(w, "{} {} {}", s.rows(), s.cols(), s.nnz())?;
            for j in 0..s.cols() {
                for (i, v) in s.column_entries(j) {
                    writeln!(w, "{} {} {:?}", i + 1, j + 1, v)?;
                }
            }
        }
        Matrix::Dense(d) => {
            writeln!(w, "%%MatrixMarket matrix array real general")?;
            writeln!(w, "{} {}", d.rows(), d.cols())?;
            for v in d.data() {
                writeln!(w, "{v:?}")?;
            }
        }
    }
    w.flush()
}
