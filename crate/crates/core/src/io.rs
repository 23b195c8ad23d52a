//! Matrix Market exchange format (coordinate and array, real, general or
//! symmetric) for square matrices, basis files as sequences of array
//! blocks, and the CSV boundary export.
//!
//! Values are written in shortest exact scientific notation, so a write
//! followed by a read reproduces every entry bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{RealMatrix, RectMatrix, Storage};
use crate::numrange::BoundarySweep;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MmFormat {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MmSymmetry {
    General,
    Symmetric,
}

struct Header {
    format: MmFormat,
    symmetry: MmSymmetry,
}

struct LineReader<R> {
    inner: R,
    line_no: usize,
}

impl<R: BufRead> LineReader<R> {
    fn new(inner: R) -> Self {
        Self { inner, line_no: 0 }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line_no,
            message: message.into(),
        }
    }

    /// Next non-empty, non-comment line; comments start with '%'. The
    /// banner line is handled separately because it also starts with '%'.
    fn next_content(&mut self) -> Result<Option<String>> {
        loop {
            let mut buf = String::new();
            let read = self.inner.read_line(&mut buf)?;
            if read == 0 {
                return Ok(None);
            }
            self.line_no += 1;
            let t = buf.trim();
            if t.is_empty() || t.starts_with('%') {
                continue;
            }
            return Ok(Some(t.to_string()));
        }
    }

    fn next_banner(&mut self) -> Result<Option<Header>> {
        loop {
            let mut buf = String::new();
            let read = self.inner.read_line(&mut buf)?;
            if read == 0 {
                return Ok(None);
            }
            self.line_no += 1;
            let t = buf.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix("%%MatrixMarket") {
                return Ok(Some(self.parse_banner(rest)?));
            }
            if t.starts_with('%') {
                continue;
            }
            return Err(self.err("expected a %%MatrixMarket banner"));
        }
    }

    fn parse_banner(&self, rest: &str) -> Result<Header> {
        let fields: Vec<String> = rest.split_whitespace().map(|s| s.to_lowercase()).collect();
        if fields.len() != 4 {
            return Err(self.err("banner must be: matrix <format> <field> <symmetry>"));
        }
        if fields[0] != "matrix" {
            return Err(self.err(format!("unsupported object '{}'", fields[0])));
        }
        let format = match fields[1].as_str() {
            "coordinate" => MmFormat::Coordinate,
            "array" => MmFormat::Array,
            other => return Err(self.err(format!("unsupported format '{other}'"))),
        };
        match fields[2].as_str() {
            "real" | "integer" => {}
            other => return Err(self.err(format!("unsupported field '{other}'"))),
        }
        let symmetry = match fields[3].as_str() {
            "general" => MmSymmetry::General,
            "symmetric" => MmSymmetry::Symmetric,
            other => return Err(self.err(format!("unsupported symmetry '{other}'"))),
        };
        Ok(Header { format, symmetry })
    }

    fn parse_f64(&self, tok: &str) -> Result<f64> {
        tok.parse::<f64>()
            .map_err(|_| self.err(format!("cannot parse value '{tok}'")))
    }

    fn parse_usize(&self, tok: &str) -> Result<usize> {
        tok.parse::<usize>()
            .map_err(|_| self.err(format!("cannot parse integer '{tok}'")))
    }
}

pub fn read_matrix_path(path: impl AsRef<Path>) -> Result<RealMatrix> {
    read_matrix(BufReader::new(File::open(path)?))
}

/// Reads one square matrix. Coordinate data becomes sparse storage, array
/// data dense; symmetric files are expanded to full storage.
pub fn read_matrix(reader: impl BufRead) -> Result<RealMatrix> {
    let mut lr = LineReader::new(reader);
    let header = lr
        .next_banner()?
        .ok_or_else(|| lr.err("empty matrix file"))?;
    read_matrix_body(&mut lr, &header)
}

fn read_matrix_body<R: BufRead>(lr: &mut LineReader<R>, header: &Header) -> Result<RealMatrix> {
    let size_line = lr.next_content()?.ok_or_else(|| lr.err("missing size line"))?;
    let toks: Vec<&str> = size_line.split_whitespace().collect();
    match header.format {
        MmFormat::Coordinate => {
            if toks.len() != 3 {
                return Err(lr.err("coordinate size line must be 'rows cols nnz'"));
            }
            let rows = lr.parse_usize(toks[0])?;
            let cols = lr.parse_usize(toks[1])?;
            let nnz = lr.parse_usize(toks[2])?;
            if rows != cols {
                return Err(lr.err(format!("matrix must be square, got {rows}x{cols}")));
            }
            let mut triplets = Vec::with_capacity(
                nnz * if header.symmetry == MmSymmetry::Symmetric { 2 } else { 1 },
            );
            for _ in 0..nnz {
                let line = lr.next_content()?.ok_or_else(|| lr.err("fewer entries than declared"))?;
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() != 3 {
                    return Err(lr.err("entry line must be 'i j value'"));
                }
                let i = lr.parse_usize(t[0])?;
                let j = lr.parse_usize(t[1])?;
                let v = lr.parse_f64(t[2])?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(lr.err(format!("index ({i}, {j}) out of bounds")));
                }
                triplets.push((i - 1, j - 1, v));
                if header.symmetry == MmSymmetry::Symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
            }
            RealMatrix::from_triplets(rows, triplets)
        }
        MmFormat::Array => {
            if toks.len() != 2 {
                return Err(lr.err("array size line must be 'rows cols'"));
            }
            let rows = lr.parse_usize(toks[0])?;
            let cols = lr.parse_usize(toks[1])?;
            if rows != cols {
                return Err(lr.err(format!("matrix must be square, got {rows}x{cols}")));
            }
            let n = rows;
            let mut data = vec![0.0; n * n];
            match header.symmetry {
                MmSymmetry::General => {
                    // Column-major, one value per line.
                    for j in 0..n {
                        for i in 0..n {
                            let line = lr
                                .next_content()?
                                .ok_or_else(|| lr.err("fewer values than declared"))?;
                            data[i * n + j] = lr.parse_f64(line.trim())?;
                        }
                    }
                }
                MmSymmetry::Symmetric => {
                    // Lower triangle including the diagonal, column-major.
                    for j in 0..n {
                        for i in j..n {
                            let line = lr
                                .next_content()?
                                .ok_or_else(|| lr.err("fewer values than declared"))?;
                            let v = lr.parse_f64(line.trim())?;
                            data[i * n + j] = v;
                            data[j * n + i] = v;
                        }
                    }
                }
            }
            RealMatrix::from_dense(n, data)
        }
    }
}

pub fn write_matrix_path(m: &RealMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_matrix(m, BufWriter::new(File::create(path)?))
}

/// Sparse matrices are written in coordinate format, dense ones in array
/// format; both as 'real general'.
pub fn write_matrix(m: &RealMatrix, mut w: impl Write) -> Result<()> {
    match m.storage() {
        Storage::Sparse(trips) => {
            writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
            writeln!(w, "{} {} {}", m.dim(), m.dim(), trips.len())?;
            for &(r, c, v) in trips {
                writeln!(w, "{} {} {:e}", r + 1, c + 1, v)?;
            }
        }
        Storage::Dense(data) => {
            let n = m.dim();
            writeln!(w, "%%MatrixMarket matrix array real general")?;
            writeln!(w, "{n} {n}")?;
            for j in 0..n {
                for i in 0..n {
                    writeln!(w, "{:e}", data[i * n + j])?;
                }
            }
        }
    }
    Ok(())
}

pub fn read_basis_path(path: impl AsRef<Path>, m: usize, n: usize) -> Result<Vec<RectMatrix>> {
    read_basis(BufReader::new(File::open(path)?), m, n)
}

/// Reads a sequence of m x n array blocks, each introduced by its own
/// banner and size line.
pub fn read_basis(reader: impl BufRead, m: usize, n: usize) -> Result<Vec<RectMatrix>> {
    let mut lr = LineReader::new(reader);
    let mut out = Vec::new();
    while let Some(header) = lr.next_banner()? {
        if header.format != MmFormat::Array || header.symmetry != MmSymmetry::General {
            return Err(lr.err("basis blocks must be 'array real general'"));
        }
        let size_line = lr.next_content()?.ok_or_else(|| lr.err("missing size line"))?;
        let toks: Vec<&str> = size_line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(lr.err("array size line must be 'rows cols'"));
        }
        let rows = lr.parse_usize(toks[0])?;
        let cols = lr.parse_usize(toks[1])?;
        if rows != m || cols != n {
            return Err(lr.err(format!(
                "basis block is {rows}x{cols}, expected {m}x{n}"
            )));
        }
        let mut data = vec![0.0; m * n];
        for j in 0..n {
            for i in 0..m {
                let line = lr
                    .next_content()?
                    .ok_or_else(|| lr.err("fewer values than declared"))?;
                data[i * n + j] = lr.parse_f64(line.trim())?;
            }
        }
        out.push(RectMatrix::new(m, n, data)?);
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "basis file contains no blocks".into(),
        });
    }
    Ok(out)
}

pub fn write_basis(mats: &[RectMatrix], mut w: impl Write) -> Result<()> {
    for y in mats {
        writeln!(w, "%%MatrixMarket matrix array real general")?;
        writeln!(w, "{} {}", y.rows(), y.cols())?;
        for j in 0..y.cols() {
            for i in 0..y.rows() {
                writeln!(w, "{:e}", y.get(i, j))?;
            }
        }
    }
    Ok(())
}

/// One row per support evaluation: theta, support value, and the boundary
/// point coordinates re = x^T B x, im = x^T B^Gamma x.
pub fn write_boundary_csv(sweep: &BoundarySweep, mut w: impl Write) -> Result<()> {
    writeln!(w, "theta,support_value,re,im")?;
    for e in &sweep.evaluations {
        writeln!(
            w,
            "{},{},{},{}",
            e.theta, e.support_value, e.point.0, e.point.1
        )?;
    }
    Ok(())
}
