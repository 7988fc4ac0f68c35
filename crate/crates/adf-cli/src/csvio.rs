//! CSV emission and ingestion. Floats are written with Rust's shortest
//! round-trip formatting, so emit-then-ingest reproduces every sample
//! bit for bit; absent values (warm-up derivatives, non-windowed
//! filters) are empty fields.

use std::fmt::Write as _;
use std::path::Path;

use adf::Sample;
use anyhow::{bail, Context, Result};

/// One CSV cell.
#[derive(Debug, Clone, Copy)]
pub enum Field {
    F(f64),
    U(usize),
    Empty,
}

/// Line-oriented writer for a fixed column set.
pub struct CsvWriter {
    buf: String,
    columns: usize,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> Self {
        CsvWriter {
            buf: header.join(",") + "\n",
            columns: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[Field]) {
        assert_eq!(fields.len(), self.columns, "row width mismatch");
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            match f {
                Field::F(v) => write!(self.buf, "{v}").unwrap(),
                Field::U(v) => write!(self.buf, "{v}").unwrap(),
                Field::Empty => {}
            }
        }
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// Reads a `t,x` sample stream: mandatory header, one pair per line,
/// strictly increasing finite times. Problems are reported with their
/// 1-based line number.
pub fn read_samples(path: &Path) -> Result<Vec<Sample>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((no, l)) => break (no, l),
            None => bail!("{}: no samples", path.display()),
        }
    };
    let cols: Vec<&str> = header.1.split(',').map(str::trim).collect();
    if cols.len() < 2 || cols[0] != "t" || cols[1] != "x" {
        bail!(
            "{} line {}: header must start with 't,x', got '{}'",
            path.display(),
            header.0 + 1,
            header.1.trim()
        );
    }
    let mut samples = Vec::new();
    let mut prev_t = f64::NEG_INFINITY;
    for (no, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (t_str, x_str) = match (parts.next(), parts.next()) {
            (Some(a), Some(b)) => (a.trim(), b.trim()),
            _ => bail!("{} line {}: expected 't,x'", path.display(), no + 1),
        };
        let t: f64 = t_str
            .parse()
            .with_context(|| format!("{} line {}: bad time '{}'", path.display(), no + 1, t_str))?;
        let x: f64 = x_str
            .parse()
            .with_context(|| format!("{} line {}: bad value '{}'", path.display(), no + 1, x_str))?;
        if !t.is_finite() || !x.is_finite() {
            bail!("{} line {}: non-finite sample", path.display(), no + 1);
        }
        if t <= prev_t {
            bail!(
                "{} line {}: time {} does not increase past {}",
                path.display(),
                no + 1,
                t,
                prev_t
            );
        }
        prev_t = t;
        samples.push(Sample::new(t, x));
    }
    if samples.is_empty() {
        bail!("{}: no samples", path.display());
    }
    Ok(samples)
}
