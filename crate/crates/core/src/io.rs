//! Field files and CSV output.
//!
//! CSV fields start with `# L=<period> n_points=<n> origin=<x0>`, optionally
//! followed by `config_hash=<hex>`, then the column row `x,value`, then one
//! sample per line. Binary fields are
//! little-endian: the magic `ILWF`, `f64` period, `u64` point count, `f64`
//! origin, then the samples as `f64`.

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"ILWF";

pub fn write_field_csv(f: &Field, path: &Path) -> Result<()> {
    write_field_csv_tagged(f, path, None)
}

/// As [`write_field_csv`], adding `config_hash=<hash>` to the header line.
pub fn write_field_csv_tagged(f: &Field, path: &Path, config_hash: Option<&str>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    let g = f.grid();
    write!(w, "# L={:e} n_points={} origin={:e}", g.period(), g.len(), g.origin())?;
    match config_hash {
        Some(h) => writeln!(w, " config_hash={h}")?,
        None => writeln!(w)?,
    }
    writeln!(w, "x,value")?;
    for (j, v) in f.values().iter().enumerate() {
        writeln!(w, "{:.17e},{:.17e}", g.x(j), v)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_field_binary(f: &Field, path: &Path) -> Result<()> {
    let g = f.grid();
    let mut buf = Vec::with_capacity(28 + 8 * g.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&g.period().to_le_bytes());
    buf.extend_from_slice(&(g.len() as u64).to_le_bytes());
    buf.extend_from_slice(&g.origin().to_le_bytes());
    for v in f.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, buf)?;
    Ok(())
}

/// Reads either format, recognized by the binary magic.
pub fn read_field(path: &Path) -> Result<Field> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(MAGIC) {
        parse_binary(&bytes)
    } else {
        let text = String::from_utf8(bytes).map_err(|_| Error::Format("neither binary nor UTF-8 CSV".into()))?;
        parse_csv(&text)
    }
}

fn parse_binary(bytes: &[u8]) -> Result<Field> {
    let word = |i: usize| -> Result<[u8; 8]> {
        bytes
            .get(4 + 8 * i..12 + 8 * i)
            .map(|s| s.try_into().expect("8 bytes"))
            .ok_or_else(|| Error::Format("truncated binary header".into()))
    };
    let period = f64::from_le_bytes(word(0)?);
    let n = u64::from_le_bytes(word(1)?) as usize;
    let origin = f64::from_le_bytes(word(2)?);
    let body = &bytes[28..];
    if body.len() != 8 * n {
        return Err(Error::Format(format!("expected {n} samples, found {} bytes", body.len())));
    }
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    Field::new(GridSpec::new(period, n)?.with_origin(origin), values)
}

fn parse_csv(text: &str) -> Result<Field> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Format("empty file".into()))?;
    let mut period = None;
    let mut n = None;
    let mut origin = None;
    for tok in header.trim_start_matches('#').split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| Error::Format(format!("bad header token `{tok}`")))?;
        let bad = |_| Error::Format(format!("bad header value `{tok}`"));
        match k {
            "L" => period = Some(v.parse::<f64>().map_err(bad)?),
            "n_points" => n = Some(v.parse::<usize>().map_err(|_| Error::Format(format!("bad header value `{tok}`")))?),
            "origin" => origin = Some(v.parse::<f64>().map_err(bad)?),
            "config_hash" => {}
            _ => return Err(Error::Format(format!("unknown header key `{k}`"))),
        }
    }
    let period = period.ok_or_else(|| Error::Format("header lacks L".into()))?;
    let n = n.ok_or_else(|| Error::Format("header lacks n_points".into()))?;
    let grid = GridSpec::new(period, n)?;
    let grid = grid.with_origin(origin.unwrap_or(grid.origin()));
    match lines.next() {
        Some(l) if l.trim() == "x,value" => {}
        _ => return Err(Error::Format("missing `x,value` column row".into())),
    }
    let mut values = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v = line
            .split(',')
            .nth(1)
            .and_then(|s| s.trim().parse::<f64>().ok())
            .ok_or_else(|| Error::Format(format!("bad sample on line {}", i + 3)))?;
        values.push(v);
    }
    Field::new(grid, values)
}

/// CSV with a `# config_hash=...` line, a column row and data rows.
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.push_cells(row.into_iter().map(|v| format!("{v:.12e}")).collect());
    }

    /// Row of preformatted cells, for text columns.
    pub fn push_cells(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path, config_hash: &str) -> Result<()> {
        let mut w = BufWriter::new(fs::File::create(path)?);
        self.write_to(&mut w, config_hash)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_to(&self, w: &mut impl Write, config_hash: &str) -> std::io::Result<()> {
        writeln!(w, "# config_hash={config_hash}")?;
        writeln!(w, "{}", self.columns.join(","))?;
        for r in &self.rows {
            writeln!(w, "{}", r.join(","))?;
        }
        Ok(())
    }
}

/// Numeric cell in the table format.
pub fn cell(v: f64) -> String {
    format!("{v:.12e}")
}
