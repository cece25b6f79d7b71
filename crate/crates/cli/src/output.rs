use std::io::Write;

use clap::ValueEnum;
use heegner_core::numerics::{decimal, BallComplex, Mag, PrecisionContext};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::newform_file::hex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Table,
}

/// Canonical `key=value` lines identifying a run; their hash goes in the header.
#[derive(Clone, Debug, Default)]
pub struct ConfigKey {
    items: Vec<(String, String)>,
}

impl ConfigKey {
    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.items.push((key.to_string(), value.to_string()));
        self
    }

    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.items {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        hex(&h.finalize()[..8])
    }
}

/// Rows produced by a command.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub key: ConfigKey,
    /// Extra `key=value` facts for the header line.
    pub notes: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Space-separated rows without a column line, regardless of format.
    pub plain: bool,
}

impl Report {
    pub fn new(command: &'static str, key: ConfigKey, columns: &[&str]) -> Self {
        Self {
            command,
            key,
            notes: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            plain: false,
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn header_line(&self) -> String {
        let mut s = format!("# heegner-aj {} config={}", self.command, self.key.hash());
        for (k, v) in &self.notes {
            s.push_str(&format!(" {k}={v}"));
        }
        s
    }

    pub fn render(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "{}", self.header_line())?;
        if self.plain {
            for row in &self.rows {
                writeln!(out, "{}", row.join(" "))?;
            }
            return Ok(());
        }
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
            Format::Table => {
                let mut width: Vec<usize> = self.columns.iter().map(String::len).collect();
                for row in &self.rows {
                    for (w, cell) in width.iter_mut().zip(row) {
                        *w = (*w).max(cell.len());
                    }
                }
                let line = |cells: &[String]| {
                    cells.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
                };
                writeln!(out, "{}", line(&self.columns))?;
                for row in &self.rows {
                    writeln!(out, "{}", line(row))?;
                }
            }
        }
        Ok(())
    }
}

pub const DIGITS: usize = 20;

/// Real part of a ball as `(decimal, radius)`, the radius covering the
/// ball and the rounding of the printed digits.
pub fn real_cell(b: &BallComplex, ctx: &PrecisionContext) -> (String, String) {
    let (s, err) = b.re_decimal(DIGITS, ctx);
    (s, radius(&b.radius().add(&err)))
}

/// `(re, im, radius)`; one radius bounds both printed parts.
pub fn complex_cells(b: &BallComplex, ctx: &PrecisionContext) -> (String, String, String) {
    let (re, e1) = b.re_decimal(DIGITS, ctx);
    let (im, e2) = b.im_decimal(DIGITS, ctx);
    (re, im, radius(&b.radius().add(&e1.max(&e2))))
}

/// Three significant digits, never below `m`: the truncated rendering of
/// `m + slack` still covers `m`.
pub fn radius(m: &Mag) -> String {
    let ctx = PrecisionContext::with_bits(64).expect("64 bits");
    let (_, slack) = decimal(m.as_bigfloat(), 3, &ctx);
    decimal(m.add(&slack).as_bigfloat(), 3, &ctx).0
}
