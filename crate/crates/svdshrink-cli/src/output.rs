//! Deterministic table output: CSV files plus an aligned text rendering.
//!
//! Output files are pure functions of the input data: numbers are written
//! with Rust's shortest round-trip `f64` formatting, rows in a fixed order,
//! lines terminated with `\n`, and fields quoted only when RFC 4180 requires
//! it (a field containing a comma, quote or newline — which only user-chosen
//! column names can introduce). Reruns therefore reproduce files byte for
//! byte.

use std::path::Path;

use crate::error::Result;

/// Format a float with shortest round-trip precision.
pub fn num(v: f64) -> String {
    format!("{v}")
}

/// Format an optional field; absent values become the empty field.
pub fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// An in-memory table with a header row.
#[derive(Debug, Clone)]
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: Vec<S>) -> Self {
        Table {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Append a row; the arity must match the header.
    pub fn push<S: Into<String>>(&mut self, row: Vec<S>) {
        let row: Vec<String> = row.into_iter().map(Into::into).collect();
        assert_eq!(
            row.len(),
            self.headers.len(),
            "table row arity does not match header"
        );
        self.rows.push(row);
    }

    /// Write the table as CSV to `path`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let context = |e: csv::Error| match e.kind() {
            csv::ErrorKind::Io(_) => {
                crate::error::CliError::Io(format!("{}: {e}", path.display()))
            }
            _ => crate::error::CliError::from(e),
        };
        let mut writer = csv::WriterBuilder::new()
            .quote_style(csv::QuoteStyle::Necessary)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)
            .map_err(context)?;
        writer.write_record(&self.headers).map_err(context)?;
        for row in &self.rows {
            writer.write_record(row).map_err(context)?;
        }
        writer
            .flush()
            .map_err(|e| crate::error::CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(())
    }

    /// Render the table as aligned plain text (for the terminal): numeric
    /// fields right-aligned, names left-aligned, two-space gutters.
    pub fn render_aligned(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(String::len).collect();
        for row in &self.rows {
            for (j, cell) in row.iter().enumerate() {
                widths[j] = widths[j].max(cell.len());
            }
        }
        let mut out = String::new();
        let mut push_row = |cells: &[String], numeric_by_content: bool| {
            let mut line = String::new();
            for (j, cell) in cells.iter().enumerate() {
                if j > 0 {
                    line.push_str("  ");
                }
                let numeric = numeric_by_content && looks_numeric(cell);
                let pad = widths[j].saturating_sub(cell.len());
                if numeric {
                    line.extend(std::iter::repeat(' ').take(pad));
                    line.push_str(cell);
                } else {
                    line.push_str(cell);
                    line.extend(std::iter::repeat(' ').take(pad));
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        };
        push_row(&self.headers, false);
        for row in &self.rows {
            push_row(row, true);
        }
        out
    }
}

fn looks_numeric(cell: &str) -> bool {
    !cell.is_empty() && cell.parse::<f64>().is_ok()
}
