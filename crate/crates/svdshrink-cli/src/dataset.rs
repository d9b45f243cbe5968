//! CSV ingestion: header parsing, missing-value policies, standardization.
//!
//! Input files are comma-separated UTF-8 with a header row. Empty fields and
//! the literal `NA` are missing values; everything else must parse as a
//! number. Missing values are handled by a column-drop policy (default), a
//! row-drop policy, or rejected outright, always with a count report.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use nalgebra::{DMatrix, DVector};

use crate::error::{CliError, Result};

/// What to do with missing values (empty fields and `NA`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MissingPolicy {
    /// Drop every predictor column that contains a missing value.
    DropCols,
    /// Drop every row that contains a missing value.
    DropRows,
    /// Reject the file if any value is missing.
    Error,
}

/// Which parts of the table to standardize (center and scale to unit sample
/// standard deviation) before fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StandardizeMode {
    /// Use the data as-is.
    None,
    /// Standardize the response column only.
    Response,
    /// Standardize every predictor column only.
    Predictors,
    /// Standardize the response and every predictor column.
    Both,
}

impl StandardizeMode {
    fn response(self) -> bool {
        matches!(self, StandardizeMode::Response | StandardizeMode::Both)
    }

    fn predictors(self) -> bool {
        matches!(self, StandardizeMode::Predictors | StandardizeMode::Both)
    }
}

/// Command-line flags shared by every command that reads a data file with a
/// response column.
#[derive(Debug, clap::Args)]
pub struct DataArgs {
    /// Input CSV file (header row, comma-separated, UTF-8).
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,

    /// Name of the response column; all other columns are predictors.
    #[arg(long, value_name = "NAME")]
    pub response: String,

    /// Missing-value policy (empty fields and "NA" are missing).
    #[arg(long, value_enum, default_value_t = MissingPolicy::DropCols)]
    pub missing: MissingPolicy,

    /// Standardize the response and/or predictors before fitting.
    #[arg(long, value_enum, default_value_t = StandardizeMode::None)]
    pub standardize: StandardizeMode,
}

impl DataArgs {
    pub fn load(&self) -> Result<Dataset> {
        Dataset::load(&self.data, Some(&self.response), self.missing, self.standardize)
    }
}

/// A loaded data table in fitting (working) units, with enough bookkeeping
/// to map predictions back to original response units.
#[derive(Debug, Clone)]
pub struct Dataset {
    /// Predictor matrix after drops and standardization, `n × p`.
    pub x: DMatrix<f64>,
    /// Response after drops and standardization, when one was selected.
    pub y: Option<DVector<f64>>,
    /// Predictor column names, in file order, after drops.
    pub feature_names: Vec<String>,
    /// Name of the response column, when one was selected.
    pub response_name: Option<String>,
    /// Response centering constant (0 when not standardized).
    pub y_center: f64,
    /// Response scale (1 when not standardized).
    pub y_scale: f64,
    /// Per-predictor centering constants (0 when not standardized).
    pub x_centers: Vec<f64>,
    /// Per-predictor scales (1 when not standardized).
    pub x_scales: Vec<f64>,
    /// Names of predictor columns dropped for missing values.
    pub dropped_columns: Vec<String>,
    /// Number of rows dropped for missing values.
    pub dropped_rows: usize,
    source: String,
}

impl Dataset {
    /// Read `path`, apply the missing-value policy, then standardize.
    pub fn load(
        path: &Path,
        response: Option<&str>,
        missing: MissingPolicy,
        standardize: StandardizeMode,
    ) -> Result<Dataset> {
        if standardize.response() && response.is_none() {
            return Err(CliError::Validation(
                "standardizing the response requires --response".into(),
            ));
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| match e.kind() {
                csv::ErrorKind::Io(_) => {
                    CliError::Io(format!("{}: {e}", path.display()))
                }
                _ => CliError::from(e),
            })?;
        let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if headers.is_empty() {
            return Err(CliError::Validation(format!(
                "{}: no columns in header row",
                path.display()
            )));
        }
        let resp_idx = match response {
            Some(name) => Some(headers.iter().position(|h| h == name).ok_or_else(|| {
                CliError::Validation(format!(
                    "{}: no column named '{}' (columns: {})",
                    path.display(),
                    name,
                    headers.join(", ")
                ))
            })?),
            None => None,
        };

        // Parse every cell up front so errors carry file positions.
        let mut cells: Vec<Vec<Option<f64>>> = Vec::new();
        for record in reader.records() {
            // Ragged rows are rejected by the reader itself (with positions).
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let mut row = Vec::with_capacity(headers.len());
            for (j, field) in record.iter().enumerate() {
                row.push(parse_cell(field).map_err(|what| {
                    CliError::Validation(format!(
                        "{}: line {}, column '{}': {what}",
                        path.display(),
                        line,
                        headers[j]
                    ))
                })?);
            }
            cells.push(row);
        }
        if cells.len() < 2 {
            return Err(CliError::Validation(format!(
                "{}: need at least 2 data rows, found {}",
                path.display(),
                cells.len()
            )));
        }

        // Missing-value policy.
        let n_cols = headers.len();
        let missing_in_col: Vec<usize> = (0..n_cols)
            .map(|j| cells.iter().filter(|row| row[j].is_none()).count())
            .collect();
        let total_missing: usize = missing_in_col.iter().sum();
        let mut keep_cols: Vec<usize> = (0..n_cols).filter(|&j| Some(j) != resp_idx).collect();
        let mut keep_rows: Vec<usize> = (0..cells.len()).collect();
        let mut dropped_columns = Vec::new();
        let mut dropped_rows = 0usize;
        if total_missing > 0 {
            match missing {
                MissingPolicy::Error => {
                    let (line, col) = first_missing(&cells, n_cols);
                    return Err(CliError::Validation(format!(
                        "{}: found {} missing values (first at line {}, column '{}'); \
                         rerun with --missing drop-cols or --missing drop-rows",
                        path.display(),
                        total_missing,
                        line,
                        headers[col]
                    )));
                }
                MissingPolicy::DropCols => {
                    if let Some(r) = resp_idx {
                        if missing_in_col[r] > 0 {
                            return Err(CliError::Validation(format!(
                                "{}: response column '{}' has {} missing values; \
                                 dropping columns cannot fix the response — \
                                 use --missing drop-rows",
                                path.display(),
                                headers[r],
                                missing_in_col[r]
                            )));
                        }
                    }
                    keep_cols.retain(|&j| {
                        let keep = missing_in_col[j] == 0;
                        if !keep {
                            dropped_columns.push(headers[j].clone());
                        }
                        keep
                    });
                }
                MissingPolicy::DropRows => {
                    keep_rows.retain(|&i| cells[i].iter().all(Option::is_some));
                    dropped_rows = cells.len() - keep_rows.len();
                }
            }
        }
        if keep_cols.is_empty() {
            return Err(CliError::Validation(format!(
                "{}: every predictor column was dropped for missing values",
                path.display()
            )));
        }
        if keep_rows.len() < 2 {
            return Err(CliError::Validation(format!(
                "{}: fewer than 2 rows remain after dropping rows with missing values",
                path.display()
            )));
        }

        let n = keep_rows.len();
        let p = keep_cols.len();
        let mut x = DMatrix::zeros(n, p);
        for (ii, &i) in keep_rows.iter().enumerate() {
            for (jj, &j) in keep_cols.iter().enumerate() {
                x[(ii, jj)] = cells[i][j].expect("kept cells are present");
            }
        }
        let y = resp_idx.map(|r| {
            DVector::from_iterator(
                n,
                keep_rows.iter().map(|&i| cells[i][r].expect("kept cells are present")),
            )
        });
        let feature_names: Vec<String> = keep_cols.iter().map(|&j| headers[j].clone()).collect();

        let mut dataset = Dataset {
            x,
            y,
            feature_names,
            response_name: response.map(str::to_string),
            y_center: 0.0,
            y_scale: 1.0,
            x_centers: vec![0.0; p],
            x_scales: vec![1.0; p],
            dropped_columns,
            dropped_rows,
            source: path.display().to_string(),
        };
        dataset.standardize(standardize)?;
        Ok(dataset)
    }

    fn standardize(&mut self, mode: StandardizeMode) -> Result<()> {
        if mode.predictors() {
            for j in 0..self.x.ncols() {
                let col = self.x.column(j);
                let (center, scale) = center_scale(col.iter().copied());
                if scale == 0.0 {
                    return Err(CliError::Validation(format!(
                        "predictor column '{}' is constant and cannot be scaled; \
                         drop it or use --standardize none/response",
                        self.feature_names[j]
                    )));
                }
                self.x_centers[j] = center;
                self.x_scales[j] = scale;
                for v in self.x.column_mut(j).iter_mut() {
                    *v = (*v - center) / scale;
                }
            }
        }
        if mode.response() {
            let y = self.y.as_mut().expect("checked in load");
            let (center, scale) = center_scale(y.iter().copied());
            if scale == 0.0 {
                return Err(CliError::Validation(
                    "response column is constant and cannot be scaled".into(),
                ));
            }
            self.y_center = center;
            self.y_scale = scale;
            for v in y.iter_mut() {
                *v = (*v - center) / scale;
            }
        }
        Ok(())
    }

    /// Number of rows.
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Number of predictors.
    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// The response, or a validation error for commands that need one.
    pub fn require_y(&self) -> Result<&DVector<f64>> {
        self.y
            .as_ref()
            .ok_or_else(|| CliError::Validation("this command requires --response".into()))
    }

    /// Map a fitted/predicted value from working units back to the original
    /// response units.
    pub fn original_units(&self, value_working: f64) -> f64 {
        value_working * self.y_scale + self.y_center
    }

    /// One-line ingestion report.
    pub fn report(&self) -> String {
        let mut s = format!(
            "loaded {} rows x {} predictors from {}",
            self.n(),
            self.p(),
            self.source
        );
        if let Some(name) = &self.response_name {
            s.push_str(&format!(", response '{name}'"));
        }
        if !self.dropped_columns.is_empty() {
            s.push_str(&format!(
                "; dropped {} predictor column(s) with missing values",
                self.dropped_columns.len()
            ));
        }
        if self.dropped_rows > 0 {
            s.push_str(&format!(
                "; dropped {} row(s) with missing values",
                self.dropped_rows
            ));
        }
        s
    }
}

/// Parse one CSV field: `Ok(None)` = missing, `Ok(Some(v))` = value.
fn parse_cell(field: &str) -> std::result::Result<Option<f64>, String> {
    if field.is_empty() || field == "NA" {
        return Ok(None);
    }
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) => Err(format!("non-finite value '{field}'")),
        Err(_) => Err(format!(
            "cannot parse '{field}' as a number (use empty or NA for missing)"
        )),
    }
}

/// File line (header is line 1) and column index of the first missing cell.
fn first_missing(cells: &[Vec<Option<f64>>], n_cols: usize) -> (usize, usize) {
    for (i, row) in cells.iter().enumerate() {
        for j in 0..n_cols {
            if row[j].is_none() {
                return (i + 2, j);
            }
        }
    }
    unreachable!("called only when a missing value exists")
}

/// Sample mean and standard deviation (n−1 denominator).
fn center_scale(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    let mean = values.clone().sum::<f64>() / n as f64;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}
