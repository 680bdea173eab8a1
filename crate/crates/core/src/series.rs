//! Series ingestion and the discrete-to-continuous transform.
//!
//! Ordinal scores (e.g. Likert responses) are mapped to continuous latent
//! values through a smoothed, randomized inverse-CDF transform: each code `y`
//! owns the probability interval `(F(y-), F(y-) + P(y)]` of the empirical
//! CDF, a uniform draw picks a point inside that interval, and the standard
//! normal quantile maps it to the real line. Given the same seed the map is
//! exactly reproducible, and the draw is recorded for audit.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::norm_quantile;
use crate::{Error, Result};

/// Clamp applied to the uniform variate before quantile inversion so the
/// latent value stays finite.
const U_CLAMP: f64 = 1e-12;

/// An ordered-categorical series with codes in `1..=levels`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteSeries {
    values: Vec<u32>,
    levels: u32,
}

impl DiscreteSeries {
    /// Builds a discrete series, inferring the number of levels from the
    /// largest observed code (at least 2).
    pub fn new(values: Vec<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut levels = 2;
        for (index, &v) in values.iter().enumerate() {
            if v == 0 {
                return Err(Error::InvalidCategory {
                    value: 0,
                    index,
                    levels,
                });
            }
            levels = levels.max(v);
        }
        Ok(Self { values, levels })
    }

    /// Builds a discrete series on a fixed scale `1..=levels`.
    pub fn with_levels(values: Vec<u32>, levels: u32) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if levels < 2 {
            return Err(Error::InvalidConfig(format!(
                "a categorical scale needs at least 2 levels, got {levels}"
            )));
        }
        for (index, &v) in values.iter().enumerate() {
            if v == 0 || v > levels {
                return Err(Error::InvalidCategory {
                    value: v as i64,
                    index,
                    levels,
                });
            }
        }
        Ok(Self { values, levels })
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A real-valued, fixed-frequency series; all values finite, never empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousSeries {
    values: Vec<f64>,
}

impl ContinuousSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Empirical categorical fit: per-category left CDF and probability mass.
/// Index 0 corresponds to category 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalFit {
    pub cdf_left: Vec<f64>,
    pub pmf: Vec<f64>,
}

/// Audit record of one randomized inverse-CDF transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformRecord {
    /// Per-time uniform variates placed inside each category's interval.
    pub u: Vec<f64>,
    /// Per-time raw uniform draws in (0, 1].
    pub w: Vec<f64>,
    /// Left CDF per category.
    pub cdf_left: Vec<f64>,
    /// Probability mass per category.
    pub pmf: Vec<f64>,
    /// RNG seed used for the draws.
    pub seed: u64,
}

/// Estimates the empirical pmf and left CDF of a discrete series over the
/// whole observation window.
pub fn estimate_categorical(series: &DiscreteSeries) -> CategoricalFit {
    let levels = series.levels() as usize;
    let n = series.len() as f64;
    let mut counts = vec![0usize; levels];
    for &v in series.values() {
        counts[(v - 1) as usize] += 1;
    }
    let pmf: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let mut cdf_left = vec![0.0; levels];
    for y in 1..levels {
        cdf_left[y] = cdf_left[y - 1] + pmf[y - 1];
    }
    CategoricalFit { cdf_left, pmf }
}

/// Maps a discrete series to a continuous latent series.
///
/// For each time point with code `y`, draws `w` uniform in (0, 1], sets
/// `u = cdf_left(y) + w * pmf(y)`, clamps `u` into `[1e-12, 1 - 1e-12]`, and
/// returns the standard normal quantile of `u`. Identical `(series, seed)`
/// inputs give identical outputs.
pub fn to_continuous(series: &DiscreteSeries, seed: u64) -> (ContinuousSeries, TransformRecord) {
    let fit = estimate_categorical(series);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = series.len();
    let mut u = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    for &y in series.values() {
        let idx = (y - 1) as usize;
        // 1 - [0,1) keeps the draw in (0,1], so u stays inside the
        // half-open category interval (cdf_left, cdf_left + pmf].
        let wt = 1.0 - rng.gen::<f64>();
        let ut = fit.cdf_left[idx] + wt * fit.pmf[idx];
        let clamped = ut.clamp(U_CLAMP, 1.0 - U_CLAMP);
        u.push(ut);
        w.push(wt);
        z.push(norm_quantile(clamped));
    }
    let record = TransformRecord {
        u,
        w,
        cdf_left: fit.cdf_left,
        pmf: fit.pmf,
        seed,
    };
    let series = ContinuousSeries::new(z).expect("quantiles of clamped probabilities are finite");
    (series, record)
}

/// Declared kind of a CSV column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Discrete,
    Continuous,
}

/// A series loaded from CSV, in its declared representation.
#[derive(Debug, Clone)]
pub enum LoadedSeries {
    Discrete(DiscreteSeries),
    Continuous(ContinuousSeries),
}

impl LoadedSeries {
    pub fn len(&self) -> usize {
        match self {
            LoadedSeries::Discrete(s) => s.len(),
            LoadedSeries::Continuous(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Loads one named column from a headered CSV file, rows in time order.
///
/// Row numbers in errors are 1-based file lines (the header is line 1).
pub fn load_csv(path: &Path, column: &str, kind: ColumnKind) -> Result<LoadedSeries> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_open_error(&display, e))?;

    let headers = reader
        .headers()
        .map_err(|e| csv_open_error(&display, e))?
        .clone();
    let col_idx = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| Error::CsvParse {
            path: display.clone(),
            row: 1,
            message: format!(
                "column '{column}' not found in header [{}]",
                headers.iter().collect::<Vec<_>>().join(", ")
            ),
        })?;

    let mut raw = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2; // data rows start on line 2
        let record = record.map_err(|e| Error::CsvParse {
            path: display.clone(),
            row,
            message: e.to_string(),
        })?;
        let cell = record.get(col_idx).ok_or_else(|| Error::CsvParse {
            path: display.clone(),
            row,
            message: format!("missing cell in column '{column}'"),
        })?;
        if cell.is_empty() {
            return Err(Error::CsvParse {
                path: display.clone(),
                row,
                message: format!("empty cell in column '{column}'"),
            });
        }
        raw.push((row, cell.to_string()));
    }
    if raw.is_empty() {
        return Err(Error::CsvParse {
            path: display,
            row: 1,
            message: "no data rows".to_string(),
        });
    }

    match kind {
        ColumnKind::Continuous => {
            let mut values = Vec::with_capacity(raw.len());
            for (row, cell) in &raw {
                let v: f64 = cell.parse().map_err(|_| Error::CsvParse {
                    path: display.clone(),
                    row: *row,
                    message: format!("cannot parse '{cell}' in column '{column}' as a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::CsvParse {
                        path: display.clone(),
                        row: *row,
                        message: format!("non-finite value '{cell}' in column '{column}'"),
                    });
                }
                values.push(v);
            }
            Ok(LoadedSeries::Continuous(ContinuousSeries::new(values)?))
        }
        ColumnKind::Discrete => {
            let mut values = Vec::with_capacity(raw.len());
            for (row, cell) in &raw {
                let v: u32 = cell.parse().map_err(|_| Error::CsvParse {
                    path: display.clone(),
                    row: *row,
                    message: format!(
                        "cannot parse '{cell}' in column '{column}' as a categorical code"
                    ),
                })?;
                if v == 0 {
                    return Err(Error::CsvParse {
                        path: display.clone(),
                        row: *row,
                        message: format!("categorical code must be >= 1, got '{cell}'"),
                    });
                }
                values.push(v);
            }
            Ok(LoadedSeries::Discrete(DiscreteSeries::new(values)?))
        }
    }
}

/// Writes a single-column series (with a time index column) as CSV.
pub fn write_csv(path: &Path, column: &str, values: &[f64]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(io_from_csv)?;
    writer.write_record(["t", column]).map_err(io_from_csv)?;
    for (t, v) in values.iter().enumerate() {
        writer
            .write_record([(t + 1).to_string(), v.to_string()])
            .map_err(io_from_csv)?;
    }
    writer.flush()?;
    Ok(())
}

fn io_from_csv(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn csv_open_error(path: &str, e: csv::Error) -> Error {
    Error::CsvParse {
        path: path.to_string(),
        row: 0,
        message: e.to_string(),
    }
}
