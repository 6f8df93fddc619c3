//! Matrix containers, standardization and dataset I/O.
//!
//! All downstream fitting assumes predictor columns with sample mean 0 and
//! sample variance 1 (n-1 denominator), and for regression a response on the
//! same scale. The standardization parameters are kept so that held-out data
//! can be transformed with the statistics of the training split only.

use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prediction task attached to a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Regression,
    Classification,
}

/// A raw dataset: predictor matrix, response vector and task type.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub task: Task,
    pub column_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(x: Array2<f64>, y: Array1<f64>, task: Task) -> Result<Self> {
        let d = Dataset { x, y, task, column_names: None };
        d.validate()?;
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    fn validate(&self) -> Result<()> {
        if self.x.nrows() < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: self.x.nrows() });
        }
        if self.x.ncols() < 1 {
            return Err(Error::InvalidParameter("matrix has no columns".into()));
        }
        if self.y.len() != self.x.nrows() {
            return Err(Error::LengthMismatch { left: self.y.len(), right: self.x.nrows() });
        }
        if self.x.iter().any(|v| !v.is_finite()) || self.y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if self.task == Task::Classification && self.y.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::InvalidParameter("classification response must be 0/1".into()));
        }
        Ok(())
    }

    /// Row subset, preserving task and column names.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let p = self.p();
        let mut x = Array2::<f64>::zeros((rows.len(), p));
        let mut y = Array1::<f64>::zeros(rows.len());
        for (to, &from) in rows.iter().enumerate() {
            x.row_mut(to).assign(&self.x.row(from));
            y[to] = self.y[from];
        }
        Dataset { x, y, task: self.task, column_names: self.column_names.clone() }
    }
}

/// A predictor matrix with columns centered and scaled to sample variance 1,
/// together with the statistics used to do it.
#[derive(Debug, Clone)]
pub struct StandardizedMatrix {
    pub values: Array2<f64>,
    pub center: Array1<f64>,
    pub scale: Array1<f64>,
}

impl StandardizedMatrix {
    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }
}

/// A response standardized for regression (mean 0, variance 1) or passed
/// through untouched for classification (center 0, scale 1).
#[derive(Debug, Clone)]
pub struct StandardizedResponse {
    pub values: Array1<f64>,
    pub center: f64,
    pub scale: f64,
    pub task: Task,
}

fn column_mean_sd(col: &[f64]) -> (f64, f64) {
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    let ss: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Centers and scales every column of `x` to sample variance 1.
pub fn standardize(x: &Array2<f64>) -> Result<StandardizedMatrix> {
    let (n, p) = x.dim();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut center = Array1::<f64>::zeros(p);
    let mut scale = Array1::<f64>::zeros(p);
    let mut values = x.clone();
    for j in 0..p {
        let col: Vec<f64> = x.column(j).to_vec();
        let (mean, sd) = column_mean_sd(&col);
        if sd == 0.0 {
            return Err(Error::ConstantColumn(j));
        }
        center[j] = mean;
        scale[j] = sd;
        for i in 0..n {
            values[[i, j]] = (x[[i, j]] - mean) / sd;
        }
    }
    Ok(StandardizedMatrix { values, center, scale })
}

/// Applies previously estimated statistics to new data. No statistics are
/// re-estimated here; this is the held-out-data path.
pub fn apply_standardization(
    x_new: &Array2<f64>,
    center: &Array1<f64>,
    scale: &Array1<f64>,
) -> Result<Array2<f64>> {
    let (n, p) = x_new.dim();
    if center.len() != p || scale.len() != p {
        return Err(Error::DimensionMismatch { expected: center.len(), got: p });
    }
    if scale.iter().any(|&s| s <= 0.0) {
        return Err(Error::InvalidParameter("scale entries must be positive".into()));
    }
    let mut out = x_new.clone();
    for j in 0..p {
        for i in 0..n {
            out[[i, j]] = (x_new[[i, j]] - center[j]) / scale[j];
        }
    }
    Ok(out)
}

/// Standardizes the response for regression; leaves a binary response as-is.
pub fn standardize_response(y: &Array1<f64>, task: Task) -> Result<StandardizedResponse> {
    match task {
        Task::Classification => Ok(StandardizedResponse {
            values: y.clone(),
            center: 0.0,
            scale: 1.0,
            task,
        }),
        Task::Regression => {
            let v: Vec<f64> = y.to_vec();
            let (mean, sd) = column_mean_sd(&v);
            if sd == 0.0 {
                return Err(Error::ConstantVector);
            }
            Ok(StandardizedResponse {
                values: y.mapv(|t| (t - mean) / sd),
                center: mean,
                scale: sd,
                task,
            })
        }
    }
}

/// Pearson sample correlation.
pub fn sample_correlation(u: &Array1<f64>, x: &Array1<f64>) -> Result<f64> {
    if u.len() != x.len() {
        return Err(Error::LengthMismatch { left: u.len(), right: x.len() });
    }
    let n = u.len() as f64;
    if u.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: u.len() });
    }
    let mu = u.sum() / n;
    let mx = x.sum() / n;
    let mut suu = 0.0;
    let mut sxx = 0.0;
    let mut sux = 0.0;
    for i in 0..u.len() {
        let du = u[i] - mu;
        let dx = x[i] - mx;
        suu += du * du;
        sxx += dx * dx;
        sux += du * dx;
    }
    if suu == 0.0 || sxx == 0.0 {
        return Err(Error::ConstantVector);
    }
    Ok(sux / (suu.sqrt() * sxx.sqrt()))
}

/// Reads a CSV file with a header row into a `Dataset`, taking `response_column`
/// as y and every other column as a predictor.
pub fn load_csv(path: &Path, response_column: &str, task: Task) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Io(e.to_string()))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Io(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let y_idx = headers
        .iter()
        .position(|h| h == response_column)
        .ok_or_else(|| Error::MissingColumn(response_column.to_string()))?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Io(e.to_string()))?;
        let mut row = Vec::with_capacity(headers.len().saturating_sub(1));
        for (c, cell) in record.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| Error::ParseError {
                row: r + 2, // 1-based, counting the header line
                col: c + 1,
                value: cell.to_string(),
            })?;
            if c == y_idx {
                ys.push(value);
            } else {
                row.push(value);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile);
    }
    let n = rows.len();
    let p = rows[0].len();
    let mut x = Array2::<f64>::zeros((n, p));
    for (i, row) in rows.iter().enumerate() {
        if row.len() != p {
            return Err(Error::ParseError { row: i + 2, col: row.len() + 1, value: "<ragged row>".into() });
        }
        for (j, &v) in row.iter().enumerate() {
            x[[i, j]] = v;
        }
    }
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(c, _)| *c != y_idx)
        .map(|(_, h)| h.clone())
        .collect();
    let mut dataset = Dataset::new(x, Array1::from_vec(ys), task)?;
    dataset.column_names = Some(names);
    Ok(dataset)
}

/// Writes a dataset as CSV with the response in the last column named `y`.
pub fn save_csv(path: &Path, dataset: &Dataset) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let names: Vec<String> = match &dataset.column_names {
        Some(n) => n.clone(),
        None => (1..=dataset.p()).map(|j| format!("x{j}")).collect(),
    };
    let mut header = names;
    header.push("y".to_string());
    writer.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    for i in 0..dataset.n() {
        let mut record: Vec<String> = (0..dataset.p()).map(|j| dataset.x[[i, j]].to_string()).collect();
        record.push(dataset.y[i].to_string());
        writer.write_record(&record).map_err(|e| Error::Io(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}
