use std::collections::HashSet;
use std::path::Path;

use ndarray::Array2;

use crate::io::fmt_real;
use crate::numerics::make_rng;
use crate::{Error, Result};

/// Numeric observation matrix, one row per observation and one named column
/// per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    names: Vec<String>,
    data: Array2<f64>,
}

impl FeatureTable {
    pub fn new(names: Vec<String>, data: Array2<f64>) -> Result<Self> {
        let (rows, cols) = data.dim();
        if cols == 0 || names.len() != cols {
            return Err(Error::Dimension(format!(
                "{} column names for {cols} data columns",
                names.len()
            )));
        }
        if rows < 2 {
            return Err(Error::Input(format!("need at least 2 observations, got {rows}")));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::Input(format!("duplicate column name `{dup}`")));
        }
        if let Some(((r, c), v)) = data.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite value {v} at row {r}, column {c}")));
        }
        Ok(Self { names, data })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn n_rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.data.ncols()
    }

    pub fn column(&self, i: usize) -> ndarray::ArrayView1<'_, f64> {
        self.data.column(i)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path.as_ref())?;
        w.write_record(&self.names)?;
        for row in self.data.rows() {
            w.write_record(row.iter().map(|&v| fmt_real(v)))?;
        }
        w.flush().map_err(|e| Error::io(path.as_ref(), e))?;
        Ok(())
    }
}

/// Reads a headed CSV of reals.
pub fn load_table(path: impl AsRef<Path>) -> Result<FeatureTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let names: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let mut values = Vec::new();
    let mut rows = 0;
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Input(format!("row {}: {e}", r + 1)))?;
        if record.len() != names.len() {
            return Err(Error::Input(format!(
                "row {}: {} fields, header has {}",
                r + 1,
                record.len(),
                names.len()
            )));
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::Input(format!("row {}, column `{}`: cannot parse `{cell}`", r + 1, names[c])))?;
            if !v.is_finite() {
                return Err(Error::Input(format!(
                    "row {}, column `{}`: non-finite value `{cell}`",
                    r + 1,
                    names[c]
                )));
            }
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Input(format!("{}: no data rows", path.display())));
    }
    let data = Array2::from_shape_vec((rows, names.len()), values).map_err(|e| Error::Dimension(e.to_string()))?;
    FeatureTable::new(names, data)
}

/// The five-feature manufactured dataset: with `x` equidistant on `[-1, 1]`
/// and `r ~ U[0, 1)` per row, columns are `x`, `2x^2 + x + r`, `x^2`,
/// `sin x` and `exp(-x)`.
pub fn make_benchmark_table(rows: usize, seed: u64) -> Result<FeatureTable> {
    if rows < 2 {
        return Err(Error::Input(format!("benchmark needs at least 2 rows, got {rows}")));
    }
    let mut rng = make_rng(seed);
    let last = (rows - 1) as f64;
    let mut data = Array2::zeros((rows, 5));
    for s in 0..rows {
        let x = if s == rows - 1 {
            1.0
        } else {
            -1.0 + 2.0 * s as f64 / last
        };
        let r = rng.uniform();
        data[[s, 0]] = x;
        data[[s, 1]] = 2.0 * x * x + x + r;
        data[[s, 2]] = x * x;
        data[[s, 3]] = x.sin();
        data[[s, 4]] = (-x).exp();
    }
    let names = ["f1", "f2", "f3", "f4", "f5"].map(String::from).to_vec();
    FeatureTable::new(names, data)
}
