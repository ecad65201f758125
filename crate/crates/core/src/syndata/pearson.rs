use std::path::Path;

use super::FeatureTable;
use crate::io::fmt_real;
use crate::{Error, Result};

/// Pearson correlation matrix of the table's columns, by two-pass
/// mean/covariance.
pub fn pearson_matrix(table: &FeatureTable) -> Result<Vec<Vec<f64>>> {
    let nf = table.n_features();
    let rows = table.n_rows() as f64;
    let centered: Vec<Vec<f64>> = (0..nf)
        .map(|i| {
            let col = table.column(i);
            let mean = col.sum() / rows;
            col.iter().map(|v| v - mean).collect()
        })
        .collect();
    let norms: Vec<f64> = centered
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let ss: f64 = c.iter().map(|d| d * d).sum();
            if ss > 0.0 {
                Ok(ss.sqrt())
            } else {
                Err(Error::DegenerateFeature(table.names()[i].clone()))
            }
        })
        .collect::<Result<_>>()?;

    let mut r = vec![vec![0.0; nf]; nf];
    for i in 0..nf {
        r[i][i] = 1.0;
        for j in 0..i {
            let cov: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
            let v = (cov / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            r[i][j] = v;
            r[j][i] = v;
        }
    }
    Ok(r)
}

/// Side-by-side Pearson matrices of an original and a synthetic table.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub names: Vec<String>,
    pub original: Vec<Vec<f64>>,
    pub synthetic: Vec<Vec<f64>>,
}

impl CorrelationReport {
    pub fn new(original: &FeatureTable, synthetic: &FeatureTable) -> Result<Self> {
        if original.names() != synthetic.names() {
            return Err(Error::Dimension("tables have different columns".into()));
        }
        Ok(Self {
            names: original.names().to_vec(),
            original: pearson_matrix(original)?,
            synthetic: pearson_matrix(synthetic)?,
        })
    }

    pub fn abs_diff(&self, i: usize, j: usize) -> f64 {
        (self.original[i][j] - self.synthetic[i][j]).abs()
    }

    pub fn max_abs_diff(&self) -> f64 {
        let n = self.names.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.abs_diff(i, j))
            .fold(0.0, f64::max)
    }

    /// Long-format CSV: one row per ordered feature pair with both
    /// coefficients and their absolute difference.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path.as_ref())?;
        w.write_record(["feature_a", "feature_b", "original", "synthetic", "abs_diff"])?;
        for (i, a) in self.names.iter().enumerate() {
            for (j, b) in self.names.iter().enumerate() {
                w.write_record([
                    a.clone(),
                    b.clone(),
                    fmt_real(self.original[i][j]),
                    fmt_real(self.synthetic[i][j]),
                    fmt_real(self.abs_diff(i, j)),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io(path.as_ref(), e))?;
        Ok(())
    }
}
