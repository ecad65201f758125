use serde::{Deserialize, Serialize};

use super::FeatureTable;
use crate::{Error, Result};

/// Equal-width bin edges per feature, `n_bins + 1` edges each.
///
/// Bin `n` (0-based) is `[edges[n], edges[n + 1])`; the last bin also
/// includes its right edge, the feature maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinningScheme {
    pub(crate) n_bins: usize,
    pub(crate) columns: Vec<String>,
    pub(crate) edges: Vec<Vec<f64>>,
}

impl BinningScheme {
    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn n_features(&self) -> usize {
        self.edges.len()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn edges(&self, feature: usize) -> &[f64] {
        &self.edges[feature]
    }

    /// Interval `[lo, hi]` of 0-based bin `bin` of `feature`.
    pub fn bin_bounds(&self, feature: usize, bin: usize) -> (f64, f64) {
        let e = &self.edges[feature];
        (e[bin], e[bin + 1])
    }

    /// 0-based bin of `value`.
    pub(crate) fn locate(&self, value: f64, feature: usize) -> Result<usize> {
        let e = &self.edges[feature];
        let (lo, hi) = (e[0], e[self.n_bins]);
        if !(lo..=hi).contains(&value) {
            return Err(Error::Range { value, feature, lo, hi });
        }
        // First guess from the arithmetic, then settle against the stored edges
        // so the half-open convention holds exactly.
        let width = (hi - lo) / self.n_bins as f64;
        let mut n = (((value - lo) / width).floor() as usize).min(self.n_bins - 1);
        while n > 0 && value < e[n] {
            n -= 1;
        }
        while n + 1 < self.n_bins && value >= e[n + 1] {
            n += 1;
        }
        Ok(n)
    }

    pub(crate) fn validate_against(&self, table: &FeatureTable) -> Result<()> {
        if self.n_features() != table.n_features() {
            return Err(Error::Dimension(format!(
                "binning has {} features, table has {}",
                self.n_features(),
                table.n_features()
            )));
        }
        Ok(())
    }
}

/// Builds `n_bins` equal-width bins per feature between its min and max.
///
/// Edge `n` is `min + n * (max - min) / n_bins`; the last edge is pinned to
/// the maximum. A constant column has no valid binning and is rejected.
pub fn build_bins(table: &FeatureTable, n_bins: usize) -> Result<BinningScheme> {
    if n_bins == 0 {
        return Err(Error::Input("bin count must be at least 1".into()));
    }
    let edges = (0..table.n_features())
        .map(|i| {
            let col = table.column(i);
            let min = col.iter().copied().fold(f64::INFINITY, f64::min);
            let max = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max <= min {
                return Err(Error::DegenerateFeature(table.names()[i].clone()));
            }
            let width = (max - min) / n_bins as f64;
            let mut e: Vec<f64> = (0..=n_bins).map(|n| min + width * n as f64).collect();
            e[n_bins] = max;
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BinningScheme {
        n_bins,
        columns: table.names().to_vec(),
        edges,
    })
}

/// Bin number of `value` for `feature`, counted from 1 to `N`.
///
/// Interior edge values fall in the bin to their right; the feature maximum
/// falls in bin `N`.
pub fn bin_index(value: f64, feature: usize, scheme: &BinningScheme) -> Result<usize> {
    if feature >= scheme.n_features() {
        return Err(Error::Dimension(format!(
            "feature {feature} of {}",
            scheme.n_features()
        )));
    }
    scheme.locate(value, feature).map(|n| n + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn table(cols: &[&[f64]]) -> FeatureTable {
        let rows = cols[0].len();
        let mut data = Array2::zeros((rows, cols.len()));
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                data[[r, c]] = *v;
            }
        }
        let names = (0..cols.len()).map(|i| format!("c{i}")).collect();
        FeatureTable::new(names, data).unwrap()
    }

    #[test]
    fn edges_follow_equal_width_rule() {
        let s = build_bins(&table(&[&[-1.0, 0.3, 1.0]]), 4).unwrap();
        assert_eq!(s.edges(0), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
        let s = build_bins(&table(&[&[0.0, 8.0, 3.0]]), 8).unwrap();
        assert_eq!(s.edges(0), &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        let s = build_bins(&table(&[&[0.0, 1.0]]), 3).unwrap();
        for (got, want) in s.edges(0).iter().zip([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]) {
            assert!((got - want).abs() <= f64::EPSILON, "{got} vs {want}");
        }
    }

    #[test]
    fn constant_column_rejected() {
        let t = FeatureTable::new(vec!["a".into()], array![[2.0], [2.0]]).unwrap();
        assert!(matches!(build_bins(&t, 3), Err(Error::DegenerateFeature(_))));
        let t = table(&[&[0.0, 1.0]]);
        assert!(build_bins(&t, 0).is_err());
    }

    #[test]
    fn bin_index_conventions() {
        let s = build_bins(&table(&[&[-1.0, 1.0]]), 4).unwrap();
        assert_eq!(bin_index(1.0, 0, &s).unwrap(), 4);
        assert_eq!(bin_index(-1.0, 0, &s).unwrap(), 1);
        assert_eq!(bin_index(-0.5, 0, &s).unwrap(), 2);
        assert_eq!(bin_index(0.0, 0, &s).unwrap(), 3);
        assert_eq!(bin_index(0.5, 0, &s).unwrap(), 4);
        assert_eq!(bin_index(0.49, 0, &s).unwrap(), 3);
        assert!(matches!(bin_index(1.0001, 0, &s), Err(Error::Range { .. })));
        assert!(bin_index(f64::NAN, 0, &s).is_err());
    }

    #[test]
    fn interior_edges_go_right_for_awkward_widths() {
        let s = build_bins(&table(&[&[0.1, 0.7]]), 7).unwrap();
        for n in 1..7 {
            let e = s.edges(0)[n];
            assert_eq!(bin_index(e, 0, &s).unwrap(), n + 1);
        }
    }
}
