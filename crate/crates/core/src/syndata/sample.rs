use ndarray::Array2;

use super::{BinningScheme, Depth, FeatureTable, PairKey, ProbabilityTables, TripletKey};
use crate::numerics::RngStream;
use crate::{Error, Result};

/// Order in which features are drawn within a synthetic row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderPolicy {
    /// Original column order for every row.
    #[default]
    Fixed,
    /// A fresh uniformly random permutation per row.
    RandomPerRow,
}

impl std::str::FromStr for OrderPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(OrderPolicy::Fixed),
            "random" | "random-per-row" => Ok(OrderPolicy::RandomPerRow),
            _ => Err(Error::Input(format!("unknown order policy `{s}`"))),
        }
    }
}

/// Draws `rows` synthetic observations with the chain rule.
///
/// The first feature of a row comes from its marginal, the second from the
/// pair conditional on the first, and every later one from the triplet
/// conditional on the two features drawn just before it. Unseen conditioning
/// cells fall back from triplet to pair to marginal. A value is uniform on
/// the interval of its drawn bin.
pub fn sample_synthetic(
    tables: &ProbabilityTables,
    scheme: &BinningScheme,
    rows: usize,
    order_policy: OrderPolicy,
    rng: &mut RngStream,
) -> Result<FeatureTable> {
    if rows == 0 {
        return Err(Error::Input("synthetic row count must be at least 1".into()));
    }
    let nf = scheme.n_features();
    if tables.n_features() != nf || tables.n_bins() != scheme.n_bins() {
        return Err(Error::Dimension("tables and binning scheme disagree".into()));
    }

    let mut data = Array2::zeros((rows, nf));
    let mut order: Vec<usize> = (0..nf).collect();
    // (feature, bin) of each drawn position in the current row
    let mut drawn: Vec<(usize, usize)> = Vec::with_capacity(nf);
    for s in 0..rows {
        if order_policy == OrderPolicy::RandomPerRow {
            order.sort_unstable();
            for a in (1..nf).rev() {
                let b = rng.below(a + 1);
                order.swap(a, b);
            }
        }
        drawn.clear();
        for &f in &order {
            let dist = conditional_for(tables, f, &drawn);
            let bin = draw_categorical(dist, rng.uniform());
            let (lo, hi) = scheme.bin_bounds(f, bin);
            data[[s, f]] = (lo + rng.uniform() * (hi - lo)).clamp(lo, hi);
            drawn.push((f, bin));
        }
    }
    FeatureTable::new(scheme.columns().to_vec(), data)
}

fn conditional_for<'a>(tables: &'a ProbabilityTables, target: usize, drawn: &[(usize, usize)]) -> &'a [f64] {
    let depth = tables.depth();
    if let [.., (i, n), (j, m)] = *drawn {
        if depth >= Depth::Triplet {
            if let Some(d) = tables.triplet(TripletKey { i, n, j, m, k: target }) {
                return &d.dist;
            }
        }
    }
    if let Some(&(i, n)) = drawn.last() {
        if depth >= Depth::Pair {
            if let Some(d) = tables.pair(PairKey { i, n, j: target }) {
                return &d.dist;
            }
        }
    }
    tables.marginal(target)
}

/// Inverse-CDF draw; `u` in `[0, 1)`. Round-off past the end lands on the
/// last bin with positive mass.
fn draw_categorical(p: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (b, &w) in p.iter().enumerate() {
        acc += w;
        if u < acc && w > 0.0 {
            return b;
        }
    }
    p.iter().rposition(|&w| w > 0.0).unwrap_or(p.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_rng;
    use crate::syndata::{bin_index, build_bins, fit_tables, make_benchmark_table};

    #[test]
    fn categorical_draw() {
        assert_eq!(draw_categorical(&[0.0, 1.0, 0.0], 0.0), 1);
        assert_eq!(draw_categorical(&[0.5, 0.5], 0.49), 0);
        assert_eq!(draw_categorical(&[0.5, 0.5], 0.5), 1);
        assert_eq!(draw_categorical(&[0.3, 0.3, 0.3, 0.0], 0.95), 2);
    }

    #[test]
    fn zero_rows_rejected() {
        let t = make_benchmark_table(20, 0).unwrap();
        let s = build_bins(&t, 2).unwrap();
        let p = fit_tables(&t, &s, Depth::Marginal).unwrap();
        let mut rng = make_rng(0);
        assert!(sample_synthetic(&p, &s, 0, OrderPolicy::Fixed, &mut rng).is_err());
    }

    #[test]
    fn single_bin_is_uniform_on_range() {
        let t = make_benchmark_table(50, 2).unwrap();
        let s = build_bins(&t, 1).unwrap();
        let p = fit_tables(&t, &s, Depth::Triplet).unwrap();
        let mut rng = make_rng(4);
        let out = sample_synthetic(&p, &s, 4000, OrderPolicy::Fixed, &mut rng).unwrap();
        for f in 0..5 {
            let (lo, hi) = s.bin_bounds(f, 0);
            let col = out.column(f);
            assert!(col.iter().all(|v| (lo..=hi).contains(v)));
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            // uniform mean (lo+hi)/2, sd of mean (hi-lo)/sqrt(12*4000)
            assert!((mean - 0.5 * (lo + hi)).abs() < 4.0 * (hi - lo) / (12.0f64 * 4000.0).sqrt());
        }
    }

    #[test]
    fn perfectly_dependent_bins_copy_through() {
        let col: Vec<f64> = (0..64).map(|s| (s as f64 * 0.37).sin()).collect();
        let data = Array2::from_shape_fn((64, 2), |(r, _)| col[r]);
        let t = FeatureTable::new(vec!["a".into(), "b".into()], data).unwrap();
        let s = build_bins(&t, 4).unwrap();
        let p = fit_tables(&t, &s, Depth::Pair).unwrap();
        let mut rng = make_rng(8);
        let out = sample_synthetic(&p, &s, 500, OrderPolicy::Fixed, &mut rng).unwrap();
        for r in 0..500 {
            let a = bin_index(out.data()[[r, 0]], 0, &s).unwrap();
            let b = bin_index(out.data()[[r, 1]], 1, &s).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn random_order_stays_in_range_and_is_deterministic() {
        let t = make_benchmark_table(300, 3).unwrap();
        let s = build_bins(&t, 5).unwrap();
        let p = fit_tables(&t, &s, Depth::Triplet).unwrap();
        let a = sample_synthetic(&p, &s, 300, OrderPolicy::RandomPerRow, &mut make_rng(9)).unwrap();
        let b = sample_synthetic(&p, &s, 300, OrderPolicy::RandomPerRow, &mut make_rng(9)).unwrap();
        assert_eq!(a, b);
        for f in 0..5 {
            let e = s.edges(f);
            assert!(a.column(f).iter().all(|v| (e[0]..=e[5]).contains(v)));
        }
    }
}
