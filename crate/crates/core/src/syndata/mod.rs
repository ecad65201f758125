//! Histogram-based synthetic tabular data.
//!
//! Each feature is cut into `N` equal-width bins between its minimum and
//! maximum. From the binned data we estimate marginals, pair conditionals
//! `P(bin_j = m | bin_i = n)` and triplet conditionals
//! `P(bin_k = l | bin_i = n, bin_j = m)` by relative frequencies, then draw
//! new rows feature by feature with the chain rule.

mod bins;
mod pearson;
mod sample;
mod table;
mod tables;

pub use bins::{bin_index, build_bins, BinningScheme};
pub use pearson::{pearson_matrix, CorrelationReport};
pub use sample::{sample_synthetic, OrderPolicy};
pub use table::{load_table, make_benchmark_table, FeatureTable};
pub use tables::{fit_tables, CondDist, Depth, PairKey, ProbabilityTables, TripletKey};
