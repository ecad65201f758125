use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BinningScheme, FeatureTable};
use crate::{Error, Result};

/// How deep the fitted conditional structure goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Depth {
    Marginal = 1,
    Pair = 2,
    Triplet = 3,
}

impl TryFrom<u8> for Depth {
    type Error = Error;

    fn try_from(d: u8) -> Result<Self> {
        match d {
            1 => Ok(Depth::Marginal),
            2 => Ok(Depth::Pair),
            3 => Ok(Depth::Triplet),
            _ => Err(Error::Input(format!("depth must be 1, 2 or 3, got {d}"))),
        }
    }
}

/// Conditioning cell `(i, n)` and target feature `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    pub i: usize,
    pub n: usize,
    pub j: usize,
}

/// Conditioning cells `(i, n), (j, m)` and target feature `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TripletKey {
    pub i: usize,
    pub n: usize,
    pub j: usize,
    pub m: usize,
    pub k: usize,
}

/// A distribution over the target feature's bins plus the number of rows in
/// its conditioning cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CondDist {
    pub dist: Vec<f64>,
    pub count: u64,
}

impl CondDist {
    fn from_counts(counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        CondDist {
            dist: counts.iter().map(|&c| c as f64 / total as f64).collect(),
            count: total,
        }
    }
}

/// Empirical marginal, pair-conditional and triplet-conditional bin
/// probabilities. Conditionals exist only for occupied conditioning cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTables {
    pub(crate) n_bins: usize,
    pub(crate) depth: Depth,
    pub(crate) marginals: Vec<Vec<f64>>,
    pub(crate) pairs: BTreeMap<PairKey, CondDist>,
    pub(crate) triplets: BTreeMap<TripletKey, CondDist>,
}

impl ProbabilityTables {
    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn depth(&self) -> Depth {
        self.depth
    }

    pub fn n_features(&self) -> usize {
        self.marginals.len()
    }

    /// Relative bin frequencies of feature `i`.
    pub fn marginal(&self, i: usize) -> &[f64] {
        &self.marginals[i]
    }

    pub fn pair(&self, key: PairKey) -> Option<&CondDist> {
        self.pairs.get(&key)
    }

    pub fn triplet(&self, key: TripletKey) -> Option<&CondDist> {
        self.triplets.get(&key)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&PairKey, &CondDist)> {
        self.pairs.iter()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (&TripletKey, &CondDist)> {
        self.triplets.iter()
    }

    /// Serializes tables and bin edges as one JSON document.
    pub fn to_json(&self, scheme: &BinningScheme) -> Result<String> {
        let doc = TablesDocument {
            n_bins: self.n_bins,
            depth: self.depth as u8,
            columns: scheme.columns.clone(),
            edges: scheme.edges.clone(),
            marginals: self.marginals.clone(),
            pairs: self
                .pairs
                .iter()
                .map(|(k, d)| PairEntry {
                    i: k.i,
                    n: k.n,
                    j: k.j,
                    dist: d.dist.clone(),
                    count: d.count,
                })
                .collect(),
            triplets: self
                .triplets
                .iter()
                .map(|(k, d)| TripletEntry {
                    i: k.i,
                    n: k.n,
                    j: k.j,
                    m: k.m,
                    k: k.k,
                    dist: d.dist.clone(),
                    count: d.count,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Inverse of [`ProbabilityTables::to_json`].
    pub fn from_json(text: &str) -> Result<(BinningScheme, ProbabilityTables)> {
        let doc: TablesDocument = serde_json::from_str(text)?;
        let depth = Depth::try_from(doc.depth)?;
        let n_features = doc.edges.len();
        if doc.marginals.len() != n_features
            || doc.columns.len() != n_features
            || doc.edges.iter().any(|e| e.len() != doc.n_bins + 1)
            || doc.marginals.iter().any(|p| p.len() != doc.n_bins)
        {
            return Err(Error::Dimension("inconsistent table document".into()));
        }
        let bad = |d: &Vec<f64>, idx: &[usize]| d.len() != doc.n_bins || idx.iter().any(|&x| x >= n_features);
        let mut pairs = BTreeMap::new();
        for e in doc.pairs {
            if bad(&e.dist, &[e.i, e.j]) || e.n >= doc.n_bins {
                return Err(Error::Dimension("malformed pair entry".into()));
            }
            pairs.insert(
                PairKey { i: e.i, n: e.n, j: e.j },
                CondDist {
                    dist: e.dist,
                    count: e.count,
                },
            );
        }
        let mut triplets = BTreeMap::new();
        for e in doc.triplets {
            if bad(&e.dist, &[e.i, e.j, e.k]) || e.n >= doc.n_bins || e.m >= doc.n_bins {
                return Err(Error::Dimension("malformed triplet entry".into()));
            }
            triplets.insert(
                TripletKey {
                    i: e.i,
                    n: e.n,
                    j: e.j,
                    m: e.m,
                    k: e.k,
                },
                CondDist {
                    dist: e.dist,
                    count: e.count,
                },
            );
        }
        let scheme = BinningScheme {
            n_bins: doc.n_bins,
            columns: doc.columns,
            edges: doc.edges,
        };
        let tables = ProbabilityTables {
            n_bins: doc.n_bins,
            depth,
            marginals: doc.marginals,
            pairs,
            triplets,
        };
        Ok((scheme, tables))
    }
}

#[derive(Serialize, Deserialize)]
struct TablesDocument {
    n_bins: usize,
    depth: u8,
    columns: Vec<String>,
    edges: Vec<Vec<f64>>,
    marginals: Vec<Vec<f64>>,
    pairs: Vec<PairEntry>,
    triplets: Vec<TripletEntry>,
}

#[derive(Serialize, Deserialize)]
struct PairEntry {
    i: usize,
    n: usize,
    j: usize,
    dist: Vec<f64>,
    count: u64,
}

#[derive(Serialize, Deserialize)]
struct TripletEntry {
    i: usize,
    n: usize,
    j: usize,
    m: usize,
    k: usize,
    dist: Vec<f64>,
    count: u64,
}

/// Estimates bin probabilities by relative frequency.
///
/// Pair conditionals are fitted for every ordered pair of distinct features,
/// triplet conditionals for every ordered triple of pairwise distinct
/// features.
pub fn fit_tables(table: &FeatureTable, scheme: &BinningScheme, depth: Depth) -> Result<ProbabilityTables> {
    scheme.validate_against(table)?;
    let nb = scheme.n_bins;
    let nf = table.n_features();
    let rows = table.n_rows();

    // bins[i][s]: 0-based bin of row s in feature i
    let bins: Vec<Vec<usize>> = (0..nf)
        .map(|i| {
            table
                .column(i)
                .iter()
                .map(|&v| scheme.locate(v, i))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let marginals = bins
        .iter()
        .map(|col| {
            let mut c = vec![0u64; nb];
            col.iter().for_each(|&b| c[b] += 1);
            c.iter().map(|&x| x as f64 / rows as f64).collect()
        })
        .collect();

    let mut pair_counts: BTreeMap<PairKey, Vec<u64>> = BTreeMap::new();
    let mut triplet_counts: BTreeMap<TripletKey, Vec<u64>> = BTreeMap::new();
    if depth >= Depth::Pair {
        for s in 0..rows {
            for i in 0..nf {
                for j in (0..nf).filter(|&j| j != i) {
                    let key = PairKey { i, n: bins[i][s], j };
                    pair_counts.entry(key).or_insert_with(|| vec![0; nb])[bins[j][s]] += 1;
                    if depth < Depth::Triplet {
                        continue;
                    }
                    for k in (0..nf).filter(|&k| k != i && k != j) {
                        let key = TripletKey {
                            i,
                            n: bins[i][s],
                            j,
                            m: bins[j][s],
                            k,
                        };
                        triplet_counts.entry(key).or_insert_with(|| vec![0; nb])[bins[k][s]] += 1;
                    }
                }
            }
        }
    }

    Ok(ProbabilityTables {
        n_bins: nb,
        depth,
        marginals,
        pairs: pair_counts
            .into_iter()
            .map(|(k, c)| (k, CondDist::from_counts(&c)))
            .collect(),
        triplets: triplet_counts
            .into_iter()
            .map(|(k, c)| (k, CondDist::from_counts(&c)))
            .collect(),
    })
}
