use rand::seq::SliceRandom;

use crate::io::Rgb;
use crate::numerics::{make_rng, Grid2DPeriodic};
use crate::{Error, Result};

/// Spin value in `{-1, 0, +1}`.
pub type Spin = i8;

/// `(row, col)` lattice coordinates.
pub type Site = (usize, usize);

const DIRECTIONS: [(isize, isize); 4] = [(0, 1), (0, -1), (1, 0), (-1, 0)];

/// Symmetric pair energies indexed by spin, rows and columns ordered
/// `(-1, 0, +1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionMatrix([[f64; 3]; 3]);

impl Default for InteractionMatrix {
    /// A-B contacts cost 4, polymer-solvent contacts 1, like contacts 0.
    fn default() -> Self {
        InteractionMatrix([[0.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]])
    }
}

impl InteractionMatrix {
    pub fn new(entries: [[f64; 3]; 3]) -> Result<Self> {
        for a in 0..3 {
            if entries[a][a] != 0.0 {
                return Err(Error::Input("interaction matrix needs a zero diagonal".into()));
            }
            for b in 0..3 {
                if entries[a][b] != entries[b][a] || !(entries[a][b] >= 0.0) {
                    return Err(Error::Input(
                        "interaction matrix must be symmetric and nonnegative".into(),
                    ));
                }
            }
        }
        Ok(InteractionMatrix(entries))
    }

    pub fn get(&self, a: Spin, b: Spin) -> f64 {
        self.0[(a + 1) as usize][(b + 1) as usize]
    }
}

/// Spin field on a periodic `side x side` lattice plus the inverse
/// temperature used by the sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeConfig {
    grid: Grid2DPeriodic,
    spins: Vec<Spin>,
    pub beta: f64,
}

impl LatticeConfig {
    /// Builds a lattice from row-major spins.
    pub fn from_spins(side: usize, spins: Vec<Spin>, beta: f64) -> Result<Self> {
        if side < 2 || spins.len() != side * side {
            return Err(Error::Dimension(format!(
                "{} spins for a {side}x{side} lattice",
                spins.len()
            )));
        }
        if spins.iter().any(|s| !(-1..=1).contains(s)) {
            return Err(Error::Input("spins must be -1, 0 or +1".into()));
        }
        if !(beta >= 0.0) {
            return Err(Error::Input(format!("beta must be nonnegative, got {beta}")));
        }
        Ok(Self {
            grid: Grid2DPeriodic::new(side as f64, side)?,
            spins,
            beta,
        })
    }

    pub fn side(&self) -> usize {
        self.grid.n()
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn spin(&self, (r, c): Site) -> Spin {
        self.spins[r * self.side() + c]
    }

    pub(crate) fn swap(&mut self, (ra, ca): Site, (rb, cb): Site) {
        let n = self.side();
        self.spins.swap(ra * n + ca, rb * n + cb);
    }

    /// Counts of `(-1, 0, +1)` spins.
    pub fn composition(&self) -> [usize; 3] {
        let mut c = [0; 3];
        self.spins.iter().for_each(|&s| c[(s + 1) as usize] += 1);
        c
    }

    pub(crate) fn neighbor(&self, site: Site, direction: usize) -> Site {
        let (dr, dc) = DIRECTIONS[direction];
        self.grid.shift(site, dr, dc)
    }

    fn are_neighbors(&self, a: Site, b: Site) -> bool {
        (0..4).any(|d| self.neighbor(a, d) == b)
    }

    /// One pixel per site: A blue, solvent red, B yellow.
    pub fn pixels(&self) -> Vec<Rgb> {
        self.spins
            .iter()
            .map(|&s| match s {
                -1 => [0, 0, 255],
                0 => [255, 0, 0],
                _ => [255, 255, 0],
            })
            .collect()
    }
}

/// Random lattice with `round(solvent_fraction * side^2)` solvent sites and
/// the rest split as evenly as possible between A and B.
pub fn init_lattice(side: usize, solvent_fraction: f64, seed: u64) -> Result<LatticeConfig> {
    if side < 2 {
        return Err(Error::Input(format!("lattice side must be at least 2, got {side}")));
    }
    if !(0.0..=1.0).contains(&solvent_fraction) {
        return Err(Error::Input(format!(
            "solvent fraction must lie in [0, 1], got {solvent_fraction}"
        )));
    }
    let sites = side * side;
    let solvent = (solvent_fraction * sites as f64).round() as usize;
    let polymer = sites - solvent;
    let a = polymer / 2;
    let mut spins = Vec::with_capacity(sites);
    spins.extend(std::iter::repeat_n(-1, a));
    spins.extend(std::iter::repeat_n(1, polymer - a));
    spins.extend(std::iter::repeat_n(0, solvent));
    spins.shuffle(&mut make_rng(seed));
    LatticeConfig::from_spins(side, spins, 0.0)
}

/// Sum of pair energies over all nearest-neighbor bonds; each site
/// contributes its right and down bonds so every bond counts once.
pub fn hamiltonian(config: &LatticeConfig, m: &InteractionMatrix) -> f64 {
    let n = config.side();
    let mut e = 0.0;
    for r in 0..n {
        for c in 0..n {
            let s = config.spin((r, c));
            e += m.get(s, config.spin(config.neighbor((r, c), 0)));
            e += m.get(s, config.spin(config.neighbor((r, c), 2)));
        }
    }
    e
}

/// Energy change of swapping two neighboring sites, from the bonds touching
/// them. Bonds joining the pair itself are unchanged by the swap.
pub fn delta_energy(config: &LatticeConfig, a: Site, b: Site, m: &InteractionMatrix) -> Result<f64> {
    if !config.are_neighbors(a, b) {
        return Err(Error::Input(format!("sites {a:?} and {b:?} are not nearest neighbors")));
    }
    Ok(local_delta(config, a, b, m))
}

pub(crate) fn local_delta(config: &LatticeConfig, a: Site, b: Site, m: &InteractionMatrix) -> f64 {
    let (sa, sb) = (config.spin(a), config.spin(b));
    if sa == sb {
        return 0.0;
    }
    let mut delta = 0.0;
    for d in 0..4 {
        let na = config.neighbor(a, d);
        if na != b {
            let s = config.spin(na);
            delta += m.get(sb, s) - m.get(sa, s);
        }
        let nb = config.neighbor(b, d);
        if nb != a {
            let s = config.spin(nb);
            delta += m.get(sa, s) - m.get(sb, s);
        }
    }
    delta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_rng;

    fn lattice(side: usize, sites: &[(Site, Spin)]) -> LatticeConfig {
        let mut spins = vec![0; side * side];
        for &((r, c), s) in sites {
            spins[r * side + c] = s;
        }
        LatticeConfig::from_spins(side, spins, 1.0).unwrap()
    }

    #[test]
    fn composition_from_fraction() {
        let l = init_lattice(10, 0.8, 3).unwrap();
        assert_eq!(l.composition(), [10, 80, 10]);
        let l = init_lattice(5, 0.5, 3).unwrap();
        let [a, s, b] = l.composition();
        assert_eq!(s, 13);
        assert!(a.abs_diff(b) <= 1);
        let all = init_lattice(6, 1.0, 1).unwrap();
        assert_eq!(hamiltonian(&all, &InteractionMatrix::default()), 0.0);
        assert_eq!(init_lattice(8, 0.3, 42).unwrap(), init_lattice(8, 0.3, 42).unwrap());
        assert_ne!(init_lattice(8, 0.3, 42).unwrap(), init_lattice(8, 0.3, 43).unwrap());
        assert!(init_lattice(1, 0.5, 0).is_err());
        assert!(init_lattice(4, 1.5, 0).is_err());
    }

    #[test]
    fn hamiltonian_examples() {
        let m = InteractionMatrix::default();
        let pair = lattice(4, &[((1, 1), -1), ((1, 2), 1)]);
        assert_eq!(hamiltonian(&pair, &m), 10.0);
        let checker: Vec<Spin> = (0..16).map(|i| if (i / 4 + i % 4) % 2 == 0 { -1 } else { 1 }).collect();
        let cb = LatticeConfig::from_spins(4, checker, 0.0).unwrap();
        assert_eq!(hamiltonian(&cb, &m), 128.0);
    }

    #[test]
    fn delta_examples() {
        let m = InteractionMatrix::default();
        let pair = lattice(4, &[((1, 1), -1), ((1, 2), 1)]);
        assert_eq!(delta_energy(&pair, (1, 1), (1, 2), &m).unwrap(), 0.0);
        assert_eq!(delta_energy(&pair, (2, 2), (2, 3), &m).unwrap(), 0.0);
        assert!(delta_energy(&pair, (0, 0), (1, 1), &m).is_err());
        // wrap-around neighbors are adjacent
        assert!(delta_energy(&pair, (0, 0), (3, 0), &m).is_ok());
    }

    #[test]
    fn delta_matches_full_recompute() {
        let m = InteractionMatrix::default();
        for side in [2, 3, 8] {
            let mut rng = make_rng(side as u64);
            let spins: Vec<Spin> = (0..side * side).map(|_| rng.below(3) as Spin - 1).collect();
            let mut l = LatticeConfig::from_spins(side, spins, 1.0).unwrap();
            for _ in 0..10_000 {
                let a = (rng.below(side), rng.below(side));
                let b = l.neighbor(a, rng.below(4));
                let before = hamiltonian(&l, &m);
                let d = delta_energy(&l, a, b, &m).unwrap();
                l.swap(a, b);
                let after = hamiltonian(&l, &m);
                assert!(
                    (after - before - d).abs() <= 1e-9,
                    "side {side}: {d} vs {}",
                    after - before
                );
            }
        }
    }

    #[test]
    fn interaction_matrix_validation() {
        assert!(InteractionMatrix::new([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [3.0, 1.0, 0.0]]).is_err());
        assert!(InteractionMatrix::new([[1.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]]).is_err());
        let m = InteractionMatrix::default();
        assert_eq!(m.get(-1, 1), 4.0);
        assert_eq!(m.get(0, 1), 1.0);
    }
}
