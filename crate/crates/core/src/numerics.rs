//! Grids, midpoint quadrature and the seeded random stream shared by every
//! engine.
//!
//! All grids are cell-centered.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Uniform cell-centered grid on the open interval `(x_lo, x_hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_lo: f64,
    x_hi: f64,
    n_cells: usize,
}

impl Grid1D {
    pub fn new(x_lo: f64, x_hi: f64, n_cells: usize) -> Result<Self> {
        if !(x_lo.is_finite() && x_hi.is_finite()) || x_hi <= x_lo {
            return Err(Error::Input(format!(
                "grid needs finite x_hi > x_lo, got ({x_lo}, {x_hi})"
            )));
        }
        if n_cells < 2 {
            return Err(Error::Input(format!("grid needs at least 2 cells, got {n_cells}")));
        }
        Ok(Self { x_lo, x_hi, n_cells })
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn length(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    /// Cell width.
    pub fn h(&self) -> f64 {
        self.length() / self.n_cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_lo + (i as f64 + 0.5) * self.h()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }

    /// Coordinate of interface `i`, between cells `i - 1` and `i`; interface 0
    /// is `x_lo` and interface `n_cells` is `x_hi`.
    pub fn interface(&self, i: usize) -> f64 {
        if i == self.n_cells {
            self.x_hi
        } else {
            self.x_lo + i as f64 * self.h()
        }
    }
}

/// Square periodic grid with `n` cells per side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2DPeriodic {
    side_length: f64,
    n: usize,
}

impl Grid2DPeriodic {
    pub fn new(side_length: f64, n_cells_per_side: usize) -> Result<Self> {
        if !(side_length.is_finite() && side_length > 0.0) {
            return Err(Error::Input(format!("side length must be positive, got {side_length}")));
        }
        if n_cells_per_side == 0 {
            return Err(Error::Input("periodic grid needs at least one cell per side".into()));
        }
        Ok(Self {
            side_length,
            n: n_cells_per_side,
        })
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.side_length / self.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.h() * self.h()
    }

    /// Reduces any signed index into `0..n`.
    pub fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.n as isize) as usize
    }

    /// Neighbor of `(row, col)` shifted by `(d_row, d_col)` with periodic wrap.
    pub fn shift(&self, (row, col): (usize, usize), d_row: isize, d_col: isize) -> (usize, usize) {
        (self.wrap(row as isize + d_row), self.wrap(col as isize + d_col))
    }

    /// Minimal-image signed offset for an index difference.
    pub fn min_image(&self, d: isize) -> isize {
        let n = self.n as isize;
        let d = d.rem_euclid(n);
        if 2 * d > n {
            d - n
        } else {
            d
        }
    }
}

/// Midpoint-rule integral `h * sum(values)`.
pub fn integrate_midpoint(values: &[f64], grid: &Grid1D) -> Result<f64> {
    check_len(values.len(), grid)?;
    Ok(grid.h() * compensated_sum(values.iter().copied()))
}

/// Discrete L1 distance `h * sum |a - b|`.
pub fn norm_l1_diff(a: &[f64], b: &[f64], grid: &Grid1D) -> Result<f64> {
    check_len(a.len(), grid)?;
    check_len(b.len(), grid)?;
    Ok(grid.h() * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// Neumaier-compensated summation.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn check_len(len: usize, grid: &Grid1D) -> Result<()> {
    if len != grid.n_cells() {
        return Err(Error::Dimension(format!(
            "array of length {len} on a grid of {} cells",
            grid.n_cells()
        )));
    }
    Ok(())
}

/// Identifier of the generator behind [`RngStream`].
pub const RNG_ALGORITHM: &str = "chacha8";

/// Seeded, single-consumer random stream.
///
/// Backed by ChaCha8 (a counter-based stream cipher) seeded through
/// `seed_from_u64`, so a seed reproduces the same sequence on every platform.
/// Uniform reals take the top 53 bits of one 64-bit output.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

/// Creates the stream for `seed`.
pub fn make_rng(seed: u64) -> RngStream {
    RngStream {
        seed,
        inner: ChaCha8Rng::seed_from_u64(seed),
    }
}

/// Independent stream `stream` under the same seed; stream 0 is
/// [`make_rng`].
pub fn make_rng_stream(seed: u64, stream: u64) -> RngStream {
    let mut inner = ChaCha8Rng::seed_from_u64(seed);
    inner.set_stream(stream);
    RngStream { seed, inner }
}

impl RngStream {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm(&self) -> &'static str {
        RNG_ALGORITHM
    }

    /// Uniform real in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop, prop_assert, proptest};

    #[test]
    fn midpoint_of_constants() {
        let g = Grid1D::new(0.0, 1.0, 10).unwrap();
        assert_eq!(integrate_midpoint(&[1.0; 10], &g).unwrap(), 1.0);
        assert_eq!(integrate_midpoint(&[0.0; 10], &g).unwrap(), 0.0);
    }

    #[test]
    fn midpoint_exact_for_linear() {
        let g = Grid1D::new(0.0, 1.0, 100).unwrap();
        let v = integrate_midpoint(&g.centers(), &g).unwrap();
        assert!((v - 0.5).abs() < 1e-15, "{v}");
    }

    #[test]
    fn length_mismatch_is_dimension_error() {
        let g = Grid1D::new(0.0, 1.0, 4).unwrap();
        assert!(matches!(integrate_midpoint(&[1.0; 3], &g), Err(Error::Dimension(_))));
        assert!(matches!(
            norm_l1_diff(&[1.0; 4], &[1.0; 5], &g),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn l1_examples() {
        let g = Grid1D::new(0.0, 1.0, 8).unwrap();
        let a = [0.3; 8];
        assert_eq!(norm_l1_diff(&a, &a, &g).unwrap(), 0.0);
        assert_eq!(norm_l1_diff(&[1.0; 8], &[0.0; 8], &g).unwrap(), 1.0);
        let g2 = Grid1D::new(0.0, 2.0, 8).unwrap();
        assert_eq!(norm_l1_diff(&[2.0; 8], &[-1.0; 8], &g2).unwrap(), 6.0);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(Grid1D::new(1.0, 1.0, 4).is_err());
        assert!(Grid1D::new(0.0, 1.0, 1).is_err());
        assert!(Grid2DPeriodic::new(0.0, 4).is_err());
    }

    #[test]
    fn centers_and_interfaces() {
        let g = Grid1D::new(-1.0, 1.0, 4).unwrap();
        assert_eq!(g.centers(), vec![-0.75, -0.25, 0.25, 0.75]);
        assert_eq!(g.interface(0), -1.0);
        assert_eq!(g.interface(4), 1.0);
    }

    #[test]
    fn periodic_wrap() {
        let g = Grid2DPeriodic::new(1.0, 4).unwrap();
        assert_eq!(g.wrap(-1), 3);
        assert_eq!(g.wrap(4), 0);
        let mut p = (1, 2);
        for _ in 0..4 {
            p = g.shift(p, 0, 1);
        }
        assert_eq!(p, (1, 2));
        for _ in 0..4 {
            p = g.shift(p, -1, 0);
        }
        assert_eq!(p, (1, 2));
        assert_eq!(g.min_image(3), -1);
        assert_eq!(g.min_image(-3), 1);
    }

    #[test]
    fn rng_is_reproducible() {
        let mut a = make_rng(42);
        let mut b = make_rng(42);
        for _ in 0..1000 {
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
        let mut c = make_rng(1);
        let mut d = make_rng(2);
        let x: Vec<u64> = (0..16).map(|_| c.next_u64()).collect();
        let y: Vec<u64> = (0..16).map(|_| d.next_u64()).collect();
        assert_ne!(x, y);
        assert_eq!(a.algorithm(), "chacha8");
        let mut s0 = make_rng_stream(5, 0);
        let mut s1 = make_rng_stream(5, 1);
        let mut base = make_rng(5);
        let z0: Vec<u64> = (0..8).map(|_| s0.next_u64()).collect();
        let zb: Vec<u64> = (0..8).map(|_| base.next_u64()).collect();
        let z1: Vec<u64> = (0..8).map(|_| s1.next_u64()).collect();
        assert_eq!(z0, zb);
        assert_ne!(z0, z1);
    }

    #[test]
    fn rng_uniform_mean() {
        let mut r = make_rng(7);
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
            sum += u;
        }
        assert!((sum / n as f64 - 0.5).abs() < 0.002);
    }

    #[test]
    fn rng_below_in_range() {
        let mut r = make_rng(3);
        let mut seen = [false; 5];
        for _ in 0..1000 {
            seen[r.below(5)] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    proptest! {
        #[test]
        fn midpoint_constant(c in -1e3f64..1e3, lo in -50f64..50.0, len in 0.01f64..100.0, n in 2usize..500) {
            let g = Grid1D::new(lo, lo + len, n).unwrap();
            let v = integrate_midpoint(&vec![c; n], &g).unwrap();
            let exact = c * g.length();
            let ulp = f64::EPSILON * exact.abs().max(f64::MIN_POSITIVE);
            prop_assert!((v - exact).abs() <= 4.0 * ulp, "{} vs {}", v, exact);
        }

        #[test]
        fn l1_triangle(a in prop::collection::vec(-10f64..10.0, 6),
                       b in prop::collection::vec(-10f64..10.0, 6),
                       c in prop::collection::vec(-10f64..10.0, 6)) {
            let g = Grid1D::new(0.0, 3.0, 6).unwrap();
            let ab = norm_l1_diff(&a, &b, &g).unwrap();
            let bc = norm_l1_diff(&b, &c, &g).unwrap();
            let ac = norm_l1_diff(&a, &c, &g).unwrap();
            prop_assert!(ab >= 0.0);
            prop_assert!(ac <= ab + bc + 1e-12);
        }
    }
}
