use ndarray::Array2;

use crate::numerics::Grid2DPeriodic;
use crate::{Error, Result};

/// Sampled convolution kernel `J` and its centered-difference gradient.
///
/// `J` is the radial bump `exp(-1 / (1 - (rho/eps)^2))` for `rho < eps`,
/// normalized to unit discrete mass. Arrays are indexed by periodic offset.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    grid: Grid2DPeriodic,
    epsilon: f64,
    values: Array2<f64>,
    grad_x: Array2<f64>,
    grad_y: Array2<f64>,
    /// `(d_row, d_col, gx, gy)` for one offset of each `(d, -d)` pair with a
    /// nonzero gradient; the partner carries `(-gx, -gy)` exactly.
    half_stencil: Vec<(isize, isize, f64, f64)>,
}

impl KernelSpec {
    pub fn new(grid: Grid2DPeriodic, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5 * grid.side_length()) {
            return Err(Error::Input(format!(
                "kernel range must lie in (0, {}), got {epsilon}",
                0.5 * grid.side_length()
            )));
        }
        let n = grid.n();
        let h = grid.h();
        let mut values = Array2::from_shape_fn((n, n), |(a, b)| {
            let da = grid.min_image(a as isize) as f64;
            let db = grid.min_image(b as isize) as f64;
            let rho = h * (da * da + db * db).sqrt() / epsilon;
            if rho < 1.0 {
                (-1.0 / (1.0 - rho * rho)).exp()
            } else {
                0.0
            }
        });
        let mass = values.sum() * grid.cell_area();
        values.mapv_inplace(|v| v / mass);

        let w = |i: isize| grid.wrap(i);
        let grad_x = Array2::from_shape_fn((n, n), |(a, b)| {
            let (a, b) = (a as isize, b as isize);
            (values[[w(a + 1), w(b)]] - values[[w(a - 1), w(b)]]) / (2.0 * h)
        });
        let grad_y = Array2::from_shape_fn((n, n), |(a, b)| {
            let (a, b) = (a as isize, b as isize);
            (values[[w(a), w(b + 1)]] - values[[w(a), w(b - 1)]]) / (2.0 * h)
        });

        let mut half_stencil = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let (gx, gy) = (grad_x[[a, b]], grad_y[[a, b]]);
                if gx == 0.0 && gy == 0.0 {
                    continue;
                }
                let da = grid.min_image(a as isize);
                let db = grid.min_image(b as isize);
                if da > 0 || (da == 0 && db > 0) {
                    half_stencil.push((da, db, gx, gy));
                }
            }
        }
        Ok(Self {
            grid,
            epsilon,
            values,
            grad_x,
            grad_y,
            half_stencil,
        })
    }

    pub fn grid(&self) -> &Grid2DPeriodic {
        &self.grid
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `J` at periodic offset `(a, b)`.
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn grad_x(&self) -> &Array2<f64> {
        &self.grad_x
    }

    pub fn grad_y(&self) -> &Array2<f64> {
        &self.grad_y
    }

    /// `sum |grad J| h^2`, a bound on `|grad J * m|` for `|m| <= 1`.
    pub fn grad_l1(&self) -> f64 {
        self.grad_x
            .iter()
            .zip(self.grad_y.iter())
            .map(|(x, y)| x.hypot(*y))
            .sum::<f64>()
            * self.grid.cell_area()
    }
}

/// Discrete circular convolution `(grad J * f)(x) = sum_y grad J(x - y) f(y) h^2`.
///
/// Sums over the kernel's compact support, pairing each offset with its
/// mirror so a constant field gives exactly zero.
pub fn conv_grad(field: &Array2<f64>, kernel: &KernelSpec) -> Result<(Array2<f64>, Array2<f64>)> {
    let n = kernel.grid.n();
    if field.dim() != (n, n) {
        return Err(Error::Dimension(format!(
            "field {:?} on a {n}x{n} kernel grid",
            field.dim()
        )));
    }
    let reach = kernel
        .half_stencil
        .iter()
        .map(|&(da, db, _, _)| da.unsigned_abs().max(db.unsigned_abs()))
        .max()
        .unwrap_or(0);
    let padded = pad_periodic(field, reach);
    let width = n + 2 * reach;
    let mut cx = Array2::zeros((n, n));
    let mut cy = Array2::zeros((n, n));
    let (sx, sy) = (cx.as_slice_mut().unwrap(), cy.as_slice_mut().unwrap());
    let r = reach as isize;
    for &(da, db, gx, gy) in &kernel.half_stencil {
        for i in 0..n {
            let behind_row = (i as isize - da + r) as usize * width;
            let ahead_row = (i as isize + da + r) as usize * width;
            let behind = &padded[behind_row + (r - db) as usize..][..n];
            let ahead = &padded[ahead_row + (r + db) as usize..][..n];
            let out_x = &mut sx[i * n..(i + 1) * n];
            for ((o, b), a) in out_x.iter_mut().zip(behind).zip(ahead) {
                *o += gx * (b - a);
            }
            let out_y = &mut sy[i * n..(i + 1) * n];
            for ((o, b), a) in out_y.iter_mut().zip(behind).zip(ahead) {
                *o += gy * (b - a);
            }
        }
    }
    let area = kernel.grid.cell_area();
    cx.mapv_inplace(|v| v * area);
    cy.mapv_inplace(|v| v * area);
    Ok((cx, cy))
}

/// Row-major copy of `field` with a periodic halo of `reach` cells.
fn pad_periodic(field: &Array2<f64>, reach: usize) -> Vec<f64> {
    let n = field.nrows();
    let width = n + 2 * reach;
    let wrap = |k: usize| (k + n * (reach / n + 1) - reach) % n;
    let mut out = Vec::with_capacity(width * width);
    for a in 0..width {
        let row = field.row(wrap(a));
        out.extend((0..width).map(|b| row[wrap(b)]));
    }
    out
}
