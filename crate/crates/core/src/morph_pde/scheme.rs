use ndarray::Array2;

use super::kernel::{conv_grad, KernelSpec};
use crate::numerics::Grid2DPeriodic;
use crate::{Error, Result};

/// Magnetization `m` and polymer concentration `phi` on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair {
    pub grid: Grid2DPeriodic,
    pub m: Array2<f64>,
    pub phi: Array2<f64>,
}

impl FieldPair {
    pub fn new(grid: Grid2DPeriodic, m: Array2<f64>, phi: Array2<f64>) -> Result<Self> {
        let n = grid.n();
        if m.dim() != (n, n) || phi.dim() != (n, n) {
            return Err(Error::Dimension(format!(
                "fields {:?} and {:?} on a {n}x{n} grid",
                m.dim(),
                phi.dim()
            )));
        }
        Ok(Self { grid, m, phi })
    }

    pub fn mass_m(&self) -> f64 {
        self.m.sum() * self.grid.cell_area()
    }

    pub fn mass_phi(&self) -> f64 {
        self.phi.sum() * self.grid.cell_area()
    }

    /// Largest violation of `0 <= phi <= 1` and `m^2 <= phi`, zero if none.
    pub fn bound_violation(&self) -> f64 {
        self.m
            .iter()
            .zip(self.phi.iter())
            .map(|(&m, &p)| (m * m - p).max(-p).max(p - 1.0).max(0.0))
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().chain(self.phi.iter()).all(|v| v.is_finite())
    }
}

/// Time-stepping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeParams {
    /// Inverse temperature.
    pub beta: f64,
    pub t_final: f64,
    pub dt: f64,
    /// Record diagnostics and a snapshot every this many steps.
    pub snapshot_every: usize,
}

/// Explicit stability limit `min(h^2 / 8, h / (2 max|w|))` with
/// `w = 2 beta (grad J * m)`.
pub fn admissible_dt(h: f64, max_speed: f64) -> f64 {
    let diffusive = h * h / 8.0;
    if max_speed > 0.0 {
        diffusive.min(h / (2.0 * max_speed))
    } else {
        diffusive
    }
}

/// One forward-Euler finite-volume step.
///
/// Face fluxes: centered two-point diffusion plus an advective part with the
/// face-averaged velocity. For `phi` the coefficient `m (1 - phi)` comes from
/// the upwind cell. For `m` the mobility `phi - m^2` is split as
/// `(sqrt(phi) + m)` from the upwind cell times `(sqrt(phi) - m)` from the
/// downwind one, which shuts off inflow into a cell at `m = sqrt(phi)` and
/// outflow from one at `m = -sqrt(phi)`. Both fields use the convolution of
/// the pre-step `m`.
pub fn step_explicit(fields: &FieldPair, kernel: &KernelSpec, params: &PdeParams) -> Result<FieldPair> {
    let grid = fields.grid;
    if kernel.grid() != &grid {
        return Err(Error::Dimension("kernel and fields live on different grids".into()));
    }
    let (cx, cy) = conv_grad(&fields.m, kernel)?;
    let scale = 2.0 * params.beta;
    let wx = cx.mapv(|c| scale * c);
    let wy = cy.mapv(|c| scale * c);
    let max_speed = wx.iter().chain(wy.iter()).fold(0.0f64, |a, v| a.max(v.abs()));
    let h = grid.h();
    let limit = admissible_dt(h, max_speed);
    if params.dt > limit {
        return Err(Error::Stability {
            dt: params.dt,
            admissible: limit,
        });
    }

    let n = grid.n();
    let (m, phi) = (&fields.m, &fields.phi);
    // flux_*[d][[i, j]]: flux through the face between (i, j) and its
    // successor along axis d
    let mut flux_m = [Array2::zeros((n, n)), Array2::zeros((n, n))];
    let mut flux_phi = [Array2::zeros((n, n)), Array2::zeros((n, n))];
    for i in 0..n {
        let ip = (i + 1) % n;
        for j in 0..n {
            let jp = (j + 1) % n;
            let here = (i, j);
            for (axis, w, next) in [(0, &wx, (ip, j)), (1, &wy, (i, jp))] {
                let vel = 0.5 * (w[here] + w[next]);
                let (up, down) = if vel > 0.0 { (here, next) } else { (next, here) };
                let (mu, pu) = (m[up], phi[up]);
                let mobility = (root(pu) + mu) * (root(phi[down]) - m[down]);
                flux_m[axis][here] = -(m[next] - m[here]) / h + vel * mobility;
                flux_phi[axis][here] = -(phi[next] - phi[here]) / h + vel * (mu * (1.0 - pu));
            }
        }
    }

    let ratio = params.dt / h;
    let update = |field: &Array2<f64>, flux: &[Array2<f64>; 2]| {
        Array2::from_shape_fn((n, n), |(i, j)| {
            let west = ((i + n - 1) % n, j);
            let south = (i, (j + n - 1) % n);
            let div = (flux[0][[i, j]] - flux[0][west]) + (flux[1][[i, j]] - flux[1][south]);
            field[[i, j]] - ratio * div
        })
    };
    Ok(FieldPair {
        grid,
        m: update(m, &flux_m),
        phi: update(phi, &flux_phi),
    })
}

fn root(phi: f64) -> f64 {
    phi.max(0.0).sqrt()
}
