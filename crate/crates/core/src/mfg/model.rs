use crate::numerics::{integrate_midpoint, Grid1D};
use crate::{Error, Result};

/// Model and discretization parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfgParams {
    pub alpha: f64,
    pub r: f64,
    pub q: f64,
    pub h: f64,
    pub k: f64,
    pub grid: Grid1D,
    pub t_final: f64,
    pub n_time: usize,
    /// Courant number bounding `dt * max|f| / dx`.
    pub cfl: f64,
}

impl MfgParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: f64,
        (r, q, h, k): (f64, f64, f64, f64),
        grid: Grid1D,
        t_final: f64,
        n_time: usize,
        cfl: f64,
    ) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Input(format!("{name} must be positive, got {v}")))
            }
        };
        positive("alpha", alpha)?;
        positive("r", r)?;
        positive("q", q)?;
        positive("h", h)?;
        positive("k", k)?;
        positive("T", t_final)?;
        positive("cfl", cfl)?;
        if n_time == 0 {
            return Err(Error::Input("n_time must be at least 1".into()));
        }
        Ok(Self {
            alpha,
            r,
            q,
            h,
            k,
            grid,
            t_final,
            n_time,
            cfl,
        })
    }

    /// Drift coefficient of the control, `-alpha (x_hi - x_lo)`.
    pub fn sigma(&self) -> f64 {
        -self.alpha * self.grid.length()
    }

    /// Drift offset, `alpha x_hi`.
    pub fn c(&self) -> f64 {
        self.alpha * self.grid.x_hi()
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.n_time as f64
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t_final * n as f64 / self.n_time as f64
    }

    /// `sup |f|` over the domain and admissible controls.
    pub fn max_speed(&self) -> f64 {
        self.alpha * self.grid.length()
    }

    pub fn admissible_dt(&self) -> f64 {
        self.cfl * self.grid.h() / self.max_speed()
    }

    pub(crate) fn check_cfl(&self) -> Result<()> {
        let dt = self.dt();
        if dt > self.admissible_dt() {
            return Err(Error::Stability {
                dt,
                admissible: self.admissible_dt(),
            });
        }
        Ok(())
    }
}

/// `f(x, u) = -alpha x + sigma u + c`.
pub fn drift(x: f64, u: f64, p: &MfgParams) -> f64 {
    -p.alpha * x + p.sigma() * u + p.c()
}

/// `g(x, u, mbar) = r u + q x^2 + h mbar+ u + k mbar- (1 - u)`.
pub fn running_cost(x: f64, u: f64, mbar: f64, p: &MfgParams) -> f64 {
    let plus = 0.5 * (mbar + mbar.abs());
    let minus = 0.5 * (mbar - mbar.abs());
    p.r * u + p.q * x * x + p.h * plus * u + p.k * minus * (1.0 - u)
}

/// First moment `h * sum x_i m_i` of a unit-mass density.
pub fn mean_temperature(m: &[f64], grid: &Grid1D) -> Result<f64> {
    let mass = integrate_midpoint(m, grid)?;
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::Consistency(format!("density has mass {mass}, expected 1")));
    }
    if let Some(v) = m.iter().find(|v| **v < 0.0) {
        return Err(Error::Consistency(format!("negative density value {v}")));
    }
    let h = grid.h();
    Ok(m.iter().enumerate().map(|(i, mi)| grid.center(i) * mi).sum::<f64>() * h)
}

/// Maximizer over `s` in `[0, 1]` of `-f(x, s) v_x - g(x, s, mbar)`.
///
/// The maximand is affine in `s` with slope
/// `-sigma v_x - r - h mbar+ + k mbar-`, so the answer is 1 for a positive
/// slope and 0 otherwise (ties go to 0).
pub fn optimal_control(dv_dx: f64, mbar: f64, p: &MfgParams) -> f64 {
    let plus = 0.5 * (mbar + mbar.abs());
    let minus = 0.5 * (mbar - mbar.abs());
    let slope = -p.sigma() * dv_dx - p.r - p.h * plus + p.k * minus;
    if slope > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Two Gaussian bumps centred at `-mu1` and `mu2` with width `sigma0`,
/// sampled at cell centers and renormalized to unit midpoint mass.
pub fn initial_density(grid: &Grid1D, mu1: f64, mu2: f64, sigma0: f64) -> Result<Vec<f64>> {
    if !(sigma0.is_finite() && sigma0 > 0.0) {
        return Err(Error::Input(format!("sigma0 must be positive, got {sigma0}")));
    }
    let var = sigma0 * sigma0;
    let pref = 1.0 / (2.0 * std::f64::consts::PI * var).sqrt();
    let mut m: Vec<f64> = grid
        .centers()
        .into_iter()
        .map(|x| pref * ((-(x + mu1).powi(2) / var).exp() + (-(x - mu2).powi(2) / var).exp()))
        .collect();
    let mass = integrate_midpoint(&m, grid)?;
    if !(mass >= 1e-30) {
        return Err(Error::Input(format!(
            "initial density has mass {mass:e} inside the domain"
        )));
    }
    m.iter_mut().for_each(|v| *v /= mass);
    Ok(m)
}
