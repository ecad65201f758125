use ndarray::{Array2, ArrayView1};
use serde::Serialize;

use super::model::{drift, mean_temperature, running_cost, MfgParams};
use crate::numerics::{integrate_midpoint, norm_l1_diff};
use crate::{Error, Result};

/// Forward transport of the density by explicit conservative upwinding.
///
/// `u` holds one control row per time level (`n_time + 1` rows, the last is
/// unused); step `n -> n + 1` uses row `n`. Interface velocities take the
/// arithmetic mean of the two adjacent controls. Both boundary fluxes are
/// zero. Returns the trajectory (`n_time + 1` rows) and its mean-temperature
/// trace.
pub fn kfp_forward(u: &Array2<f64>, m0: &[f64], p: &MfgParams) -> Result<(Array2<f64>, Vec<f64>)> {
    p.check_cfl()?;
    let nx = p.grid.n_cells();
    let nt = p.n_time;
    if m0.len() != nx || u.dim() != (nt + 1, nx) {
        return Err(Error::Dimension(format!(
            "control {:?} and density {} on a {}x{} space-time grid",
            u.dim(),
            m0.len(),
            nt + 1,
            nx
        )));
    }
    let ratio = p.dt() / p.grid.h();
    let mut m = Array2::zeros((nt + 1, nx));
    m.row_mut(0).assign(&ArrayView1::from(m0));
    let mut mbar = Vec::with_capacity(nt + 1);
    mbar.push(mean_temperature(m0, &p.grid)?);

    let mut flux = vec![0.0; nx + 1];
    for n in 0..nt {
        let (prev, ctrl) = (m.row(n), u.row(n));
        for i in 1..nx {
            let f = drift(p.grid.interface(i), 0.5 * (ctrl[i - 1] + ctrl[i]), p);
            flux[i] = f.max(0.0) * prev[i - 1] + f.min(0.0) * prev[i];
        }
        let next: Vec<f64> = (0..nx).map(|i| prev[i] - ratio * (flux[i + 1] - flux[i])).collect();
        if let Some(v) = next.iter().find(|v| !v.is_finite()) {
            return Err(Error::Numerical {
                step: n + 1,
                msg: format!("density became {v}"),
            });
        }
        mbar.push(mean_temperature(&next, &p.grid)?);
        m.row_mut(n + 1).assign(&ArrayView1::from(&next[..]));
    }
    Ok((m, mbar))
}

/// Godunov-style one-sided difference for a candidate with drift `f`: the
/// cost-to-go at `x` looks ahead along `x + f dt`.
fn upwind_gradient(v: ArrayView1<f64>, i: usize, f: f64, dx: f64) -> f64 {
    let last = v.len() - 1;
    if (f > 0.0 && i < last) || i == 0 {
        (v[i + 1] - v[i]) / dx
    } else {
        (v[i] - v[i - 1]) / dx
    }
}

/// One HJB update at cell `i`: Hamiltonian value and maximizing control.
fn hamiltonian(v: ArrayView1<f64>, i: usize, mbar: f64, p: &MfgParams) -> (f64, f64) {
    let x = p.grid.center(i);
    let value = |s: f64| {
        let f = drift(x, s, p);
        -f * upwind_gradient(v, i, f, p.grid.h()) - running_cost(x, s, mbar, p)
    };
    let (off, on) = (value(0.0), value(1.0));
    if on > off {
        (on, 1.0)
    } else {
        (off, 0.0)
    }
}

/// Backward march of `-v_t + sup_s {-f(x, s) v_x - g(x, s, mbar)} = 0` from
/// `v(T) = psi`.
///
/// Step `n + 1 -> n` evaluates the Hamiltonian on `v^{n+1}` with
/// `mbar[n + 1]`; each candidate control gets its own upwinded gradient.
/// Row `n` of the returned control is the maximizer chosen on that step; the
/// last row is the maximizer on the terminal data.
pub fn hjb_backward(mbar: &[f64], p: &MfgParams, psi: &[f64]) -> Result<(Array2<f64>, Array2<f64>)> {
    p.check_cfl()?;
    let nx = p.grid.n_cells();
    let nt = p.n_time;
    if psi.len() != nx || mbar.len() != nt + 1 {
        return Err(Error::Dimension(format!(
            "terminal data {} and mean trace {} on a {}x{} space-time grid",
            psi.len(),
            mbar.len(),
            nt + 1,
            nx
        )));
    }
    let dt = p.dt();
    let mut v = Array2::zeros((nt + 1, nx));
    let mut u = Array2::zeros((nt + 1, nx));
    v.row_mut(nt).assign(&ArrayView1::from(psi));
    for i in 0..nx {
        u[[nt, i]] = hamiltonian(v.row(nt), i, mbar[nt], p).1;
    }
    for n in (0..nt).rev() {
        for i in 0..nx {
            let (ham, s) = hamiltonian(v.row(n + 1), i, mbar[n + 1], p);
            let val = v[[n + 1, i]] - dt * ham;
            if !val.is_finite() {
                return Err(Error::Numerical {
                    step: nt - n,
                    msg: format!("value function became {val}"),
                });
            }
            v[[n, i]] = val;
            u[[n, i]] = s;
        }
    }
    Ok((v, u))
}

/// Iteration controls for [`picard_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    /// Weight of the new best response in the control update, in `(0, 1]`.
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tol: 1e-6,
            max_iter: 200,
        }
    }
}

/// Density, cost-to-go and control on the space-time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MfgState {
    pub m: Array2<f64>,
    pub v: Array2<f64>,
    /// Bang-bang best response to the final mean-temperature trace.
    pub u: Array2<f64>,
    /// Damped control that transported the final density.
    pub u_relaxed: Array2<f64>,
    pub mbar: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardReport {
    pub iterations: usize,
    /// Max over time levels of the L1 change in `m`, one entry per iteration.
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub damping: f64,
    /// Worst `|mass - 1|` over all time levels, per forward solve (the
    /// initial solve first).
    pub mass_errors: Vec<f64>,
    /// Smallest density value, per forward solve.
    pub min_density: Vec<f64>,
}

/// Damped Picard iteration between the HJB and transport solves.
///
/// Starts from `u = 0`. Each iteration computes the best response to the
/// current mean trace, blends it into the control with weight `damping`,
/// and re-solves the transport. Stops once successive density trajectories
/// differ by at most `tol`; hitting `max_iter` is reported through
/// `converged = false`, not as an error.
pub fn picard_solve(p: &MfgParams, m0: &[f64], psi: &[f64], opts: PicardOptions) -> Result<(MfgState, PicardReport)> {
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::Input(format!(
            "damping must lie in (0, 1], got {}",
            opts.damping
        )));
    }
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::Input("tol must be positive and max_iter at least 1".into()));
    }
    let shape = (p.n_time + 1, p.grid.n_cells());
    let mut control = Array2::zeros(shape);
    let (mut m, mut mbar) = kfp_forward(&control, m0, p)?;
    let mut report = PicardReport {
        iterations: 0,
        residuals: Vec::new(),
        converged: false,
        damping: opts.damping,
        mass_errors: Vec::new(),
        min_density: Vec::new(),
    };
    track(&m, p, &mut report)?;

    loop {
        let (_, best_response) = hjb_backward(&mbar, p, psi)?;
        control = &control * (1.0 - opts.damping) + &best_response * opts.damping;
        let (m_next, mbar_next) = kfp_forward(&control, m0, p)?;
        track(&m_next, p, &mut report)?;
        let residual = m_next
            .rows()
            .into_iter()
            .zip(m.rows())
            .map(|(a, b)| norm_l1_diff(a.as_slice().unwrap(), b.as_slice().unwrap(), &p.grid))
            .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)))?;
        if !residual.is_finite() {
            return Err(Error::Numerical {
                step: report.iterations + 1,
                msg: "Picard residual is not finite".into(),
            });
        }
        m = m_next;
        mbar = mbar_next;
        report.iterations += 1;
        report.residuals.push(residual);
        if residual <= opts.tol {
            report.converged = true;
            break;
        }
        if report.iterations >= opts.max_iter {
            break;
        }
    }
    // best response and value consistent with the returned density
    let (v, best_response) = hjb_backward(&mbar, p, psi)?;
    Ok((
        MfgState {
            m,
            v,
            u: best_response,
            u_relaxed: control,
            mbar,
        },
        report,
    ))
}

fn track(m: &Array2<f64>, p: &MfgParams, report: &mut PicardReport) -> Result<()> {
    let mut worst = 0.0f64;
    for row in m.rows() {
        let mass = integrate_midpoint(row.as_slice().unwrap(), &p.grid)?;
        worst = worst.max((mass - 1.0).abs());
    }
    report.mass_errors.push(worst);
    report.min_density.push(m.iter().copied().fold(f64::INFINITY, f64::min));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mfg::{initial_density, optimal_control};
    use crate::numerics::Grid1D;

    fn params(lo: f64, hi: f64, nx: usize, alpha: f64, t: f64, nt: usize) -> MfgParams {
        let grid = Grid1D::new(lo, hi, nx).unwrap();
        MfgParams::new(alpha, (1.0, 1.0, 1.0, 1.0), grid, t, nt, 0.9).unwrap()
    }

    #[test]
    fn boundary_controls_conserve_mass() {
        let p = params(0.0, 1.0, 50, 1.0, 0.5, 100);
        let m0 = initial_density(&p.grid, -0.5, 0.5, 0.2).unwrap();
        let mut u = Array2::zeros((101, 50));
        for n in 0..101 {
            for i in 0..25 {
                u[[n, i]] = 1.0;
            }
        }
        let (m, _) = kfp_forward(&u, &m0, &p).unwrap();
        for row in m.rows() {
            let mass = integrate_midpoint(row.as_slice().unwrap(), &p.grid).unwrap();
            assert!((mass - 1.0).abs() <= 1e-12);
            assert!(row.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn idle_population_warms_monotonically() {
        let p = params(0.0, 1.0, 40, 1.0, 1.0, 100);
        let m0 = initial_density(&p.grid, -0.3, 0.3, 0.1).unwrap();
        let u = Array2::zeros((101, 40));
        let (_, mbar) = kfp_forward(&u, &m0, &p).unwrap();
        for w in mbar.windows(2) {
            assert!(w[1] >= w[0] - 1e-15, "{w:?}");
        }
        assert!(mbar[100] > mbar[0] + 0.1);
    }

    #[test]
    fn point_mass_single_flux() {
        let p = params(0.0, 1.0, 10, 1.0, 0.01, 1);
        let mut m0 = vec![0.0; 10];
        m0[3] = 1.0 / p.grid.h();
        let u = Array2::zeros((2, 10));
        let (m, _) = kfp_forward(&u, &m0, &p).unwrap();
        let f = drift(p.grid.interface(4), 0.0, &p);
        assert!(f > 0.0);
        let moved = p.dt() / p.grid.h() * (f * m0[3]);
        assert_eq!(m[[1, 3]], m0[3] - moved);
        assert_eq!(m[[1, 4]], moved);
        let rest: f64 = (0..10).filter(|&i| i != 3 && i != 4).map(|i| m[[1, i]].abs()).sum();
        assert_eq!(rest, 0.0);
    }

    #[test]
    fn cfl_violation_names_admissible_step() {
        let p = params(0.0, 1.0, 10, 1.0, 1.0, 5);
        let m0 = vec![1.0; 10];
        let err = kfp_forward(&Array2::zeros((6, 10)), &m0, &p).unwrap_err();
        assert!(matches!(err, Error::Stability { .. }));
        assert!(err.to_string().contains("admissible dt"));
        assert!(hjb_backward(&[0.0; 6], &p, &m0).is_err());
    }

    #[test]
    fn zero_cost_fixed_point() {
        let grid = Grid1D::new(-1.0, 1.0, 20).unwrap();
        // q = 0 is outside the constructor's contract
        let mut p = MfgParams::new(0.5, (1.0, 1.0, 1.0, 1.0), grid, 0.1, 20, 0.9).unwrap();
        p.q = 0.0;
        let (v, u) = hjb_backward(&[0.0; 21], &p, &[0.0; 20]).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
        assert!(u.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn first_backward_step_picks_cheaper_control() {
        let p = params(-1.0, 1.0, 20, 0.5, 0.1, 20);
        for mb in [0.0, -0.3, 0.4] {
            let mbar = vec![mb; 21];
            let (v, u) = hjb_backward(&mbar, &p, &[0.0; 20]).unwrap();
            let minus = 0.5 * (mb - f64::abs(mb));
            for i in 0..20 {
                let x = p.grid.center(i);
                let want = p.dt() * (p.q * x * x + p.k * minus);
                assert!((v[[19, i]] - want).abs() <= 1e-15, "{} vs {want}", v[[19, i]]);
                assert_eq!(u[[19, i]], 0.0);
            }
        }
    }

    #[test]
    fn recorded_control_is_the_hamiltonian_maximizer() {
        let p = params(-25.0, 25.0, 100, 0.2, 1.0, 200);
        let m0 = initial_density(&p.grid, 10.0, 10.0, 7.0).unwrap();
        let mbar: Vec<f64> = (0..=200).map(|n| 0.3 * (n as f64 / 30.0).sin()).collect();
        let (v, u) = hjb_backward(&mbar, &p, &vec![0.0; 100]).unwrap();
        assert_eq!(m0.len(), 100);
        let dx = p.grid.h();
        let mut agreed = 0;
        for n in 0..200 {
            let next = v.row(n + 1);
            for i in 1..99 {
                let fwd = (next[i + 1] - next[i]) / dx;
                let bwd = (next[i] - next[i - 1]) / dx;
                let (a, b) = (
                    optimal_control(fwd, mbar[n + 1], &p),
                    optimal_control(bwd, mbar[n + 1], &p),
                );
                assert!(u[[n, i]] == 0.0 || u[[n, i]] == 1.0);
                if a == b {
                    assert_eq!(u[[n, i]], a, "step {n} cell {i}");
                    agreed += 1;
                }
            }
        }
        assert!(agreed > 200 * 98 * 9 / 10);
    }

    #[test]
    fn one_step_horizon_converges_immediately() {
        let p = params(-25.0, 25.0, 50, 0.2, 1e-3, 1);
        let m0 = initial_density(&p.grid, 10.0, 10.0, 7.0).unwrap();
        let (state, report) = picard_solve(&p, &m0, &vec![0.0; 50], PicardOptions::default()).unwrap();
        assert!(report.converged);
        assert!(report.iterations <= 2);
        assert_eq!(*report.residuals.last().unwrap(), 0.0);
        assert_eq!(state.m.nrows(), 2);
    }

    #[test]
    fn nonconvergence_is_reported() {
        let p = params(-25.0, 25.0, 50, 0.2, 1.0, 200);
        let m0 = initial_density(&p.grid, 10.0, 10.0, 7.0).unwrap();
        let opts = PicardOptions {
            damping: 0.5,
            tol: 1e-14,
            max_iter: 1,
        };
        let (_, report) = picard_solve(&p, &m0, &vec![0.0; 50], opts).unwrap();
        assert!(!report.converged);
        assert_eq!(report.iterations, 1);
        let bad = PicardOptions { damping: 0.0, ..opts };
        assert!(picard_solve(&p, &m0, &vec![0.0; 50], bad).is_err());
    }
}
