use std::path::PathBuf;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use super::scheme::{admissible_dt, step_explicit, FieldPair, PdeParams};
use crate::io::{fmt_real, write_csv_records, write_csv_rows, write_ppm, Rgb};
use crate::numerics::{make_rng, Grid2DPeriodic};
use crate::{Error, Result};

/// Near-homogeneous mixture: `phi = phi_bar + noise` with
/// `phi_bar = 1 - solvent_fraction`, and `m = noise`, both noises zero-mean
/// with sup-norm `amplitude`.
pub fn init_random_mixture(
    grid: Grid2DPeriodic,
    solvent_fraction: f64,
    amplitude: f64,
    seed: u64,
) -> Result<FieldPair> {
    if !(0.0..=1.0).contains(&solvent_fraction) {
        return Err(Error::Input(format!(
            "solvent fraction must lie in [0, 1], got {solvent_fraction}"
        )));
    }
    let phi_bar = 1.0 - solvent_fraction;
    let max_amp = 0.5 * phi_bar.min(1.0 - phi_bar);
    if !(amplitude >= 0.0 && amplitude <= max_amp) {
        return Err(Error::Input(format!(
            "amplitude must lie in [0, {max_amp}] for solvent fraction {solvent_fraction}, got {amplitude}"
        )));
    }
    let n = grid.n();
    let mut rng = make_rng(seed);
    let mut zero_mean_noise = || {
        let raw = Array2::from_shape_fn((n, n), |_| 2.0 * rng.uniform() - 1.0);
        let centered = &raw - raw.mean().unwrap_or(0.0);
        let peak = centered.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if peak > 0.0 && amplitude > 0.0 {
            centered * (amplitude / peak)
        } else {
            Array2::zeros((n, n))
        }
    };
    let phi = zero_mean_noise() + phi_bar;
    let m = zero_mean_noise();
    FieldPair::new(grid, m, phi)
}

/// Per-record diagnostics of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub step: usize,
    pub time: f64,
    pub mass_m: f64,
    pub mass_phi: f64,
    pub min_m: f64,
    pub max_m: f64,
    pub min_phi: f64,
    pub max_phi: f64,
    pub max_bound_violation: f64,
}

impl Diagnostics {
    fn of(fields: &FieldPair, step: usize, time: f64) -> Self {
        let range = |a: &Array2<f64>| {
            a.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
        };
        let (min_m, max_m) = range(&fields.m);
        let (min_phi, max_phi) = range(&fields.phi);
        Self {
            step,
            time,
            mass_m: fields.mass_m(),
            mass_phi: fields.mass_phi(),
            min_m,
            max_m,
            min_phi,
            max_phi,
            max_bound_violation: fields.bound_violation(),
        }
    }
}

/// Snapshots and diagnostics at step 0, every `snapshot_every` steps and at
/// the final step.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeRun {
    pub dt: f64,
    pub steps: usize,
    pub snapshots: Vec<(usize, FieldPair)>,
    pub diagnostics: Vec<Diagnostics>,
}

/// Integrates to `params.t_final` with a uniform step no larger than
/// `params.dt`.
pub fn run_pde(fields0: &FieldPair, kernel: &KernelSpec, params: &PdeParams) -> Result<PdeRun> {
    if !(params.t_final > 0.0 && params.dt > 0.0) {
        return Err(Error::Input("T_final and dt must be positive".into()));
    }
    if !fields0.is_finite() {
        return Err(Error::Numerical {
            step: 0,
            msg: "initial fields are not finite".into(),
        });
    }
    let steps = ((params.t_final / params.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let step_params = PdeParams {
        dt: params.t_final / steps as f64,
        ..*params
    };
    let every = params.snapshot_every.max(1);
    let mut run = PdeRun {
        dt: step_params.dt,
        steps,
        snapshots: vec![(0, fields0.clone())],
        diagnostics: vec![Diagnostics::of(fields0, 0, 0.0)],
    };
    let mut fields = fields0.clone();
    for step in 1..=steps {
        fields = step_explicit(&fields, kernel, &step_params)?;
        if !fields.is_finite() {
            return Err(Error::Numerical {
                step,
                msg: "non-finite field value".into(),
            });
        }
        if step % every == 0 || step == steps {
            let time = params.t_final * step as f64 / steps as f64;
            run.diagnostics.push(Diagnostics::of(&fields, step, time));
            run.snapshots.push((step, fields.clone()));
        }
    }
    Ok(run)
}

/// Three-color rendering: solvent-dominant cells (`1 - phi > 0.5`) red,
/// otherwise blue for `m < 0` (A-rich) and yellow for B-rich.
pub fn render(fields: &FieldPair) -> Vec<Rgb> {
    fields
        .m
        .iter()
        .zip(fields.phi.iter())
        .map(|(&m, &phi)| {
            if 1.0 - phi > 0.5 {
                [255, 0, 0]
            } else if m < 0.0 {
                [0, 0, 255]
            } else {
                [255, 255, 0]
            }
        })
        .collect()
}

/// JSON configuration of a continuum run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdeConfig {
    pub side_length: f64,
    pub n_cells_per_side: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub solvent_fraction: f64,
    pub amplitude: f64,
    #[serde(rename = "T_final")]
    pub t_final: f64,
    /// Chosen from an a-priori drift bound when absent.
    pub dt: Option<f64>,
    pub snapshot_every: usize,
    pub seed: u64,
    /// Also dump `m` and `phi` as CSV at every snapshot.
    pub dump_fields: bool,
}

impl Default for PdeConfig {
    fn default() -> Self {
        Self {
            side_length: 128.0,
            n_cells_per_side: 128,
            beta: 4.0,
            epsilon: 4.0,
            solvent_fraction: 0.8,
            amplitude: 0.05,
            t_final: 100.0,
            dt: None,
            snapshot_every: 100,
            seed: 1,
            dump_fields: false,
        }
    }
}

impl PdeConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn grid(&self) -> Result<Grid2DPeriodic> {
        Grid2DPeriodic::new(self.side_length, self.n_cells_per_side)
    }

    pub fn kernel(&self) -> Result<KernelSpec> {
        KernelSpec::new(self.grid()?, self.epsilon)
    }

    pub fn initial_fields(&self) -> Result<FieldPair> {
        init_random_mixture(self.grid()?, self.solvent_fraction, self.amplitude, self.seed)
    }

    /// Step used when `dt` is not configured: the stability limit for the
    /// worst drift `2 beta sum|grad J| h^2 max(1, max|m0|)`.
    pub fn auto_dt(&self, kernel: &KernelSpec, fields: &FieldPair) -> f64 {
        let m_max = fields.m.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let speed = 2.0 * self.beta * kernel.grad_l1() * m_max;
        admissible_dt(kernel.grid().h(), speed)
    }

    /// Validates and builds everything `run_pde` needs. A configured `dt`
    /// above the limit for the initial data is a stability error.
    pub fn prepare(&self) -> Result<(FieldPair, KernelSpec, PdeParams)> {
        if !(self.beta >= 0.0) || !(self.t_final > 0.0) {
            return Err(Error::Input("beta must be >= 0 and T_final > 0".into()));
        }
        let kernel = self.kernel()?;
        let fields = self.initial_fields()?;
        let dt = match self.dt {
            Some(dt) if !(dt > 0.0) => return Err(Error::Input(format!("dt must be positive, got {dt}"))),
            Some(dt) => {
                let (cx, cy) = super::conv_grad(&fields.m, &kernel)?;
                let speed = 2.0 * self.beta * cx.iter().chain(cy.iter()).fold(0.0f64, |a, v| a.max(v.abs()));
                let limit = admissible_dt(kernel.grid().h(), speed);
                if dt > limit {
                    return Err(Error::Stability { dt, admissible: limit });
                }
                dt
            }
            None => self.auto_dt(&kernel, &fields),
        };
        let params = PdeParams {
            beta: self.beta,
            t_final: self.t_final,
            dt,
            snapshot_every: self.snapshot_every,
        };
        Ok((fields, kernel, params))
    }
}

impl PdeRun {
    /// Writes `diagnostics.csv`, one `snap_%06d.ppm` per snapshot and, with
    /// `dump_fields`, `m_%06d.csv` / `phi_%06d.csv`.
    pub fn write_outputs(&self, prefix: &str, dump_fields: bool) -> Result<Vec<PathBuf>> {
        let diag = PathBuf::from(format!("{prefix}diagnostics.csv"));
        let header = [
            "step",
            "time",
            "mass_m",
            "mass_phi",
            "min_m",
            "max_m",
            "min_phi",
            "max_phi",
            "max_bound_violation",
        ]
        .map(String::from);
        write_csv_records(
            &diag,
            &header,
            self.diagnostics.iter().map(|d| {
                let mut row = vec![d.step.to_string()];
                row.extend(
                    [
                        d.time,
                        d.mass_m,
                        d.mass_phi,
                        d.min_m,
                        d.max_m,
                        d.min_phi,
                        d.max_phi,
                        d.max_bound_violation,
                    ]
                    .map(fmt_real),
                );
                row
            }),
        )?;
        let mut written = vec![diag];
        for (step, fields) in &self.snapshots {
            let n = fields.grid.n();
            let path = PathBuf::from(format!("{prefix}snap_{step:06}.ppm"));
            write_ppm(&path, n, n, &render(fields))?;
            written.push(path);
            if dump_fields {
                let header: Vec<String> = (0..n).map(|j| format!("c{j}")).collect();
                for (name, field) in [("m", &fields.m), ("phi", &fields.phi)] {
                    let path = PathBuf::from(format!("{prefix}{name}_{step:06}.csv"));
                    write_csv_rows(&path, &header, field.rows().into_iter().map(|r| r.to_vec()))?;
                    written.push(path);
                }
            }
        }
        Ok(written)
    }
}
