//! First-order mean-field game for a population of thermostatically
//! controlled cooling devices.
//!
//! Temperatures `x` in `(x_lo, x_hi)` drift with `f(x, u) = -alpha x + sigma u + c`
//! where `sigma = -alpha (x_hi - x_lo)` and `c = alpha x_hi`, so an idle device
//! (`u = 0`) relaxes toward `x_hi` and a running one (`u = 1`) toward `x_lo`.
//! The density `m` is transported forward by that drift; the cost-to-go `v`
//! solves the backward HJB equation whose pointwise maximizer is the
//! bang-bang control. The two are coupled through the mean temperature
//! `mbar(t)` and solved by damped Picard iteration.

mod config;
mod model;
mod solver;

pub use config::MfgConfig;
pub use model::{drift, initial_density, mean_temperature, optimal_control, running_cost, MfgParams};
pub use solver::{hjb_backward, kfp_forward, picard_solve, MfgState, PicardOptions, PicardReport};
