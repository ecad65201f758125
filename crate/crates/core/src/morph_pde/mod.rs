//! Explicit finite-volume integrator for the nonlocal two-field system
//!
//! ```text
//! dm/dt   = div[ grad m   - 2 beta (phi - m^2) (grad J * m) ]
//! dphi/dt = div[ grad phi - 2 beta m (1 - phi) (grad J * m) ]
//! ```
//!
//! on a periodic square, where `m` is the local magnetization (A vs B),
//! `phi` the local polymer concentration (`1 - phi` is solvent) and `J` a
//! smooth unit-mass kernel. With `phi = 1` the second equation is trivially
//! satisfied and the first reduces to a scalar nonlocal Cahn-Hilliard-type
//! equation.

mod kernel;
mod run;
mod scheme;

pub use kernel::{conv_grad, KernelSpec};
pub use run::{init_random_mixture, render, run_pde, Diagnostics, PdeConfig, PdeRun};
pub use scheme::{admissible_dt, step_explicit, FieldPair, PdeParams};
