//! Simulation engines for energy-systems mathematics.
//!
//! * [`syndata`]: binned marginal/conditional fitting of a numeric table and
//!   correlation-preserving synthetic sampling.
//! * [`mfg`]: first-order mean-field game for thermostatic cooling, solved by
//!   damped Picard iteration on an upwind finite-volume grid.
//! * [`morph_mc`]: Kawasaki spin-exchange Monte Carlo for a three-species
//!   Blume-Capel lattice.
//! * [`morph_pde`]: explicit finite-volume integrator for the nonlocal
//!   two-field (magnetization, concentration) continuum system.
//!
//! [`numerics`] carries the grids, quadrature and seeded RNG shared by all of
//! them; [`io`] has the CSV and PPM writers.

// `!(x > 0.0)` is the idiom used throughout to reject NaN along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod io;
pub mod mfg;
pub mod morph_mc;
pub mod morph_pde;
pub mod numerics;
pub mod syndata;

pub use error::{Error, Result};
