//! Kawasaki spin-exchange Monte Carlo for a three-species lattice mixture.
//!
//! Sites carry spin -1 (polymer A), 0 (solvent) or +1 (polymer B). The
//! energy sums a symmetric interaction matrix over nearest-neighbor bonds of
//! a periodic square lattice; moves swap the contents of two neighboring
//! sites, so species counts never change.

mod lattice;
mod sampler;

pub use lattice::{delta_energy, hamiltonian, init_lattice, InteractionMatrix, LatticeConfig, Site, Spin};
pub use sampler::{kawasaki_step, kawasaki_sweep, run_mc, McRun, SweepStats};
