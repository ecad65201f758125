use std::path::PathBuf;

use super::lattice::{hamiltonian, local_delta, InteractionMatrix, LatticeConfig};
use crate::io::{fmt_real, write_csv_records, write_ppm};
use crate::numerics::RngStream;
use crate::Result;

/// Counters of one sweep.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepStats {
    pub proposals: usize,
    pub accepted: usize,
    /// Sum of the energy changes of accepted moves.
    pub energy_change: f64,
}

impl SweepStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }
}

/// One spin-exchange proposal: uniform site, uniform neighbor direction,
/// Metropolis acceptance `min(1, exp(-beta dH))`. Returns `dH` if accepted.
pub fn kawasaki_step(config: &mut LatticeConfig, m: &InteractionMatrix, rng: &mut RngStream) -> Option<f64> {
    let n = config.side();
    let site = rng.below(n * n);
    let a = (site / n, site % n);
    let b = config.neighbor(a, rng.below(4));
    let delta = local_delta(config, a, b, m);
    let accept = delta <= 0.0 || rng.uniform() < (-config.beta * delta).exp();
    if accept {
        config.swap(a, b);
        Some(delta)
    } else {
        None
    }
}

/// `side^2` proposals.
pub fn kawasaki_sweep(config: &mut LatticeConfig, m: &InteractionMatrix, rng: &mut RngStream) -> SweepStats {
    let proposals = config.side() * config.side();
    let mut stats = SweepStats {
        proposals,
        ..SweepStats::default()
    };
    for _ in 0..proposals {
        if let Some(d) = kawasaki_step(config, m, rng) {
            stats.accepted += 1;
            stats.energy_change += d;
        }
    }
    stats
}

/// Result of [`run_mc`].
#[derive(Debug, Clone, PartialEq)]
pub struct McRun {
    pub initial_energy: f64,
    pub final_config: LatticeConfig,
    /// Energy after each sweep.
    pub energies: Vec<f64>,
    pub acceptance_rates: Vec<f64>,
    /// `(sweep, lattice)`, starting with the initial lattice at sweep 0.
    pub snapshots: Vec<(usize, LatticeConfig)>,
}

impl McRun {
    /// Writes `energy.csv` (sweep, H, acceptance_rate) and one
    /// `snap_%06d.ppm` per snapshot under `prefix`.
    pub fn write_outputs(&self, prefix: &str) -> Result<Vec<PathBuf>> {
        let energy = PathBuf::from(format!("{prefix}energy.csv"));
        let header = ["sweep", "H", "acceptance_rate"].map(String::from);
        write_csv_records(
            &energy,
            &header,
            self.energies
                .iter()
                .zip(&self.acceptance_rates)
                .enumerate()
                .map(|(s, (&e, &a))| vec![(s + 1).to_string(), fmt_real(e), fmt_real(a)]),
        )?;
        let mut written = vec![energy];
        for (sweep, lattice) in &self.snapshots {
            let path = PathBuf::from(format!("{prefix}snap_{sweep:06}.ppm"));
            let n = lattice.side();
            write_ppm(&path, n, n, &lattice.pixels())?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Runs `sweeps` sweeps, recording the full energy after each and a
/// snapshot every `snapshot_every` sweeps.
pub fn run_mc(
    config: &LatticeConfig,
    m: &InteractionMatrix,
    sweeps: usize,
    snapshot_every: usize,
    rng: &mut RngStream,
) -> McRun {
    let every = snapshot_every.max(1);
    let mut current = config.clone();
    let mut run = McRun {
        initial_energy: hamiltonian(config, m),
        final_config: config.clone(),
        energies: Vec::with_capacity(sweeps),
        acceptance_rates: Vec::with_capacity(sweeps),
        snapshots: vec![(0, config.clone())],
    };
    for sweep in 1..=sweeps {
        let stats = kawasaki_sweep(&mut current, m, rng);
        run.energies.push(hamiltonian(&current, m));
        run.acceptance_rates.push(stats.acceptance_rate());
        if sweep % every == 0 {
            run.snapshots.push((sweep, current.clone()));
        }
    }
    run.final_config = current;
    run
}
