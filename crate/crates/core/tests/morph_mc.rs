use enersim_core::morph_mc::{hamiltonian, init_lattice, run_mc, InteractionMatrix, LatticeConfig};
use enersim_core::numerics::make_rng_stream;

#[test]
fn cold_mixture_coarsens() {
    let m = InteractionMatrix::default();
    let mut lattice = init_lattice(64, 0.8, 9).unwrap();
    lattice.beta = 2.0;
    let run = run_mc(&lattice, &m, 200, 50, &mut make_rng_stream(9, 1));
    assert_eq!(run.energies.len(), 200);
    assert_eq!(run.snapshots.len(), 5);
    let tail: f64 = run.energies[150..].iter().sum::<f64>() / 50.0;
    assert!(tail < 0.8 * run.initial_energy, "{tail} vs {}", run.initial_energy);
    assert_eq!(run.final_config.composition(), lattice.composition());
    assert_eq!(*run.energies.last().unwrap(), hamiltonian(&run.final_config, &m));
}

#[test]
fn hot_mixture_stays_mixed() {
    let m = InteractionMatrix::default();
    let lattice = init_lattice(32, 0.5, 3).unwrap();
    let run = run_mc(&lattice, &m, 50, 50, &mut make_rng_stream(3, 1));
    assert!(run.acceptance_rates.iter().all(|&a| a == 1.0));
    let mean: f64 = run.energies.iter().sum::<f64>() / 50.0;
    assert!((mean - run.initial_energy).abs() < 0.1 * run.initial_energy);
}

#[test]
fn custom_interactions_and_pure_lattices() {
    // without any A-B or polymer-solvent penalty every lattice has zero energy
    let free = InteractionMatrix::new([[0.0; 3]; 3]).unwrap();
    let mut lattice = init_lattice(16, 0.3, 1).unwrap();
    lattice.beta = 5.0;
    let run = run_mc(&lattice, &free, 5, 5, &mut make_rng_stream(1, 1));
    assert!(run.energies.iter().all(|&e| e == 0.0));

    let pure = LatticeConfig::from_spins(4, vec![0; 16], 1.0).unwrap();
    assert_eq!(hamiltonian(&pure, &InteractionMatrix::default()), 0.0);
    assert!(LatticeConfig::from_spins(4, vec![2; 16], 1.0).is_err());
}

#[test]
fn outputs_follow_the_file_layout() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = format!("{}/run_", dir.path().display());
    let lattice = init_lattice(8, 0.5, 2).unwrap();
    let run = run_mc(
        &lattice,
        &InteractionMatrix::default(),
        6,
        3,
        &mut make_rng_stream(2, 1),
    );
    let files = run.write_outputs(&prefix).unwrap();
    let names: Vec<String> = files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        names,
        [
            "run_energy.csv",
            "run_snap_000000.ppm",
            "run_snap_000003.ppm",
            "run_snap_000006.ppm"
        ]
    );
    let energy = std::fs::read_to_string(&files[0]).unwrap();
    assert_eq!(energy.lines().next().unwrap(), "sweep,H,acceptance_rate");
    assert_eq!(energy.lines().count(), 7);
    let ppm = std::fs::read(&files[1]).unwrap();
    assert!(ppm.starts_with(b"P6\n8 8\n255\n"));
    assert_eq!(ppm.len(), b"P6\n8 8\n255\n".len() + 8 * 8 * 3);
}
