use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::{json, Map, Value};

use enersim_core::mfg::MfgConfig;
use enersim_core::morph_mc::{init_lattice, run_mc, InteractionMatrix};
use enersim_core::morph_pde::{run_pde, PdeConfig};
use enersim_core::numerics::make_rng_stream;
use enersim_core::syndata::{
    build_bins, fit_tables, load_table, make_benchmark_table, sample_synthetic, CorrelationReport, Depth, OrderPolicy,
};

use crate::manifest::RunManifest;
use crate::Failure;

type Outcome = Result<u8, Failure>;

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Source CSV (header row, numeric body).
    #[arg(long, required_unless_present = "benchmark_rows", conflicts_with = "benchmark_rows")]
    input: Option<PathBuf>,
    /// Use the built-in five-feature benchmark table with this many rows
    /// instead of an input file; it is written as `original.csv`.
    #[arg(long)]
    benchmark_rows: Option<usize>,
    /// Bins per feature.
    #[arg(long, default_value_t = 8)]
    bins: usize,
    /// Conditioning depth: 1 marginals, 2 pairs, 3 triplets.
    #[arg(long, default_value_t = 3)]
    depth: u8,
    /// Synthetic rows to draw.
    #[arg(long, default_value_t = 1000)]
    rows: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Feature order per row: `fixed` or `random`.
    #[arg(long, default_value = "fixed")]
    order: String,
    /// Prepended verbatim to every output file name.
    #[arg(long, default_value = "")]
    out_prefix: String,
}

#[derive(Debug, Args)]
pub struct MfgArgs {
    /// JSON config; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key, e.g. `--set max_iter=50`. Repeatable; wins
    /// over the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, default_value = "")]
    out_prefix: String,
}

#[derive(Debug, Args)]
pub struct MorphMcArgs {
    /// Lattice side length in sites.
    #[arg(long, default_value_t = 64)]
    size: usize,
    /// Fraction of solvent sites.
    #[arg(long, default_value_t = 0.8)]
    solvent: f64,
    /// Inverse temperature.
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    #[arg(long, default_value_t = 500)]
    sweeps: usize,
    /// Write a snapshot every this many sweeps (the initial lattice is
    /// always written).
    #[arg(long, default_value_t = 100)]
    snapshot_every: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "")]
    out_prefix: String,
}

#[derive(Debug, Args)]
pub struct MorphPdeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, default_value = "")]
    out_prefix: String,
}

pub fn synth(a: SynthArgs) -> Outcome {
    let depth = Depth::try_from(a.depth).map_err(Failure::config)?;
    let policy: OrderPolicy = a.order.parse().map_err(Failure::config)?;
    if a.bins == 0 {
        return Err(Failure::config("--bins must be at least 1"));
    }
    if a.rows == 0 {
        return Err(Failure::config("--rows must be at least 1"));
    }
    prepare_prefix(&a.out_prefix)?;

    let mut written = Vec::new();
    let original = match (&a.input, a.benchmark_rows) {
        (Some(path), _) => load_table(path).map_err(Failure::config)?,
        (None, Some(rows)) => {
            let t = make_benchmark_table(rows, a.seed).map_err(Failure::config)?;
            let path = out(&a.out_prefix, "original.csv");
            t.write_csv(&path)?;
            written.push(path);
            t
        }
        (None, None) => unreachable!("clap requires one source"),
    };

    let scheme = build_bins(&original, a.bins).map_err(Failure::config)?;
    let tables = fit_tables(&original, &scheme, depth)?;
    // stream 0 is reserved for the benchmark table
    let mut rng = make_rng_stream(a.seed, 1);
    let synthetic = sample_synthetic(&tables, &scheme, a.rows, policy, &mut rng)?;
    let report = CorrelationReport::new(&original, &synthetic)?;

    let path = out(&a.out_prefix, "synthetic.csv");
    synthetic.write_csv(&path)?;
    written.push(path);
    let path = out(&a.out_prefix, "tables.json");
    write_text(&path, &tables.to_json(&scheme)?)?;
    written.push(path);
    let path = out(&a.out_prefix, "corr_report.csv");
    report.write_csv(&path)?;
    written.push(path);

    let config = json!({
        "input": a.input.as_ref().map(|p| p.display().to_string()),
        "benchmark_rows": a.benchmark_rows,
        "bins": a.bins,
        "depth": a.depth,
        "rows": a.rows,
        "order": match policy { OrderPolicy::Fixed => "fixed", OrderPolicy::RandomPerRow => "random" },
        "max_abs_pearson_diff": report.max_abs_diff(),
    });
    RunManifest::new("synth", Some(a.seed), config).write(&a.out_prefix, &written)?;
    eprintln!("max |delta pearson| = {:.4}", report.max_abs_diff());
    Ok(0)
}

pub fn mfg(a: MfgArgs) -> Outcome {
    let value = resolve_config(&MfgConfig::default(), a.config.as_deref(), &a.overrides)?;
    let config: MfgConfig = serde_json::from_value(value).map_err(Failure::config)?;
    // parameter and stability validation happen before any work
    config.params().map_err(Failure::config)?;
    prepare_prefix(&a.out_prefix)?;

    let (params, state, report) = config.solve()?;
    let mut written = state.write_outputs(&params, &a.out_prefix)?;
    let path = out(&a.out_prefix, "report.json");
    report.write_json(&path)?;
    written.push(path);
    let resolved = serde_json::to_value(&config).map_err(Failure::runtime)?;
    RunManifest::new("mfg", None, resolved).write(&a.out_prefix, &written)?;

    if report.converged {
        Ok(0)
    } else {
        let last = report.residuals.last().copied().unwrap_or(f64::NAN);
        eprintln!(
            "enersim: Picard iteration did not converge in {} iterations (residual {last:e})",
            report.iterations
        );
        Ok(3)
    }
}

pub fn morph_mc(a: MorphMcArgs) -> Outcome {
    if a.size < 2 {
        return Err(Failure::config("--size must be at least 2"));
    }
    if !(0.0..=1.0).contains(&a.solvent) {
        return Err(Failure::config(format!(
            "--solvent must lie in [0, 1], got {}",
            a.solvent
        )));
    }
    if !(a.beta >= 0.0 && a.beta.is_finite()) {
        return Err(Failure::config(format!(
            "--beta must be finite and >= 0, got {}",
            a.beta
        )));
    }
    prepare_prefix(&a.out_prefix)?;

    let mut lattice = init_lattice(a.size, a.solvent, a.seed).map_err(Failure::config)?;
    lattice.beta = a.beta;
    let matrix = InteractionMatrix::default();
    let mut rng = make_rng_stream(a.seed, 1);
    let run = run_mc(&lattice, &matrix, a.sweeps, a.snapshot_every, &mut rng);
    let written = run.write_outputs(&a.out_prefix)?;

    let config = json!({
        "size": a.size,
        "solvent": a.solvent,
        "beta": a.beta,
        "sweeps": a.sweeps,
        "snapshot_every": a.snapshot_every,
        "initial_energy": run.initial_energy,
        "final_energy": run.energies.last().copied().unwrap_or(run.initial_energy),
    });
    RunManifest::new("morph-mc", Some(a.seed), config).write(&a.out_prefix, &written)?;
    Ok(0)
}

pub fn morph_pde(a: MorphPdeArgs) -> Outcome {
    let value = resolve_config(&PdeConfig::default(), a.config.as_deref(), &a.overrides)?;
    let config: PdeConfig = serde_json::from_value(value).map_err(Failure::config)?;
    let (fields, kernel, params) = config.prepare().map_err(Failure::config)?;
    prepare_prefix(&a.out_prefix)?;

    let run = run_pde(&fields, &kernel, &params)?;
    let written = run.write_outputs(&a.out_prefix, config.dump_fields)?;
    let mut resolved = serde_json::to_value(&config).map_err(Failure::runtime)?;
    resolved["dt"] = json!(run.dt);
    resolved["steps"] = json!(run.steps);
    RunManifest::new("morph-pde", Some(config.seed), resolved).write(&a.out_prefix, &written)?;
    Ok(0)
}

/// Defaults, then the file, then `--set` overrides. A value that does not
/// parse as JSON is taken as a string.
fn resolve_config<T: serde::Serialize>(
    defaults: &T,
    file: Option<&Path>,
    overrides: &[String],
) -> Result<Value, Failure> {
    let mut value = serde_json::to_value(defaults).map_err(Failure::runtime)?;
    let target = value.as_object_mut().expect("configs serialize to objects");
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        let parsed: Value =
            serde_json::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        let Value::Object(entries) = parsed else {
            return Err(Failure::config(format!(
                "{}: config must be a JSON object",
                path.display()
            )));
        };
        merge(target, entries);
    }
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| Failure::config(format!("--set expects KEY=VALUE, got `{item}`")))?;
        let v = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        target.insert(key.trim().to_string(), v);
    }
    Ok(value)
}

fn merge(target: &mut Map<String, Value>, entries: Map<String, Value>) {
    for (k, v) in entries {
        target.insert(k, v);
    }
}

fn out(prefix: &str, name: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{name}"))
}

/// Creates the directory part of an output prefix such as `runs/a/` or
/// `runs/a/case1_`.
fn prepare_prefix(prefix: &str) -> Result<(), Failure> {
    let dir = if prefix.ends_with('/') {
        Some(Path::new(prefix))
    } else {
        Path::new(prefix).parent()
    };
    match dir {
        Some(d) if !d.as_os_str().is_empty() => {
            std::fs::create_dir_all(d).map_err(|e| Failure::runtime(format!("{}: {e}", d.display())))
        }
        _ => Ok(()),
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_win_over_file_and_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("c.json");
        std::fs::write(&file, r#"{"alpha": 0.5, "n_cells": 50}"#).unwrap();
        let sets = ["n_cells=60".to_string(), "tol=1e-8".to_string()];
        let v = resolve_config(&MfgConfig::default(), Some(&file), &sets).unwrap();
        let c: MfgConfig = serde_json::from_value(v).unwrap();
        assert_eq!((c.alpha, c.n_cells, c.tol, c.r), (0.5, 60, 1e-8, 1.0));
    }

    #[test]
    fn non_json_override_becomes_a_string() {
        let v = resolve_config(&PdeConfig::default(), None, &["beta=hot".to_string()]).unwrap();
        assert_eq!(v["beta"], "hot");
        assert!(serde_json::from_value::<PdeConfig>(v).is_err());
        assert_eq!(
            resolve_config(&PdeConfig::default(), None, &["beta".to_string()])
                .unwrap_err()
                .code,
            2
        );
    }

    #[test]
    fn prefix_directories_are_created() {
        let dir = tempfile::tempdir().unwrap();
        let nested = format!("{}/a/b/run_", dir.path().display());
        prepare_prefix(&nested).unwrap();
        assert!(dir.path().join("a/b").is_dir());
        prepare_prefix("").unwrap();
        prepare_prefix("plain_").unwrap();
    }
}
