use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

#[derive(Debug, Serialize)]
struct OutputEntry {
    file: String,
    sha256: String,
}

/// `run.json`: what ran, with which resolved settings, and digests of every
/// file it wrote. File names are relative to the output prefix so reruns
/// into different directories produce identical manifests.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    subcommand: &'static str,
    tool_version: &'static str,
    rng_algorithm: &'static str,
    seed: Option<u64>,
    config: serde_json::Value,
    outputs: Vec<OutputEntry>,
}

impl RunManifest {
    pub fn new(subcommand: &'static str, seed: Option<u64>, config: serde_json::Value) -> Self {
        Self {
            subcommand,
            tool_version: env!("CARGO_PKG_VERSION"),
            rng_algorithm: enersim_core::numerics::RNG_ALGORITHM,
            seed,
            config,
            outputs: Vec::new(),
        }
    }

    pub fn write(mut self, prefix: &str, files: &[PathBuf]) -> Result<PathBuf, Failure> {
        for path in files {
            let bytes = std::fs::read(path).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
            self.outputs.push(OutputEntry {
                file: relative_name(prefix, path),
                sha256: hex::encode(Sha256::digest(&bytes)),
            });
        }
        let path = PathBuf::from(format!("{prefix}run.json"));
        let text = serde_json::to_string_pretty(&self).map_err(Failure::runtime)?;
        std::fs::write(&path, text + "\n").map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

fn relative_name(prefix: &str, path: &Path) -> String {
    let s = path.to_string_lossy();
    s.strip_prefix(prefix).unwrap_or(&s).to_string()
}
