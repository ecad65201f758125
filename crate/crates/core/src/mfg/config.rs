use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{initial_density, picard_solve, MfgParams, MfgState, PicardOptions, PicardReport};
use crate::io::{fmt_real, write_csv_rows};
use crate::numerics::Grid1D;
use crate::{Error, Result};

/// JSON configuration of a cooling-game run. Missing keys take the
/// desk-scale defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MfgConfig {
    pub alpha: f64,
    pub r: f64,
    pub q: f64,
    pub h: f64,
    pub k: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub n_cells: usize,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub n_time: usize,
    pub mu1: f64,
    pub mu2: f64,
    pub sigma0: f64,
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub cfl: f64,
}

impl Default for MfgConfig {
    fn default() -> Self {
        Self {
            alpha: 0.2,
            r: 1.0,
            q: 1.0,
            h: 1.0,
            k: 1.0,
            x_lo: -25.0,
            x_hi: 25.0,
            n_cells: 200,
            t_final: 1.0,
            n_time: 1000,
            mu1: 10.0,
            mu2: 10.0,
            sigma0: 7.0,
            damping: 0.5,
            tol: 1e-6,
            max_iter: 200,
            cfl: 0.9,
        }
    }
}

impl MfgConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn params(&self) -> Result<MfgParams> {
        let grid = Grid1D::new(self.x_lo, self.x_hi, self.n_cells)?;
        let p = MfgParams::new(
            self.alpha,
            (self.r, self.q, self.h, self.k),
            grid,
            self.t_final,
            self.n_time,
            self.cfl,
        )?;
        p.check_cfl()?;
        Ok(p)
    }

    pub fn options(&self) -> PicardOptions {
        PicardOptions {
            damping: self.damping,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    /// Validates, builds the bimodal initial density and a zero terminal
    /// cost, and runs the Picard solve.
    pub fn solve(&self) -> Result<(MfgParams, MfgState, PicardReport)> {
        let p = self.params()?;
        let opts = self.options();
        if !(opts.damping > 0.0 && opts.damping <= 1.0) || !(opts.tol > 0.0) || opts.max_iter == 0 {
            return Err(Error::Input(
                "damping in (0, 1], tol > 0 and max_iter >= 1 required".into(),
            ));
        }
        let m0 = initial_density(&p.grid, self.mu1, self.mu2, self.sigma0)?;
        let psi = vec![0.0; p.grid.n_cells()];
        let (state, report) = picard_solve(&p, &m0, &psi, opts)?;
        Ok((p, state, report))
    }
}

impl MfgState {
    /// Writes `m.csv`, `v.csv`, `u.csv` and `mbar.csv` under `prefix` and
    /// returns their paths. Field files have one row per time level, time
    /// first, with cell centers as the header.
    pub fn write_outputs(&self, p: &MfgParams, prefix: &str) -> Result<Vec<PathBuf>> {
        let mut header = vec!["t".to_string()];
        header.extend(p.grid.centers().into_iter().map(fmt_real));
        let mut written = Vec::new();
        for (name, field) in [("m.csv", &self.m), ("v.csv", &self.v), ("u.csv", &self.u)] {
            let path = PathBuf::from(format!("{prefix}{name}"));
            let rows = field.rows().into_iter().enumerate().map(|(n, row)| {
                let mut out = vec![p.time(n)];
                out.extend(row.iter());
                out
            });
            write_csv_rows(&path, &header, rows)?;
            written.push(path);
        }
        let path = PathBuf::from(format!("{prefix}mbar.csv"));
        write_csv_rows(
            &path,
            &["t".to_string(), "mbar".to_string()],
            self.mbar.iter().enumerate().map(|(n, &b)| vec![p.time(n), b]),
        )?;
        written.push(path);
        Ok(written)
    }
}

impl PicardReport {
    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path.as_ref(), text).map_err(|e| Error::io(path.as_ref(), e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_keys() {
        let c = MfgConfig::from_json(r#"{"alpha": 0.5, "T": 2.0}"#).unwrap();
        assert_eq!(c.alpha, 0.5);
        assert_eq!(c.t_final, 2.0);
        assert_eq!(c.n_cells, 200);
        assert!(MfgConfig::from_json(r#"{"alpah": 0.5}"#).is_err());
        assert!(MfgConfig::from_json("{").is_err());
    }

    #[test]
    fn default_config_is_cfl_admissible() {
        let p = MfgConfig::default().params().unwrap();
        assert!(p.dt() <= p.admissible_dt());
        let bad = MfgConfig {
            n_time: 10,
            ..MfgConfig::default()
        };
        assert!(matches!(bad.params(), Err(Error::Stability { .. })));
    }
}
