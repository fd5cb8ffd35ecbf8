//! JSON run configuration. Every key is optional; missing keys take the defaults below.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use dasim::evolve::{EvolutionSpec, Grid};
use dasim::model::{tfim_path, AdiabaticPath, HamiltonianFile};
use dasim::zeno::FamilyKind;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub sweep: SweepConfig,
    pub zeno: ZenoConfig,
    pub rl: RlConfig,
    pub gamma: GammaConfig,
    pub bound: BoundConfig,
    /// Convergence tolerance of the exact reference propagator.
    pub exact_tol: f64,
    pub seed: u64,
}

/// Transverse-field Ising chain unless `file` names a Hamiltonian JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub n_sites: usize,
    pub periodic: bool,
    pub file: Option<PathBuf>,
    pub grid: Grid,
}

/// Total-time sweep shared by `fig1` and `fig2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Trotter steps `L`.
    pub steps: usize,
    pub t_min: f64,
    pub t_max: f64,
    /// Number of log-spaced points in `[t_min, t_max]`.
    pub t_count: usize,
    /// Explicit times; overrides the log grid.
    pub times: Option<Vec<f64>>,
    /// The scaling index is fitted over `T <= steps * robust_t_c`.
    pub robust_t_c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZenoConfig {
    pub dt_min: f64,
    pub dt_max: f64,
    pub dt_step: f64,
    pub threshold: f64,
    /// Continuation steps along `s`.
    pub steps: usize,
    /// `fig3` writes a full overlap trace for each of these.
    pub trace_dts: Vec<f64>,
    /// Family and step used by the `zeno` subcommand.
    pub family: FamilyKind,
    pub dt: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RlConfig {
    /// Power-series coefficients `[re, im]` of `f(s)`.
    pub f: Vec<[f64; 2]>,
    /// Power-series coefficients of `lambda(s) > 0`.
    pub lambda: Vec<f64>,
    pub total_times: Vec<f64>,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GammaConfig {
    pub total_times: Vec<f64>,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundConfig {
    pub total_times: Vec<f64>,
    pub quad_points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            sweep: SweepConfig::default(),
            zeno: ZenoConfig::default(),
            rl: RlConfig::default(),
            gamma: GammaConfig::default(),
            bound: BoundConfig::default(),
            exact_tol: 1e-10,
            seed: 0,
        }
    }
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { n_sites: 8, periodic: false, file: None, grid: Grid::Endpoints }
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { steps: 100, t_min: 4.0, t_max: 200.0, t_count: 40, times: None, robust_t_c: 0.8 }
    }
}

impl Default for ZenoConfig {
    fn default() -> Self {
        Self {
            dt_min: 0.1,
            dt_max: 1.5,
            dt_step: 0.05,
            threshold: dasim::zeno::DEFAULT_THRESHOLD,
            steps: dasim::zeno::DEFAULT_STEPS,
            trace_dts: vec![0.8, 1.0, 1.2],
            family: FamilyKind::TrotterUnitary,
            dt: 1.0,
        }
    }
}

impl Default for RlConfig {
    fn default() -> Self {
        Self { f: vec![[1.0, 0.0]], lambda: vec![1.0], total_times: vec![100.0], steps: 100 }
    }
}

impl Default for GammaConfig {
    fn default() -> Self {
        Self { total_times: vec![10.0, 50.0], steps: 100 }
    }
}

impl Default for BoundConfig {
    fn default() -> Self {
        Self { total_times: vec![10.0, 20.0, 50.0, 100.0, 200.0], quad_points: 201 }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn positive(name: &str, xs: &[f64]) -> Result<(), CliError> {
    if xs.is_empty() {
        return Err(invalid(format!("{name} must not be empty")));
    }
    match xs.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        Some(x) => Err(invalid(format!("{name} contains non-positive value {x}"))),
        None => Ok(()),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.sweep;
        if s.steps < 2 {
            return Err(invalid(format!("sweep.steps must be at least 2, got {}", s.steps)));
        }
        match &s.times {
            Some(times) => positive("sweep.times", times)?,
            None => {
                positive("sweep.t_min/t_max", &[s.t_min, s.t_max])?;
                if s.t_max <= s.t_min || s.t_count < 2 {
                    return Err(invalid("sweep needs t_min < t_max and t_count >= 2"));
                }
            }
        }
        positive("sweep.robust_t_c", &[s.robust_t_c])?;
        let z = &self.zeno;
        positive("zeno.dt_min/dt_max/dt_step/dt", &[z.dt_min, z.dt_max, z.dt_step, z.dt])?;
        if z.dt_max < z.dt_min {
            return Err(invalid("zeno.dt_max must not be below zeno.dt_min"));
        }
        if !(z.threshold > 0.0 && z.threshold <= 1.0) {
            return Err(invalid(format!("zeno.threshold {} is outside (0, 1]", z.threshold)));
        }
        if z.steps == 0 {
            return Err(invalid("zeno.steps must be positive"));
        }
        if !z.trace_dts.is_empty() {
            positive("zeno.trace_dts", &z.trace_dts)?;
        }
        if self.rl.f.is_empty() || self.rl.lambda.is_empty() {
            return Err(invalid("rl.f and rl.lambda need at least one coefficient"));
        }
        positive("rl.total_times", &self.rl.total_times)?;
        positive("gamma.total_times", &self.gamma.total_times)?;
        positive("bound.total_times", &self.bound.total_times)?;
        if self.rl.steps == 0 || self.gamma.steps == 0 {
            return Err(invalid("rl.steps and gamma.steps must be positive"));
        }
        if self.bound.quad_points < 3 {
            return Err(invalid("bound.quad_points must be at least 3"));
        }
        if !(self.exact_tol >= 1e-12) {
            return Err(invalid(format!("exact_tol {} is below 1e-12", self.exact_tol)));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn path(&self) -> Result<AdiabaticPath<f64>, CliError> {
        let m = &self.model;
        Ok(match &m.file {
            Some(file) => HamiltonianFile::load(file).map_err(|e| invalid(e.to_string()))?.to_path()?,
            None => tfim_path(m.n_sites, m.periodic)?,
        })
    }

    /// Evolution template with the model, grid and `steps`; the total time is replaced per point.
    pub fn template(&self, steps: usize) -> Result<EvolutionSpec<f64>, CliError> {
        Ok(EvolutionSpec::new(Arc::new(self.path()?), 1.0, steps)?.with_grid(self.model.grid))
    }

    pub fn sweep_times(&self) -> Result<Vec<f64>, CliError> {
        let s = &self.sweep;
        match &s.times {
            Some(t) => Ok(t.clone()),
            None => Ok(dasim::experiments::log_grid(s.t_min, s.t_max, s.t_count)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let c: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        c.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"sweep": {"stepz": 3}}"#).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn single_step_sweep_is_invalid() {
        let mut c = RunConfig::default();
        c.sweep.steps = 1;
        assert!(c.validate().is_err());
    }
}
