//! Exact, discretized and Trotterized propagators along an adiabatic path.

mod discrete;
mod exact;
mod generator;
mod trotter;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::model::AdiabaticPath;
use crate::scalar::Real;

pub use discrete::{discrete_evolution, discrete_state, DiscretePropagator};
pub use exact::{exact_evolution, exact_evolution_with, exact_state_evolution, ExactOptions, Integrator};
pub use trotter::{
    effective_hamiltonian, trotter_evolution, trotter_state, trotter_step_unitary, EffectiveHamiltonian,
};

/// Sampling of `s_j`, `j = 1..L`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    /// `s_j = (j - 1) / (L - 1)`; `s_1 = 0` when `L = 1`.
    #[default]
    Endpoints,
    /// `s_j = (j - 1) / L`.
    Left,
    /// `s_j = (j - 1/2) / L`.
    Midpoint,
}

impl Grid {
    /// `s_j` for zero-based `j < steps`.
    pub fn sample<T: Real>(self, j: usize, steps: usize) -> T {
        let (j, l) = (T::from_count(j), T::from_count(steps));
        match self {
            Self::Endpoints if steps == 1 => T::zero(),
            Self::Endpoints => j / (l - T::one()),
            Self::Left => j / l,
            Self::Midpoint => (j + T::lit(0.5)) / l,
        }
    }

    pub fn samples<T: Real>(self, steps: usize) -> Vec<T> {
        (0..steps).map(|j| self.sample(j, steps)).collect()
    }
}

/// One Trotter layer `H_k(s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    /// `(1 - p(s)) H_i`.
    Initial,
    /// `p(s) H_f`.
    Final,
    /// The whole `H(s)`, unsplit.
    Full,
}

/// Parameters shared by every propagator.
#[derive(Clone, Debug)]
pub struct EvolutionSpec<T> {
    pub path: Arc<AdiabaticPath<T>>,
    pub total_time: T,
    pub steps: usize,
    pub grid: Grid,
    /// Applied in order within each step (first entry acts first).
    pub layers: Vec<Layer>,
}

impl<T: Real> EvolutionSpec<T> {
    /// Endpoint grid with the `[Initial, Final]` split.
    pub fn new(path: Arc<AdiabaticPath<T>>, total_time: T, steps: usize) -> Result<Self> {
        if !(total_time > T::zero()) || !total_time.is_finite() {
            return Err(Error::InvalidArgument(format!("total time must be positive, got {total_time}")));
        }
        if steps == 0 {
            return Err(Error::InvalidArgument("at least one step is required".into()));
        }
        Ok(Self { path, total_time, steps, grid: Grid::Endpoints, layers: vec![Layer::Initial, Layer::Final] })
    }

    pub fn with_grid(mut self, grid: Grid) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_layers(mut self, layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidArgument("layer list is empty".into()));
        }
        self.layers = layers;
        Ok(self)
    }

    pub fn with_total_time(&self, total_time: T) -> Result<Self> {
        let mut s = Self::new(self.path.clone(), total_time, self.steps)?;
        s.grid = self.grid;
        s.layers = self.layers.clone();
        Ok(s)
    }

    /// `T / L`.
    pub fn dt(&self) -> T {
        self.total_time / T::from_count(self.steps)
    }

    pub fn samples(&self) -> Vec<T> {
        self.grid.samples(self.steps)
    }

    pub fn dim(&self) -> usize {
        self.path.dim()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    Discrete,
    Trotter,
}

/// Propagator together with the run that produced it.
#[derive(Clone, Debug)]
pub struct UnitaryOperator<T> {
    pub matrix: ComplexMatrix<T>,
    pub method: Method,
    pub total_time: T,
    pub steps: usize,
}

impl<T: Real> UnitaryOperator<T> {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_cover_the_unit_interval() {
        assert_eq!(Grid::Endpoints.samples::<f64>(5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(Grid::Endpoints.samples::<f64>(1), vec![0.0]);
        assert_eq!(Grid::Left.samples::<f64>(4), vec![0.0, 0.25, 0.5, 0.75]);
        assert_eq!(Grid::Midpoint.samples::<f64>(2), vec![0.25, 0.75]);
    }

    #[test]
    fn dt_times_steps_is_total_time() {
        let path = Arc::new(crate::model::tfim_path::<f64>(2, false).unwrap());
        let spec = EvolutionSpec::new(path, 4.0, 100).unwrap();
        assert_eq!(spec.dt(), 0.04);
        assert!(EvolutionSpec::new(spec.path.clone(), -1.0, 3).is_err());
    }
}
