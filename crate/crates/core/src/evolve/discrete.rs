use num_complex::Complex;
use rayon::prelude::*;

use super::{EvolutionSpec, Method, UnitaryOperator};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, SpectralDecomposition, StateVector};
use crate::scalar::Real;

/// Eigendecompositions of `H(s_j)` on a fixed grid; `A_d` for any total time reuses them.
#[derive(Clone, Debug)]
pub struct DiscretePropagator<T> {
    samples: Vec<T>,
    frames: Vec<SpectralDecomposition<T>>,
}

impl<T: Real> DiscretePropagator<T> {
    pub fn new(spec: &EvolutionSpec<T>) -> Result<Self> {
        let samples = spec.samples();
        let frames = samples
            .par_iter()
            .map(|&s| hermitian_eig(&spec.path.hamiltonian(s)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { samples, frames })
    }

    pub fn steps(&self) -> usize {
        self.frames.len()
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn frames(&self) -> &[SpectralDecomposition<T>] {
        &self.frames
    }

    /// `A_d = U_L ... U_1` with `U_j = exp(-i H(s_j) T / L)`.
    pub fn unitary(&self, total_time: T) -> ComplexMatrix<T> {
        let dt = total_time / T::from_count(self.steps());
        let n = self.frames[0].dim();
        let mut acc = ComplexMatrix::identity(n);
        for frame in &self.frames {
            // U_j acc = V (phases * (V^dag acc)).
            let mut y = frame.eigenvectors.adjoint().matmul(&acc);
            let phases: Vec<Complex<T>> =
                frame.eigenvalues.iter().map(|&e| Complex::from_polar(T::one(), -e * dt)).collect();
            y.scale_rows(&phases);
            acc = frame.eigenvectors.matmul(&y);
        }
        acc
    }

    /// `A_d |psi>`.
    pub fn apply(&self, total_time: T, psi: &StateVector<T>) -> Result<StateVector<T>> {
        if psi.dim() != self.frames[0].dim() {
            return Err(Error::DimensionMismatch { left: self.frames[0].dim(), right: psi.dim() });
        }
        let dt = total_time / T::from_count(self.steps());
        let mut v = psi.amplitudes().to_vec();
        for frame in &self.frames {
            let adj = frame.eigenvectors.adjoint();
            let mut y = adj.apply(&v);
            for (z, &e) in y.iter_mut().zip(&frame.eigenvalues) {
                *z *= Complex::from_polar(T::one(), -e * dt);
            }
            v = frame.eigenvectors.apply(&y);
        }
        StateVector::normalized(v)
    }
}

/// Discretized (not Trotterized) propagator `A_d`.
pub fn discrete_evolution<T: Real>(spec: &EvolutionSpec<T>) -> Result<UnitaryOperator<T>> {
    let matrix = DiscretePropagator::new(spec)?.unitary(spec.total_time);
    Ok(UnitaryOperator { matrix, method: Method::Discrete, total_time: spec.total_time, steps: spec.steps })
}

/// `A_d |psi>`.
pub fn discrete_state<T: Real>(spec: &EvolutionSpec<T>, psi: &StateVector<T>) -> Result<StateVector<T>> {
    DiscretePropagator::new(spec)?.apply(spec.total_time, psi)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::evolve::exact_evolution;
    use crate::linalg::{matrix_exp_hermitian, operator_norm};
    use crate::model::{tfim_path, AdiabaticPath, HermitianOperator};

    #[test]
    fn single_step_is_one_exponential() {
        let path = Arc::new(tfim_path::<f64>(2, false).unwrap());
        let spec = EvolutionSpec::new(path.clone(), 1.3, 1).unwrap();
        let a = discrete_evolution(&spec).unwrap();
        let expected = matrix_exp_hermitian(&path.hamiltonian(0.0).unwrap(), 1.3).unwrap();
        assert!((&a.matrix - &expected).max_abs() < 1e-12);
    }

    #[test]
    fn diagonal_path_accumulates_a_riemann_sum() {
        let hi = HermitianOperator::new(ComplexMatrix::from_real_diagonal(&[1.0, -2.0]), "a").unwrap();
        let hf = HermitianOperator::new(ComplexMatrix::from_real_diagonal(&[0.5, 4.0]), "b").unwrap();
        let path = Arc::new(AdiabaticPath::linear(hi, hf).unwrap());
        let spec = EvolutionSpec::new(path, 2.0, 7).unwrap();
        let a = discrete_evolution(&spec).unwrap();
        let dt = spec.dt();
        for (k, (ei, ef)) in [(1.0, 0.5), (-2.0, 4.0)].into_iter().enumerate() {
            let phase: f64 = spec.samples().iter().map(|&s: &f64| ((1.0 - s) * ei + s * ef) * dt).sum();
            assert!((a.matrix[(k, k)] - Complex::from_polar(1.0, -phase)).norm() < 1e-12);
        }
    }

    #[test]
    fn refinement_approaches_the_exact_propagator() {
        let path = Arc::new(tfim_path::<f64>(3, false).unwrap());
        let exact = exact_evolution(&EvolutionSpec::new(path.clone(), 5.0, 1).unwrap(), 1e-10).unwrap();
        let dist = |l| {
            let spec = EvolutionSpec::new(path.clone(), 5.0, l).unwrap().with_grid(super::super::Grid::Midpoint);
            operator_norm(&(&discrete_evolution(&spec).unwrap().matrix - &exact.matrix)).unwrap()
        };
        let (d1, d2) = (dist(20), dist(40));
        assert!(d2 < d1);
    }

    #[test]
    fn state_action_matches_matrix() {
        let path = Arc::new(tfim_path::<f64>(3, false).unwrap());
        let spec = EvolutionSpec::new(path, 4.0, 9).unwrap();
        let prop = DiscretePropagator::new(&spec).unwrap();
        let psi = StateVector::basis(8, 5);
        let v = prop.apply(4.0, &psi).unwrap();
        let col = prop.unitary(4.0).column(5);
        for (a, b) in v.amplitudes().iter().zip(&col) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
