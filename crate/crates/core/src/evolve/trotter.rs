use num_complex::Complex;

use super::{EvolutionSpec, Layer, Method, UnitaryOperator};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, principal_log_hamiltonian, ComplexMatrix, SpectralDecomposition, StateVector};
use crate::model::{rotate_rows, rotate_state, HermitianOperator, PauliMask};
use crate::scalar::Real;

/// How `exp(-i w dt H_k)` is applied for one layer.
enum Kernel<T> {
    /// Diagonal entries of a diagonal operator.
    Diagonal(Vec<T>),
    /// Mutually commuting Pauli strings: a product of rotations.
    Rotations(Vec<(T, PauliMask)>),
    /// Cached eigendecomposition of a fixed operator.
    Spectral(SpectralDecomposition<T>),
    /// `H(s)` itself, diagonalized at every step.
    Full,
}

impl<T: Real> Kernel<T> {
    fn of(op: &HermitianOperator<T>) -> Result<Self> {
        if let Some(terms) = op.terms() {
            if terms.is_diagonal() {
                return Ok(Self::Diagonal(terms.diagonal()));
            }
            if terms.terms_commute() {
                return Ok(Self::Rotations(terms.masks().collect()));
            }
        } else if op.matrix().is_diagonal(T::zero()) {
            return Ok(Self::Diagonal(op.matrix().diagonal().iter().map(|z| z.re).collect()));
        }
        Ok(Self::Spectral(hermitian_eig(op.matrix())?))
    }
}

fn phases<T: Real>(values: &[T], angle: T) -> Vec<Complex<T>> {
    values.iter().map(|&e| Complex::from_polar(T::one(), -e * angle)).collect()
}

/// Per-layer kernels for the Trotterized product, built once per path.
pub(crate) struct TrotterPropagator<'a, T> {
    spec: &'a EvolutionSpec<T>,
    kernels: Vec<(Layer, Kernel<T>)>,
}

impl<'a, T: Real> TrotterPropagator<'a, T> {
    pub fn new(spec: &'a EvolutionSpec<T>) -> Result<Self> {
        if spec.layers.is_empty() {
            return Err(Error::InvalidArgument("layer list is empty".into()));
        }
        let kernels = spec
            .layers
            .iter()
            .map(|&layer| {
                let kernel = match layer {
                    Layer::Initial => Kernel::of(spec.path.initial())?,
                    Layer::Final => Kernel::of(spec.path.target())?,
                    Layer::Full => Kernel::Full,
                };
                Ok((layer, kernel))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { spec, kernels })
    }

    fn weight(&self, layer: Layer, s: T) -> T {
        let (a, b) = self.spec.path.weights(s);
        match layer {
            Layer::Initial => a,
            Layer::Final => b,
            Layer::Full => T::one(),
        }
    }

    fn full_frame(&self, s: T) -> Result<SpectralDecomposition<T>> {
        hermitian_eig(&self.spec.path.hamiltonian(s)?)
    }

    /// `M <- prod_k exp(-i H_k(s) dt) M`, first layer acting first.
    fn step_left(&self, s: T, dt: T, m: &mut ComplexMatrix<T>) -> Result<()> {
        for (layer, kernel) in &self.kernels {
            let angle = self.weight(*layer, s) * dt;
            match kernel {
                Kernel::Diagonal(d) => m.scale_rows(&phases(d, angle)),
                Kernel::Rotations(r) => r.iter().for_each(|(c, mask)| rotate_rows(mask, *c * angle, m)),
                Kernel::Spectral(dec) => *m = spectral_left(dec, angle, m),
                Kernel::Full => *m = spectral_left(&self.full_frame(s)?, angle, m),
            }
        }
        Ok(())
    }

    fn step_state(&self, s: T, dt: T, v: &mut Vec<Complex<T>>) -> Result<()> {
        for (layer, kernel) in &self.kernels {
            let angle = self.weight(*layer, s) * dt;
            match kernel {
                Kernel::Diagonal(d) => v.iter_mut().zip(phases(d, angle)).for_each(|(z, p)| *z *= p),
                Kernel::Rotations(r) => r.iter().for_each(|(c, mask)| rotate_state(mask, *c * angle, v)),
                Kernel::Spectral(dec) => *v = spectral_state(dec, angle, v),
                Kernel::Full => *v = spectral_state(&self.full_frame(s)?, angle, v),
            }
        }
        Ok(())
    }

    /// One Trotter step `prod_k exp(-i H_k(s) dt)`.
    pub fn step(&self, s: T) -> Result<ComplexMatrix<T>> {
        let mut m = ComplexMatrix::identity(self.spec.dim());
        self.step_left(s, self.spec.dt(), &mut m)?;
        Ok(m)
    }

    pub fn unitary(&self) -> Result<ComplexMatrix<T>> {
        let mut m = ComplexMatrix::identity(self.spec.dim());
        let dt = self.spec.dt();
        for s in self.spec.samples() {
            self.step_left(s, dt, &mut m)?;
        }
        Ok(m)
    }

    pub fn apply(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        let mut v = psi.amplitudes().to_vec();
        let dt = self.spec.dt();
        for s in self.spec.samples() {
            self.step_state(s, dt, &mut v)?;
        }
        StateVector::normalized(v)
    }
}

fn spectral_left<T: Real>(dec: &SpectralDecomposition<T>, angle: T, m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut y = dec.eigenvectors.adjoint().matmul(m);
    y.scale_rows(&phases(&dec.eigenvalues, angle));
    dec.eigenvectors.matmul(&y)
}

fn spectral_state<T: Real>(dec: &SpectralDecomposition<T>, angle: T, v: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut y = dec.eigenvectors.adjoint().apply(v);
    y.iter_mut().zip(phases(&dec.eigenvalues, angle)).for_each(|(z, p)| *z *= p);
    dec.eigenvectors.apply(&y)
}

fn check_s<T: Real>(s: T) -> Result<()> {
    if s >= T::zero() && s <= T::one() {
        Ok(())
    } else {
        Err(Error::OutOfRange(s.as_f64()))
    }
}

/// Trotterized propagator `A_tro`.
pub fn trotter_evolution<T: Real>(spec: &EvolutionSpec<T>) -> Result<UnitaryOperator<T>> {
    let matrix = TrotterPropagator::new(spec)?.unitary()?;
    Ok(UnitaryOperator { matrix, method: Method::Trotter, total_time: spec.total_time, steps: spec.steps })
}

/// `A_tro |psi>`.
pub fn trotter_state<T: Real>(spec: &EvolutionSpec<T>, psi: &StateVector<T>) -> Result<StateVector<T>> {
    if psi.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { left: spec.dim(), right: psi.dim() });
    }
    TrotterPropagator::new(spec)?.apply(psi)
}

/// Single Trotter step at `s` with the spec's `dt`.
pub fn trotter_step_unitary<T: Real>(spec: &EvolutionSpec<T>, s: T) -> Result<UnitaryOperator<T>> {
    check_s(s)?;
    let matrix = TrotterPropagator::new(spec)?.step(s)?;
    Ok(UnitaryOperator { matrix, method: Method::Trotter, total_time: spec.dt(), steps: 1 })
}

/// `H~(s, dt) = i log(U_tro(s, dt)) / dt` on the principal branch.
#[derive(Clone, Debug)]
pub struct EffectiveHamiltonian<T> {
    pub operator: HermitianOperator<T>,
    /// An eigenphase of the step sits on the branch cut.
    pub branch_ambiguous: bool,
}

pub fn effective_hamiltonian<T: Real>(spec: &EvolutionSpec<T>, s: T) -> Result<EffectiveHamiltonian<T>> {
    let step = trotter_step_unitary(spec, s)?;
    let log = principal_log_hamiltonian(&step.matrix, spec.dt())?;
    let operator = HermitianOperator::new(log.generator.hermitian_part(), format!("H_eff({s})"))?;
    Ok(EffectiveHamiltonian { operator, branch_ambiguous: log.branch_ambiguous })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::evolve::discrete_evolution;
    use crate::linalg::{matrix_exp_hermitian, operator_norm};
    use crate::model::{tfim_path, AdiabaticPath};

    fn spec(n: usize, t: f64, l: usize) -> EvolutionSpec<f64> {
        EvolutionSpec::new(Arc::new(tfim_path(n, false).unwrap()), t, l).unwrap()
    }

    /// Dense reference: product of eigendecomposition exponentials.
    fn dense_step(spec: &EvolutionSpec<f64>, s: f64) -> ComplexMatrix<f64> {
        let (a, b) = spec.path.weights(s);
        let ux = matrix_exp_hermitian(&spec.path.initial().matrix().scale_real(a), spec.dt()).unwrap();
        let uz = matrix_exp_hermitian(&spec.path.target().matrix().scale_real(b), spec.dt()).unwrap();
        uz.matmul(&ux)
    }

    #[test]
    fn step_matches_dense_exponentials() {
        let sp = spec(4, 3.0, 5);
        let u = trotter_step_unitary(&sp, 0.3).unwrap();
        assert!((&u.matrix - &dense_step(&sp, 0.3)).max_abs() < 1e-12);
        assert!(u.matrix.unitary_deviation() < 1e-12);
    }

    #[test]
    fn boundary_step_has_only_the_initial_layer() {
        let sp = spec(3, 2.0, 4);
        let u = trotter_step_unitary(&sp, 0.0).unwrap();
        let expected = matrix_exp_hermitian(sp.path.initial().matrix(), sp.dt()).unwrap();
        assert!((&u.matrix - &expected).max_abs() < 1e-13);
    }

    #[test]
    fn zero_time_step_is_identity() {
        let mut sp = spec(2, 1.0, 1);
        sp.total_time = 0.0;
        let u = trotter_step_unitary(&sp, 0.5).unwrap();
        assert!((&u.matrix - &ComplexMatrix::identity(4)).max_abs() == 0.0);
    }

    #[test]
    fn single_full_layer_reproduces_discrete_evolution() {
        let sp = spec(3, 4.0, 6).with_layers(vec![Layer::Full]).unwrap();
        let a = trotter_evolution(&sp).unwrap();
        let b = discrete_evolution(&sp).unwrap();
        assert!((&a.matrix - &b.matrix).max_abs() < 1e-12);
    }

    #[test]
    fn commuting_layers_are_exact() {
        let (_, hz) = crate::model::build_tfim::<f64>(3, false).unwrap();
        let hi = hz.scaled(0.3);
        let path = Arc::new(AdiabaticPath::linear(hi, hz).unwrap());
        let sp = EvolutionSpec::new(path, 3.0, 8).unwrap();
        let a = trotter_evolution(&sp).unwrap();
        let b = discrete_evolution(&sp).unwrap();
        assert!(operator_norm(&(&a.matrix - &b.matrix)).unwrap() < 1e-12);
    }

    #[test]
    fn state_action_matches_matrix() {
        let sp = spec(3, 5.0, 7);
        let m = trotter_evolution(&sp).unwrap().matrix;
        let v = trotter_state(&sp, &StateVector::basis(8, 2)).unwrap();
        for (a, b) in v.amplitudes().iter().zip(&m.column(2)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn effective_hamiltonian_tends_to_the_path() {
        let sp = spec(3, 1e-3, 1);
        let heff = effective_hamiltonian(&sp, 0.4).unwrap();
        let h = sp.path.hamiltonian(0.4).unwrap();
        assert!(operator_norm(&(heff.operator.matrix() - &h)).unwrap() < 1e-2);
        assert!(!heff.branch_ambiguous);
    }

    #[test]
    fn effective_hamiltonian_round_trips() {
        let sp = spec(3, 0.5, 1);
        let heff = effective_hamiltonian(&sp, 0.6).unwrap();
        let u = matrix_exp_hermitian(heff.operator.matrix(), 0.5).unwrap();
        let step = trotter_step_unitary(&sp, 0.6).unwrap();
        assert!((&u - &step.matrix).max_abs() < 1e-8);
    }

    #[test]
    fn effective_hamiltonian_at_the_start_is_the_initial_hamiltonian() {
        let sp = spec(3, 0.4, 1);
        let heff = effective_hamiltonian(&sp, 0.0).unwrap();
        assert!((heff.operator.matrix() - sp.path.initial().matrix()).max_abs() < 1e-9);
    }
}
