use num_complex::Complex;

use super::eig::{hermitian_eig, unitary_eig, SpectralDecomposition};
use super::matrix::ComplexMatrix;
use super::tolerances;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `exp(-i H t)` for Hermitian `H`.
pub fn matrix_exp_hermitian<T: Real>(h: &ComplexMatrix<T>, t: T) -> Result<ComplexMatrix<T>> {
    Ok(hermitian_eig(h)?.propagator(t))
}

/// Principal logarithm of a unitary step, read as a Hamiltonian.
#[derive(Clone, Debug)]
pub struct LogHamiltonian<T> {
    /// `H` with `U = exp(-i H dt)` and spectrum in `(-pi/dt, pi/dt]`.
    pub generator: ComplexMatrix<T>,
    pub decomposition: SpectralDecomposition<T>,
    /// Some eigenphase lies within `1e-8` of the branch cut, so the branch is ambiguous.
    pub branch_ambiguous: bool,
}

/// `H = i log(U) / dt` on the principal branch.
pub fn principal_log_hamiltonian<T: Real>(u: &ComplexMatrix<T>, dt: T) -> Result<LogHamiltonian<T>> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    let eig = unitary_eig(u)?;
    let cut = T::PI() - T::lit(tolerances::BRANCH_CUT);
    let branch_ambiguous = eig.phases.iter().any(|p| p.abs() > cut);
    let decomposition = SpectralDecomposition {
        eigenvalues: eig.phases.iter().map(|&p| p / dt).collect(),
        eigenvectors: eig.eigenvectors,
        gauge: super::eig::Gauge::LargestEntryReal,
    };
    let generator = decomposition.map_eigenvalues(|e| Complex::new(e, T::zero()));
    Ok(LogHamiltonian { generator, decomposition, branch_ambiguous })
}

/// Spectral norm (largest singular value).
pub fn operator_norm<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    if m.dim() == 0 {
        return Ok(T::zero());
    }
    let values = T::singular_values(m.dim(), m.as_slice()).ok_or(Error::ConvergenceFailure)?;
    Ok(values.into_iter().fold(T::zero(), T::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    /// Scaling-and-squaring Taylor series, independent of any eigensolver.
    fn taylor_exp(h: &ComplexMatrix<f64>, t: f64) -> ComplexMatrix<f64> {
        let a = h.scale(Complex::new(0.0, -t));
        let norm = a.frobenius_norm();
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
        let a = a.scale_real(0.5f64.powi(squarings as i32));
        let mut term = ComplexMatrix::identity(h.dim());
        let mut sum = term.clone();
        for k in 1..30 {
            term = term.matmul(&a).scale_real(1.0 / k as f64);
            sum = &sum + &term;
        }
        for _ in 0..squarings {
            sum = sum.matmul(&sum);
        }
        sum
    }

    fn pauli_z() -> ComplexMatrix<f64> {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    #[test]
    fn exp_of_z_times_pi_is_minus_identity() {
        let u = matrix_exp_hermitian(&pauli_z(), std::f64::consts::PI).unwrap();
        let minus = ComplexMatrix::identity(2).scale_real(-1.0);
        assert!((&u - &minus).max_abs() < 1e-14);
    }

    #[test]
    fn exp_agrees_with_taylor_series() {
        let g = ComplexMatrix::<f64>::from_fn(6, |i, j| {
            Complex::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + j * j) % 3) as f64 - 1.0)
        });
        let h = (&g + &g.adjoint()).scale_real(0.5);
        let ours = matrix_exp_hermitian(&h, 0.7).unwrap();
        let reference = taylor_exp(&h, 0.7);
        assert!((&ours - &reference).max_abs() < 1e-12);
    }

    #[test]
    fn log_round_trips_through_exp() {
        let g = ComplexMatrix::<f64>::from_fn(4, |i, j| {
            Complex::new((i as f64 - j as f64).cos(), (i as f64 * j as f64).sin() * 0.3)
        });
        let h = (&g + &g.adjoint()).scale_real(0.25);
        let dt = 0.4;
        let u = matrix_exp_hermitian(&h, dt).unwrap();
        let log = principal_log_hamiltonian(&u, dt).unwrap();
        assert!(!log.branch_ambiguous);
        assert!((&log.generator - &h).max_abs() < 1e-10);
    }

    #[test]
    fn branch_cut_is_flagged() {
        let u = ComplexMatrix::<f64>::identity(2).scale_real(-1.0);
        let log = principal_log_hamiltonian(&u, 1.0).unwrap();
        assert!(log.branch_ambiguous);
        assert!(log.decomposition.eigenvalues.iter().all(|e| (e - std::f64::consts::PI).abs() < 1e-12));
    }

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&ComplexMatrix::<f64>::identity(3)).unwrap() - 1.0).abs() < 1e-14);
        let d = ComplexMatrix::<f64>::from_real_diagonal(&[3.0, -5.0]);
        assert!((operator_norm(&d).unwrap() - 5.0).abs() < 1e-14);
        let mut nilpotent = ComplexMatrix::<f64>::zeros(2);
        nilpotent[(0, 1)] = Complex::one();
        assert!((operator_norm(&nilpotent).unwrap() - 1.0).abs() < 1e-14);
    }
}
