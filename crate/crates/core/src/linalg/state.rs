use num_complex::Complex;
use num_traits::Zero;

use super::matrix::{inner, norm2, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Wraps amplitudes that must already have unit norm (within 1e-12).
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("empty state".into()));
        }
        let norm = norm2(&amplitudes);
        if (norm - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::InvalidArgument(format!("state norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let norm = norm2(&amplitudes);
        if amplitudes.is_empty() || !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(Self { amplitudes: amplitudes.into_iter().map(|z| z / norm).collect() })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex::zero(); dim];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// `U|self>`, renormalized to absorb rounding drift.
    pub fn evolve(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch { left: u.dim(), right: self.dim() });
        }
        Self::normalized(u.apply(&self.amplitudes))
    }

    pub fn with_phase(&self, phase: T) -> Self {
        let f = Complex::from_polar(T::one(), phase);
        Self { amplitudes: self.amplitudes.iter().map(|&z| z * f).collect() }
    }
}
