use crate::error::{Error, Result};
use crate::linalg::{tolerances, ComplexMatrix};
use crate::scalar::Real;

use super::pauli::PauliSum;

/// Dense Hermitian matrix with an optional Pauli-sum description of the same operator.
#[derive(Clone, Debug)]
pub struct HermitianOperator<T> {
    matrix: ComplexMatrix<T>,
    label: String,
    terms: Option<PauliSum<T>>,
}

impl<T: Real> HermitianOperator<T> {
    pub fn new(matrix: ComplexMatrix<T>, label: impl Into<String>) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > T::tol(tolerances::HERMITIAN) {
            return Err(Error::NotHermitian { deviation: deviation.as_f64() });
        }
        Ok(Self { matrix, label: label.into(), terms: None })
    }

    pub fn from_pauli_sum(terms: PauliSum<T>, label: impl Into<String>) -> Self {
        Self { matrix: terms.to_matrix(), label: label.into(), terms: Some(terms) }
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn terms(&self) -> Option<&PauliSum<T>> {
        self.terms.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `a * self + b * other`, keeping the Pauli description when both sides have one.
    pub(crate) fn combine(&self, a: T, other: &Self, b: T, label: String) -> Self {
        let mut matrix = self.matrix.scale_real(a);
        matrix.add_scaled(num_complex::Complex::new(b, T::zero()), &other.matrix);
        let terms = match (&self.terms, &other.terms) {
            (Some(x), Some(y)) => x.scaled(a).plus(&y.scaled(b)).ok(),
            _ => None,
        };
        Self { matrix, label, terms }
    }

    pub fn scaled(&self, w: T) -> Self {
        Self {
            matrix: self.matrix.scale_real(w),
            label: self.label.clone(),
            terms: self.terms.as_ref().map(|t| t.scaled(w)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian_matrices() {
        let m = ComplexMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[2.0, 0.0]]).unwrap();
        assert!(matches!(HermitianOperator::new(m, "bad"), Err(Error::NotHermitian { .. })));
    }
}
