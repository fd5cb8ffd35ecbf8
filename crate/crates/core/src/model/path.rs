use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};
use crate::scalar::Real;

use super::operator::HermitianOperator;
use super::pauli::{PauliSum, PauliTerm};
use super::schedule::Schedule;

/// `H(s) = (1 - p(s)) H_i + p(s) H_f` on `s in [0, 1]`.
#[derive(Clone, Debug)]
pub struct AdiabaticPath<T> {
    initial: HermitianOperator<T>,
    target: HermitianOperator<T>,
    schedule: Schedule,
    /// `H_f - H_i`.
    difference: HermitianOperator<T>,
}

fn check_s<T: Real>(s: T) -> Result<()> {
    if s >= T::zero() && s <= T::one() {
        Ok(())
    } else {
        Err(Error::OutOfRange(s.as_f64()))
    }
}

impl<T: Real> AdiabaticPath<T> {
    pub fn new(initial: HermitianOperator<T>, target: HermitianOperator<T>, schedule: Schedule) -> Result<Self> {
        if initial.dim() != target.dim() {
            return Err(Error::DimensionMismatch { left: initial.dim(), right: target.dim() });
        }
        let difference = target.combine(T::one(), &initial, -T::one(), "H_f - H_i".into());
        Ok(Self { initial, target, schedule, difference })
    }

    pub fn linear(initial: HermitianOperator<T>, target: HermitianOperator<T>) -> Result<Self> {
        Self::new(initial, target, Schedule::Linear)
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    pub fn initial(&self) -> &HermitianOperator<T> {
        &self.initial
    }

    pub fn target(&self) -> &HermitianOperator<T> {
        &self.target
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    /// `(p, p', p'')` at `s`.
    pub fn schedule_at(&self, s: T) -> (T, T, T) {
        let (p, dp, ddp) = self.schedule.eval(s.as_f64());
        (T::lit(p), T::lit(dp), T::lit(ddp))
    }

    /// Layer weights `(1 - p(s), p(s))`.
    pub fn weights(&self, s: T) -> (T, T) {
        let (p, _, _) = self.schedule_at(s);
        (T::one() - p, p)
    }

    /// `H(s)` (order 0), `H'(s)` (order 1) or `H''(s)` (order 2).
    pub fn path_at(&self, s: T, order: usize) -> Result<HermitianOperator<T>> {
        check_s(s)?;
        let (p, dp, ddp) = self.schedule_at(s);
        match order {
            0 => Ok(self.initial.combine(T::one() - p, &self.target, p, format!("H({s})"))),
            1 => Ok(self.difference.scaled(dp)),
            2 => Ok(self.difference.scaled(ddp)),
            _ => Err(Error::InvalidArgument(format!("derivative order {order} not in {{0, 1, 2}}"))),
        }
    }

    pub fn hamiltonian(&self, s: T) -> Result<ComplexMatrix<T>> {
        Ok(self.path_at(s, 0)?.into_matrix())
    }

    pub fn derivative(&self, s: T) -> Result<ComplexMatrix<T>> {
        Ok(self.path_at(s, 1)?.into_matrix())
    }

    pub fn second_derivative(&self, s: T) -> Result<ComplexMatrix<T>> {
        Ok(self.path_at(s, 2)?.into_matrix())
    }

    /// `E_level(s) - E_0(s)`.
    pub fn spectral_gap(&self, s: T, level: usize) -> Result<T> {
        if level == 0 || level >= self.dim() {
            return Err(Error::InvalidArgument(format!("level {level} outside 1..{}", self.dim())));
        }
        let e = hermitian_eigenvalues(&self.hamiltonian(s)?)?;
        Ok((e[level] - e[0]).max(T::zero()))
    }

    /// Adds `a I` to `H_i` and `b I` to `H_f`, i.e. `c(s) I` with `c = (1 - p) a + p b`.
    pub fn with_identity_shift(&self, a: T, b: T) -> Result<Self> {
        let shift = |op: &HermitianOperator<T>, c: T| -> Result<HermitianOperator<T>> {
            let id = identity_operator(op, c)?;
            Ok(op.combine(T::one(), &id, T::one(), op.label().to_string()))
        };
        Self::new(shift(&self.initial, a)?, shift(&self.target, b)?, self.schedule.clone())
    }
}

fn identity_operator<T: Real>(like: &HermitianOperator<T>, c: T) -> Result<HermitianOperator<T>> {
    match like.terms() {
        Some(terms) => {
            let id = PauliSum::new(terms.n_sites(), vec![PauliTerm::new(c, vec![])?])?;
            Ok(HermitianOperator::from_pauli_sum(id, "c I"))
        }
        None => HermitianOperator::new(ComplexMatrix::identity(like.dim()).scale_real(c), "c I"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_tfim;

    fn path() -> AdiabaticPath<f64> {
        let (hx, hz) = build_tfim(3, false).unwrap();
        AdiabaticPath::linear(hx, hz).unwrap()
    }

    #[test]
    fn endpoints_and_derivatives_of_linear_path() {
        let p = path();
        assert!((&p.hamiltonian(0.0).unwrap() - p.initial().matrix()).max_abs() == 0.0);
        let diff = p.target().matrix() - p.initial().matrix();
        assert!((&p.derivative(0.37).unwrap() - &diff).max_abs() < 1e-15);
        assert_eq!(p.second_derivative(0.81).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn out_of_range_parameter_is_rejected() {
        assert!(matches!(path().path_at(1.5, 0), Err(Error::OutOfRange(_))));
        assert!(matches!(path().path_at(f64::NAN, 0), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn pauli_description_tracks_dense_matrix() {
        let op = path().path_at(0.4, 0).unwrap();
        let sparse = op.terms().unwrap().to_matrix();
        assert!((&sparse - op.matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn identity_shift_moves_every_level_together() {
        let p = path();
        let shifted = p.with_identity_shift(0.5, -2.0).unwrap();
        let g0 = p.spectral_gap(0.3, 1).unwrap();
        let g1 = shifted.spectral_gap(0.3, 1).unwrap();
        assert!((g0 - g1).abs() < 1e-12);
    }
}
