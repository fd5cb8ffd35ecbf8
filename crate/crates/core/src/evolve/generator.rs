use num_complex::Complex;
use num_traits::Zero;

use crate::linalg::{norm2, ComplexMatrix};
use crate::model::{AdiabaticPath, HermitianOperator, PauliSum};
use crate::scalar::Real;

enum Action<T> {
    Pauli(PauliSum<T>),
    Dense(ComplexMatrix<T>),
}

impl<T: Real> Action<T> {
    fn of(op: &HermitianOperator<T>) -> Self {
        match op.terms() {
            Some(t) => Self::Pauli(t.clone()),
            None => Self::Dense(op.matrix().clone()),
        }
    }

    fn apply_into(&self, factor: Complex<T>, v: &[Complex<T>], out: &mut [Complex<T>]) {
        match self {
            Self::Pauli(p) => p.apply_into(factor, v, out),
            Self::Dense(m) => {
                for (o, row) in out.iter_mut().zip(m.as_slice().chunks(m.dim())) {
                    let acc = row.iter().zip(v).fold(Complex::zero(), |a, (&x, &y)| a + x * y);
                    *o += factor * acc;
                }
            }
        }
    }

    /// Upper bound on the spectral norm.
    fn norm_bound(&self) -> T {
        match self {
            Self::Pauli(p) => p.terms().iter().map(|t| t.coefficient.abs()).sum(),
            Self::Dense(m) => m
                .as_slice()
                .chunks(m.dim())
                .map(|row| row.iter().map(|z| z.norm()).sum::<T>())
                .fold(T::zero(), T::max),
        }
    }
}

/// Matrix-free action of `a H_i + b H_f` and its exponential.
pub(crate) struct PathGenerator<T> {
    initial: Action<T>,
    target: Action<T>,
    bounds: (T, T),
}

impl<T: Real> PathGenerator<T> {
    pub fn new(path: &AdiabaticPath<T>) -> Self {
        let initial = Action::of(path.initial());
        let target = Action::of(path.target());
        let bounds = (initial.norm_bound(), target.norm_bound());
        Self { initial, target, bounds }
    }

    /// `out = factor (a H_i + b H_f) v`.
    fn apply(&self, a: T, b: T, factor: Complex<T>, v: &[Complex<T>], out: &mut [Complex<T>]) {
        out.iter_mut().for_each(|z| *z = Complex::zero());
        if a != T::zero() {
            self.initial.apply_into(factor * a, v, out);
        }
        if b != T::zero() {
            self.target.apply_into(factor * b, v, out);
        }
    }

    /// `v <- exp(-i tau (a H_i + b H_f)) v` by a truncated Taylor series on substeps of unit norm.
    pub fn exp_apply(&self, a: T, b: T, tau: T, v: &mut [Complex<T>]) {
        let bound = (a.abs() * self.bounds.0 + b.abs() * self.bounds.1) * tau.abs();
        let pieces = bound.ceil().to_usize().unwrap_or(1).max(1);
        let h = tau / T::from_count(pieces);
        let factor = Complex::new(T::zero(), -h);
        let mut term = vec![Complex::zero(); v.len()];
        let mut next = vec![Complex::zero(); v.len()];
        let floor = T::epsilon() * T::lit(0.01);
        for _ in 0..pieces {
            term.copy_from_slice(v);
            let scale = norm2(v);
            for k in 1..=60 {
                self.apply(a, b, factor / T::from_count(k), &term, &mut next);
                std::mem::swap(&mut term, &mut next);
                for (x, &t) in v.iter_mut().zip(&term) {
                    *x += t;
                }
                if norm2(&term) <= floor * scale {
                    break;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix_exp_hermitian;
    use crate::model::tfim_path;

    #[test]
    fn taylor_action_matches_dense_exponential() {
        let path = tfim_path::<f64>(3, false).unwrap();
        let gen = PathGenerator::new(&path);
        let (a, b, tau) = (0.3, 1.7, 2.5);
        let mut k = path.initial().matrix().scale_real(a);
        k.add_scaled(Complex::new(b, 0.0), path.target().matrix());
        let u = matrix_exp_hermitian(&k, tau).unwrap();
        let v0: Vec<Complex<f64>> = (0..8).map(|i| Complex::new(1.0 / (1.0 + i as f64), 0.1 * i as f64)).collect();
        let expected = u.apply(&v0);
        let mut v = v0.clone();
        gen.exp_apply(a, b, tau, &mut v);
        for (x, y) in v.iter().zip(&expected) {
            assert!((x - y).norm() < 1e-13);
        }
    }
}
