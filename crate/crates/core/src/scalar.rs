//! Scalar abstraction.
//!
//! Everything numerical in this crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. Tolerances throughout the crate are
//! calibrated for `f64` and rescaled by [`Real::tol`] for coarser types.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar used by every operator, state and report.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + kernels::Kernels
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Rescales an `f64`-calibrated tolerance to this type's precision:
    /// unchanged for `f64`, floored at `1e3 * epsilon` for coarser types.
    fn tol(x: f64) -> Self {
        let eps = Self::epsilon().as_f64();
        if eps <= f64::EPSILON {
            Self::lit(x)
        } else {
            Self::lit(x.max(1e3 * eps))
        }
    }

    fn from_count(n: usize) -> Self {
        Self::lit(n as f64)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub(crate) mod kernels {
    //! Dense kernels delegated to `faer`. Matrices are square, row-major.

    use faer::linalg::solvers::Solve;
    use faer::{Accum, MatMut, MatRef, Par, Side};
    use num_complex::Complex;

    pub trait Kernels: Sized {
        fn gemm(n: usize, a: &[Complex<Self>], b: &[Complex<Self>], out: &mut [Complex<Self>]);

        /// Ascending eigenvalues and (optionally) row-major eigenvector matrix.
        fn self_adjoint_eig(
            n: usize,
            a: &[Complex<Self>],
        ) -> Option<(Vec<Self>, Vec<Complex<Self>>)>;

        fn self_adjoint_eigvals(n: usize, a: &[Complex<Self>]) -> Option<Vec<Self>>;

        fn singular_values(n: usize, a: &[Complex<Self>]) -> Option<Vec<Self>>;

        fn eigvals(n: usize, a: &[Complex<Self>]) -> Option<Vec<Complex<Self>>>;

        /// Solves `a x = b` in place (`b` is n x n, row-major).
        fn lu_solve(n: usize, a: &[Complex<Self>], b: &mut [Complex<Self>]);
    }

    macro_rules! impl_kernels {
        ($t:ty) => {
            impl Kernels for $t {
                fn gemm(
                    n: usize,
                    a: &[Complex<$t>],
                    b: &[Complex<$t>],
                    out: &mut [Complex<$t>],
                ) {
                    let lhs = MatRef::from_row_major_slice(a, n, n);
                    let rhs = MatRef::from_row_major_slice(b, n, n);
                    let dst = MatMut::from_row_major_slice_mut(out, n, n);
                    faer::linalg::matmul::matmul(
                        dst,
                        Accum::Replace,
                        lhs,
                        rhs,
                        Complex::new(1.0, 0.0),
                        Par::Seq,
                    );
                }

                fn self_adjoint_eig(
                    n: usize,
                    a: &[Complex<$t>],
                ) -> Option<(Vec<$t>, Vec<Complex<$t>>)> {
                    let view = MatRef::from_row_major_slice(a, n, n);
                    let evd = view.self_adjoint_eigen(Side::Lower).ok()?;
                    let values: Vec<$t> =
                        evd.S().column_vector().iter().map(|z| z.re).collect();
                    let u = evd.U();
                    let mut vectors = vec![Complex::new(0.0, 0.0); n * n];
                    for i in 0..n {
                        for j in 0..n {
                            vectors[i * n + j] = u[(i, j)];
                        }
                    }
                    Some((values, vectors))
                }

                fn self_adjoint_eigvals(n: usize, a: &[Complex<$t>]) -> Option<Vec<$t>> {
                    MatRef::from_row_major_slice(a, n, n)
                        .self_adjoint_eigenvalues(Side::Lower)
                        .ok()
                }

                fn singular_values(n: usize, a: &[Complex<$t>]) -> Option<Vec<$t>> {
                    MatRef::from_row_major_slice(a, n, n).singular_values().ok()
                }

                fn eigvals(n: usize, a: &[Complex<$t>]) -> Option<Vec<Complex<$t>>> {
                    MatRef::from_row_major_slice(a, n, n).eigenvalues().ok()
                }

                fn lu_solve(n: usize, a: &[Complex<$t>], b: &mut [Complex<$t>]) {
                    let lu = MatRef::from_row_major_slice(a, n, n).partial_piv_lu();
                    let rhs = MatMut::from_row_major_slice_mut(b, n, n);
                    lu.solve_in_place(rhs);
                }
            }
        };
    }

    impl_kernels!(f32);
    impl_kernels!(f64);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerances_scale_with_precision() {
        assert_eq!(<f64 as Real>::tol(1e-10), 1e-10);
        assert!(<f32 as Real>::tol(1e-10) > 1e-5);
        assert_eq!(<f32 as Real>::tol(0.5), 0.5);
    }
}
