use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::ComplexMatrix;
use super::state::StateVector;
use super::tolerances;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Phase convention applied to eigenvector columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gauge {
    /// Largest-magnitude entry of every column is real positive (lowest index on ties).
    LargestEntryReal,
    /// Columns rephased to have real nonnegative overlap with a reference frame.
    ParallelTransport,
}

/// Ascending eigenvalues with orthonormal, gauge-fixed eigenvectors (columns).
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
    pub gauge: Gauge,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        self.eigenvectors.column(k)
    }

    pub fn ground_state(&self) -> StateVector<T> {
        StateVector::normalized(self.vector(0)).expect("eigenvectors have unit norm")
    }

    /// `E_level - E_0`.
    pub fn gap(&self, level: usize) -> T {
        self.eigenvalues[level] - self.eigenvalues[0]
    }

    /// `V diag(f(E)) V^dag`.
    pub fn map_eigenvalues(&self, f: impl Fn(T) -> Complex<T>) -> ComplexMatrix<T> {
        let factors: Vec<Complex<T>> = self.eigenvalues.iter().map(|&e| f(e)).collect();
        let mut scaled = self.eigenvectors.clone();
        scaled.scale_columns(&factors);
        scaled.matmul(&self.eigenvectors.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.map_eigenvalues(|e| Complex::new(e, T::zero()))
    }

    /// `exp(-i H t)`.
    pub fn propagator(&self, t: T) -> ComplexMatrix<T> {
        self.map_eigenvalues(|e| Complex::from_polar(T::one(), -e * t))
    }
}

/// Eigendecomposition of a unitary: `U = V diag(exp(-i phase)) V^dag`.
#[derive(Clone, Debug)]
pub struct UnitaryEig<T> {
    /// Eigenphases in `(-pi, pi]`, ascending.
    pub phases: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> UnitaryEig<T> {
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let factors: Vec<Complex<T>> =
            self.phases.iter().map(|&p| Complex::from_polar(T::one(), -p)).collect();
        let mut scaled = self.eigenvectors.clone();
        scaled.scale_columns(&factors);
        scaled.matmul(&self.eigenvectors.adjoint())
    }
}

fn check_finite<T: Real>(m: &ComplexMatrix<T>) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn check_hermitian<T: Real>(h: &ComplexMatrix<T>) -> Result<()> {
    check_finite(h)?;
    let deviation = h.hermitian_deviation();
    if deviation > T::tol(tolerances::HERMITIAN) {
        return Err(Error::NotHermitian { deviation: deviation.as_f64() });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back ascending. Inside every cluster of eigenvalues closer
/// than [`tolerances::DEGENERACY`] the basis is replaced by a canonical one that
/// depends only on the eigenspace, then every column is gauge-fixed so that its
/// largest-magnitude entry is real positive.
pub fn hermitian_eig<T: Real>(h: &ComplexMatrix<T>) -> Result<SpectralDecomposition<T>> {
    check_hermitian(h)?;
    let n = h.dim();
    let sym = h.hermitian_part();
    let (eigenvalues, vectors) =
        T::self_adjoint_eig(n, sym.as_slice()).ok_or(Error::ConvergenceFailure)?;
    let mut eigenvectors = ComplexMatrix::from_row_major(vectors)?;
    if !eigenvalues.iter().all(|e| e.is_finite()) || !eigenvectors.is_finite() {
        return Err(Error::ConvergenceFailure);
    }
    for cluster in clusters(&eigenvalues, T::lit(tolerances::DEGENERACY)) {
        if cluster.len() > 1 {
            canonicalize_subspace(&mut eigenvectors, &cluster);
        }
    }
    fix_largest_entry_gauge(&mut eigenvectors);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors, gauge: Gauge::LargestEntryReal })
}

/// Ascending eigenvalues only.
pub fn hermitian_eigenvalues<T: Real>(h: &ComplexMatrix<T>) -> Result<Vec<T>> {
    check_hermitian(h)?;
    let sym = h.hermitian_part();
    let mut values = T::self_adjoint_eigvals(h.dim(), sym.as_slice()).ok_or(Error::ConvergenceFailure)?;
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(values)
}

/// Runs of consecutive (sorted) values closer than `tol`.
pub(crate) fn clusters<T: Real>(sorted: &[T], tol: T) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        match out.last_mut() {
            Some(last) if v - sorted[*last.last().unwrap()] < tol => last.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

/// Replaces the columns `cols` by a basis determined by their span alone:
/// pivoted Gram-Schmidt over the projections of the standard basis vectors.
pub(crate) fn canonicalize_subspace<T: Real>(v: &mut ComplexMatrix<T>, cols: &[usize]) {
    let n = v.dim();
    let k = cols.len();
    // Coordinates of P e_i in the current basis of the subspace.
    let mut residual: Vec<Vec<Complex<T>>> =
        (0..n).map(|i| cols.iter().map(|&c| v[(i, c)].conj()).collect()).collect();
    let mut weights: Vec<T> =
        residual.iter().map(|r| r.iter().map(|z| z.norm_sqr()).sum()).collect();
    let tie = T::lit(1e-12);
    let mut basis: Vec<Vec<Complex<T>>> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best = 0;
        for i in 1..n {
            if weights[i] > weights[best] + tie {
                best = i;
            }
        }
        let norm = weights[best].sqrt();
        let u: Vec<Complex<T>> = residual[best].iter().map(|&z| z / norm).collect();
        for (r, w) in residual.iter_mut().zip(weights.iter_mut()) {
            let proj = u.iter().zip(r.iter()).fold(Complex::zero(), |a: Complex<T>, (&x, &y)| a + x.conj() * y);
            for (ri, &ui) in r.iter_mut().zip(&u) {
                *ri -= ui * proj;
            }
            *w = r.iter().map(|z| z.norm_sqr()).sum();
        }
        basis.push(u);
    }
    let old: Vec<Vec<Complex<T>>> = cols.iter().map(|&c| v.column(c)).collect();
    for (slot, u) in cols.iter().zip(&basis) {
        let col: Vec<Complex<T>> = (0..n)
            .map(|i| old.iter().zip(u).fold(Complex::zero(), |a, (o, &ui)| a + o[i] * ui))
            .collect();
        v.set_column(*slot, &col);
    }
}

/// Rephases every column so its largest-magnitude entry is real positive.
pub(crate) fn fix_largest_entry_gauge<T: Real>(v: &mut ComplexMatrix<T>) {
    let n = v.dim();
    let tie = T::lit(tolerances::GAUGE_TIE);
    let mut factors = Vec::with_capacity(n);
    for j in 0..n {
        let mut best = 0;
        let mut best_mag = v[(0, j)].norm();
        for i in 1..n {
            let mag = v[(i, j)].norm();
            if mag > best_mag + tie {
                best = i;
                best_mag = mag;
            }
        }
        let pivot = v[(best, j)];
        factors.push(if best_mag > T::zero() { pivot.conj() / best_mag } else { Complex::one() });
    }
    v.scale_columns(&factors);
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase<T: Real>(x: T) -> T {
    let two_pi = T::TAU();
    let mut y = x % two_pi;
    if y < T::zero() {
        y += two_pi;
    }
    if y > T::PI() {
        y - two_pi
    } else {
        y
    }
}

/// Centre of the spectrum opposite the widest gap between eigenphases.
///
/// Rotating by this angle keeps every eigenphase at least half the widest gap
/// away from the branch cut.
pub fn spectral_center<T: Real>(phases: &[T]) -> T {
    if phases.is_empty() {
        return T::zero();
    }
    let mut sorted: Vec<T> = phases.iter().map(|&p| wrap_phase(p)).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite phases"));
    let n = sorted.len();
    let mut best_start = sorted[n - 1];
    let mut best_gap = sorted[0] + T::TAU() - sorted[n - 1];
    for w in sorted.windows(2) {
        if w[1] - w[0] > best_gap {
            best_gap = w[1] - w[0];
            best_start = w[0];
        }
    }
    wrap_phase(best_start + best_gap / T::lit(2.0) + T::PI())
}

fn check_unitary<T: Real>(u: &ComplexMatrix<T>) -> Result<()> {
    check_finite(u)?;
    let deviation = u.unitary_deviation();
    if deviation > T::tol(tolerances::UNITARY) {
        return Err(Error::NotUnitary { deviation: deviation.as_f64() });
    }
    Ok(())
}

/// Eigenphases and eigenvectors of a unitary, `U = V diag(exp(-i theta)) V^dag`,
/// with `theta` in `(-pi, pi]` ascending.
///
/// The unitary is rotated away from its widest spectral gap and mapped to a
/// Hermitian matrix by the Cayley transform `i (U - I)(U + I)^-1`, whose
/// eigenvalues `tan(theta / 2)` are monotone in the phase, so the Hermitian
/// solver (with its cluster canonicalization and gauge) does the work.
pub fn unitary_eig<T: Real>(u: &ComplexMatrix<T>) -> Result<UnitaryEig<T>> {
    check_unitary(u)?;
    let center = initial_center(u)?;
    cayley_eig(u, center)
}

/// Like [`unitary_eig`], but takes the rotation centre from a nearby spectrum
/// (for example the previous member of a continuously varying family). Falls
/// back to a fresh spectral estimate when the hint leaves an eigenphase too
/// close to the branch cut.
pub fn unitary_eig_with_hint<T: Real>(u: &ComplexMatrix<T>, nearby_phases: &[T]) -> Result<UnitaryEig<T>> {
    check_unitary(u)?;
    let center = spectral_center(nearby_phases);
    match cayley_eig(u, center) {
        Ok(eig) if max_rotated_phase(&eig.phases, center) < T::PI() - T::lit(tolerances::CAYLEY_MARGIN) => {
            Ok(eig)
        }
        _ => cayley_eig(u, initial_center(u)?),
    }
}

fn max_rotated_phase<T: Real>(phases: &[T], center: T) -> T {
    phases.iter().map(|&p| wrap_phase(p - center).abs()).fold(T::zero(), T::max)
}

fn initial_center<T: Real>(u: &ComplexMatrix<T>) -> Result<T> {
    let values = T::eigvals(u.dim(), u.as_slice()).ok_or(Error::ConvergenceFailure)?;
    let phases: Vec<T> = values.iter().map(|z| -z.arg()).collect();
    Ok(spectral_center(&phases))
}

fn cayley_eig<T: Real>(u: &ComplexMatrix<T>, center: T) -> Result<UnitaryEig<T>> {
    let n = u.dim();
    let rotated = u.scale(Complex::from_polar(T::one(), center));
    let id = ComplexMatrix::identity(n);
    let plus = &rotated + &id;
    let mut x = (&rotated - &id).into_vec();
    T::lu_solve(n, plus.as_slice(), &mut x);
    let cayley = ComplexMatrix::from_row_major(x)?.scale(Complex::i());
    if !cayley.is_finite() {
        return Err(Error::ConvergenceFailure);
    }
    let dec = hermitian_eig(&cayley.hermitian_part())?;
    let two = T::lit(2.0);
    let phases: Vec<T> = dec.eigenvalues.iter().map(|&k| wrap_phase(two * k.atan() + center)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| phases[a].partial_cmp(&phases[b]).expect("finite phases"));
    let sorted_phases = order.iter().map(|&k| phases[k]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (slot, &k) in order.iter().enumerate() {
        eigenvectors.set_column(slot, &dec.eigenvectors.column(k));
    }
    Ok(UnitaryEig { phases: sorted_phases, eigenvectors })
}
