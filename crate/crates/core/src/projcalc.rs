//! Ground projector `P`, reduced resolvent `G` and numerical checks of their derivative identities.
//!
//! Everything uses the shifted Hamiltonian `H = Hbar - E_0 I`, so `HP = 0` and `GH = HG = I - P`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, matrix_exp_hermitian, operator_norm, tolerances, ComplexMatrix};
use crate::model::{AdiabaticPath, HermitianOperator};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct ProjectorFrame<T> {
    /// Rank-one ground projector.
    pub p: ComplexMatrix<T>,
    /// `sum_{k>0} P_k / (E_k - E_0)`.
    pub g: ComplexMatrix<T>,
    pub e0: T,
    /// `Hbar - E_0 I`.
    pub shifted: ComplexMatrix<T>,
}

/// Deviations of a [`ProjectorFrame`] from its defining identities (spectral norms).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct FrameResiduals<T> {
    pub idempotence: T,
    pub hermiticity: T,
    pub gp: T,
    pub pg: T,
    pub gh: T,
    pub hg: T,
    pub hp: T,
}

impl<T: Real> FrameResiduals<T> {
    pub fn max(&self) -> T {
        [self.idempotence, self.hermiticity, self.gp, self.pg, self.gh, self.hg, self.hp]
            .into_iter()
            .fold(T::zero(), T::max)
    }
}

impl<T: Real> ProjectorFrame<T> {
    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    pub fn residuals(&self) -> Result<FrameResiduals<T>> {
        let complement = &ComplexMatrix::identity(self.dim()) - &self.p;
        let norm = |m: ComplexMatrix<T>| operator_norm(&m);
        Ok(FrameResiduals {
            idempotence: norm(&self.p.matmul(&self.p) - &self.p)?,
            hermiticity: norm(&self.p.adjoint() - &self.p)?,
            gp: norm(self.g.matmul(&self.p))?,
            pg: norm(self.p.matmul(&self.g))?,
            gh: norm(&self.g.matmul(&self.shifted) - &complement)?,
            hg: norm(&self.shifted.matmul(&self.g) - &complement)?,
            hp: norm(self.shifted.matmul(&self.p))?,
        })
    }
}

pub fn projector_frame<T: Real>(h: &HermitianOperator<T>) -> Result<ProjectorFrame<T>> {
    frame_of(h.matrix())
}

fn frame_of<T: Real>(h: &ComplexMatrix<T>) -> Result<ProjectorFrame<T>> {
    let dec = hermitian_eig(h)?;
    let n = dec.dim();
    if n > 1 && dec.gap(1) <= T::lit(tolerances::DEGENERACY) {
        return Err(Error::DegenerateGround { gap: dec.gap(1).as_f64() });
    }
    let e0 = dec.eigenvalues[0];
    let p = dec.map_eigenvalues(|e| if e == e0 { Complex::new(T::one(), T::zero()) } else { Complex::new(T::zero(), T::zero()) });
    let g = dec.map_eigenvalues(|e| {
        if e == e0 {
            Complex::new(T::zero(), T::zero())
        } else {
            Complex::new(T::one() / (e - e0), T::zero())
        }
    });
    let mut shifted = h.clone();
    for i in 0..n {
        shifted[(i, i)] -= Complex::new(e0, T::zero());
    }
    Ok(ProjectorFrame { p, g, e0, shifted })
}

/// `H'` of the shifted Hamiltonian: `Hbar' - <0|Hbar'|0> I`.
fn shifted_derivative<T: Real>(frame: &ProjectorFrame<T>, d: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let e0_prime = frame.p.matmul(d).trace().re;
    let mut out = d.clone();
    for i in 0..out.dim() {
        out[(i, i)] -= Complex::new(e0_prime, T::zero());
    }
    out
}

/// Spectral-norm residuals between central differences of `P`, `G` and
/// `P' = -G H' P - P H' G`, `G' = P H' G^2 - G H' G + G^2 H' P`.
pub fn verify_derivative_identities<T: Real>(path: &AdiabaticPath<T>, s: T, h: T) -> Result<(T, T)> {
    if !(h > T::zero()) || s - h < T::zero() || s + h > T::one() {
        return Err(Error::OutOfRange(s.as_f64()));
    }
    let frame_at = |x: T| -> Result<ProjectorFrame<T>> {
        let m = path.hamiltonian(x)?;
        let gap = path.spectral_gap(x, 1)?;
        if gap <= T::lit(1e-6) {
            return Err(Error::GapClosure { s: x.as_f64(), gap: gap.as_f64() });
        }
        frame_of(&m)
    };
    let (lo, mid, hi) = (frame_at(s - h)?, frame_at(s)?, frame_at(s + h)?);
    let two_h = h + h;
    let dp = (&hi.p - &lo.p).scale_real(T::one() / two_h);
    let dg = (&hi.g - &lo.g).scale_real(T::one() / two_h);

    let d = shifted_derivative(&mid, &path.derivative(s)?);
    let (p, g) = (&mid.p, &mid.g);
    let gdp = g.matmul(&d).matmul(p);
    let pdg = p.matmul(&d).matmul(g);
    let p_closed = -&(&gdp + &pdg);
    let g2 = g.matmul(g);
    let g_closed = &(&p.matmul(&d).matmul(&g2) - &g.matmul(&d).matmul(g)) + &g2.matmul(&d).matmul(p);
    Ok((operator_norm(&(&dp - &p_closed))?, operator_norm(&(&dg - &g_closed))?))
}

/// `||[G, H' P H']||` for a two-level path.
pub fn two_level_commutator_check<T: Real>(path: &AdiabaticPath<T>, s: T) -> Result<T> {
    if path.dim() != 2 {
        return Err(Error::WrongDimension { expected: 2, got: path.dim() });
    }
    commutator_norm(path, s)
}

/// `||[G, H' P H']||` in any dimension.
pub fn commutator_norm<T: Real>(path: &AdiabaticPath<T>, s: T) -> Result<T> {
    let frame = frame_of(&path.hamiltonian(s)?)?;
    let d = shifted_derivative(&frame, &path.derivative(s)?);
    let dpd = d.matmul(&frame.p).matmul(&d);
    operator_norm(&frame.g.commutator(&dpd))
}

/// `A(s) = T exp(-i T int_s^1 Hbar)` by dense fourth-order Magnus steps.
pub fn tail_propagator<T: Real>(path: &AdiabaticPath<T>, total_time: T, s: T, substeps: usize) -> Result<ComplexMatrix<T>> {
    let n = path.dim();
    let width = T::one() - s;
    let mut a = ComplexMatrix::identity(n);
    if width <= T::zero() {
        return Ok(a);
    }
    let h = width / T::from_count(substeps.max(1));
    let tau = total_time * h;
    let r = T::lit(3f64.sqrt() / 6.0);
    let (half, quarter) = (T::lit(0.5), T::lit(0.25));
    for k in 0..substeps.max(1) {
        let s0 = s + h * T::from_count(k);
        let h1 = path.hamiltonian(s0 + (half - r) * h)?;
        let h2 = path.hamiltonian(s0 + (half + r) * h)?;
        let mix = |x: T, y: T| {
            let mut m = h1.scale_real(x);
            m.add_scaled(Complex::new(y, T::zero()), &h2);
            m.hermitian_part()
        };
        let first = matrix_exp_hermitian(&mix(quarter + r, quarter - r), tau)?;
        let second = matrix_exp_hermitian(&mix(quarter - r, quarter + r), tau)?;
        // Later factors multiply on the left of the running product.
        a = second.matmul(&first).matmul(&a);
    }
    // The running product is U(1, s) with the earliest step applied first.
    Ok(a)
}

/// `||(A(s+h) - A(s))/h - i T A(s) Hbar(s)||`, which is `O(h)`.
pub fn evolution_derivative_residual<T: Real>(path: &AdiabaticPath<T>, total_time: T, s: T, h: T) -> Result<T> {
    if !(h > T::zero()) || s < T::zero() || s + h > T::one() {
        return Err(Error::OutOfRange(s.as_f64()));
    }
    let substeps = |x: T| ((total_time * (T::one() - x) * T::lit(40.0)).ceil().to_usize().unwrap_or(1)).max(200);
    let a = tail_propagator(path, total_time, s, substeps(s))?;
    let b = tail_propagator(path, total_time, s + h, substeps(s + h))?;
    let fd = (&b - &a).scale_real(T::one() / h);
    let rhs = a.matmul(&path.hamiltonian(s)?).scale(Complex::new(T::zero(), total_time));
    operator_norm(&(&fd - &rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tfim_path;

    fn op(rows: &[&[f64]]) -> HermitianOperator<f64> {
        HermitianOperator::new(ComplexMatrix::from_real_rows(rows).unwrap(), "m").unwrap()
    }

    #[test]
    fn two_level_diagonal_frame() {
        let f = projector_frame(&op(&[&[0.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert!((&f.p - &ComplexMatrix::from_real_diagonal(&[1.0, 0.0])).max_abs() < 1e-15);
        assert!((&f.g - &ComplexMatrix::from_real_diagonal(&[0.0, 1.0])).max_abs() < 1e-15);
    }

    #[test]
    fn three_level_resolvent() {
        let f = projector_frame(&op(&[&[0.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 5.0]])).unwrap();
        assert!((&f.g - &ComplexMatrix::from_real_diagonal(&[0.0, 0.5, 0.2])).max_abs() < 1e-15);
        assert_eq!(f.e0, 0.0);
    }

    #[test]
    fn degenerate_ground_is_rejected() {
        let r = projector_frame(&op(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]]));
        assert!(matches!(r, Err(Error::DegenerateGround { .. })));
    }

    #[test]
    fn tfim_frame_invariants() {
        let path = tfim_path::<f64>(4, false).unwrap();
        let f = projector_frame(&path.path_at(0.3, 0).unwrap()).unwrap();
        assert!(f.residuals().unwrap().max() < 1e-9);
    }

    #[test]
    fn constant_path_has_vanishing_derivatives() {
        let h = op(&[&[0.0, 1.0, 0.0], &[1.0, 1.0, 0.5], &[0.0, 0.5, 3.0]]);
        let path = AdiabaticPath::linear(h.clone(), h).unwrap();
        let (rp, rg) = verify_derivative_identities(&path, 0.5, 1e-3).unwrap();
        assert!(rp <= 1e-10 && rg <= 1e-10);
    }

    #[test]
    fn tfim_projector_derivative_matches() {
        let path = tfim_path::<f64>(4, false).unwrap();
        let (rp, rg) = verify_derivative_identities(&path, 0.5, 1e-4).unwrap();
        assert!(rp <= 1e-6, "{rp}");
        assert!(rg <= 1e-5, "{rg}");
    }

    #[test]
    fn commutator_vanishes_for_two_levels_only() {
        let path = AdiabaticPath::linear(op(&[&[1.0, 0.3], &[0.3, -1.0]]), op(&[&[-0.5, 1.0], &[1.0, 2.0]])).unwrap();
        assert!(two_level_commutator_check(&path, 0.5).unwrap() <= 1e-12);
        let three = AdiabaticPath::linear(
            op(&[&[1.0, 0.3, 0.0], &[0.3, -1.0, 0.7], &[0.0, 0.7, 2.0]]),
            op(&[&[-0.5, 1.0, 0.2], &[1.0, 2.0, 0.0], &[0.2, 0.0, 0.4]]),
        )
        .unwrap();
        assert!(commutator_norm(&three, 0.5).unwrap() > 1e-3);
        assert!(matches!(two_level_commutator_check(&three, 0.5), Err(Error::WrongDimension { .. })));
    }

    #[test]
    fn tail_propagator_derivative_is_first_order() {
        let path = tfim_path::<f64>(2, false).unwrap();
        let r1 = evolution_derivative_residual(&path, 3.0, 0.4, 1e-3).unwrap();
        let r2 = evolution_derivative_residual(&path, 3.0, 0.4, 5e-4).unwrap();
        assert!((r1 / r2 - 2.0).abs() < 0.1, "{r1} {r2}");
    }
}
