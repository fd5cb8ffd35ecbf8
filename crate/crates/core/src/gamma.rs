//! `A_d` written in the instantaneous eigenframes: transition matrices, the `Gamma` product and its
//! first-order transition amplitudes.

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolve::{EvolutionSpec, Method, UnitaryOperator};
use crate::linalg::{clusters, fix_largest_entry_gauge, hermitian_eig, inner, tolerances, ComplexMatrix};
use crate::model::AdiabaticPath;
use crate::quad::oscillatory_integral;
use crate::scalar::Real;

/// Which level coincidences abort frame construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FramePolicy {
    /// Every pair of levels must stay separated.
    Strict,
    /// Only the ground level must stay separated; excited levels are labeled by continuity.
    #[default]
    GroundOnly,
}

/// Eigenbasis of `H(s)` with columns labeled by continuity from the first frame.
#[derive(Clone, Debug)]
pub struct EigenFrame<T> {
    pub s: T,
    /// `E_l(s)` in label order; label 0 is the ground level.
    pub energies: Vec<T>,
    /// Column `l` is `|l(s)>`.
    pub basis: ComplexMatrix<T>,
    /// `<0|H'(s)|l>` in the current gauge.
    coupling: Vec<Complex<T>>,
}

impl<T: Real> EigenFrame<T> {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `E_l - E_0`.
    pub fn lambda(&self, l: usize) -> T {
        self.energies[l] - self.energies[0]
    }

    pub fn lambdas(&self) -> Vec<T> {
        (0..self.dim()).map(|l| self.lambda(l)).collect()
    }

    pub fn coupling(&self) -> &[Complex<T>] {
        &self.coupling
    }

    /// `<0|H'|l> / lambda_l` for `l >= 1`.
    pub fn theta(&self, l: usize) -> Complex<T> {
        self.coupling[l] / self.lambda(l)
    }

    /// Multiplies column `l` by `phases[l]`.
    pub fn rephase(&mut self, phases: &[Complex<T>]) {
        self.basis.scale_columns(phases);
        let p0 = phases[0].conj();
        for (c, &p) in self.coupling.iter_mut().zip(phases) {
            *c = *c * p0 * p;
        }
    }
}

/// Frames at the grid points of `spec`.
pub fn eigenframe_sequence<T: Real>(spec: &EvolutionSpec<T>) -> Result<Vec<EigenFrame<T>>> {
    eigenframes(&spec.path, &spec.samples(), FramePolicy::default())
}

/// Frames at increasing `samples`, in the parallel-transport gauge.
///
/// The first frame splits degenerate levels by diagonalizing `H'` inside each cluster. Later frames
/// match columns to labels by largest overlap and rotate each cluster onto its predecessor.
pub fn eigenframes<T: Real>(
    path: &AdiabaticPath<T>,
    samples: &[T],
    policy: FramePolicy,
) -> Result<Vec<EigenFrame<T>>> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no sample points".into()));
    }
    let decs = samples
        .par_iter()
        .map(|&s| hermitian_eig(&path.hamiltonian(s)?))
        .collect::<Result<Vec<_>>>()?;
    let mut frames: Vec<EigenFrame<T>> = Vec::with_capacity(samples.len());
    for (j, (dec, &s)) in decs.into_iter().zip(samples).enumerate() {
        check_separation(j, &dec.eigenvalues, policy)?;
        let deriv = path.derivative(s)?;
        let (energies, basis) = match frames.last() {
            None => initial_frame(dec.eigenvalues, dec.eigenvectors, &deriv),
            Some(prev) => follow(&prev.basis, dec.eigenvalues, dec.eigenvectors),
        };
        let coupling = couplings(&deriv, &basis);
        frames.push(EigenFrame { s, energies, basis, coupling });
    }
    Ok(frames)
}

fn check_separation<T: Real>(step: usize, sorted: &[T], policy: FramePolicy) -> Result<()> {
    let tol = T::lit(tolerances::DEGENERACY);
    let pairs = match policy {
        FramePolicy::GroundOnly => sorted.len().min(2).saturating_sub(1),
        FramePolicy::Strict => sorted.len().saturating_sub(1),
    };
    match (0..pairs).find(|&l| sorted[l + 1] - sorted[l] <= tol) {
        Some(l) => Err(Error::DegeneratePath { step, l, m: l + 1 }),
        None => Ok(()),
    }
}

fn initial_frame<T: Real>(
    energies: Vec<T>,
    mut v: ComplexMatrix<T>,
    deriv: &ComplexMatrix<T>,
) -> (Vec<T>, ComplexMatrix<T>) {
    for cluster in clusters(&energies, T::lit(tolerances::DEGENERACY)) {
        if cluster.len() < 2 {
            continue;
        }
        let cols: Vec<Vec<Complex<T>>> = cluster.iter().map(|&c| v.column(c)).collect();
        let images: Vec<Vec<Complex<T>>> = cols.iter().map(|c| deriv.apply(c)).collect();
        let k = cluster.len();
        let block = ComplexMatrix::from_fn(k, |a, b| inner(&cols[a], &images[b]));
        let Ok(sub) = hermitian_eig(&block) else { continue };
        for (b, &slot) in cluster.iter().enumerate() {
            let col = combine(&cols, |a| sub.eigenvectors[(a, b)]);
            v.set_column(slot, &col);
        }
    }
    fix_largest_entry_gauge(&mut v);
    (energies, v)
}

/// `sum_a coeff(a) cols[a]`.
fn combine<T: Real>(cols: &[Vec<Complex<T>>], coeff: impl Fn(usize) -> Complex<T>) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); cols[0].len()];
    for (a, col) in cols.iter().enumerate() {
        let c = coeff(a);
        for (o, &x) in out.iter_mut().zip(col) {
            *o += c * x;
        }
    }
    out
}

fn follow<T: Real>(prev: &ComplexMatrix<T>, energies: Vec<T>, v: ComplexMatrix<T>) -> (Vec<T>, ComplexMatrix<T>) {
    let n = energies.len();
    let overlap = prev.adjoint().matmul(&v);
    // Ground label is pinned; the rest go greedily by overlap weight.
    let mut labels = vec![usize::MAX; n];
    labels[0] = 0;
    let mut pairs: Vec<(T, usize, usize)> = Vec::with_capacity((n - 1) * (n - 1));
    for l in 1..n {
        for m in 1..n {
            pairs.push((overlap[(l, m)].norm_sqr(), l, m));
        }
    }
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite overlaps").then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut taken = vec![false; n];
    taken[0] = true;
    for (_, l, m) in pairs {
        if !taken[l] && labels[m] == usize::MAX {
            labels[m] = l;
            taken[l] = true;
        }
    }
    let mut basis = ComplexMatrix::zeros(n);
    let mut labeled = vec![T::zero(); n];
    for cluster in clusters(&energies, T::lit(tolerances::DEGENERACY)) {
        let labs: Vec<usize> = cluster.iter().map(|&m| labels[m]).collect();
        let k = cluster.len();
        let g = ComplexMatrix::from_fn(k, |a, b| overlap[(labs[a], cluster[b])]);
        let q = polar_factor(&g);
        let cols: Vec<Vec<Complex<T>>> = cluster.iter().map(|&c| v.column(c)).collect();
        // W = V_C Q^dag, so B_prev^dag W = Q P Q^dag is positive.
        for a in 0..k {
            let col = combine(&cols, |b| q[(a, b)].conj());
            basis.set_column(labs[a], &col);
            labeled[labs[a]] = energies[cluster[a]];
        }
    }
    (labeled, basis)
}

/// Unitary `Q` of the polar decomposition `G = Q P`; identity when `G` is (nearly) singular.
fn polar_factor<T: Real>(g: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let k = g.dim();
    let tiny = T::lit(1e-7);
    if k == 1 {
        let z = g[(0, 0)];
        let r = z.norm();
        return ComplexMatrix::from_diagonal(&[if r > tiny { z / r } else { Complex::one() }]);
    }
    let Ok(dec) = hermitian_eig(&g.adjoint().matmul(g)) else { return ComplexMatrix::identity(k) };
    if dec.eigenvalues[0] <= tiny * tiny {
        return ComplexMatrix::identity(k);
    }
    let inv_sqrt = dec.map_eigenvalues(|e| Complex::new(T::one() / e.sqrt(), T::zero()));
    g.matmul(&inv_sqrt)
}

/// `<0|H'|l>` for every column `l`.
fn couplings<T: Real>(deriv: &ComplexMatrix<T>, basis: &ComplexMatrix<T>) -> Vec<Complex<T>> {
    let image = deriv.apply(&basis.column(0));
    (0..basis.dim()).map(|l| inner(&image, &basis.column(l))).collect()
}

/// Rephases frames `1..` so every `<l(j)|l(j+1)>` is real nonnegative.
pub fn parallel_transport<T: Real>(frames: &mut [EigenFrame<T>]) {
    for j in 1..frames.len() {
        let (done, rest) = frames.split_at_mut(j);
        let (prev, cur) = (&done[j - 1], &mut rest[0]);
        let phases: Vec<Complex<T>> = (0..cur.dim())
            .map(|l| {
                let o = inner(&prev.basis.column(l), &cur.basis.column(l));
                let r = o.norm();
                if r > T::lit(1e-7) {
                    o.conj() / r
                } else {
                    Complex::one()
                }
            })
            .collect();
        cur.rephase(&phases);
    }
}

/// `S_j = B_{j+1}^dag B_j` for consecutive frames.
pub fn transition_matrices<T: Real>(frames: &[EigenFrame<T>]) -> Vec<ComplexMatrix<T>> {
    (0..frames.len().saturating_sub(1))
        .into_par_iter()
        .map(|j| frames[j + 1].basis.adjoint().matmul(&frames[j].basis))
        .collect()
}

/// `Gamma = Lambda_L S_{L-1} Lambda_{L-1} ... S_1 Lambda_1` with its zeroth- and first-order terms.
#[derive(Clone, Debug)]
pub struct GammaExpansion<T> {
    pub gamma: UnitaryOperator<T>,
    pub gamma0: ComplexMatrix<T>,
    pub gamma1: ComplexMatrix<T>,
    /// First-order amplitudes `Gamma1_{l0}`, `l >= 1`.
    pub eps_l: Vec<Complex<T>>,
    /// `sqrt(1 - |Gamma_00|^2)`.
    pub eps_adb_exact: T,
    /// `dt sum_j E_0(j)`, removed by the ground-energy shift.
    pub global_phase: T,
}

impl<T: Real> GammaExpansion<T> {
    /// `exp(-i phase) B_L Gamma B_1^dag`, which equals `A_d`.
    pub fn reconstruct(&self, frames: &[EigenFrame<T>]) -> ComplexMatrix<T> {
        let (first, last) = (&frames[0], &frames[frames.len() - 1]);
        last.basis
            .matmul(&self.gamma.matrix)
            .matmul(&first.basis.adjoint())
            .scale(Complex::from_polar(T::one(), -self.global_phase))
    }
}

pub fn gamma_product<T: Real>(
    frames: &[EigenFrame<T>],
    transitions: &[ComplexMatrix<T>],
    total_time: T,
) -> Result<GammaExpansion<T>> {
    let steps = frames.len();
    if steps == 0 {
        return Err(Error::InvalidArgument("no frames".into()));
    }
    if transitions.len() + 1 != steps {
        return Err(Error::DimensionMismatch { left: steps - 1, right: transitions.len() });
    }
    if !(total_time > T::zero()) {
        return Err(Error::InvalidArgument(format!("total time must be positive, got {total_time}")));
    }
    let n = frames[0].dim();
    let dt = total_time / T::from_count(steps);
    let phases = |lams: &[T]| -> Vec<Complex<T>> { lams.iter().map(|&x| Complex::from_polar(T::one(), -x * dt)).collect() };

    let mut gamma = ComplexMatrix::from_diagonal(&phases(&frames[0].lambdas()));
    for (s, frame) in transitions.iter().zip(&frames[1..]) {
        gamma = s.matmul(&gamma);
        gamma.scale_rows(&phases(&frame.lambdas()));
    }

    // prefix[k][l] = sum over the first k frames of lambda_l.
    let mut prefix = vec![vec![T::zero(); n]; steps + 1];
    for (k, frame) in frames.iter().enumerate() {
        prefix[k + 1] = prefix[k].iter().enumerate().map(|(l, &p)| p + frame.lambda(l)).collect();
    }
    let total = &prefix[steps];
    let mut gamma1 = ComplexMatrix::zeros(n);
    for (i, s) in transitions.iter().enumerate() {
        let right = phases(&prefix[i + 1]);
        let left: Vec<T> = (0..n).map(|l| total[l] - prefix[i + 1][l]).collect();
        let left = phases(&left);
        for l in 0..n {
            for m in 0..n {
                let mut x = s[(l, m)];
                if l == m {
                    x -= Complex::one();
                }
                gamma1[(l, m)] += left[l] * x * right[m];
            }
        }
    }
    let gamma0 = ComplexMatrix::from_diagonal(&phases(total));
    let eps_l = (1..n).map(|l| gamma1[(l, 0)]).collect();
    let eps_adb_exact = (T::one() - gamma[(0, 0)].norm_sqr()).max(T::zero()).sqrt();
    let global_phase = dt * frames.iter().map(|f| f.energies[0]).sum::<T>();
    Ok(GammaExpansion {
        gamma: UnitaryOperator { matrix: gamma, method: Method::Discrete, total_time, steps },
        gamma0,
        gamma1,
        eps_l,
        eps_adb_exact,
        global_phase,
    })
}

/// `eps_l = (1/L) sum_k theta_l(k) exp(-i dt sum_{j<k} lambda_l(j))` for `l >= 1`.
pub fn epsilon_l<T: Real>(frames: &[EigenFrame<T>], total_time: T) -> Result<Vec<Complex<T>>> {
    let steps = frames.len();
    if steps == 0 {
        return Err(Error::InvalidArgument("no frames".into()));
    }
    let dt = total_time / T::from_count(steps);
    let n = frames[0].dim();
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for l in 1..n {
        let mut acc = Complex::zero();
        let mut phase = T::zero();
        for (k, frame) in frames.iter().enumerate() {
            let lam = frame.lambda(l);
            if lam <= T::lit(tolerances::DEGENERACY) {
                return Err(Error::DegeneratePath { step: k, l: 0, m: l });
            }
            acc += frame.theta(l) * Complex::from_polar(T::one(), -phase);
            phase += dt * lam;
        }
        out.push(acc / T::from_count(steps));
    }
    Ok(out)
}

/// `int_0^1 theta_l(s) exp(-i T int_0^s lambda_l) ds`, refined until successive grids agree to `tol`.
pub fn epsilon_l_continuum<T: Real>(path: &AdiabaticPath<T>, total_time: T, level: usize, tol: T) -> Result<Complex<T>> {
    if level == 0 || level >= path.dim() {
        return Err(Error::InvalidArgument(format!("level {level} is not an excited level")));
    }
    oscillatory_integral(total_time, tol, |nodes| {
        let frames = eigenframes(path, nodes, FramePolicy::GroundOnly).map_err(|e| match e {
            Error::DegeneratePath { step, .. } => Error::GapClosure { s: nodes[step].as_f64(), gap: 0.0 },
            other => other,
        })?;
        let mut theta = Vec::with_capacity(frames.len());
        let mut lambda = Vec::with_capacity(frames.len());
        for f in &frames {
            let lam = f.lambda(level);
            if lam <= T::lit(tolerances::DEGENERACY) {
                return Err(Error::GapClosure { s: f.s.as_f64(), gap: lam.as_f64() });
            }
            theta.push(f.theta(level));
            lambda.push(lam);
        }
        Ok((theta, lambda))
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::evolve::DiscretePropagator;
    use crate::linalg::operator_norm;
    use crate::metrics::{endpoint_ground_states, fidelity_error};
    use crate::model::{tfim_path, HermitianOperator};

    fn spec(n: usize, total_time: f64, steps: usize) -> EvolutionSpec<f64> {
        EvolutionSpec::new(Arc::new(tfim_path(n, false).unwrap()), total_time, steps).unwrap()
    }

    fn constant_path() -> AdiabaticPath<f64> {
        let h = HermitianOperator::new(ComplexMatrix::from_real_rows(&[&[1.0, 0.5, 0.0], &[0.5, -1.0, 0.2], &[0.0, 0.2, 3.0]]).unwrap(), "h")
            .unwrap();
        AdiabaticPath::linear(h.clone(), h).unwrap()
    }

    #[test]
    fn two_frames_have_zero_ground_shift() {
        let frames = eigenframe_sequence(&spec(2, 1.0, 2)).unwrap();
        assert_eq!(frames.len(), 2);
        for f in &frames {
            assert_eq!(f.lambda(0), 0.0);
            assert!(f.lambdas()[1..].iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn constant_path_has_trivial_transitions() {
        let s = EvolutionSpec::new(Arc::new(constant_path()), 3.0, 6).unwrap();
        let frames = eigenframe_sequence(&s).unwrap();
        let trans = transition_matrices(&frames);
        assert_eq!(trans.len(), 5);
        for t in &trans {
            assert!((t - &ComplexMatrix::identity(3)).max_abs() < 1e-12);
        }
        let g = gamma_product(&frames, &trans, 3.0).unwrap();
        assert!(g.gamma.matrix.is_diagonal(1e-12));
        assert!(g.eps_adb_exact < 1e-7);
        assert!(epsilon_l(&frames, 3.0).unwrap().iter().all(|e| e.norm() < 1e-14));
    }

    #[test]
    fn transported_overlaps_are_real_nonnegative() {
        let frames = eigenframe_sequence(&spec(4, 1.0, 50)).unwrap();
        for s in transition_matrices(&frames) {
            assert!(s.is_unitary(1e-10));
            for l in 0..16 {
                let d = s[(l, l)];
                assert!(d.re >= 0.0 && d.im.abs() < 1e-12, "{d}");
            }
        }
    }

    #[test]
    fn single_step_gamma_is_diagonal() {
        let frames = eigenframe_sequence(&spec(2, 2.0, 1)).unwrap();
        let g = gamma_product(&frames, &[], 2.0).unwrap();
        assert!(g.gamma.matrix.is_diagonal(0.0));
        assert_eq!(g.eps_adb_exact, 0.0);
        assert!(matches!(gamma_product(&frames, &[ComplexMatrix::identity(4)], 2.0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn gamma_reconstructs_the_discrete_propagator() {
        let sp = spec(4, 50.0, 100);
        let frames = eigenframe_sequence(&sp).unwrap();
        let g = gamma_product(&frames, &transition_matrices(&frames), 50.0).unwrap();
        let a_d = DiscretePropagator::new(&sp).unwrap().unitary(50.0);
        assert!(operator_norm(&(&g.reconstruct(&frames) - &a_d)).unwrap() < 1e-9);
        assert!(g.gamma.matrix.is_unitary(1e-9));
        let col: f64 = (0..16).map(|l| g.gamma.matrix[(l, 0)].norm_sqr()).sum();
        assert!((col - 1.0).abs() < 1e-9);
        let (psi_i, psi_f) = endpoint_ground_states(&sp.path).unwrap();
        let fid = fidelity_error(&psi_i.evolve(&a_d).unwrap(), &psi_f).unwrap();
        assert!((fid - g.eps_adb_exact).abs() < 1e-9, "{fid} vs {}", g.eps_adb_exact);
    }

    #[test]
    fn first_order_amplitudes_estimate_the_exact_error() {
        let frames = eigenframe_sequence(&spec(2, 100.0, 200)).unwrap();
        let g = gamma_product(&frames, &transition_matrices(&frames), 100.0).unwrap();
        let est = epsilon_l(&frames, 100.0).unwrap().iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        assert!(((est - g.eps_adb_exact) / g.eps_adb_exact).abs() < 0.2, "{est} vs {}", g.eps_adb_exact);
    }

    #[test]
    fn amplitudes_ignore_the_input_gauge() {
        let mut frames = eigenframe_sequence(&spec(2, 30.0, 60)).unwrap();
        let before = epsilon_l(&frames, 30.0).unwrap();
        let mut seed = 0x2545f4914f6cdd1du64;
        for f in frames.iter_mut() {
            let phases: Vec<Complex<f64>> = (0..4)
                .map(|_| {
                    seed ^= seed << 13;
                    seed ^= seed >> 7;
                    seed ^= seed << 17;
                    Complex::from_polar(1.0, (seed % 10_000) as f64 * 6.283e-4)
                })
                .collect();
            f.rephase(&phases);
        }
        parallel_transport(&mut frames);
        let after = epsilon_l(&frames, 30.0).unwrap();
        for (a, b) in before.iter().zip(&after) {
            assert!((a.norm() - b.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn strict_policy_rejects_degenerate_excited_levels() {
        let sp = spec(2, 1.0, 3);
        let err = eigenframes(&sp.path, &sp.samples(), FramePolicy::Strict).unwrap_err();
        assert!(matches!(err, Error::DegeneratePath { step: 0, .. }));
    }

    #[test]
    fn continuum_rejects_the_ground_level() {
        let path = tfim_path::<f64>(2, false).unwrap();
        assert!(epsilon_l_continuum(&path, 10.0, 0, 1e-8).is_err());
    }
}
