//! Eigenvector-overlap continuation along an operator family, used to detect closing gaps.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolve::{trotter_step_unitary, EvolutionSpec};
use crate::linalg::{
    clusters, hermitian_eig, inner, norm2, tolerances, unitary_eig, unitary_eig_with_hint, wrap_phase, ComplexMatrix,
};
use crate::model::AdiabaticPath;
use crate::scalar::Real;

/// Default overlap threshold.
pub const DEFAULT_THRESHOLD: f64 = 0.99;

/// Default number of continuation steps, one per Trotter step of the reference schedule.
pub const DEFAULT_STEPS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    HermitianPath,
    TrotterUnitary,
}

/// Operators `O(s)`, `s in [0, 1]`, whose eigenvectors are followed.
#[derive(Clone, Debug)]
pub enum OperatorFamily<T> {
    /// `H(s)` itself.
    Hermitian(Arc<AdiabaticPath<T>>),
    /// One Trotter step `U_tro(s, dt)` with the layers of `template`.
    TrotterUnitary { template: EvolutionSpec<T>, dt: T },
}

impl<T: Real> OperatorFamily<T> {
    /// Trotter family with step `dt`; only the path and layers of `template` are used.
    pub fn trotter(template: &EvolutionSpec<T>, dt: T) -> Result<Self> {
        let spec = template.with_total_time(dt * T::from_count(template.steps))?;
        Ok(Self::TrotterUnitary { template: spec, dt })
    }

    pub fn kind(&self) -> FamilyKind {
        match self {
            Self::Hermitian(_) => FamilyKind::HermitianPath,
            Self::TrotterUnitary { .. } => FamilyKind::TrotterUnitary,
        }
    }

    pub fn path(&self) -> &AdiabaticPath<T> {
        match self {
            Self::Hermitian(p) => p,
            Self::TrotterUnitary { template, .. } => &template.path,
        }
    }

    fn dt(&self) -> Option<T> {
        match self {
            Self::Hermitian(_) => None,
            Self::TrotterUnitary { dt, .. } => Some(*dt),
        }
    }

    /// Eigenvalues (energies or eigenphases, ascending) with matching eigenvector columns.
    fn spectrum(&self, s: T, hint: Option<&[T]>) -> Result<(Vec<T>, ComplexMatrix<T>)> {
        match self {
            Self::Hermitian(path) => {
                let dec = hermitian_eig(&path.hamiltonian(s)?)?;
                Ok((dec.eigenvalues, dec.eigenvectors))
            }
            Self::TrotterUnitary { template, .. } => {
                let u = trotter_step_unitary(template, s)?.matrix;
                let eig = match hint {
                    Some(h) => unitary_eig_with_hint(&u, h)?,
                    None => unitary_eig(&u)?,
                };
                Ok((eig.phases, eig.eigenvectors))
            }
        }
    }

    /// Distance between two eigenvalues; phases are compared on the circle.
    fn separation(&self, a: T, b: T) -> T {
        match self {
            Self::Hermitian(_) => (a - b).abs(),
            Self::TrotterUnitary { .. } => wrap_phase(a - b).abs(),
        }
    }
}

/// Overlaps `|<phi_j|phi_{j+1}>|^2` recorded along one continuation.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ZenoTrace<T> {
    pub overlaps: Vec<T>,
    pub min_overlap: T,
    /// Step (1-based, `s = step / steps`) of the smallest overlap.
    pub argmin: usize,
    pub pass: bool,
    pub threshold: T,
    pub family: FamilyKind,
    pub dt: Option<T>,
    /// Distance from the followed eigenvalue to its nearest neighbour, per step.
    pub gaps: Vec<T>,
}

impl<T: Real> ZenoTrace<T> {
    /// First step whose overlap is at or below the threshold.
    pub fn first_failure(&self) -> Option<usize> {
        self.overlaps.iter().position(|&o| o <= self.threshold).map(|k| k + 1)
    }
}

/// Follows the ground state of `O(0)` through `O(j / steps)`, `j = 1..steps`.
///
/// Each step keeps the eigenvector (or degenerate eigenspace) of the next operator with the largest
/// overlap, searching the whole spectrum.
pub fn near_degeneracy_test<T: Real>(family: &OperatorFamily<T>, steps: usize, threshold: T) -> Result<ZenoTrace<T>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("at least one step is required".into()));
    }
    if !(threshold > T::zero() && threshold <= T::one()) {
        return Err(Error::InvalidArgument(format!("threshold {threshold} is outside (0, 1]")));
    }
    let ground = hermitian_eig(&family.path().hamiltonian(T::zero())?)?;
    if ground.dim() > 1 && ground.gap(1) <= T::lit(tolerances::DEGENERACY) {
        return Err(Error::DegenerateGround { gap: ground.gap(1).as_f64() });
    }
    let (mut values, vectors) = family.spectrum(T::zero(), None)?;
    let (mut phi, _, _) = select(family, &values, &vectors, &ground.vector(0));

    let mut overlaps = Vec::with_capacity(steps);
    let mut gaps = Vec::with_capacity(steps);
    for j in 1..=steps {
        let s = T::from_count(j) / T::from_count(steps);
        let (next_values, vectors) = family.spectrum(s, Some(&values))?;
        let (next, overlap, gap) = select(family, &next_values, &vectors, &phi);
        overlaps.push(overlap);
        gaps.push(gap);
        phi = next;
        values = next_values;
    }
    let (argmin, min_overlap) = overlaps
        .iter()
        .enumerate()
        .fold((0, T::infinity()), |acc, (k, &o)| if o < acc.1 { (k, o) } else { acc });
    Ok(ZenoTrace {
        pass: min_overlap > threshold,
        overlaps,
        min_overlap,
        argmin: argmin + 1,
        threshold,
        family: family.kind(),
        dt: family.dt(),
        gaps,
    })
}

/// Best-overlapping eigenspace of `vectors`: its normalized projection of `phi`, the captured weight
/// and the distance from its eigenvalue to the nearest other eigenvalue.
fn select<T: Real>(
    family: &OperatorFamily<T>,
    values: &[T],
    vectors: &ComplexMatrix<T>,
    phi: &[Complex<T>],
) -> (Vec<Complex<T>>, T, T) {
    let n = values.len();
    let coeffs: Vec<Complex<T>> = (0..n).map(|k| inner(&vectors.column(k), phi)).collect();
    let groups = clusters(values, T::lit(tolerances::DEGENERACY));
    let weight = |g: &[usize]| g.iter().map(|&k| coeffs[k].norm_sqr()).sum::<T>();
    let best = groups
        .iter()
        .max_by(|a, b| weight(a).partial_cmp(&weight(b)).expect("finite overlaps"))
        .expect("nonempty spectrum");
    let mut next = vec![Complex::zero(); n];
    for &k in best {
        let c = coeffs[k];
        for (x, v) in next.iter_mut().zip(vectors.column(k)) {
            *x += v * c;
        }
    }
    let norm = norm2(&next);
    if norm > T::zero() {
        next.iter_mut().for_each(|x| *x /= norm);
    }
    let own = values[best[0]];
    let gap = (0..n)
        .filter(|k| !best.contains(k))
        .map(|k| family.separation(values[k], own))
        .fold(T::infinity(), T::min);
    (next, weight(best).min(T::one()), gap)
}

/// Pass/fail per Trotter step and the resulting critical step.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CriticalStep<T> {
    /// Midpoint between the last pass before the first failure and that failure.
    pub t_c: T,
    /// `(dt, pass, min_overlap)` in grid order.
    pub results: Vec<(T, bool, T)>,
    pub first_failure: T,
    /// Every pass precedes every failure.
    pub monotone: bool,
}

/// Runs the test on `U_tro(s, dt)` for every `dt` in the ascending grid and locates the critical step.
pub fn critical_step_search<T: Real>(
    template: &EvolutionSpec<T>,
    dt_grid: &[T],
    threshold: T,
    steps: usize,
) -> Result<CriticalStep<T>> {
    let traces = step_sweep(template, dt_grid, threshold, steps)?;
    locate_critical_step(dt_grid.iter().zip(&traces).map(|(&dt, t)| (dt, t.pass, t.min_overlap)).collect())
}

/// One [`ZenoTrace`] per `dt`, in grid order.
pub fn step_sweep<T: Real>(template: &EvolutionSpec<T>, dt_grid: &[T], threshold: T, steps: usize) -> Result<Vec<ZenoTrace<T>>> {
    if dt_grid.is_empty() {
        return Err(Error::InvalidArgument("empty step grid".into()));
    }
    if dt_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("step grid must be strictly ascending".into()));
    }
    dt_grid
        .par_iter()
        .map(|&dt| near_degeneracy_test(&OperatorFamily::trotter(template, dt)?, steps, threshold))
        .collect()
}

/// Critical step from `(dt, pass, min_overlap)` results in ascending `dt` order.
pub fn locate_critical_step<T: Real>(results: Vec<(T, bool, T)>) -> Result<CriticalStep<T>> {
    let Some(fail) = results.iter().position(|r| !r.1) else { return Err(Error::AllPass) };
    if fail == 0 {
        return Err(Error::AllFail);
    }
    let monotone = results[fail..].iter().all(|r| !r.1);
    let (before, first_failure) = (results[fail - 1].0, results[fail].0);
    Ok(CriticalStep { t_c: (before + first_failure) / T::lit(2.0), results, first_failure, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::Layer;
    use crate::model::{tfim_path, HermitianOperator};

    fn spec(n: usize) -> EvolutionSpec<f64> {
        EvolutionSpec::new(Arc::new(tfim_path(n, false).unwrap()), 1.0, 100).unwrap()
    }

    #[test]
    fn constant_family_passes_with_unit_overlaps() {
        let h = HermitianOperator::new(ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 2.0]]).unwrap(), "h").unwrap();
        let fam = OperatorFamily::Hermitian(Arc::new(AdiabaticPath::linear(h.clone(), h).unwrap()));
        let trace = near_degeneracy_test(&fam, 10, 0.99).unwrap();
        assert!(trace.pass);
        assert!(trace.overlaps.iter().all(|&o: &f64| (o - 1.0).abs() < 1e-12));
        assert_eq!(trace.overlaps.len(), 10);
    }

    #[test]
    fn exact_path_passes() {
        let fam = OperatorFamily::Hermitian(spec(4).path.clone());
        let trace = near_degeneracy_test(&fam, 100, 0.99).unwrap();
        assert!(trace.pass, "{}", trace.min_overlap);
        assert!(trace.overlaps.iter().all(|&o| (0.0..=1.0).contains(&o)));
    }

    #[test]
    fn small_trotter_step_follows_the_ground_state() {
        let fam = OperatorFamily::trotter(&spec(4), 0.1).unwrap();
        let trace = near_degeneracy_test(&fam, 100, 0.99).unwrap();
        assert!(trace.pass, "{}", trace.min_overlap);
        assert_eq!(trace.dt, Some(0.1));
        assert_eq!(trace.family, FamilyKind::TrotterUnitary);
    }

    #[test]
    fn unsplit_family_passes_below_the_phase_limit() {
        let template = spec(3).with_layers(vec![Layer::Full]).unwrap();
        let r = critical_step_search(&template, &[0.1, 0.3, 0.5], 0.99, 100);
        assert!(matches!(r, Err(Error::AllPass)));
    }

    #[test]
    fn critical_step_is_the_midpoint_of_the_transition() {
        let c = locate_critical_step(vec![(0.1, true, 1.0), (0.2, true, 1.0), (0.3, false, 0.5), (0.4, true, 0.995)]).unwrap();
        assert!((c.t_c - 0.25f64).abs() < 1e-15);
        assert_eq!(c.first_failure, 0.3);
        assert!(!c.monotone);
        assert!(matches!(locate_critical_step(vec![(0.1, false, 0.5f64)]), Err(Error::AllFail)));
    }

    #[test]
    fn search_rejects_unsorted_grids() {
        assert!(critical_step_search(&spec(2), &[0.5, 0.2], 0.99, 10).is_err());
    }
}
