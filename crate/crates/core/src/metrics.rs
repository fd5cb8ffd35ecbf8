//! Fidelity and norm errors, the adiabatic-theorem bound and scaling fits.

use crate::error::{Error, Result};
use crate::evolve::{
    exact_state_evolution, trotter_evolution, trotter_state, DiscretePropagator, EvolutionSpec, ExactOptions,
};
use crate::linalg::{hermitian_eig, hermitian_eigenvalues, operator_norm, tolerances, StateVector};
use crate::model::AdiabaticPath;
use crate::quad::simpson_sampled;
use crate::scalar::Real;

/// `sqrt(1 - |<phi|psi>|^2)`, clamped to `[0, 1]`.
pub fn fidelity_error<T: Real>(phi: &StateVector<T>, psi: &StateVector<T>) -> Result<T> {
    let overlap = phi.inner(psi)?.norm_sqr();
    Ok((T::one() - overlap).max(T::zero()).sqrt().min(T::one()))
}

/// Ground states of `H_i` and `H_f`, which must be nondegenerate.
pub fn endpoint_ground_states<T: Real>(path: &AdiabaticPath<T>) -> Result<(StateVector<T>, StateVector<T>)> {
    let ground = |s: T| -> Result<StateVector<T>> {
        let dec = hermitian_eig(&path.hamiltonian(s)?)?;
        if dec.dim() > 1 {
            let gap = dec.gap(1);
            if gap <= T::lit(tolerances::DEGENERACY) {
                return Err(Error::DegenerateEndpoint { s: s.as_f64(), gap: gap.as_f64() });
            }
        }
        Ok(dec.ground_state())
    };
    Ok((ground(T::zero())?, ground(T::one())?))
}

/// The three fidelity errors of one run, plus the norm distance `||A_d - A_tro||`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ErrorTriplet<T> {
    pub eps_tot: T,
    pub eps_adb: T,
    pub eps_tro: T,
    /// `None` when the caller skipped the dense products.
    pub norm_dist: Option<T>,
    pub total_time: T,
    pub steps: usize,
    pub dt: T,
}

impl<T: Real> ErrorTriplet<T> {
    /// `eps_tot <= eps_adb + eps_tro` up to `slack`.
    pub fn satisfies_triangle(&self, slack: T) -> bool {
        self.eps_tot <= self.eps_adb + self.eps_tro + slack
    }
}

/// Evaluates [`ErrorTriplet`]s for one path and step count at many total times.
///
/// Endpoint ground states and the eigendecompositions behind `A_d` are computed once.
pub struct TripletEvaluator<T> {
    template: EvolutionSpec<T>,
    psi_i: StateVector<T>,
    psi_f: StateVector<T>,
    discrete: Option<DiscretePropagator<T>>,
    exact: ExactOptions,
}

impl<T: Real> TripletEvaluator<T> {
    /// `with_norm_distance` enables the dense `||A_d - A_tro||` column.
    pub fn new(template: EvolutionSpec<T>, with_norm_distance: bool, exact: ExactOptions) -> Result<Self> {
        let (psi_i, psi_f) = endpoint_ground_states(&template.path)?;
        let discrete = if with_norm_distance { Some(DiscretePropagator::new(&template)?) } else { None };
        Ok(Self { template, psi_i, psi_f, discrete, exact })
    }

    pub fn initial_state(&self) -> &StateVector<T> {
        &self.psi_i
    }

    pub fn final_state(&self) -> &StateVector<T> {
        &self.psi_f
    }

    pub fn at(&self, total_time: T) -> Result<ErrorTriplet<T>> {
        let spec = self.template.with_total_time(total_time)?;
        let exact = exact_state_evolution(&spec, &self.psi_i, &self.exact)?;
        let trotter = trotter_state(&spec, &self.psi_i)?;
        let norm_dist = match &self.discrete {
            Some(d) => {
                let a_d = d.unitary(total_time);
                let a_tro = trotter_evolution(&spec)?.matrix;
                Some(operator_norm(&(&a_d - &a_tro))?)
            }
            None => None,
        };
        Ok(ErrorTriplet {
            eps_tot: fidelity_error(&trotter, &self.psi_f)?,
            eps_adb: fidelity_error(&exact, &self.psi_f)?,
            eps_tro: fidelity_error(&exact, &trotter)?,
            norm_dist,
            total_time,
            steps: spec.steps,
            dt: spec.dt(),
        })
    }

    /// Fidelity error between `A_d |psi_i>` and `A_tro |psi_i>` (the discretized reference).
    pub fn discrete_trotter_error(&self, total_time: T) -> Result<T> {
        let spec = self.template.with_total_time(total_time)?;
        let trotter = trotter_state(&spec, &self.psi_i)?;
        let reference = match &self.discrete {
            Some(d) => d.apply(total_time, &self.psi_i)?,
            None => DiscretePropagator::new(&spec)?.apply(total_time, &self.psi_i)?,
        };
        fidelity_error(&reference, &trotter)
    }
}

/// All three errors and the norm distance for one run.
pub fn error_triplet<T: Real>(spec: &EvolutionSpec<T>) -> Result<ErrorTriplet<T>> {
    TripletEvaluator::new(spec.clone(), true, ExactOptions::default())?.at(spec.total_time)
}

/// Adiabatic-theorem bound: boundary terms plus the gap-weighted integral.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct BoundReport<T> {
    pub boundary_terms: (T, T),
    pub integral_term: T,
    pub total: T,
}

/// `||H'(0)|| / (T l(0)^2) + ||H'(1)|| / (T l(1)^2) + (1/T) int_0^1 7 ||H'||^2 / l^3 + ||H''|| / l^2 ds`
/// by composite Simpson on `quad_points` nodes (rounded up to odd).
pub fn adiabatic_bound<T: Real>(path: &AdiabaticPath<T>, total_time: T, quad_points: usize) -> Result<BoundReport<T>> {
    if !(total_time > T::zero()) {
        return Err(Error::InvalidArgument(format!("total time must be positive, got {total_time}")));
    }
    let nodes = (quad_points.max(3)) | 1;
    // Norms of H' and H'' are the schedule derivatives times a fixed norm.
    let diff_norm = operator_norm(&(path.target().matrix() - path.initial().matrix()))?;
    let gap = |s: T| -> Result<T> {
        let e = hermitian_eigenvalues(&path.hamiltonian(s)?)?;
        let g = e[1] - e[0];
        if g < T::lit(tolerances::DEGENERACY) {
            return Err(Error::GapClosure { s: s.as_f64(), gap: g.as_f64() });
        }
        Ok(g)
    };
    let h = T::one() / T::from_count(nodes - 1);
    let mut values = Vec::with_capacity(nodes);
    for k in 0..nodes {
        let s = T::from_count(k) * h;
        let (_, dp, ddp) = path.schedule_at(s);
        let (d1, d2) = (dp.abs() * diff_norm, ddp.abs() * diff_norm);
        let l = gap(s)?;
        values.push((T::lit(7.0) * d1 * d1 / (l * l * l) + d2 / (l * l), d1 / (l * l)));
    }
    let integrand: Vec<T> = values.iter().map(|v| v.0).collect();
    let integral = simpson_sampled(T::zero(), T::one(), &integrand);
    let b0 = values[0].1 / total_time;
    let b1 = values[nodes - 1].1 / total_time;
    let integral_term = integral / total_time;
    Ok(BoundReport { boundary_terms: (b0, b1), integral_term, total: b0 + b1 + integral_term })
}

/// `-d log eps / d log T` by least squares over `(T, eps)` samples.
pub fn scaling_index<T: Real>(samples: &[(T, T)]) -> Result<T> {
    if samples.len() < 4 {
        return Err(Error::InsufficientData { needed: 4, got: samples.len() });
    }
    if samples.iter().any(|&(t, e)| !(t > T::zero()) || !(e > T::zero())) {
        return Err(Error::InvalidArgument("scaling fit needs positive T and eps".into()));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidArgument("T must be strictly increasing".into()));
    }
    let pts: Vec<(T, T)> = samples.iter().map(|&(t, e)| (t.ln(), e.ln())).collect();
    Ok(-slope_fit(&pts))
}

/// Ordinary least-squares slope.
pub fn slope_fit<T: Real>(pts: &[(T, T)]) -> T {
    let n = T::from_count(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<T>();
    let sxx = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<T>();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_complex::Complex;

    use super::*;
    use crate::model::tfim_path;

    fn state(v: &[(f64, f64)]) -> StateVector<f64> {
        StateVector::normalized(v.iter().map(|&(a, b)| Complex::new(a, b)).collect()).unwrap()
    }

    #[test]
    fn fidelity_error_examples() {
        let a = state(&[(1.0, 0.0), (1.0, 1.0)]);
        assert!(fidelity_error(&a, &a).unwrap() < 1e-7);
        assert!(fidelity_error(&a, &a.with_phase(1.3)).unwrap() < 1e-7);
        let b = state(&[(1.0, 0.0), (0.0, 0.0)]);
        let c = state(&[(0.0, 0.0), (0.0, 1.0)]);
        assert_eq!(fidelity_error(&b, &c).unwrap(), 1.0);
        let d = state(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert!(matches!(fidelity_error(&b, &d), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn scaling_index_of_power_laws() {
        let one: Vec<(f64, f64)> = (1..=6).map(|k| (k as f64 * 10.0, 3.0 / (k as f64 * 10.0))).collect();
        assert!((scaling_index(&one).unwrap() - 1.0).abs() < 1e-12);
        let two: Vec<(f64, f64)> = (1..=6).map(|k| (k as f64, 0.5 / (k * k) as f64)).collect();
        assert!((scaling_index(&two).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(scaling_index(&one[..3]), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn bound_scales_inversely_with_time() {
        let path = tfim_path::<f64>(3, false).unwrap();
        let a = adiabatic_bound(&path, 10.0, 201).unwrap();
        let b = adiabatic_bound(&path, 20.0, 201).unwrap();
        assert!((a.total - 2.0 * b.total).abs() < 1e-12 * a.total);
        assert!((a.total - a.boundary_terms.0 - a.boundary_terms.1 - a.integral_term).abs() < 1e-15);
    }

    #[test]
    fn bound_quadrature_self_converges() {
        let path = tfim_path::<f64>(4, false).unwrap();
        let a = adiabatic_bound(&path, 100.0, 201).unwrap().total;
        let b = adiabatic_bound(&path, 100.0, 401).unwrap().total;
        assert!(((a - b) / b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn triangle_inequality_on_a_small_chain() {
        let path = Arc::new(tfim_path::<f64>(3, false).unwrap());
        let spec = EvolutionSpec::new(path, 10.0, 20).unwrap();
        let t = error_triplet(&spec).unwrap();
        assert!(t.satisfies_triangle(1e-9));
        assert!(t.norm_dist.unwrap() >= 0.0);
    }

    #[test]
    fn degenerate_endpoint_is_rejected() {
        let (hx, _) = crate::model::build_tfim::<f64>(2, false).unwrap();
        let zero = hx.scaled(0.0);
        let path = AdiabaticPath::linear(hx, zero).unwrap();
        assert!(matches!(endpoint_ground_states(&path), Err(Error::DegenerateEndpoint { .. })));
    }
}
