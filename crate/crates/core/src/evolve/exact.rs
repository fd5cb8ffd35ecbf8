use num_complex::Complex;

use super::generator::PathGenerator;
use super::{EvolutionSpec, Method, UnitaryOperator};
use crate::error::{Error, Result};
use crate::linalg::{norm2, operator_norm, ComplexMatrix, StateVector};
use crate::model::AdiabaticPath;
use crate::scalar::Real;

/// Time-ordered exponential integrator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Integrator {
    /// One exponential at each substep midpoint (second order).
    Midpoint,
    /// Two exponentials built from the two Gauss-Legendre samples (fourth order, commutator-free).
    #[default]
    Magnus4,
}

#[derive(Clone, Copy, Debug)]
pub struct ExactOptions {
    /// Stop once successive doublings differ by less than this (spectral or 2-norm).
    pub tol: f64,
    pub integrator: Integrator,
    pub initial_substeps: usize,
    pub max_substeps: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self { tol: 1e-10, integrator: Integrator::Magnus4, initial_substeps: 64, max_substeps: 1 << 20 }
    }
}

impl ExactOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol >= 1e-12) {
            return Err(Error::InvalidArgument(format!("tolerance {} below 1e-12", self.tol)));
        }
        if self.initial_substeps == 0 {
            return Err(Error::InvalidArgument("initial substep count must be positive".into()));
        }
        Ok(())
    }
}

/// Propagates `vectors` through `R` substeps of the time-ordered exponential.
fn propagate<T: Real>(
    path: &AdiabaticPath<T>,
    generator: &PathGenerator<T>,
    total_time: T,
    substeps: usize,
    integrator: Integrator,
    vectors: &mut [Vec<Complex<T>>],
) {
    let h = T::one() / T::from_count(substeps);
    let tau = total_time * h;
    let root3_6 = T::lit(3f64.sqrt() / 6.0);
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    for r in 0..substeps {
        let s0 = T::from_count(r) * h;
        match integrator {
            Integrator::Midpoint => {
                let (a, b) = path.weights(s0 + half * h);
                for v in vectors.iter_mut() {
                    generator.exp_apply(a, b, tau, v);
                }
            }
            Integrator::Magnus4 => {
                let (a1, b1) = path.weights(s0 + (half - root3_6) * h);
                let (a2, b2) = path.weights(s0 + (half + root3_6) * h);
                let (big, small) = (quarter + root3_6, quarter - root3_6);
                // The first factor leans on the earlier sample, the second on the later one.
                let first = (big * a1 + small * a2, big * b1 + small * b2);
                let second = (small * a1 + big * a2, small * b1 + big * b2);
                for v in vectors.iter_mut() {
                    generator.exp_apply(first.0, first.1, tau, v);
                    generator.exp_apply(second.0, second.1, tau, v);
                }
            }
        }
    }
}

/// Runs `propagate` with doubling substep counts until two successive results agree.
fn converge<T: Real>(
    spec: &EvolutionSpec<T>,
    opts: &ExactOptions,
    start: &[Vec<Complex<T>>],
    distance: impl Fn(&[Vec<Complex<T>>], &[Vec<Complex<T>>]) -> Result<T>,
) -> Result<Vec<Vec<Complex<T>>>> {
    opts.validate()?;
    let generator = PathGenerator::new(&spec.path);
    let run = |r: usize| {
        let mut v = start.to_vec();
        propagate(&spec.path, &generator, spec.total_time, r, opts.integrator, &mut v);
        v
    };
    let mut r = opts.initial_substeps;
    let mut prev = run(r);
    loop {
        if 2 * r > opts.max_substeps {
            return Err(Error::NoConvergence { tol: opts.tol, substeps: r });
        }
        r *= 2;
        let cur = run(r);
        if distance(&prev, &cur)? < T::lit(opts.tol) {
            return Ok(cur);
        }
        prev = cur;
    }
}

/// `A |psi>` for the exact time-ordered propagator, converged to `opts.tol` in the 2-norm.
pub fn exact_state_evolution<T: Real>(
    spec: &EvolutionSpec<T>,
    psi: &StateVector<T>,
    opts: &ExactOptions,
) -> Result<StateVector<T>> {
    if psi.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { left: spec.dim(), right: psi.dim() });
    }
    let start = vec![psi.amplitudes().to_vec()];
    let out = converge(spec, opts, &start, |a, b| {
        let d: Vec<Complex<T>> = a[0].iter().zip(&b[0]).map(|(x, y)| x - y).collect();
        Ok(norm2(&d))
    })?;
    StateVector::normalized(out.into_iter().next().expect("one vector"))
}

/// Exact propagator `A`, converged to `tol` in the spectral norm.
pub fn exact_evolution<T: Real>(spec: &EvolutionSpec<T>, tol: f64) -> Result<UnitaryOperator<T>> {
    exact_evolution_with(spec, &ExactOptions::with_tol(tol))
}

pub fn exact_evolution_with<T: Real>(spec: &EvolutionSpec<T>, opts: &ExactOptions) -> Result<UnitaryOperator<T>> {
    let n = spec.dim();
    let columns: Vec<Vec<Complex<T>>> = (0..n).map(|k| StateVector::basis(n, k).into_amplitudes()).collect();
    let assemble = |cols: &[Vec<Complex<T>>]| {
        let mut m = ComplexMatrix::zeros(n);
        for (k, c) in cols.iter().enumerate() {
            m.set_column(k, c);
        }
        m
    };
    let out = converge(spec, opts, &columns, |a, b| operator_norm(&(&assemble(a) - &assemble(b))))?;
    Ok(UnitaryOperator {
        matrix: assemble(&out),
        method: Method::Exact,
        total_time: spec.total_time,
        steps: spec.steps,
    })
}
