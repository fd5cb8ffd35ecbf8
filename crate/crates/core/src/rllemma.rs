//! Discrete oscillatory sums `J = (1/L) sum_k f_k exp(-i dt sum_{j<k} lambda_j)` and their bounds.
//!
//! Sample points are `s_k = k/L`; the sum runs over `k = 1..L` and the phase over `j = 1..k-1`.

use std::ops::{Add, Mul};
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, operator_norm, tolerances};
use crate::model::AdiabaticPath;
use crate::quad::oscillatory_integral;
use crate::scalar::Real;

/// Largest `lambda dt` for which `|omega|` stays comparable to `lambda`.
pub const ROBUST_THRESHOLD: f64 = 3.78;

/// `|omega| < OMEGA_FLOOR * lambda` counts as resonant.
const OMEGA_FLOOR: f64 = 1e-12;

/// A function on `[0, 1]`, either a callable or equally spaced samples read by cubic interpolation.
#[derive(Clone)]
pub enum Profile<T, V> {
    Analytic(Arc<dyn Fn(T) -> V + Send + Sync>),
    /// Values at `k / (n - 1)`, `n >= 4`.
    Sampled(Vec<V>),
}

pub type ComplexProfile<T> = Profile<T, Complex<T>>;
pub type RealProfile<T> = Profile<T, T>;

impl<T: Real, V: Copy + Add<Output = V> + Mul<T, Output = V>> Profile<T, V> {
    pub fn analytic(f: impl Fn(T) -> V + Send + Sync + 'static) -> Self {
        Self::Analytic(Arc::new(f))
    }

    pub fn sampled(values: Vec<V>) -> Result<Self> {
        if values.len() < 4 {
            return Err(Error::InsufficientData { needed: 4, got: values.len() });
        }
        Ok(Self::Sampled(values))
    }

    pub fn eval(&self, s: T) -> V {
        match self {
            Self::Analytic(f) => f(s),
            Self::Sampled(v) => cubic(v, s),
        }
    }
}

impl<T, V> std::fmt::Debug for Profile<T, V> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Analytic(_) => f.write_str("Analytic(..)"),
            Self::Sampled(v) => write!(f, "Sampled({} points)", v.len()),
        }
    }
}

/// Four-point Lagrange interpolation; extrapolates with the end stencils.
fn cubic<T: Real, V: Copy + Add<Output = V> + Mul<T, Output = V>>(v: &[V], s: T) -> V {
    let n = v.len();
    let x = s * T::from_count(n - 1);
    let i = x.floor().to_usize().unwrap_or(0).clamp(1, n - 3);
    let t = x - T::from_count(i);
    let (one, two, six) = (T::one(), T::lit(2.0), T::lit(6.0));
    let w = [
        -t * (t - one) * (t - two) / six,
        (t + one) * (t - one) * (t - two) / two,
        -(t + one) * t * (t - two) / two,
        (t + one) * t * (t - one) / six,
    ];
    v[i - 1] * w[0] + v[i] * w[1] + v[i + 1] * w[2] + v[i + 2] * w[3]
}

/// Amplitude `f`, positive frequency `lambda`, total time and step count of one sum.
#[derive(Clone, Debug)]
pub struct OscillatorySumSpec<T> {
    pub f: ComplexProfile<T>,
    pub lambda: RealProfile<T>,
    pub total_time: T,
    pub steps: usize,
}

impl<T: Real> OscillatorySumSpec<T> {
    pub fn new(f: ComplexProfile<T>, lambda: RealProfile<T>, total_time: T, steps: usize) -> Result<Self> {
        if !(total_time > T::zero()) || !total_time.is_finite() {
            return Err(Error::InvalidArgument(format!("total time must be positive, got {total_time}")));
        }
        if steps == 0 {
            return Err(Error::InvalidArgument("at least one step is required".into()));
        }
        let spec = Self { f, lambda, total_time, steps };
        for k in 0..=steps {
            let s = spec.node(k);
            let lam = spec.lambda.eval(s);
            if !(lam > T::zero()) || !lam.is_finite() {
                return Err(Error::InvalidArgument(format!("lambda({s}) = {lam} is not positive")));
            }
            let v = spec.f.eval(s);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(spec)
    }

    /// `f = 1`, `lambda = 1`.
    pub fn unit(total_time: T, steps: usize) -> Result<Self> {
        let one = Complex::new(T::one(), T::zero());
        Self::new(Profile::analytic(move |_| one), Profile::analytic(|_| T::one()), total_time, steps)
    }

    pub fn dt(&self) -> T {
        self.total_time / T::from_count(self.steps)
    }

    /// `s_k = k / L`.
    pub fn node(&self, k: usize) -> T {
        T::from_count(k) / T::from_count(self.steps)
    }

    fn omega_at(&self, s: T) -> Result<Complex<T>> {
        let lam = self.lambda.eval(s);
        let w = omega(lam, self.dt());
        if w.norm() < T::lit(OMEGA_FLOOR) * lam {
            return Err(Error::OmegaZero { s: s.as_f64() });
        }
        Ok(w)
    }
}

/// `J`, with the phase prefix sum accumulated once.
pub fn discrete_sum_j<T: Real>(spec: &OscillatorySumSpec<T>) -> Complex<T> {
    let dt = spec.dt();
    // Compensated prefix sum: the phase reaches T * max(lambda) over thousands of steps.
    let (mut phase, mut carry) = (T::zero(), T::zero());
    let mut acc = Complex::zero();
    for k in 1..=spec.steps {
        let s = spec.node(k);
        acc += spec.f.eval(s) * Complex::from_polar(T::one(), -(phase + carry));
        let x = dt * spec.lambda.eval(s);
        let next = phase + x;
        carry += if phase.abs() >= x.abs() { (phase - next) + x } else { (x - next) + phase };
        phase = next;
    }
    acc / T::from_count(spec.steps)
}

/// `(exp(-i dt lambda) - 1) / (i dt)`, evaluated without cancellation for small `dt`.
pub fn omega<T: Real>(lambda: T, dt: T) -> Complex<T> {
    let half = lambda * dt / T::lit(2.0);
    // exp(-2i x) - 1 = -2i sin(x) exp(-i x)
    Complex::from_polar(-T::lit(2.0) * half.sin() / dt, -half)
}

/// `|omega| / lambda = sin(x) / x` with `x = lambda dt / 2`.
pub fn omega_ratio<T: Real>(lambda: T, dt: T) -> T {
    let x = lambda * dt / T::lit(2.0);
    if x.abs() < T::lit(1e-8) {
        T::one() - x * x / T::lit(6.0)
    } else {
        x.sin() / x
    }
}

/// `L (f(s)/omega(s) - f(s - 1/L)/omega(s - 1/L))`.
pub fn eta<T: Real>(spec: &OscillatorySumSpec<T>, s: T) -> Result<Complex<T>> {
    let h = T::one() / T::from_count(spec.steps);
    let prev = s - h;
    let slack = T::lit(1e-12);
    if prev < -slack || s > T::one() + slack {
        return Err(Error::OutOfRange(s.as_f64()));
    }
    let prev = prev.max(T::zero());
    let a = spec.f.eval(s) / spec.omega_at(s)?;
    let b = spec.f.eval(prev) / spec.omega_at(prev)?;
    Ok((a - b) * T::from_count(spec.steps))
}

/// Interval and refinement control for [`variation_a`].
#[derive(Clone, Copy, Debug)]
pub struct VariationOptions<T> {
    pub start: T,
    pub end: T,
    pub rel_tol: T,
    pub initial_nodes: usize,
    pub max_nodes: usize,
}

impl<T: Real> Default for VariationOptions<T> {
    fn default() -> Self {
        Self { start: T::zero(), end: T::one(), rel_tol: T::lit(1e-6), initial_nodes: 256, max_nodes: 1 << 20 }
    }
}

/// `sum_k |z_k - z_{k-1}|` over consecutive samples.
pub fn total_variation<T: Real>(z: &[Complex<T>]) -> T {
    z.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// `int |(g / omega)'| ds` as the limit of the discrete total variation under node doubling.
///
/// Successive estimates are Richardson-combined (the variation converges at second order).
pub fn variation_a<T: Real>(
    g: impl Fn(T) -> Result<Complex<T>>,
    lambda: &RealProfile<T>,
    dt: T,
    opts: &VariationOptions<T>,
) -> Result<T> {
    let z = |s: T| -> Result<Complex<T>> {
        let lam = lambda.eval(s);
        let w = omega(lam, dt);
        if w.norm() < T::lit(OMEGA_FLOOR) * lam {
            return Err(Error::OmegaZero { s: s.as_f64() });
        }
        Ok(g(s)? / w)
    };
    let mut intervals = opts.initial_nodes.max(2);
    let sample = |m: usize| -> Result<T> {
        let h = (opts.end - opts.start) / T::from_count(m);
        let values = (0..=m).map(|k| z(opts.start + h * T::from_count(k))).collect::<Result<Vec<_>>>()?;
        Ok(total_variation(&values))
    };
    let mut coarse = sample(intervals)?;
    let mut previous: Option<T> = None;
    while intervals < opts.max_nodes {
        intervals *= 2;
        let fine = sample(intervals)?;
        let estimate = (T::lit(4.0) * fine - coarse) / T::lit(3.0);
        if let Some(p) = previous {
            if (estimate - p).abs() <= opts.rel_tol * estimate.abs() {
                return Ok(estimate.max(T::zero()));
            }
        }
        previous = Some(estimate);
        coarse = fine;
    }
    Err(Error::NoConvergence { tol: opts.rel_tol.as_f64(), substeps: opts.max_nodes })
}

/// `J`, its continuum limit and the first- and second-order bound expressions (constants 1).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct RlBoundReport<T> {
    pub j: Complex<T>,
    pub abs_j: T,
    /// `int_0^1 f exp(-i T int_0^s lambda) ds`.
    pub continuum_i: Complex<T>,
    /// `(|f(0)|/lambda(0) + |f(1)|/lambda(1)) / T`.
    pub boundary_bound: T,
    /// `A(f, lambda) / T`.
    pub variation_bound: T,
    /// `(|eta(1/L)|/lambda(1/L) + |eta(1)|/lambda(1)) / T^2`.
    pub eta_boundary_bound: T,
    /// `A(eta, lambda)` over `[1/L, 1]`.
    pub a_eta_lambda: T,
    pub first_order_bound: T,
    pub second_order_bound: T,
    pub max_lambda_dt: T,
    pub threshold_ok: bool,
    /// Smallest and largest `|omega_k| / lambda_k` over the nodes.
    pub omega_ratio_range: (T, T),
}

pub fn rl_bounds<T: Real>(spec: &OscillatorySumSpec<T>) -> Result<RlBoundReport<T>> {
    let dt = spec.dt();
    let t = spec.total_time;
    let j = discrete_sum_j(spec);
    let continuum_i = oscillatory_integral(t, T::lit(1e-10), |nodes| {
        Ok((nodes.iter().map(|&s| spec.f.eval(s)).collect(), nodes.iter().map(|&s| spec.lambda.eval(s)).collect()))
    })?;

    let mut max_lambda_dt = T::zero();
    let mut ratio = (T::infinity(), T::zero());
    for k in 0..=spec.steps {
        let lam = spec.lambda.eval(spec.node(k));
        max_lambda_dt = max_lambda_dt.max(lam * dt);
        let c = omega_ratio(lam, dt);
        ratio = (ratio.0.min(c), ratio.1.max(c));
    }

    let over_lambda = |v: Complex<T>, s: T| v.norm() / spec.lambda.eval(s);
    let boundary_bound = (over_lambda(spec.f.eval(T::zero()), T::zero()) + over_lambda(spec.f.eval(T::one()), T::one())) / t;
    let variation_f = variation_a(|s| Ok(spec.f.eval(s)), &spec.lambda, dt, &VariationOptions::default())?;
    let first = spec.node(1);
    let eta_boundary_bound =
        (over_lambda(eta(spec, first)?, first) + over_lambda(eta(spec, T::one())?, T::one())) / (t * t);
    let eta_opts = VariationOptions { start: first, ..VariationOptions::default() };
    let a_eta_lambda = variation_a(|s| eta(spec, s), &spec.lambda, dt, &eta_opts)?;
    let variation_bound = variation_f / t;
    Ok(RlBoundReport {
        j,
        abs_j: j.norm(),
        continuum_i,
        boundary_bound,
        variation_bound,
        eta_boundary_bound,
        a_eta_lambda,
        first_order_bound: boundary_bound + variation_bound,
        second_order_bound: boundary_bound + eta_boundary_bound + a_eta_lambda / (t * t),
        max_lambda_dt,
        threshold_ok: max_lambda_dt < T::lit(ROBUST_THRESHOLD),
        omega_ratio_range: ratio,
    })
}

/// `max_{s=0,1} ||H'(s)|| / (T lambda_1(s)^2)` together with the conditions it relies on.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct RobustBound<T> {
    pub bound: T,
    /// `dt max_{l,s} lambda_l(s)` over the sampled path.
    pub max_lambda_dt: T,
    pub threshold_ok: bool,
    /// Smallest spacing between any two levels over the sampled path.
    pub min_spacing: T,
    pub spacing_ok: bool,
}

/// Samples per unit `s` used for the threshold and spacing conditions.
const CONDITION_SAMPLES: usize = 101;

pub fn corollary_robust_bound<T: Real>(path: &AdiabaticPath<T>, total_time: T, dt: T) -> Result<RobustBound<T>> {
    if !(total_time > T::zero()) || !(dt > T::zero()) {
        return Err(Error::InvalidArgument("total time and step must be positive".into()));
    }
    let tol = T::lit(tolerances::DEGENERACY);
    let mut max_lambda = T::zero();
    let mut min_spacing = T::infinity();
    for k in 0..CONDITION_SAMPLES {
        let s = T::from_count(k) / T::from_count(CONDITION_SAMPLES - 1);
        let e = hermitian_eigenvalues(&path.hamiltonian(s)?)?;
        let gap = e[1] - e[0];
        if gap <= tol {
            return Err(Error::GapClosure { s: s.as_f64(), gap: gap.as_f64() });
        }
        max_lambda = max_lambda.max(e[e.len() - 1] - e[0]);
        for w in e.windows(2) {
            min_spacing = min_spacing.min(w[1] - w[0]);
        }
    }
    let mut bound = T::zero();
    for s in [T::zero(), T::one()] {
        let e = hermitian_eigenvalues(&path.hamiltonian(s)?)?;
        let gap = e[1] - e[0];
        let d = operator_norm(&path.derivative(s)?)?;
        bound = bound.max(d / (total_time * gap * gap));
    }
    let max_lambda_dt = max_lambda * dt;
    Ok(RobustBound {
        bound,
        max_lambda_dt,
        threshold_ok: max_lambda_dt < T::lit(ROBUST_THRESHOLD),
        min_spacing,
        spacing_ok: min_spacing > tol,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::model::tfim_path;

    fn closed_form(t: f64, l: usize) -> Complex<f64> {
        let one = Complex::new(1.0, 0.0);
        let dt = t / l as f64;
        Complex::from_polar(1.0, -dt) * (one - Complex::from_polar(1.0, -t))
            / ((one - Complex::from_polar(1.0, -dt)) * l as f64)
    }

    #[test]
    fn zero_amplitude_sums_to_zero() {
        let spec = OscillatorySumSpec::new(Profile::analytic(|_| Complex::zero()), Profile::analytic(|s| 1.0 + s), 10.0, 7)
            .unwrap();
        assert_eq!(discrete_sum_j(&spec), Complex::zero());
    }

    #[test]
    fn unit_sum_matches_geometric_series() {
        for (t, l) in [(3.0, 5), (40.0, 17), (100.0, 400)] {
            let j = discrete_sum_j(&OscillatorySumSpec::unit(t, l).unwrap());
            assert!((j.norm() - closed_form(t, l).norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn omega_limits() {
        let w = omega(1.0f64, 1e-8);
        assert!((w.norm() - 1.0).abs() < 1e-6);
        assert!(omega(1.0, 2.0 * PI).norm() < 1e-15);
        assert!((omega(1.0, 1.0).norm() - 2.0 * 0.5f64.sin()).abs() < 1e-15);
        let direct = (Complex::from_polar(1.0, -0.7 * 1.3) - 1.0) / Complex::new(0.0, 1.3);
        assert!((omega(0.7, 1.3) - direct).norm() < 1e-15);
    }

    #[test]
    fn omega_ratio_is_sinc() {
        assert!((omega_ratio(2.0f64, 1.0) - 1.0f64.sin()).abs() < 1e-15);
        assert!((omega_ratio(1.0f64, 1e-9) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eta_of_constants_vanishes_and_of_a_ramp_is_inverse_omega() {
        let flat = OscillatorySumSpec::new(
            Profile::analytic(|_| Complex::new(2.0, 1.0)),
            Profile::analytic(|_| 1.5),
            10.0,
            20,
        )
        .unwrap();
        assert!(eta(&flat, 0.5).unwrap().norm() < 1e-13);
        let ramp = OscillatorySumSpec::new(Profile::analytic(|s| Complex::new(s, 0.0)), Profile::analytic(|_| 1.5), 10.0, 20)
            .unwrap();
        let expected = Complex::new(1.0, 0.0) / omega(1.5, 0.5);
        assert!((eta(&ramp, 0.7).unwrap() - expected).norm() < 1e-12);
        assert!(matches!(eta(&ramp, 0.01), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn resonant_omega_is_rejected() {
        let spec = OscillatorySumSpec::unit(2.0 * PI * 10.0, 10).unwrap();
        assert!(matches!(eta(&spec, 0.5), Err(Error::OmegaZero { .. })));
    }

    #[test]
    fn variation_of_simple_ratios() {
        let lam = Profile::analytic(|_: f64| 1.0f64);
        let dt = 0.3f64;
        let w = omega(1.0, dt);
        let constant = variation_a(|_| Ok(w * 2.0), &lam, dt, &VariationOptions::default()).unwrap();
        assert!(constant.abs() < 1e-12);
        let ramp = variation_a(|s| Ok(w * s), &lam, dt, &VariationOptions::default()).unwrap();
        assert!((ramp - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sampled_profiles_interpolate_cubics_exactly() {
        let p = |s: f64| 1.0 + s - 2.0 * s * s + 0.5 * s * s * s;
        let prof = RealProfile::sampled((0..9).map(|k| p(k as f64 / 8.0)).collect()).unwrap();
        for s in [0.0, 0.03, 0.41, 0.97, 1.0] {
            assert!((prof.eval(s) - p(s)).abs() < 1e-13);
        }
        assert!(RealProfile::<f64>::sampled(vec![1.0; 3]).is_err());
    }

    #[test]
    fn unit_sum_bounds() {
        let r = rl_bounds(&OscillatorySumSpec::unit(50.0, 50).unwrap()).unwrap();
        assert!(r.threshold_ok);
        assert!(r.abs_j / r.continuum_i.norm() <= 2.0);
        assert!(r.abs_j <= r.second_order_bound * 5.0);
        let expected_i = (Complex::new(1.0, 0.0) - Complex::from_polar(1.0, -50.0)) / Complex::new(0.0, 50.0);
        assert!((r.continuum_i - expected_i).norm() < 1e-9);
    }

    #[test]
    fn first_order_bound_halves_with_time() {
        let mk = |t: f64, l: usize| {
            OscillatorySumSpec::new(
                Profile::analytic(|s: f64| Complex::new(1.0 + s, 0.5 * s)),
                Profile::analytic(|s: f64| 1.0 + 0.5 * s * s),
                t,
                l,
            )
            .unwrap()
        };
        let a = rl_bounds(&mk(40.0, 40)).unwrap().first_order_bound;
        let b = rl_bounds(&mk(80.0, 80)).unwrap().first_order_bound;
        assert!((a / b - 2.0).abs() < 1e-5, "{}", a / b);
    }

    #[test]
    fn robust_bound_on_a_linear_path() {
        let path = tfim_path::<f64>(3, false).unwrap();
        let r = corollary_robust_bound(&path, 50.0, 0.1).unwrap();
        assert!(r.threshold_ok && r.bound > 0.0);
        assert!(!corollary_robust_bound(&path, 50.0, 10.0).unwrap().threshold_ok);
        let d0 = operator_norm(&path.derivative(0.0).unwrap()).unwrap();
        let d1 = operator_norm(&path.derivative(1.0).unwrap()).unwrap();
        assert!((d0 - d1).abs() < 1e-12);
    }
}
