//! Quadrature rules on `[a, b]`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest grid tried by [`oscillatory_integral`].
const MAX_INTERVALS: usize = 1 << 18;

/// Composite Simpson rule on `nodes` equally spaced points (`nodes` odd, at least 3).
pub fn simpson<T: Real>(a: T, b: T, nodes: usize, f: impl Fn(T) -> T) -> T {
    assert!(nodes >= 3 && nodes % 2 == 1, "Simpson needs an odd node count >= 3");
    let n = nodes - 1;
    let h = (b - a) / T::from_count(n);
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
        acc += w * f(a + h * T::from_count(k));
    }
    acc * h / T::lit(3.0)
}

/// Composite Simpson rule on equally spaced samples spanning `[a, b]` (odd length, at least 3).
pub fn simpson_sampled<T: Real>(a: T, b: T, values: &[T]) -> T {
    let nodes = values.len();
    assert!(nodes >= 3 && nodes % 2 == 1, "Simpson needs an odd node count >= 3");
    let h = (b - a) / T::from_count(nodes - 1);
    let mut acc = values[0] + values[nodes - 1];
    for (k, &v) in values.iter().enumerate().take(nodes - 1).skip(1) {
        acc += if k % 2 == 1 { T::lit(4.0) * v } else { T::lit(2.0) * v };
    }
    acc * h / T::lit(3.0)
}

/// `int_0^1 f(s) exp(-i T Omega(s)) ds` with `Omega(s) = int_0^s lambda`.
///
/// `sample` maps an increasing node list on `[0, 1]` to `(f, lambda)` at those nodes. Grids double
/// from 64 intervals until successive estimates differ by at most `tol`.
pub fn oscillatory_integral<T: Real>(
    total_time: T,
    tol: T,
    mut sample: impl FnMut(&[T]) -> Result<(Vec<Complex<T>>, Vec<T>)>,
) -> Result<Complex<T>> {
    let mut intervals = 64;
    let mut previous: Option<Complex<T>> = None;
    while intervals <= MAX_INTERVALS {
        let nodes: Vec<T> = (0..=intervals).map(|k| T::from_count(k) / T::from_count(intervals)).collect();
        let (f, lambda) = sample(&nodes)?;
        let value = oscillatory_simpson(total_time, &f, &lambda);
        if let Some(p) = previous {
            if (value - p).norm() <= tol {
                return Ok(value);
            }
        }
        previous = Some(value);
        intervals *= 2;
    }
    Err(Error::NoConvergence { tol: tol.as_f64(), substeps: MAX_INTERVALS })
}

/// Composite Simpson on an even number of intervals; the phase is accumulated to the same order.
fn oscillatory_simpson<T: Real>(total_time: T, f: &[Complex<T>], lambda: &[T]) -> Complex<T> {
    let n = f.len() - 1;
    debug_assert!(n.is_multiple_of(2) && lambda.len() == f.len());
    let h = T::one() / T::from_count(n);
    let mut omega = vec![T::zero(); n + 1];
    for k in (0..n).step_by(2) {
        let (l0, l1, l2) = (lambda[k], lambda[k + 1], lambda[k + 2]);
        omega[k + 1] = omega[k] + h / T::lit(12.0) * (T::lit(5.0) * l0 + T::lit(8.0) * l1 - l2);
        omega[k + 2] = omega[k] + h / T::lit(3.0) * (l0 + T::lit(4.0) * l1 + l2);
    }
    let mut acc = Complex::new(T::zero(), T::zero());
    for (k, (&fk, &w)) in f.iter().zip(&omega).enumerate() {
        let weight = if k == 0 || k == n {
            T::one()
        } else if k % 2 == 1 {
            T::lit(4.0)
        } else {
            T::lit(2.0)
        };
        acc += fk * Complex::from_polar(weight, -total_time * w);
    }
    acc * (h / T::lit(3.0))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(0.0, 2.0, 3, |x: f64| x * x * x - x);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sampled_rule_matches_callable_rule() {
        let f = |x: f64| (3.0 * x).cos() + x;
        let samples: Vec<f64> = (0..21).map(|k| f(k as f64 / 20.0)).collect();
        assert_eq!(simpson_sampled(0.0, 1.0, &samples), simpson(0.0, 1.0, 21, f));
    }

    #[test]
    fn simpson_converges_for_smooth_integrands() {
        let v = simpson(0.0, std::f64::consts::PI, 201, |x: f64| x.sin());
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn oscillatory_integral_of_a_pure_phase() {
        for t in [0.5, 7.0, 50.0] {
            let v = oscillatory_integral(t, 1e-10, |s: &[f64]| {
                Ok((vec![Complex::new(1.0, 0.0); s.len()], vec![1.0; s.len()]))
            })
            .unwrap();
            let expected = (Complex::new(1.0, 0.0) - Complex::from_polar(1.0, -t)) / Complex::new(0.0, t);
            assert!((v - expected).norm() < 1e-9, "T = {t}");
        }
    }

    #[test]
    fn oscillatory_integral_with_varying_frequency() {
        // f = lambda makes the integrand an exact derivative: (1 - exp(-i T Omega(1))) / (i T).
        let lam = |s: f64| 1.0 + s * s;
        let t = 20.0;
        let v = oscillatory_integral(t, 1e-10, |s: &[f64]| {
            Ok((s.iter().map(|&x| Complex::new(lam(x), 0.0)).collect(), s.iter().map(|&x| lam(x)).collect()))
        })
        .unwrap();
        let expected = (Complex::new(1.0, 0.0) - Complex::from_polar(1.0, -t * 4.0 / 3.0)) / Complex::new(0.0, t);
        assert!((v - expected).norm() < 1e-9);
    }

    #[test]
    fn gauss_legendre_two_point_nodes() {
        let (x, w) = gauss_legendre(2);
        let r = 1.0 / 3f64.sqrt();
        assert!((x[0] + r).abs() < 1e-15 && (x[1] - r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_degree_2n_minus_1() {
        for n in 1..8 {
            let (x, w) = gauss_legendre(n);
            let deg = 2 * n - 1;
            let v: f64 = x.iter().zip(&w).map(|(&x, &w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((v - exact).abs() < 1e-13, "n = {n}");
        }
    }
}
