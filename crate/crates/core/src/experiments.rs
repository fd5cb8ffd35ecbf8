//! Parameter sweeps behind the error-scaling and critical-step experiments.
//!
//! Points run concurrently; results always come back in grid order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolve::{EvolutionSpec, ExactOptions};
use crate::metrics::{scaling_index, ErrorTriplet, TripletEvaluator};
use crate::scalar::Real;

/// `n` log-spaced points from `lo` to `hi`, both included.
pub fn log_grid<T: Real>(lo: T, hi: T, n: usize) -> Result<Vec<T>> {
    if !(lo > T::zero() && hi > lo) || n < 2 {
        return Err(Error::InvalidArgument(format!("log grid needs 0 < lo < hi and n >= 2 (lo {lo}, hi {hi}, n {n})")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let last = T::from_count(n - 1);
    let mut grid: Vec<T> = (0..n).map(|k| (a + (b - a) * T::from_count(k) / last).exp()).collect();
    // Pin the endpoints against exp/ln rounding.
    grid[0] = lo;
    grid[n - 1] = hi;
    Ok(grid)
}

/// `lo, lo + step, ...` up to `hi` inclusive (within half a step of rounding).
pub fn linear_grid<T: Real>(lo: T, hi: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || hi < lo {
        return Err(Error::InvalidArgument(format!("linear grid needs step > 0 and hi >= lo (lo {lo}, hi {hi})")));
    }
    let count = ((hi - lo) / step + T::lit(0.5)).floor().to_usize().unwrap_or(0);
    Ok((0..=count).map(|k| lo + step * T::from_count(k)).collect())
}

/// [`ErrorTriplet`] at every total time, reusing one evaluator.
pub fn error_sweep<T: Real>(
    template: &EvolutionSpec<T>,
    times: &[T],
    with_norm_distance: bool,
    exact: ExactOptions,
) -> Result<Vec<ErrorTriplet<T>>> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    let evaluator = TripletEvaluator::new(template.clone(), with_norm_distance, exact)?;
    times.par_iter().map(|&t| evaluator.at(t)).collect()
}

/// Scaling index of `eps_tot` over rows with `T` in `[lo, hi]`.
pub fn windowed_scaling_index<T: Real>(rows: &[ErrorTriplet<T>], lo: T, hi: T) -> Result<T> {
    let samples: Vec<(T, T)> =
        rows.iter().filter(|r| r.total_time >= lo && r.total_time <= hi).map(|r| (r.total_time, r.eps_tot)).collect();
    scaling_index(&samples)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::tfim_path;

    #[test]
    fn log_grid_endpoints_and_ratio() {
        let g = log_grid(4.0f64, 200.0, 40).unwrap();
        assert_eq!((g[0], g[39]), (4.0, 200.0));
        let r = g[1] / g[0];
        assert!(g.windows(2).all(|w| (w[1] / w[0] - r).abs() < 1e-12));
        assert!(log_grid(0.0, 1.0, 5).is_err());
    }

    #[test]
    fn linear_grid_includes_the_end() {
        let g = linear_grid(0.1f64, 1.5, 0.05).unwrap();
        assert_eq!(g.len(), 29);
        assert!((g[28] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn sweep_preserves_grid_order() {
        let spec = EvolutionSpec::new(Arc::new(tfim_path::<f64>(2, false).unwrap()), 1.0, 10).unwrap();
        let times = [3.0, 1.0, 2.0];
        let rows = error_sweep(&spec, &times, true, ExactOptions::default()).unwrap();
        let got: Vec<f64> = rows.iter().map(|r| r.total_time).collect();
        assert_eq!(got, times);
        assert!(rows.iter().all(|r| r.satisfies_triangle(1e-9)));
    }
}
