use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type Triple = dyn Fn(f64) -> (f64, f64, f64) + Send + Sync;

/// Interpolation schedule `p(s)` with analytic first and second derivatives.
#[derive(Clone)]
pub enum Schedule {
    /// `p(s) = s`.
    Linear,
    /// `p(s) = sum_k c_k s^k`.
    Polynomial(Vec<f64>),
    /// User-supplied `s -> (p, p', p'')`.
    Custom(Arc<Triple>),
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear => f.write_str("Linear"),
            Self::Polynomial(c) => f.debug_tuple("Polynomial").field(c).finish(),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Schedule {
    /// Polynomial schedule; the coefficients must give `p(0) = 0` and `p(1) = 1`.
    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        let s = Self::Polynomial(coefficients);
        s.validate()?;
        Ok(s)
    }

    pub fn custom(f: impl Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static) -> Result<Self> {
        let s = Self::Custom(Arc::new(f));
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let (p0, _, _) = self.eval(0.0);
        let (p1, _, _) = self.eval(1.0);
        if p0.abs() > 1e-12 || (p1 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("schedule must satisfy p(0)=0, p(1)=1; got {p0}, {p1}")));
        }
        Ok(())
    }

    /// `(p(s), p'(s), p''(s))`.
    pub fn eval(&self, s: f64) -> (f64, f64, f64) {
        match self {
            Self::Linear => (s, 1.0, 0.0),
            Self::Polynomial(c) => {
                let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
                for &ck in c.iter().rev() {
                    ddp = ddp * s + 2.0 * dp;
                    dp = dp * s + p;
                    p = p * s + ck;
                }
                (p, dp, ddp)
            }
            Self::Custom(f) => f(s),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Self::Linear)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives_are_analytic() {
        // p = 3s^2 - 2s^3
        let p = Schedule::polynomial(vec![0.0, 0.0, 3.0, -2.0]).unwrap();
        let s = 0.3;
        let (v, d, dd) = p.eval(s);
        assert!((v - (3.0 * s * s - 2.0 * s * s * s)).abs() < 1e-15);
        assert!((d - (6.0 * s - 6.0 * s * s)).abs() < 1e-15);
        assert!((dd - (6.0 - 12.0 * s)).abs() < 1e-14);
    }

    #[test]
    fn endpoint_conditions_are_enforced() {
        assert!(Schedule::polynomial(vec![0.0, 0.5]).is_err());
        assert!(Schedule::custom(|s| (s * s, 2.0 * s, 2.0)).is_ok());
    }
}
