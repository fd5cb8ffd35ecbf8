use crate::error::{Error, Result};
use crate::scalar::Real;

use super::operator::HermitianOperator;
use super::path::AdiabaticPath;
use super::pauli::{PauliAxis, PauliSum, PauliTerm};

/// Largest chain handled densely (`2^12 = 4096`).
pub const MAX_SITES: usize = 12;

/// Transverse-field Ising pair `H_X = -sum X_j`, `H_Z = -sum (Z_j + Z_j Z_{j+1})`.
pub fn build_tfim<T: Real>(n: usize, periodic: bool) -> Result<(HermitianOperator<T>, HermitianOperator<T>)> {
    if n > MAX_SITES {
        return Err(Error::DimensionTooLarge { sites: n, max: MAX_SITES });
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("a chain needs at least 2 sites, got {n}")));
    }
    let minus_one = -T::one();
    let x_terms = (0..n).map(|j| PauliTerm::new(minus_one, vec![(j, PauliAxis::X)])).collect::<Result<_>>()?;
    let mut z_terms: Vec<PauliTerm<T>> =
        (0..n).map(|j| PauliTerm::new(minus_one, vec![(j, PauliAxis::Z)])).collect::<Result<_>>()?;
    let bonds = if periodic { n } else { n - 1 };
    for j in 0..bonds {
        z_terms.push(PauliTerm::new(minus_one, vec![(j, PauliAxis::Z), ((j + 1) % n, PauliAxis::Z)])?);
    }
    let hx = HermitianOperator::from_pauli_sum(PauliSum::new(n, x_terms)?, "H_X");
    let hz = HermitianOperator::from_pauli_sum(PauliSum::new(n, z_terms)?, "H_Z");
    Ok((hx, hz))
}

/// Linear path from `H_X` to `H_Z`.
pub fn tfim_path<T: Real>(n: usize, periodic: bool) -> Result<AdiabaticPath<T>> {
    let (hx, hz) = build_tfim(n, periodic)?;
    AdiabaticPath::linear(hx, hz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, operator_norm};

    /// Diagonal of `H_Z` by enumerating spin configurations.
    fn hz_diagonal(n: usize) -> Vec<f64> {
        (0..1usize << n)
            .map(|i| {
                let z = |j: usize| if (i >> (n - 1 - j)) & 1 == 0 { 1.0 } else { -1.0 };
                -(0..n).map(z).sum::<f64>() - (0..n - 1).map(|j| z(j) * z(j + 1)).sum::<f64>()
            })
            .collect()
    }

    #[test]
    fn two_site_hz_matches_enumeration() {
        let (_, hz) = build_tfim::<f64>(2, false).unwrap();
        let d = hz_diagonal(2);
        assert!(hz.matrix().is_diagonal(0.0));
        for (i, &e) in d.iter().enumerate() {
            assert!((hz.matrix()[(i, i)].re - e).abs() < 1e-15);
        }
        assert!((operator_norm(hz.matrix()).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eight_site_norms() {
        let (hx, hz) = build_tfim::<f64>(8, false).unwrap();
        assert_eq!(hx.dim(), 256);
        assert!((operator_norm(hz.matrix()).unwrap() - 15.0).abs() < 1e-10);
        assert!((operator_norm(hx.matrix()).unwrap() - 8.0).abs() < 1e-10);
    }

    #[test]
    fn eight_site_gaps_at_the_endpoints() {
        let path = tfim_path::<f64>(8, false).unwrap();
        assert!((path.spectral_gap(0.0, 1).unwrap() - 2.0).abs() < 1e-10);
        let mut d = hz_diagonal(8);
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((path.spectral_gap(1.0, 1).unwrap() - (d[1] - d[0])).abs() < 1e-10);
        let e = hermitian_eigenvalues(path.initial().matrix()).unwrap();
        assert!((e[0] + 8.0).abs() < 1e-10);
    }

    #[test]
    fn size_limits() {
        assert!(matches!(build_tfim::<f64>(13, false), Err(Error::DimensionTooLarge { .. })));
        assert!(build_tfim::<f64>(1, false).is_err());
    }

    #[test]
    fn periodic_chain_adds_the_closing_bond() {
        let (_, open) = build_tfim::<f64>(4, false).unwrap();
        let (_, ring) = build_tfim::<f64>(4, true).unwrap();
        assert_eq!(ring.terms().unwrap().terms().len(), open.terms().unwrap().terms().len() + 1);
    }
}
