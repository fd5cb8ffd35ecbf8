use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// `coefficient * P_1 ⊗ ... ⊗ P_k` on the listed sites, identity elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm<T> {
    pub coefficient: T,
    factors: Vec<(usize, PauliAxis)>,
}

impl<T: Real> PauliTerm<T> {
    /// Factors are sorted by site; a site may appear at most once.
    pub fn new(coefficient: T, mut factors: Vec<(usize, PauliAxis)>) -> Result<Self> {
        factors.sort_by_key(|&(site, _)| site);
        if let Some(w) = factors.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument(format!("site {} carries two Pauli factors", w[0].0)));
        }
        Ok(Self { coefficient, factors })
    }

    pub fn factors(&self) -> &[(usize, PauliAxis)] {
        &self.factors
    }

    fn max_site(&self) -> Option<usize> {
        self.factors.last().map(|&(site, _)| site)
    }

    /// Two Pauli strings commute iff they anticommute on an even number of sites.
    pub fn commutes_with(&self, other: &Self) -> bool {
        let mut clashes = 0;
        for &(site, axis) in &self.factors {
            if other.factors.iter().any(|&(s, a)| s == site && a != axis) {
                clashes += 1;
            }
        }
        clashes % 2 == 0
    }
}

/// Bit masks of a Pauli string on `n_sites` qubits; site 0 is the most significant bit.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PauliMask {
    pub x: usize,
    pub z: usize,
    /// `i^{#Y}`.
    pub y_phase: u32,
}

impl PauliMask {
    fn new<T>(term: &PauliTerm<T>, n_sites: usize) -> Self {
        let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
        for &(site, axis) in &term.factors {
            let bit = 1usize << (n_sites - 1 - site);
            match axis {
                PauliAxis::X => x |= bit,
                PauliAxis::Z => z |= bit,
                PauliAxis::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
            }
        }
        Self { x, z, y_phase: ny % 4 }
    }

    /// `P|i> = phase(i) |i ^ x>`.
    #[inline]
    pub fn phase<T: Real>(&self, i: usize) -> Complex<T> {
        let sign = if (i & self.z).count_ones().is_multiple_of(2) { T::one() } else { -T::one() };
        match self.y_phase {
            0 => Complex::new(sign, T::zero()),
            1 => Complex::new(T::zero(), sign),
            2 => Complex::new(-sign, T::zero()),
            _ => Complex::new(T::zero(), -sign),
        }
    }
}

/// Real-weighted sum of Pauli strings on `n_sites` qubits (a Hermitian operator).
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum<T> {
    n_sites: usize,
    terms: Vec<PauliTerm<T>>,
}

impl<T: Real> PauliSum<T> {
    pub fn new(n_sites: usize, terms: Vec<PauliTerm<T>>) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidArgument("a Pauli sum needs at least one site".into()));
        }
        if let Some(site) = terms.iter().filter_map(|t| t.max_site()).find(|&s| s >= n_sites) {
            return Err(Error::InvalidArgument(format!("site {site} outside a {n_sites}-site register")));
        }
        Ok(Self { n_sites, terms })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    pub fn terms(&self) -> &[PauliTerm<T>] {
        &self.terms
    }

    pub(crate) fn masks(&self) -> impl Iterator<Item = (T, PauliMask)> + '_ {
        self.terms.iter().map(|t| (t.coefficient, PauliMask::new(t, self.n_sites)))
    }

    pub fn scaled(&self, w: T) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm { coefficient: t.coefficient * w, factors: t.factors.clone() })
            .collect();
        Self { n_sites: self.n_sites, terms }
    }

    /// Concatenation of the two term lists.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.n_sites != other.n_sites {
            return Err(Error::DimensionMismatch { left: self.n_sites, right: other.n_sites });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self { n_sites: self.n_sites, terms })
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|t| t.factors.iter().all(|&(_, a)| a == PauliAxis::Z))
    }

    pub fn terms_commute(&self) -> bool {
        self.terms
            .iter()
            .enumerate()
            .all(|(i, a)| self.terms[i + 1..].iter().all(|b| a.commutes_with(b)))
    }

    pub fn to_matrix(&self) -> ComplexMatrix<T> {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n);
        for (c, mask) in self.masks() {
            for col in 0..n {
                m[(col ^ mask.x, col)] += mask.phase::<T>(col) * c;
            }
        }
        m
    }

    /// Diagonal entries (exact for diagonal sums; off-diagonal terms are ignored).
    pub fn diagonal(&self) -> Vec<T> {
        let mut d = vec![T::zero(); self.dim()];
        for (c, mask) in self.masks().filter(|(_, m)| m.x == 0) {
            for (i, di) in d.iter_mut().enumerate() {
                *di += mask.phase::<T>(i).re * c;
            }
        }
        d
    }

    /// `out += factor * H v`, without forming the matrix.
    pub fn apply_into(&self, factor: Complex<T>, v: &[Complex<T>], out: &mut [Complex<T>]) {
        for (c, mask) in self.masks() {
            let f = factor * c;
            for (i, &vi) in v.iter().enumerate() {
                out[i ^ mask.x] += f * mask.phase::<T>(i) * vi;
            }
        }
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![Complex::zero(); v.len()];
        self.apply_into(Complex::one(), v, &mut out);
        out
    }
}

/// `M <- exp(-i theta P) M` for a single Pauli string, using `P^2 = I`.
pub(crate) fn rotate_rows<T: Real>(mask: &PauliMask, theta: T, m: &mut ComplexMatrix<T>) {
    let n = m.dim();
    let (c, s) = (theta.cos(), theta.sin());
    let minus_is = Complex::new(T::zero(), -s);
    let data = m.as_mut_slice();
    for r in 0..n {
        let partner = r ^ mask.x;
        if partner < r {
            continue;
        }
        // Row r of P M is phase(partner) * row partner, and vice versa.
        let pr = mask.phase::<T>(partner) * minus_is;
        let pp = mask.phase::<T>(r) * minus_is;
        if partner == r {
            let f = Complex::new(c, T::zero()) + pr;
            for z in &mut data[r * n..(r + 1) * n] {
                *z *= f;
            }
            continue;
        }
        for col in 0..n {
            let a = data[r * n + col];
            let b = data[partner * n + col];
            data[r * n + col] = a * c + pr * b;
            data[partner * n + col] = b * c + pp * a;
        }
    }
}

/// `v <- exp(-i theta P) v`.
pub(crate) fn rotate_state<T: Real>(mask: &PauliMask, theta: T, v: &mut [Complex<T>]) {
    let (c, s) = (theta.cos(), theta.sin());
    let minus_is = Complex::new(T::zero(), -s);
    for r in 0..v.len() {
        let partner = r ^ mask.x;
        if partner < r {
            continue;
        }
        let pr = mask.phase::<T>(partner) * minus_is;
        if partner == r {
            v[r] *= Complex::new(c, T::zero()) + pr;
            continue;
        }
        let pp = mask.phase::<T>(r) * minus_is;
        let (a, b) = (v[r], v[partner]);
        v[r] = a * c + pr * b;
        v[partner] = b * c + pp * a;
    }
}
