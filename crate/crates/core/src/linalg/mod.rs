//! Dense complex linear algebra on square matrices.

mod eig;
mod funcs;
mod matrix;
mod state;

pub use eig::{
    hermitian_eig, hermitian_eigenvalues, spectral_center, unitary_eig, unitary_eig_with_hint,
    wrap_phase, Gauge, SpectralDecomposition, UnitaryEig,
};
pub(crate) use eig::{clusters, fix_largest_entry_gauge};
pub use funcs::{matrix_exp_hermitian, operator_norm, principal_log_hamiltonian, LogHamiltonian};
pub use matrix::{inner, norm2, ComplexMatrix};
pub use state::StateVector;

/// Numerical thresholds, calibrated for `f64`.
pub mod tolerances {
    /// Largest `|A - A^dag|` entry accepted as Hermitian.
    pub const HERMITIAN: f64 = 1e-10;
    /// Largest `|U^dag U - I|` entry accepted as unitary.
    pub const UNITARY: f64 = 1e-8;
    /// Eigenvalues closer than this are treated as one degenerate level.
    pub const DEGENERACY: f64 = 1e-9;
    /// Magnitude ties in gauge fixing are broken by index within this margin.
    pub const GAUGE_TIE: f64 = 1e-12;
    /// Eigenphases within this distance of `pi` make the logarithm ambiguous.
    pub const BRANCH_CUT: f64 = 1e-8;
    /// Cayley transforms re-centre when a phase is within this distance of the cut.
    pub const CAYLEY_MARGIN: f64 = 1e-4;
}
