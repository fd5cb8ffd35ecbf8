//! Digital adiabatic state preparation on dense Hamiltonians.

// Negated comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolve;
pub mod experiments;
pub mod gamma;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod projcalc;
pub mod quad;
pub mod rllemma;
pub mod scalar;
pub mod zeno;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ComplexMatrix64 = linalg::ComplexMatrix<f64>;
pub type ComplexMatrix32 = linalg::ComplexMatrix<f32>;
pub type StateVector64 = linalg::StateVector<f64>;
pub type StateVector32 = linalg::StateVector<f32>;
pub type Path64 = model::AdiabaticPath<f64>;
pub type Path32 = model::AdiabaticPath<f32>;
pub type Spec64 = evolve::EvolutionSpec<f64>;
pub type Spec32 = evolve::EvolutionSpec<f32>;
pub type Triplet64 = metrics::ErrorTriplet<f64>;
pub type Trace64 = zeno::ZenoTrace<f64>;
