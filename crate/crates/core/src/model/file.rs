use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::operator::HermitianOperator;
use super::path::AdiabaticPath;
use super::pauli::{PauliAxis, PauliSum, PauliTerm};
use super::schedule::Schedule;
use super::tfim::MAX_SITES;

/// One Pauli string: `{"coeff": -1.0, "factors": [[0, "Z"], [1, "Z"]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub coeff: f64,
    #[serde(default)]
    pub factors: Vec<(usize, PauliAxis)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Linear,
    Polynomial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub kind: ScheduleKind,
    /// Power-series coefficients `c_0, c_1, ...` for `kind = "polynomial"`.
    #[serde(default)]
    pub coefficients: Vec<f64>,
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        Self { kind: ScheduleKind::Linear, coefficients: Vec::new() }
    }
}

/// JSON description of an adiabatic path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianFile {
    pub n_sites: usize,
    pub initial: Vec<TermSpec>,
    #[serde(rename = "final")]
    pub target: Vec<TermSpec>,
    #[serde(default)]
    pub schedule: ScheduleSpec,
}

impl HamiltonianFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("hamiltonian file: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    pub fn to_path<T: Real>(&self) -> Result<AdiabaticPath<T>> {
        if self.n_sites > MAX_SITES {
            return Err(Error::DimensionTooLarge { sites: self.n_sites, max: MAX_SITES });
        }
        let build = |specs: &[TermSpec], label: &str| -> Result<HermitianOperator<T>> {
            let terms = specs
                .iter()
                .map(|t| PauliTerm::new(T::lit(t.coeff), t.factors.clone()))
                .collect::<Result<Vec<_>>>()?;
            Ok(HermitianOperator::from_pauli_sum(PauliSum::new(self.n_sites, terms)?, label))
        };
        let schedule = match self.schedule.kind {
            ScheduleKind::Linear => Schedule::Linear,
            ScheduleKind::Polynomial => Schedule::polynomial(self.schedule.coefficients.clone())?,
        };
        AdiabaticPath::new(build(&self.initial, "H_i")?, build(&self.target, "H_f")?, schedule)
    }
}
