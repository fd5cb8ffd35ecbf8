//! Hamiltonians, schedules and interpolated adiabatic paths.

mod file;
mod operator;
mod path;
mod pauli;
mod schedule;
mod tfim;

pub use file::{HamiltonianFile, ScheduleKind, ScheduleSpec, TermSpec};
pub use operator::HermitianOperator;
pub use path::AdiabaticPath;
pub(crate) use pauli::{rotate_rows, rotate_state, PauliMask};
pub use pauli::{PauliAxis, PauliSum, PauliTerm};
pub use schedule::Schedule;
pub use tfim::{build_tfim, tfim_path, MAX_SITES};
