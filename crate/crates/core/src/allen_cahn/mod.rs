//! Gaussian Allen-Cahn energies, their minimizers and recovery fields.

mod descent;
mod profile;
mod recovery;
mod sweep;
mod well;

pub use descent::{allen_cahn_energy, allen_cahn_gradient, energy_parts, minimize_allen_cahn, Minimizer};
pub use profile::{recovery_profile, transition_time, Profile};
pub use recovery::{recovery_sequence, SetDescriptor, PROFILE_SAMPLES};
pub use sweep::{gamma_sweep, SweepResult, SweepRow, SWEEP_MAX_STEPS, SWEEP_TOL};
pub use well::{well_constant, DoubleWell, Potential, TruncatedWell};
