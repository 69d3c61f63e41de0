//! Gaussian perimeter calculus on finite-dimensional grids.
//!
//! The crate works on `(ℝ^m, γ_m)` for `m ≤ 3`, discretized by a
//! [`GaussianGrid`]. On top of the scalar Gaussian functions it provides
//! total variation and perimeter, Ehrhard symmetrization, the relaxed
//! perimeter functional with its dual lower bound, Allen-Cahn energies and
//! their minimizers, and an experiment driver used by the `gperim` binary.
//!
//! ```
//! use gperim::{build_grid, half_space_indicator, perimeter_gamma, INV_SQRT_2PI};
//!
//! let grid = build_grid(1, 6.0, 2048).unwrap();
//! let e = half_space_indicator(&[1.0], 0.0, &grid).unwrap();
//! let p = perimeter_gamma(&e).unwrap();
//! assert!((p / INV_SQRT_2PI - 1.0).abs() < 0.01);
//! ```

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allen_cahn;
pub mod calculus;
pub mod dump;
pub mod ehrhard;
pub mod error;
pub mod experiment;
pub mod field;
pub mod gaussian;
pub mod grid;
pub mod random;
pub mod relaxed;
pub mod sets;
pub mod stencil;

pub use allen_cahn::{
    allen_cahn_energy, allen_cahn_gradient, gamma_sweep, minimize_allen_cahn, recovery_profile,
    recovery_sequence, well_constant, DoubleWell, Potential, Profile, SetDescriptor, TruncatedWell,
};
pub use calculus::{
    coarea_total_variation, gaussian_divergence, gradient, perimeter_gamma, total_variation_gamma,
    volume_gamma, weak_pairing, weighted_coarea,
};
pub use ehrhard::{
    conditional_expectation, ehrhard_set, ehrhard_symmetrize_function, ehrhard_symmetrize_set,
};
pub use error::{Error, Result};
pub use field::{ScalarField, VectorField};
pub use gaussian::{
    isoperimetric_profile, isoperimetric_profile_derivatives, std_normal_cdf, std_normal_pdf,
    std_normal_quantile, IsoperimetricProfile, INV_SQRT_2PI, SQRT_2PI,
};
pub use grid::{build_grid, integrate, GaussianGrid};
pub use relaxed::{
    dual_pairing, duality_lower_bound, isoperimetric_deficit, minimize_prescribed_curvature,
    prescribed_curvature_energy, relaxed_energy, DualTestPair,
};
pub use sets::{half_space_indicator, half_space_perimeter_exact, superlevel_set};

/// Library version reported in experiment provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
