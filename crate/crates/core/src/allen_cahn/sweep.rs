//! The ε-sweep of volume-constrained Allen-Cahn minimizers.

use std::sync::Arc;

use serde::Serialize;

use super::descent::{energy_parts, minimize_allen_cahn, project_mass};
use super::well::{well_constant, Potential};
use crate::error::{domain, Error, Result};
use crate::field::ScalarField;
use crate::gaussian::{profile_clamped, quantile_unchecked, std_normal_cdf};
use crate::grid::GaussianGrid;

/// Step limit per ε.
pub const SWEEP_MAX_STEPS: usize = 200_000;
/// Energy-decrease tolerance per ε.
pub const SWEEP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub energy: f64,
    pub dirichlet_part: f64,
    pub potential_part: f64,
    pub l2_norm: f64,
    pub mass_residual: f64,
    pub steps: usize,
    pub status: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub mass: f64,
    pub rows: Vec<SweepRow>,
    /// `c_W`.
    pub well_constant: f64,
    /// `c_W · U(mass)`, the value of the Γ-limit at the constrained minimum.
    pub limit: f64,
    #[serde(skip)]
    pub minimizers: Vec<ScalarField>,
}

impl SweepResult {
    /// Energy of the last successful row.
    pub fn final_energy(&self) -> Option<f64> {
        self.rows
            .iter()
            .rev()
            .find(|r| r.status != "failed")
            .map(|r| r.energy)
    }
}

/// Minimize `F_ε` at fixed mass for each `ε` in decreasing order, starting
/// each run from the previous minimizer.
///
/// The first start is the one-dimensional front `Φ((α(mass) − x_1)/ε)`.
pub fn gamma_sweep(
    eps_list: &[f64],
    mass: f64,
    w: &impl Potential,
    grid: &Arc<GaussianGrid>,
) -> Result<SweepResult> {
    if eps_list.is_empty() {
        return Err(Error::InvalidArgument("eps_list is empty".into()));
    }
    if let Some(&e) = eps_list.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(domain("eps", e, "(0, ∞)"));
    }
    if !eps_list.windows(2).all(|p| p[1] < p[0]) {
        return Err(Error::InvalidArgument(
            "eps_list must be strictly decreasing".into(),
        ));
    }
    if !(mass > 0.0 && mass < 1.0) {
        return Err(domain("mass", mass, "(0, 1)"));
    }
    let cw = well_constant(w, 64)?;
    let a = quantile_unchecked(mass);
    let eps0 = eps_list[0];
    let mut current = ScalarField::from_fn(grid, |x| std_normal_cdf((a - x[0]) / eps0));
    let mut values = current.values().to_vec();
    project_mass(&mut values, grid.weights(), mass);
    current = ScalarField::from_vec_unchecked(grid, values);

    let mut rows = Vec::with_capacity(eps_list.len());
    let mut minimizers = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        match minimize_allen_cahn(eps, mass, w, grid, &current, SWEEP_MAX_STEPS, SWEEP_TOL) {
            Ok(m) => {
                let (dp, pp) = energy_parts(&m.field, eps, w)?;
                rows.push(SweepRow {
                    eps,
                    energy: m.energy,
                    dirichlet_part: dp,
                    potential_part: pp,
                    l2_norm: m.field.l2_norm(),
                    mass_residual: m.field.integral() - mass,
                    steps: m.steps,
                    status: if m.converged { "converged" } else { "max_steps" }.into(),
                });
                current = m.field.clone();
                minimizers.push(m.field);
            }
            Err(e) => {
                rows.push(SweepRow {
                    eps,
                    energy: f64::NAN,
                    dirichlet_part: f64::NAN,
                    potential_part: f64::NAN,
                    l2_norm: f64::NAN,
                    mass_residual: f64::NAN,
                    steps: 0,
                    status: format!("failed: {e}"),
                });
            }
        }
    }
    Ok(SweepResult {
        mass,
        rows,
        well_constant: cw,
        limit: cw * profile_clamped(mass),
        minimizers,
    })
}
