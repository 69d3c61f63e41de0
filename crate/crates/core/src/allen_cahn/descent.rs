//! Allen-Cahn energies `F_ε(u) = ∫ (ε/2 |∇u|² + W(u)/ε) dγ` and their
//! volume-constrained minimization.

use std::sync::Arc;

use super::well::Potential;
use crate::calculus::{dirichlet_energy, for_each_axis_edge};
use crate::error::{domain, Error, Result};
use crate::field::ScalarField;
use crate::grid::{weighted_sum, GaussianGrid};

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(domain("eps", eps, "(0, ∞)"));
    }
    Ok(())
}

/// The two halves `(∫ ε/2 |∇u|² dγ, ∫ W(u)/ε dγ)` of `F_ε(u)`.
pub fn energy_parts(u: &ScalarField, eps: f64, w: &impl Potential) -> Result<(f64, f64)> {
    check_eps(eps)?;
    let wells: Vec<f64> = u.values().iter().map(|&v| w.value(v)).collect();
    Ok((
        0.5 * eps * dirichlet_energy(u),
        weighted_sum(&wells, u.grid().weights()) / eps,
    ))
}

/// `F_ε(u)`; the gradient term uses axis differences between neighbours.
pub fn allen_cahn_energy(u: &ScalarField, eps: f64, w: &impl Potential) -> Result<f64> {
    let (a, b) = energy_parts(u, eps, w)?;
    Ok(a + b)
}

fn gradient_values(u: &[f64], grid: &GaussianGrid, eps: f64, w: &impl Potential) -> Vec<f64> {
    let weights = grid.weights();
    let scale = eps / grid.spacing().powi(2);
    let mut lap = vec![0.0; u.len()];
    for_each_axis_edge(grid, |x, y, we| {
        let t = scale * we * (u[y] - u[x]);
        lap[x] -= t;
        lap[y] += t;
    });
    u.iter()
        .zip(&lap)
        .zip(weights)
        .map(|((&v, l), wv)| l / wv + w.derivative(v) / eps)
        .collect()
}

/// Gradient of [`allen_cahn_energy`] in `L²_γ`: the exact derivative of the
/// discrete energy divided by the node weights. It approximates
/// `−ε(Δu − x·∇u) + W'(u)/ε`.
pub fn allen_cahn_gradient(u: &ScalarField, eps: f64, w: &impl Potential) -> Result<ScalarField> {
    check_eps(eps)?;
    Ok(ScalarField::from_vec_unchecked(
        u.grid(),
        gradient_values(u.values(), u.grid(), eps, w),
    ))
}

fn mass_of(values: &[f64], weights: &[f64], shift: f64) -> f64 {
    values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * (v + shift).clamp(0.0, 1.0))
        .sum()
}

/// Nearest-shift projection onto `{∫u dγ = mass, 0 ≤ u ≤ 1}`: find `λ` with
/// `∫ clip(u + λ) dγ = mass` by bisection, then solve exactly for `λ` on the
/// final set of unclipped nodes.
pub(crate) fn project_mass(values: &mut [f64], weights: &[f64], mass: f64) {
    let lo_v = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi_v = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = (-hi_v, 1.0 - lo_v);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mass_of(values, weights, mid) < mass {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * (1.0 + hi.abs()) {
            break;
        }
    }
    let mut shift = 0.5 * (lo + hi);
    let (mut free_w, mut free_wv, mut full) = (0.0, 0.0, 0.0);
    for (v, w) in values.iter().zip(weights) {
        let s = v + shift;
        if s >= 1.0 {
            full += w;
        } else if s > 0.0 {
            free_w += w;
            free_wv += w * v;
        }
    }
    if free_w > 0.0 {
        let exact = (mass - full - free_wv) / free_w;
        if (mass_of(values, weights, exact) - mass).abs() <= (mass_of(values, weights, shift) - mass).abs() {
            shift = exact;
        }
    }
    for v in values.iter_mut() {
        *v = (*v + shift).clamp(0.0, 1.0);
    }
}

/// Outcome of [`minimize_allen_cahn`].
#[derive(Debug, Clone)]
pub struct Minimizer {
    pub field: ScalarField,
    pub energy: f64,
    pub steps: usize,
    /// Stopped on the energy-decrease criterion rather than the step limit.
    pub converged: bool,
}

/// Accepted steps over which the energy decrease is compared with `tol`.
const WINDOW: usize = 5;

/// Projected gradient descent for `F_ε` on `{∫u dγ = mass, 0 ≤ u ≤ 1}`.
///
/// Steps follow the Barzilai-Borwein rule and are halved until the energy
/// does not increase. Iteration stops once the energy dropped by less than
/// `tol` over the last few accepted steps, or after `max_steps`.
pub fn minimize_allen_cahn(
    eps: f64,
    mass: f64,
    w: &impl Potential,
    grid: &Arc<GaussianGrid>,
    init: &ScalarField,
    max_steps: usize,
    tol: f64,
) -> Result<Minimizer> {
    check_eps(eps)?;
    if !(mass > 0.0 && mass < 1.0) {
        return Err(domain("mass", mass, "(0, 1)"));
    }
    if mass >= grid.total_weight() {
        return Err(Error::InvalidArgument(format!(
            "mass {mass} exceeds the grid's total weight {}",
            grid.total_weight()
        )));
    }
    grid.check_same(init.grid(), "minimize_allen_cahn")?;
    let weights = grid.weights();
    let energy = |v: &[f64]| {
        allen_cahn_energy(&ScalarField::from_vec_unchecked(grid, v.to_vec()), eps, w).expect("eps checked")
    };

    let mut u = init.values().to_vec();
    project_mass(&mut u, weights, mass);
    let mut e = energy(&u);
    let mut g = gradient_values(&u, grid, eps, w);
    let mut alpha = 1.0 / (4.0 * eps / grid.spacing().powi(2) + 4.0 / eps);
    let mut history = vec![e];
    let mut converged = false;
    let mut steps = 0;

    while steps < max_steps {
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial: Vec<f64> = u.iter().zip(&g).map(|(a, d)| a - alpha * d).collect();
            project_mass(&mut trial, weights, mass);
            let et = energy(&trial);
            if et <= e {
                accepted = Some((trial, et));
                break;
            }
            alpha *= 0.5;
        }
        let Some((next, en)) = accepted else {
            converged = true;
            break;
        };
        steps += 1;
        let g_next = gradient_values(&next, grid, eps, w);
        let (mut ss, mut sy) = (0.0, 0.0);
        for i in 0..u.len() {
            let s = next[i] - u[i];
            ss += weights[i] * s * s;
            sy += weights[i] * s * (g_next[i] - g[i]);
        }
        alpha = if sy > 0.0 { ss / sy } else { 2.0 * alpha };
        alpha = alpha.clamp(1e-14, 1e6);
        u = next;
        e = en;
        g = g_next;
        history.push(e);
        if ss == 0.0 || (history.len() > WINDOW && history[history.len() - 1 - WINDOW] - e < tol) {
            converged = true;
            break;
        }
    }
    Ok(Minimizer {
        field: ScalarField::from_vec_unchecked(grid, u),
        energy: e,
        steps,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allen_cahn::well::DoubleWell;
    use crate::gaussian::std_normal_cdf;
    use crate::grid::build_grid;

    #[test]
    fn constant_fields() {
        let g = build_grid(1, 6.0, 512).unwrap();
        let w = DoubleWell::quartic();
        assert_eq!(
            allen_cahn_energy(&ScalarField::constant(&g, 0.0), 0.1, &w).unwrap(),
            0.0
        );
        assert_eq!(
            allen_cahn_energy(&ScalarField::constant(&g, 1.0), 0.1, &w).unwrap(),
            0.0
        );
        let e = allen_cahn_energy(&ScalarField::constant(&g, 0.5), 0.1, &w).unwrap();
        assert!((e - 0.625 * g.total_weight()).abs() < 1e-14);
        let gr = allen_cahn_gradient(&ScalarField::constant(&g, 0.3), 0.1, &w).unwrap();
        assert!(gr
            .values()
            .iter()
            .all(|&v| (v - w.derivative(0.3) / 0.1).abs() < 1e-12));
        assert!(allen_cahn_energy(&ScalarField::constant(&g, 0.5), 0.0, &w).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let g = build_grid(2, 6.0, 48).unwrap();
        let w = DoubleWell::quartic();
        let u = ScalarField::from_fn(&g, |x| 0.5 + 0.4 * (x[0] - 0.3 * x[1]).sin());
        let v = ScalarField::from_fn(&g, |x| {
            (x[1] * 0.7 + 0.4).cos() * (-0.1 * (x[0] - 0.5).powi(2)).exp()
        });
        let eps = 0.2;
        let grad = allen_cahn_gradient(&u, eps, &w).unwrap();
        let analytic = crate::calculus::weak_pairing(&grad, &v).unwrap();
        let h = 1e-5;
        let plus = u.zip_with(&v, |a, b| a + h * b).unwrap();
        let minus = u.zip_with(&v, |a, b| a - h * b).unwrap();
        let fd = (allen_cahn_energy(&plus, eps, &w).unwrap() - allen_cahn_energy(&minus, eps, &w).unwrap())
            / (2.0 * h);
        assert!(((analytic - fd) / fd).abs() <= 1e-4, "{analytic} vs {fd}");
    }

    #[test]
    fn mass_projection_is_exact() {
        let g = build_grid(1, 6.0, 2048).unwrap();
        for target in [0.5, 0.1, 0.9] {
            let mut v: Vec<f64> = g.axis().iter().map(|x| 1.5 * (x * 0.8).sin()).collect();
            project_mass(&mut v, g.weights(), target);
            assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
            assert!((weighted_sum(&v, g.weights()) - target).abs() <= 1e-14);
        }
    }

    #[test]
    fn minimizer_mass_and_monotone_energy() {
        let g = build_grid(1, 6.0, 1024).unwrap();
        let w = DoubleWell::quartic();
        let init = ScalarField::from_fn(&g, |x| std_normal_cdf(x[0] / 0.2));
        let mut prev = f64::INFINITY;
        for steps in [0, 3, 10, 40] {
            let m = minimize_allen_cahn(0.2, 0.5, &w, &g, &init, steps, 0.0).unwrap();
            assert!((m.field.integral() - 0.5).abs() <= 1e-10);
            assert!(m.energy <= prev);
            prev = m.energy;
        }
        assert!(minimize_allen_cahn(0.2, 1.5, &w, &g, &init, 1, 0.0).is_err());
        assert!(minimize_allen_cahn(0.2, 0.0, &w, &g, &init, 1, 0.0).is_err());
    }

    #[test]
    fn large_eps_gives_diffuse_minimizer() {
        let g = build_grid(1, 6.0, 512).unwrap();
        let w = DoubleWell::quartic();
        let init = ScalarField::from_fn(&g, |x| std_normal_cdf(-x[0]));
        let m = minimize_allen_cahn(10.0, 0.5, &w, &g, &init, 5000, 1e-14).unwrap();
        // the constant of the right mass; the grid's total weight is just below 1
        let half = ScalarField::constant(&g, 0.5 / g.total_weight());
        assert!(m.field.l2_distance(&half).unwrap() < 1e-3);
        let flat = allen_cahn_energy(&half, 10.0, &w).unwrap();
        assert!(
            m.energy <= flat * (1.0 + 1e-8) && m.energy > 0.99 * flat,
            "{} vs {flat}",
            m.energy
        );
    }
}
