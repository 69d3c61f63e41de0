//! Gradients, Gaussian divergence, total variation, perimeter and coarea.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::GaussianGrid;
use crate::sets::superlevel_set;
use crate::stencil::for_each_pair;

fn axis_derivative(
    values: &[f64],
    grid: &GaussianGrid,
    axis: usize,
    out: &mut [f64],
    step: usize,
    slot: usize,
) {
    let n = grid.points_per_axis();
    let s = grid.stride(axis);
    let dx = grid.spacing();
    for (i, o) in out.chunks_exact_mut(step).enumerate() {
        let j = grid.multi_index(i)[axis];
        o[slot] = if j == 0 {
            (values[i + s] - values[i]) / dx
        } else if j == n - 1 {
            (values[i] - values[i - s]) / dx
        } else {
            (values[i + s] - values[i - s]) / (2.0 * dx)
        };
    }
}

/// Euclidean gradient: centered differences inside, one-sided on the
/// boundary of the grid.
pub fn gradient(u: &ScalarField) -> VectorField {
    let g = u.grid();
    let m = g.dim();
    let mut out = vec![0.0; g.len() * m];
    for a in 0..m {
        axis_derivative(u.values(), g, a, &mut out, m, a);
    }
    VectorField::from_vec_unchecked(g, out)
}

/// `div_γ Φ = div Φ − ⟨x, Φ⟩`, the formal adjoint of `−∇` in `L²_γ`.
pub fn gaussian_divergence(phi: &VectorField) -> ScalarField {
    let g = phi.grid();
    let m = g.dim();
    let mut out = vec![0.0; g.len()];
    let mut deriv = vec![0.0; g.len()];
    for a in 0..m {
        let comp = phi.component(a);
        axis_derivative(comp.values(), g, a, &mut deriv, 1, 0);
        for (i, o) in out.iter_mut().enumerate() {
            *o += deriv[i] - g.point(i)[a] * comp.values()[i];
        }
    }
    ScalarField::from_vec_unchecked(g, out)
}

/// Discrete Gaussian total variation `|D_γ u|(ℝ^m)`.
///
/// Uses the multi-direction stencil of [`crate::stencil`]; in one
/// dimension this is the forward-difference sum `Σ |u_{i+1} − u_i| φ(x_{i+½})`.
pub fn total_variation_gamma(u: &ScalarField) -> f64 {
    let v = u.values();
    let mut tv = 0.0;
    for_each_pair(u.grid(), |x, y, _, coef| tv += coef * (v[y] - v[x]).abs());
    tv
}

/// Nodewise total variation density `G` with `Σ_x w_x G(x) = TV(u)`; the
/// grid stand-in for `|∇u|`. Each pair term is attributed to its base node.
pub fn tv_density(u: &ScalarField) -> Vec<f64> {
    let v = u.values();
    let w = u.grid().weights();
    let mut g = vec![0.0; v.len()];
    for_each_pair(u.grid(), |x, y, _, coef| {
        g[x] += coef * (v[y] - v[x]).abs() / w[x]
    });
    g
}

/// `P_γ(E)` for a set field.
pub fn perimeter_gamma(e: &ScalarField) -> Result<f64> {
    e.require_indicator("perimeter_gamma")?;
    Ok(total_variation_gamma(e))
}

/// `∫ u dγ`.
pub fn volume_gamma(u: &ScalarField) -> f64 {
    u.integral()
}

/// `∫ u φ dγ`.
pub fn weak_pairing(u: &ScalarField, phi: &ScalarField) -> Result<f64> {
    u.grid().check_same(phi.grid(), "weak_pairing")?;
    Ok(u.values()
        .iter()
        .zip(phi.values())
        .zip(u.grid().weights())
        .map(|((a, b), w)| a * b * w)
        .sum())
}

/// Midpoint levels `t_j = min + (j + ½)Δt` over `[min u, max u]`, with `Δt`.
pub(crate) fn midpoint_levels(u: &ScalarField, n_levels: usize) -> (Vec<f64>, f64) {
    let lo = u.min();
    let dt = (u.max() - lo) / n_levels as f64;
    ((0..n_levels).map(|j| lo + (j as f64 + 0.5) * dt).collect(), dt)
}

fn check_levels(n_levels: usize) -> Result<()> {
    if n_levels < 16 {
        return Err(Error::InvalidArgument(format!(
            "n_levels must be at least 16, got {n_levels}"
        )));
    }
    Ok(())
}

/// `∫ P_γ({u > t}) dt` by the midpoint rule with `n_levels` levels.
pub fn coarea_total_variation(u: &ScalarField, n_levels: usize) -> Result<f64> {
    check_levels(n_levels)?;
    let (levels, dt) = midpoint_levels(u, n_levels);
    if dt == 0.0 {
        return Ok(0.0);
    }
    Ok(levels
        .iter()
        .map(|&t| dt * total_variation_gamma(&superlevel_set(u, t)))
        .sum())
}

/// Both sides of the weighted coarea formula,
/// `(∫ g d|D_γ u|, ∫ (∫ g d|D_γ χ_{u>t}|) dt)`.
pub fn weighted_coarea(u: &ScalarField, g: &ScalarField, n_levels: usize) -> Result<(f64, f64)> {
    check_levels(n_levels)?;
    u.grid().check_same(g.grid(), "weighted_coarea")?;
    if let Some(i) = g.values().iter().position(|&v| v < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "weight g must be nonnegative, found {} at node {i}",
            g.values()[i]
        )));
    }
    let w = u.grid().weights();
    let weighted = |f: &ScalarField| {
        let density = tv_density(f);
        g.values()
            .iter()
            .zip(&density)
            .zip(w)
            .map(|((gv, d), wv)| gv * d * wv)
            .sum::<f64>()
    };
    let left = weighted(u);
    let (levels, dt) = midpoint_levels(u, n_levels);
    let right = if dt == 0.0 {
        0.0
    } else {
        levels.iter().map(|&t| dt * weighted(&superlevel_set(u, t))).sum()
    };
    Ok((left, right))
}

/// Visit every axis-aligned neighbour pair `(x, x + e_a)` with weight
/// `Δx φ(x_a + Δx/2) Π_{b≠a} w_b`, the Gaussian measure of the cell between them.
pub(crate) fn for_each_axis_edge(grid: &GaussianGrid, mut f: impl FnMut(usize, usize, f64)) {
    let n = grid.points_per_axis();
    let dx = grid.spacing();
    let aw = grid.axis_weights();
    let mid: Vec<f64> = grid.axis()[..n - 1]
        .iter()
        .map(|&x| dx * crate::gaussian::std_normal_pdf(x + 0.5 * dx))
        .collect();
    let m = grid.dim();
    for x in 0..grid.len() {
        let idx = grid.multi_index(x);
        for a in 0..m {
            if idx[a] + 1 == n {
                continue;
            }
            let mut w = mid[idx[a]];
            for b in (0..m).filter(|&b| b != a) {
                w *= aw[idx[b]];
            }
            f(x, x + grid.stride(a), w);
        }
    }
}

/// `∫ |∇u|² dγ` from axis differences, `Σ_edges ω_e ((u_y − u_x)/Δx)²`.
pub fn dirichlet_energy(u: &ScalarField) -> f64 {
    let v = u.values();
    let dx2 = u.grid().spacing().powi(2);
    let mut e = 0.0;
    for_each_axis_edge(u.grid(), |x, y, w| e += w * (v[y] - v[x]).powi(2) / dx2);
    e
}

/// Nodewise `|∇u|²` whose weighted sum is [`dirichlet_energy`]; each edge is
/// attributed to its lower node.
pub fn gradient_norm_sq_density(u: &ScalarField) -> Vec<f64> {
    let v = u.values();
    let w = u.grid().weights();
    let dx2 = u.grid().spacing().powi(2);
    let mut d = vec![0.0; v.len()];
    for_each_axis_edge(u.grid(), |x, y, we| {
        d[x] += we * (v[y] - v[x]).powi(2) / (dx2 * w[x])
    });
    d
}
