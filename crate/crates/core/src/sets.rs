//! Set indicators: half-spaces, superlevel sets and column filling.

use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::field::ScalarField;
use crate::gaussian::{std_normal_cdf, INV_SQRT_2PI};
use crate::grid::{GaussianGrid, MAX_DIM};

/// Fill every column along `axis` so that its discrete mass is exactly
/// `fraction(base) · A`, `A` being the axis total weight.
///
/// `fraction` receives the flat index of the column's first node. Nodes are
/// set to 1 starting from the low end (or from the high end when
/// `from_top`), with a single partially filled node closing the column.
pub(crate) fn column_fill(
    grid: &Arc<GaussianGrid>,
    axis: usize,
    from_top: bool,
    fraction: impl Fn(usize) -> f64,
) -> ScalarField {
    let n = grid.points_per_axis();
    let stride = grid.stride(axis);
    let outer = grid.len() / (n * stride);
    let aw = grid.axis_weights();
    let total = grid.axis_total_weight();
    let mut values = vec![0.0; grid.len()];
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * n * stride + inner;
            let frac = fraction(base);
            if frac >= 1.0 {
                for i in 0..n {
                    values[base + i * stride] = 1.0;
                }
                continue;
            }
            if !(frac > 0.0) {
                continue;
            }
            let target = frac * total;
            let mut acc = 0.0;
            for step in 0..n {
                let i = if from_top { n - 1 - step } else { step };
                let next = acc + aw[i];
                let node = base + i * stride;
                if next <= target {
                    values[node] = 1.0;
                    acc = next;
                } else {
                    values[node] = ((target - acc) / aw[i]).clamp(0.0, 1.0);
                    break;
                }
            }
        }
    }
    ScalarField::from_vec_unchecked(grid, values)
}

/// Indicator of `{⟨h, x⟩ < c}` for a unit vector `h`.
///
/// Columns along the axis where `|h_j|` is largest are filled to their exact
/// conditional Gaussian mass, so the volume is `Φ(c)` up to the truncation
/// of the grid rather than up to the node spacing.
pub fn half_space_indicator(h: &[f64], c: f64, grid: &Arc<GaussianGrid>) -> Result<ScalarField> {
    let dim = grid.dim();
    if h.len() != dim {
        return Err(Error::ShapeMismatch(format!(
            "normal has {} components on a {dim}-dimensional grid",
            h.len()
        )));
    }
    if !c.is_finite() || h.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite half-space parameters".into()));
    }
    let norm = h.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(domain("|h|", norm, "1 within 1e-12"));
    }
    let axis = (0..dim)
        .max_by(|&a, &b| h[a].abs().total_cmp(&h[b].abs()).then(b.cmp(&a)))
        .unwrap();
    let hj = h[axis];
    let mut hh = [0.0; MAX_DIM];
    hh[..dim].copy_from_slice(h);
    Ok(column_fill(grid, axis, hj < 0.0, |base| {
        let x = grid.point(base);
        let rest: f64 = (0..dim).filter(|&a| a != axis).map(|a| hh[a] * x[a]).sum();
        // {h_j x_j < c - rest}: below τ when h_j > 0, above it otherwise
        let tau = (c - rest) / hj;
        if hj > 0.0 {
            std_normal_cdf(tau)
        } else {
            std_normal_cdf(-tau)
        }
    }))
}

/// Gaussian perimeter of `{⟨h, x⟩ < c}` with `|h| = h_norm`.
pub fn half_space_perimeter_exact(c: f64, h_norm: f64) -> Result<f64> {
    if !(h_norm > 0.0) || !h_norm.is_finite() {
        return Err(domain("h_norm", h_norm, "(0, ∞)"));
    }
    if c.is_infinite() {
        return Ok(0.0);
    }
    Ok(INV_SQRT_2PI * (-c * c / (2.0 * h_norm * h_norm)).exp())
}

/// Binary indicator of `{u > t}`.
pub fn superlevel_set(u: &ScalarField, t: f64) -> ScalarField {
    u.map(|v| if v > t { 1.0 } else { 0.0 })
}
