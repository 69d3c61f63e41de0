//! Ehrhard symmetrization, Ehrhard sets and cylindrical conditional
//! expectation.
//!
//! A set field on `ℝ^m` symmetrized along its first `k` variables depends on
//! `x_1..x_k` only. Its sections in the `k`-th variable are half-lines
//! `{x_k < α(v)}` where `v` is the conditional volume of the original set
//! given `x_1..x_{k−1}`. Sections are realized by column filling, so the
//! conditional volumes are reproduced exactly in the discrete measure.

use std::sync::Arc;

use crate::calculus::midpoint_levels;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::GaussianGrid;
use crate::sets::{column_fill, superlevel_set};

/// Values within this distance of 0 or 1 produce empty or full columns.
const SNAP: f64 = 1e-12;

/// Mean of `values` over the trailing `m − k` axes, normalized by their
/// total weight. `k = 0` gives the global mean.
fn trailing_mean(values: &[f64], grid: &GaussianGrid, k: usize) -> Vec<f64> {
    let n = grid.points_per_axis();
    let block = n.pow((grid.dim() - k) as u32);
    let aw = grid.axis_weights();
    // weights of the trailing block, in its own row-major order
    let mut bw = vec![1.0; block];
    for (j, w) in bw.iter_mut().enumerate() {
        let mut rest = j;
        for _ in k..grid.dim() {
            *w *= aw[rest % n];
            rest /= n;
        }
    }
    let total: f64 = bw.iter().sum();
    values
        .chunks_exact(block)
        .map(|c| c.iter().zip(&bw).map(|(v, w)| v * w).sum::<f64>() / total)
        .collect()
}

/// `𝔼_k u`, a field on the `k`-dimensional grid with the same axis.
pub fn conditional_expectation(u: &ScalarField, k: usize) -> Result<ScalarField> {
    let g = u.grid();
    if k == 0 || k >= g.dim() {
        return Err(Error::InvalidArgument(format!(
            "conditional expectation needs 1 <= k < {}, got {k}",
            g.dim()
        )));
    }
    let base = g.with_dim(k)?;
    Ok(ScalarField::from_vec_unchecked(
        &base,
        trailing_mean(u.values(), g, k),
    ))
}

/// Extend a field on the first `base.dim()` variables to `grid`, constant in
/// the remaining ones.
pub fn cylindrical_extension(v: &ScalarField, grid: &Arc<GaussianGrid>) -> Result<ScalarField> {
    let b = v.grid();
    if b.dim() > grid.dim()
        || b.points_per_axis() != grid.points_per_axis()
        || b.half_width().to_bits() != grid.half_width().to_bits()
    {
        return Err(Error::ShapeMismatch(
            "cylindrical extension needs a lower-dimensional grid with the same axis".into(),
        ));
    }
    let block = grid.len() / b.len();
    let mut out = Vec::with_capacity(grid.len());
    for &x in v.values() {
        out.extend(std::iter::repeat(x).take(block));
    }
    Ok(ScalarField::from_vec_unchecked(grid, out))
}

/// The Ehrhard set `{x_{m+1} < α(v(x))}` of `v : ℝ^m → [0, 1]`, on the grid
/// with one more axis. Each column along the new axis holds mass `v(x)`.
pub fn ehrhard_set(v: &ScalarField) -> Result<ScalarField> {
    v.require_unit_interval("ehrhard_set")?;
    let base = v.grid();
    let grid = base.with_dim(base.dim() + 1)?;
    Ok(ehrhard_columns(&grid, v.values()))
}

fn snap(p: f64) -> f64 {
    if p <= SNAP {
        0.0
    } else if p >= 1.0 - SNAP {
        1.0
    } else {
        p
    }
}

/// Fill the last axis of `grid` with column masses `fractions`.
fn ehrhard_columns(grid: &Arc<GaussianGrid>, fractions: &[f64]) -> ScalarField {
    let last = grid.dim() - 1;
    let n = grid.points_per_axis();
    column_fill(grid, last, false, |b| snap(fractions[b / n]))
}

/// Symmetral of a set along its first `k` variables as a field on the
/// `k`-dimensional grid.
fn reduced_symmetral(e: &ScalarField, k: usize) -> Result<ScalarField> {
    let g = e.grid();
    let v = trailing_mean(e.values(), g, k - 1);
    let base = g.with_dim(k)?;
    Ok(ehrhard_columns(&base, &v))
}

/// Ehrhard symmetral `E*` of a set along its first `k` variables.
///
/// For `k = 1` this is the half-space `{x_1 < α(γ(E))}`. For `k > 1` it is
/// the Ehrhard set of `𝔼_{k−1} χ_E`, constant in `x_{k+1}, …, x_m`. Volume and
/// `𝔼_{k−1}` are preserved.
pub fn ehrhard_symmetrize_set(e: &ScalarField, k: usize) -> Result<ScalarField> {
    e.require_indicator("ehrhard_symmetrize_set")?;
    check_k(e.grid(), k)?;
    cylindrical_extension(&reduced_symmetral(e, k)?, e.grid())
}

fn check_k(g: &GaussianGrid, k: usize) -> Result<()> {
    if k == 0 || k > g.dim() {
        return Err(Error::InvalidArgument(format!(
            "symmetrization needs 1 <= k <= {}, got {k}",
            g.dim()
        )));
    }
    Ok(())
}

/// Level data of a function symmetrization.
#[derive(Debug, Clone)]
pub struct SymmetrizedFunction {
    pub field: ScalarField,
    /// Midpoint levels `t_j`.
    pub levels: Vec<f64>,
    pub level_spacing: f64,
    /// `γ({u > t_j})`.
    pub volumes: Vec<f64>,
    /// `γ({u* > t_j})`.
    pub symmetral_volumes: Vec<f64>,
}

/// Ehrhard symmetrization of a function: `u* = min u + Δt Σ_j χ_{E*_j}` over
/// the superlevel sets `E_j = {u > t_j}` at `n_levels` midpoint levels.
pub fn ehrhard_symmetrize_function(u: &ScalarField, k: usize, n_levels: usize) -> Result<ScalarField> {
    symmetrize_levels(u, k, n_levels).map(|s| s.field)
}

/// [`ehrhard_symmetrize_function`] together with its level bookkeeping.
pub fn symmetrize_levels(u: &ScalarField, k: usize, n_levels: usize) -> Result<SymmetrizedFunction> {
    let g = u.grid();
    check_k(g, k)?;
    if n_levels < 32 {
        return Err(Error::InvalidArgument(format!(
            "n_levels must be at least 32, got {n_levels}"
        )));
    }
    let (levels, dt) = midpoint_levels(u, n_levels);
    let base = g.with_dim(k)?;
    let mut acc = vec![0.0; base.len()];
    let mut volumes = Vec::with_capacity(n_levels);
    let mut reduced_sets = Vec::with_capacity(n_levels);
    if dt > 0.0 {
        for &t in &levels {
            let e = superlevel_set(u, t);
            volumes.push(e.integral());
            let s = reduced_symmetral(&e, k)?;
            for (a, v) in acc.iter_mut().zip(s.values()) {
                *a += v;
            }
            reduced_sets.push(s);
        }
    } else {
        volumes = vec![0.0; n_levels];
    }
    let lo = u.min();
    let reduced = ScalarField::from_vec_unchecked(&base, acc.iter().map(|a| lo + dt * a).collect());
    let field = cylindrical_extension(&reduced, g)?;
    let factor = g.total_weight() / base.total_weight();
    let symmetral_volumes = if dt > 0.0 {
        reduced_sets.iter().map(|s| s.integral() * factor).collect()
    } else {
        vec![0.0; n_levels]
    };
    Ok(SymmetrizedFunction {
        field,
        levels,
        level_spacing: dt,
        volumes,
        symmetral_volumes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::perimeter_gamma;
    use crate::gaussian::{isoperimetric_profile, std_normal_cdf, INV_SQRT_2PI};
    use crate::grid::build_grid;
    use crate::sets::half_space_indicator;

    #[test]
    fn expectation_of_cylindrical_function_is_its_restriction() {
        let g = build_grid(2, 6.0, 64).unwrap();
        let u = ScalarField::from_fn(&g, |x| x[0].sin() + 0.5);
        let e = conditional_expectation(&u, 1).unwrap();
        assert_eq!(e.grid().dim(), 1);
        for (i, &x) in e.grid().axis().iter().enumerate() {
            assert!((e.values()[i] - (x.sin() + 0.5)).abs() <= 1e-10);
        }
    }

    #[test]
    fn expectation_of_orthogonal_half_space_is_half() {
        let g = build_grid(2, 6.0, 128).unwrap();
        let e = half_space_indicator(&[0.0, 1.0], 0.0, &g).unwrap();
        let c = conditional_expectation(&e, 1).unwrap();
        assert!(c.values().iter().all(|v| (v - 0.5).abs() < 1e-12));
        assert!(conditional_expectation(&e, 2).is_err());
        assert!(conditional_expectation(&e, 0).is_err());
    }

    #[test]
    fn expectation_preserves_integral() {
        let g = build_grid(3, 6.0, 24).unwrap();
        let u = ScalarField::from_fn(&g, |x| (x[0] * x[1] + x[2]).cos().abs());
        for k in 1..3 {
            let e = conditional_expectation(&u, k).unwrap();
            assert!((e.integral() - u.integral()).abs() < 1e-8);
        }
    }

    #[test]
    fn ehrhard_set_of_constants() {
        let g = build_grid(1, 6.0, 256).unwrap();
        for p in [0.5, 0.3] {
            let es = ehrhard_set(&ScalarField::constant(&g, p)).unwrap();
            assert!((es.integral() - p).abs() < 1e-6);
            let per = perimeter_gamma(&es).unwrap();
            assert!((per / isoperimetric_profile(p).unwrap() - 1.0).abs() < 0.01);
        }
        let es = ehrhard_set(&ScalarField::constant(&g, 0.5)).unwrap();
        assert!((perimeter_gamma(&es).unwrap() / INV_SQRT_2PI - 1.0).abs() < 0.01);
        assert!(ehrhard_set(&ScalarField::constant(&g, 1.2)).is_err());
    }

    #[test]
    fn ehrhard_set_slices_and_clamping() {
        let g = build_grid(1, 6.0, 128).unwrap();
        let v = ScalarField::from_fn(&g, |x| {
            if x[0] < -3.0 {
                0.0
            } else if x[0] > 3.0 {
                1.0
            } else {
                std_normal_cdf(x[0])
            }
        });
        let es = ehrhard_set(&v).unwrap();
        let h = es.grid();
        let aw = h.axis_weights();
        let total = h.axis_total_weight();
        for (i, &vi) in v.values().iter().enumerate() {
            let col = &es.values()[i * 128..(i + 1) * 128];
            let mass: f64 = col.iter().zip(aw).map(|(a, b)| a * b).sum::<f64>() / total;
            assert!((mass - vi).abs() < 1e-6);
            if vi == 0.0 {
                assert!(col.iter().all(|&c| c == 0.0));
            }
            if vi == 1.0 {
                assert!(col.iter().all(|&c| c == 1.0));
            }
        }
        assert!((es.integral() - v.integral()).abs() < 1e-6);
    }

    #[test]
    fn half_space_is_a_fixed_point() {
        let g = build_grid(2, 6.0, 64).unwrap();
        let e = half_space_indicator(&[1.0, 0.0], 0.4, &g).unwrap();
        let s = ehrhard_symmetrize_set(&e, 1).unwrap();
        assert!(e.l2_distance(&s).unwrap().powi(2) <= 1e-6);
    }

    #[test]
    fn disc_symmetral_is_a_half_space_with_less_perimeter() {
        let g = build_grid(2, 6.0, 256).unwrap();
        let e = ScalarField::from_fn(&g, |x| if x[0] * x[0] + x[1] * x[1] < 1.4 { 1.0 } else { 0.0 });
        let s = ehrhard_symmetrize_set(&e, 1).unwrap();
        assert!((s.integral() - e.integral()).abs() < 1e-6);
        let ps = perimeter_gamma(&s).unwrap();
        let pe = perimeter_gamma(&e).unwrap();
        assert!(ps < pe);
        let u = isoperimetric_profile(e.integral()).unwrap();
        assert!((ps / u - 1.0).abs() < 0.01);
    }

    #[test]
    fn k2_symmetral_preserves_conditional_volumes() {
        let g = build_grid(2, 6.0, 128).unwrap();
        let e = ScalarField::from_fn(&g, |x| {
            if (x[0] - 0.5).powi(2) + 2.0 * x[1] * x[1] < 2.0 {
                1.0
            } else {
                0.0
            }
        });
        let s = ehrhard_symmetrize_set(&e, 2).unwrap();
        assert!(s.is_indicator());
        assert!((s.integral() - e.integral()).abs() < 1e-6);
        let a = conditional_expectation(&e, 1).unwrap();
        let b = conditional_expectation(&s, 1).unwrap();
        assert!(a.l2_distance(&b).unwrap() < 1e-6);
        assert!(perimeter_gamma(&s).unwrap() <= perimeter_gamma(&e).unwrap() + 0.005);
    }

    #[test]
    fn symmetrize_rejects_bad_input() {
        let g = build_grid(2, 6.0, 32).unwrap();
        let half = ScalarField::constant(&g, 0.5);
        assert!(ehrhard_symmetrize_set(&half, 1).is_err());
        let e = ScalarField::constant(&g, 1.0);
        assert!(ehrhard_symmetrize_set(&e, 3).is_err());
        assert!(ehrhard_symmetrize_function(&half, 1, 31).is_err());
    }

    #[test]
    fn function_symmetral_of_orthogonal_cdf() {
        // each {Φ(x₂) > t} has volume 1 − t, its symmetral is {Φ(−x₁) > t}
        let g = build_grid(2, 6.0, 128).unwrap();
        let u = ScalarField::from_fn(&g, |x| std_normal_cdf(x[1]));
        let s = symmetrize_levels(&u, 1, 1024).unwrap();
        for i in 0..g.len() {
            let x = g.point(i);
            if x[0].abs() < 5.0 {
                assert!((s.field.values()[i] - std_normal_cdf(-x[0])).abs() < 1e-3);
            }
        }
        for (a, b) in s.volumes.iter().zip(&s.symmetral_volumes) {
            assert!((a - b).abs() < 1e-4);
        }
        let l2 = |f: &ScalarField| f.l2_norm().powi(2);
        assert!((l2(&s.field) - l2(&u)).abs() < 1e-3);
    }

    #[test]
    fn monotone_function_is_a_fixed_point() {
        let g = build_grid(1, 6.0, 512).unwrap();
        let u = ScalarField::from_fn(&g, |x| std_normal_cdf(-2.0 * x[0]));
        let s = ehrhard_symmetrize_function(&u, 1, 512).unwrap();
        let gap = u
            .values()
            .iter()
            .zip(s.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap <= 2.0 / 512.0, "{gap}");
    }
}
