//! Tensor-product grids on `[-L, L]^m` carrying trapezoidal quadrature
//! weights for the standard Gaussian measure `γ_m`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::gaussian::std_normal_pdf;

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;
/// Memory guard on the number of nodes of a single grid.
pub const MAX_NODES: usize = 1 << 22;

/// Uniform grid on `[-L, L]^m`, the computational stand-in for `(ℝ^m, γ_m)`.
///
/// All axes share the same node coordinates. Nodes are laid out row-major:
/// axis 0 varies slowest.
#[derive(Debug, Clone)]
pub struct GaussianGrid {
    dim: usize,
    half_width: f64,
    points_per_axis: usize,
    spacing: f64,
    axis: Vec<f64>,
    axis_weights: Vec<f64>,
    weights: Vec<f64>,
}

impl PartialEq for GaussianGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.points_per_axis == other.points_per_axis
            && self.half_width.to_bits() == other.half_width.to_bits()
    }
}

/// Build a grid of `points_per_axis^dim` nodes on `[-half_width, half_width]^dim`.
pub fn build_grid(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Arc<GaussianGrid>> {
    GaussianGrid::new(dim, half_width, points_per_axis).map(Arc::new)
}

impl GaussianGrid {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dim must be 1, 2 or 3, got {dim}")));
        }
        if !(half_width.is_finite() && half_width >= 4.0) {
            return Err(Error::InvalidGrid(format!(
                "half_width must be a finite number >= 4, got {half_width}"
            )));
        }
        if points_per_axis < 16 {
            return Err(Error::InvalidGrid(format!(
                "points_per_axis must be >= 16, got {points_per_axis}"
            )));
        }
        let total = points_per_axis
            .checked_pow(dim as u32)
            .filter(|&t| t <= MAX_NODES)
            .ok_or_else(|| {
                Error::InvalidGrid(format!(
                    "{points_per_axis}^{dim} nodes exceeds the limit of {MAX_NODES}"
                ))
            })?;

        let n = points_per_axis;
        let last = (n - 1) as f64;
        let spacing = 2.0 * half_width / last;
        // Written so that axis[n-1-i] == -axis[i] exactly.
        let axis: Vec<f64> = (0..n)
            .map(|i| half_width * (2.0 * i as f64 - last) / last)
            .collect();
        let mut axis_weights: Vec<f64> = axis.iter().map(|&x| spacing * std_normal_pdf(x)).collect();
        axis_weights[0] *= 0.5;
        axis_weights[n - 1] *= 0.5;

        let mut weights = vec![1.0; total];
        for (flat, w) in weights.iter_mut().enumerate() {
            let mut rest = flat;
            for _ in 0..dim {
                *w *= axis_weights[rest % n];
                rest /= n;
            }
        }

        Ok(Self {
            dim,
            half_width,
            points_per_axis,
            spacing,
            axis,
            axis_weights,
            weights,
        })
    }

    /// Same axis discretization in another dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Arc<GaussianGrid>> {
        build_grid(dim, self.half_width, self.points_per_axis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Node spacing `Δx`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Node coordinates along any axis.
    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    /// One-dimensional trapezoidal weights against `φ(x) dx`.
    pub fn axis_weights(&self) -> &[f64] {
        &self.axis_weights
    }

    /// Total weight of one axis, `≈ 1 - 2Φ(-L)`.
    pub fn axis_total_weight(&self) -> f64 {
        self.axis_weights.iter().sum()
    }

    /// Tensor-product weight of every node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Flat-index distance between neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.points_per_axis.pow((self.dim - 1 - axis) as u32)
    }

    /// Per-axis indices of a node; unused trailing entries are zero.
    pub fn multi_index(&self, flat: usize) -> [usize; MAX_DIM] {
        let n = self.points_per_axis;
        let mut idx = [0; MAX_DIM];
        let mut rest = flat;
        for a in (0..self.dim).rev() {
            idx[a] = rest % n;
            rest /= n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx[..self.dim]
            .iter()
            .fold(0, |acc, &i| acc * self.points_per_axis + i)
    }

    /// Coordinates of a node; unused trailing entries are zero.
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = self.axis[idx[a]];
        }
        x
    }

    pub(crate) fn check_same(&self, other: &GaussianGrid, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{what}: grid (dim={}, n={}, L={}) vs (dim={}, n={}, L={})",
                self.dim,
                self.points_per_axis,
                self.half_width,
                other.dim,
                other.points_per_axis,
                other.half_width
            )))
        }
    }
}

/// `Σ f(node) · weight(node)`, the grid approximation of `∫ f dγ_m`.
pub fn integrate(f: &ScalarField, grid: &GaussianGrid) -> Result<f64> {
    grid.check_same(f.grid(), "integrate")?;
    Ok(weighted_sum(f.values(), grid.weights()))
}

#[inline]
pub(crate) fn weighted_sum(values: &[f64], weights: &[f64]) -> f64 {
    values.iter().zip(weights).map(|(v, w)| v * w).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::std_normal_cdf;

    #[test]
    fn total_weight_matches_tail_mass() {
        let g = build_grid(1, 6.0, 2048).unwrap();
        let tail = 2.0 * std_normal_cdf(-6.0);
        assert!((g.total_weight() - 1.0).abs() < 1e-8);
        assert!((g.total_weight() - (1.0 - tail)).abs() < 1e-12);
    }

    #[test]
    fn weights_positive_and_nodes_increasing() {
        let g = build_grid(2, 5.0, 64).unwrap();
        assert!(g.weights().iter().all(|&w| w > 0.0));
        assert!(g.axis().windows(2).all(|p| p[1] > p[0]));
        assert_eq!(g.axis()[0], -5.0);
        assert_eq!(g.axis()[63], 5.0);
        for i in 0..64 {
            assert_eq!(g.axis()[63 - i], -g.axis()[i]);
        }
    }

    #[test]
    fn weight_near_origin_is_density_times_cell_area() {
        let g = build_grid(2, 6.0, 128).unwrap();
        let dx = g.spacing();
        let i = 64;
        let flat = g.flat_index(&[i, i]);
        let x = g.axis()[i];
        let expect = dx * dx * (-x * x).exp() / (2.0 * std::f64::consts::PI);
        assert!((g.weights()[flat] - expect).abs() < 1e-15);
        assert!((g.weights()[flat] / (dx * dx) - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-3);
    }

    #[test]
    fn moments_are_reproduced() {
        let g = build_grid(1, 6.0, 2048).unwrap();
        let expected = [1.0, 0.0, 1.0, 0.0, 3.0];
        for (k, &m) in expected.iter().enumerate() {
            let f = ScalarField::from_fn(&g, |x| x[0].powi(k as i32));
            assert!((integrate(&f, &g).unwrap() - m).abs() < 1e-5, "moment {k}");
        }
        let x2 = ScalarField::from_fn(&g, |x| x[0] * x[0]);
        assert!((integrate(&x2, &g).unwrap() - 1.0).abs() < 1e-6);
        let x1 = ScalarField::from_fn(&g, |x| x[0]);
        assert!(integrate(&x1, &g).unwrap().abs() < 1e-10);
    }

    #[test]
    fn axiswise_moments_in_two_dimensions() {
        let g = build_grid(2, 6.0, 256).unwrap();
        let f = ScalarField::from_fn(&g, |x| x[1].powi(4));
        assert!((integrate(&f, &g).unwrap() - 3.0).abs() < 1e-5);
    }

    #[test]
    fn integrate_rejects_foreign_grid() {
        let g = build_grid(1, 6.0, 64).unwrap();
        let h = build_grid(1, 6.0, 65).unwrap();
        let f = ScalarField::constant(&h, 1.0);
        assert!(matches!(integrate(&f, &g), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn invalid_grids_are_rejected() {
        assert!(build_grid(0, 6.0, 64).is_err());
        assert!(build_grid(4, 6.0, 16).is_err());
        assert!(build_grid(1, 3.0, 64).is_err());
        assert!(build_grid(1, f64::NAN, 64).is_err());
        assert!(build_grid(1, 6.0, 15).is_err());
        assert!(build_grid(3, 6.0, 1024).is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = build_grid(3, 6.0, 16).unwrap();
        for flat in [0, 1, 17, 255, 4095] {
            let idx = g.multi_index(flat);
            assert_eq!(g.flat_index(&idx), flat);
        }
        assert_eq!(g.stride(0), 256);
        assert_eq!(g.stride(2), 1);
    }
}
