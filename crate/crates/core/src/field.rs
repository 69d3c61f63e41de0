//! Scalar and vector fields sampled on a [`GaussianGrid`].

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{weighted_sum, GaussianGrid, MAX_DIM};

/// Real values on the nodes of a grid: functions `u`, set indicators `χ_E`,
/// test functions.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<GaussianGrid>,
    values: Vec<f64>,
}

impl ScalarField {
    /// Wrap node values; rejects wrong lengths and non-finite entries.
    pub fn new(grid: &Arc<GaussianGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite value {} at node {i}",
                values[i]
            )));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub(crate) fn from_vec_unchecked(grid: &Arc<GaussianGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    /// Sample `f` at every node. `f` receives the node coordinates
    /// (a slice of length `grid.dim()`).
    pub fn from_fn(grid: &Arc<GaussianGrid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let dim = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.point(i)[..dim])).collect();
        Self::from_vec_unchecked(grid, values)
    }

    pub fn constant(grid: &Arc<GaussianGrid>, c: f64) -> Self {
        Self::from_vec_unchecked(grid, vec![c; grid.len()])
    }

    pub fn grid(&self) -> &Arc<GaussianGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_vec_unchecked(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Nodewise combination with another field on the same grid.
    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.check_same(&other.grid, "zip_with")?;
        Ok(Self::from_vec_unchecked(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    /// `‖u‖_{L²_γ}`.
    pub fn l2_norm(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.weights())
            .map(|(v, w)| v * v * w)
            .sum::<f64>()
            .sqrt()
    }

    /// `‖u - v‖_{L²_γ}`.
    pub fn l2_distance(&self, other: &ScalarField) -> Result<f64> {
        self.grid.check_same(&other.grid, "l2_distance")?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.grid.weights())
            .map(|((a, b), w)| (a - b) * (a - b) * w)
            .sum::<f64>()
            .sqrt())
    }

    /// `∫ u dγ`.
    pub fn integral(&self) -> f64 {
        weighted_sum(&self.values, self.grid.weights())
    }

    /// All values exactly `0` or `1`.
    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Whether the field represents a set.
    ///
    /// Accepted are binary fields and column-filled sets: values in `[0, 1]`
    /// where every fractional node sits on the set boundary, i.e. has an
    /// axis neighbour equal to exactly `0` or `1`.
    pub fn is_indicator(&self) -> bool {
        self.indicator_violation().is_none()
    }

    fn indicator_violation(&self) -> Option<String> {
        let g = &*self.grid;
        let n = g.points_per_axis();
        for (i, &v) in self.values.iter().enumerate() {
            if v == 0.0 || v == 1.0 {
                continue;
            }
            if !(0.0..=1.0).contains(&v) {
                return Some(format!("value {v} at node {i} is outside [0, 1]"));
            }
            let idx = g.multi_index(i);
            let on_boundary = (0..g.dim()).any(|a| {
                let s = g.stride(a);
                let below = idx[a] > 0 && is_pure(self.values[i - s]);
                let above = idx[a] + 1 < n && is_pure(self.values[i + s]);
                below || above
            });
            if !on_boundary {
                return Some(format!(
                    "fractional value {v} at node {i} is not on a set boundary"
                ));
            }
        }
        None
    }

    pub(crate) fn require_indicator(&self, what: &str) -> Result<()> {
        match self.indicator_violation() {
            None => Ok(()),
            Some(reason) => Err(Error::NotIndicator(format!("{what}: {reason}"))),
        }
    }

    pub(crate) fn require_unit_interval(&self, what: &str) -> Result<()> {
        match self.values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            None => Ok(()),
            Some(i) => Err(Error::Domain {
                what: "field value",
                value: self.values[i],
                expected: "[0, 1]",
            })
            .map_err(|e| match e {
                Error::Domain { value, .. } => {
                    Error::InvalidArgument(format!("{what}: value {value} at node {i} is outside [0, 1]"))
                }
                other => other,
            }),
        }
    }
}

#[inline]
fn is_pure(v: f64) -> bool {
    v == 0.0 || v == 1.0
}

/// `ℝ^m`-valued field; component `j` of node `i` is stored at `i * m + j`.
#[derive(Debug, Clone)]
pub struct VectorField {
    grid: Arc<GaussianGrid>,
    values: Vec<f64>,
}

impl VectorField {
    pub fn new(grid: &Arc<GaussianGrid>, values: Vec<f64>) -> Result<Self> {
        let expected = grid.len() * grid.dim();
        if values.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "{} vector components, expected {expected}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite vector component".into()));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub(crate) fn from_vec_unchecked(grid: &Arc<GaussianGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len() * grid.dim());
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    /// Sample `f` at every node; only the first `dim` components are kept.
    pub fn from_fn(grid: &Arc<GaussianGrid>, f: impl Fn(&[f64]) -> [f64; MAX_DIM]) -> Self {
        let dim = grid.dim();
        let mut values = Vec::with_capacity(grid.len() * dim);
        for i in 0..grid.len() {
            let v = f(&grid.point(i)[..dim]);
            values.extend_from_slice(&v[..dim]);
        }
        Self::from_vec_unchecked(grid, values)
    }

    pub fn zeros(grid: &Arc<GaussianGrid>) -> Self {
        Self::from_vec_unchecked(grid, vec![0.0; grid.len() * grid.dim()])
    }

    pub fn grid(&self) -> &Arc<GaussianGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Components at one node.
    pub fn at(&self, node: usize) -> &[f64] {
        let m = self.grid.dim();
        &self.values[node * m..(node + 1) * m]
    }

    pub fn component(&self, j: usize) -> ScalarField {
        let m = self.grid.dim();
        ScalarField::from_vec_unchecked(
            &self.grid,
            self.values.iter().skip(j).step_by(m).copied().collect(),
        )
    }

    /// Euclidean norm at each node.
    pub fn norm(&self) -> ScalarField {
        let m = self.grid.dim();
        ScalarField::from_vec_unchecked(
            &self.grid,
            self.values
                .chunks_exact(m)
                .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    #[test]
    fn new_validates_length_and_finiteness() {
        let g = build_grid(1, 6.0, 16).unwrap();
        assert!(ScalarField::new(&g, vec![0.0; 15]).is_err());
        let mut v = vec![0.0; 16];
        v[3] = f64::NAN;
        assert!(ScalarField::new(&g, v).is_err());
        assert!(ScalarField::new(&g, vec![0.5; 16]).is_ok());
    }

    #[test]
    fn indicator_predicate() {
        let g = build_grid(1, 6.0, 16).unwrap();
        let mut v = vec![1.0; 16];
        for x in v.iter_mut().skip(8) {
            *x = 0.0;
        }
        assert!(ScalarField::new(&g, v.clone()).unwrap().is_indicator());
        v[8] = 0.3;
        assert!(ScalarField::new(&g, v.clone()).unwrap().is_indicator());
        v[9] = 0.6;
        v[10] = 0.2;
        assert!(!ScalarField::new(&g, v.clone()).unwrap().is_indicator());
        assert!(!ScalarField::constant(&g, 0.5).is_indicator());
        assert!(!ScalarField::constant(&g, 2.0).is_indicator());
    }

    #[test]
    fn vector_components() {
        let g = build_grid(2, 6.0, 16).unwrap();
        let f = VectorField::from_fn(&g, |x| [x[0], 2.0 * x[1], 99.0]);
        assert_eq!(f.values().len(), 2 * g.len());
        let c1 = f.component(1);
        let p = g.point(37);
        assert_eq!(c1.values()[37], 2.0 * p[1]);
        assert_eq!(f.at(37), &[p[0], 2.0 * p[1]]);
        assert!((f.norm().values()[37] - (p[0] * p[0] + 4.0 * p[1] * p[1]).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn l2_distance_of_complementary_half_indicators() {
        let g = build_grid(1, 6.0, 2048).unwrap();
        let a = ScalarField::from_fn(&g, |x| if x[0] < 0.0 { 1.0 } else { 0.0 });
        let half = ScalarField::constant(&g, 0.5);
        assert!((a.l2_distance(&half).unwrap() - 0.5).abs() < 1e-8);
    }
}
