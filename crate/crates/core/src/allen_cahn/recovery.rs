//! Recovery fields `u_ε = η_δ(d(x, E)/ε)` built from the transition profile.

use std::fmt;
use std::sync::Arc;

use super::profile::recovery_profile;
use super::well::Potential;
use crate::calculus::for_each_axis_edge;
use crate::ehrhard::cylindrical_extension;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::{GaussianGrid, MAX_DIM};

/// Samples of the transition profile used for recovery fields.
pub const PROFILE_SAMPLES: usize = 4001;

/// Level function of a [`SetDescriptor::Sublevel`] set.
pub type LevelFunction = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A set in the leading `dim` variables whose distance function can be
/// evaluated.
#[derive(Clone)]
pub enum SetDescriptor {
    /// `{⟨h, x⟩ < c}`; `h` need not be normalized.
    HalfSpace { normal: Vec<f64>, offset: f64 },
    /// `{f < 0}` for a continuous `f` of the first `dim` variables.
    Sublevel { dim: usize, function: LevelFunction },
}

impl fmt::Debug for SetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::HalfSpace { normal, offset } => f
                .debug_struct("HalfSpace")
                .field("normal", normal)
                .field("offset", offset)
                .finish(),
            Self::Sublevel { dim, .. } => f
                .debug_struct("Sublevel")
                .field("dim", dim)
                .finish_non_exhaustive(),
        }
    }
}

impl SetDescriptor {
    pub fn half_space(normal: &[f64], offset: f64) -> Self {
        Self::HalfSpace {
            normal: normal.to_vec(),
            offset,
        }
    }

    pub fn sublevel(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self::Sublevel {
            dim,
            function: Arc::new(f),
        }
    }

    fn base_dim(&self) -> usize {
        match self {
            Self::HalfSpace { normal, .. } => normal.len(),
            Self::Sublevel { dim, .. } => *dim,
        }
    }

    /// Euclidean distance to the set, on the grid of the leading variables.
    pub fn distance(&self, base: &Arc<GaussianGrid>) -> Result<ScalarField> {
        match self {
            Self::HalfSpace { normal, offset } => {
                let norm = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
                if !(norm > 0.0) || !norm.is_finite() || !offset.is_finite() {
                    return Err(Error::InvalidArgument("degenerate half-space".into()));
                }
                Ok(ScalarField::from_fn(base, |x| {
                    let s: f64 = x.iter().zip(normal).map(|(a, b)| a * b).sum();
                    ((s - offset) / norm).max(0.0)
                }))
            }
            Self::Sublevel { function, .. } => {
                let f = ScalarField::from_fn(base, |x| function(x));
                let v = f.values();
                let mut boundary: Vec<[f64; MAX_DIM]> = Vec::new();
                for_each_axis_edge(base, |x, y, _| {
                    if (v[x] < 0.0) != (v[y] < 0.0) {
                        let theta = v[x] / (v[x] - v[y]);
                        let (px, py) = (base.point(x), base.point(y));
                        let mut p = [0.0; MAX_DIM];
                        for a in 0..MAX_DIM {
                            p[a] = px[a] + theta * (py[a] - px[a]);
                        }
                        boundary.push(p);
                    }
                });
                let dim = base.dim();
                let d = (0..base.len())
                    .map(|i| {
                        if v[i] < 0.0 {
                            return 0.0;
                        }
                        let x = base.point(i);
                        boundary
                            .iter()
                            .map(|p| (0..dim).map(|a| (x[a] - p[a]).powi(2)).sum::<f64>())
                            .fold(f64::INFINITY, f64::min)
                            .sqrt()
                    })
                    .collect();
                Ok(ScalarField::from_vec_unchecked(base, d))
            }
        }
    }
}

/// `u_ε(x) = η_δ(d(x, E)/ε)` with `d` the distance to `E` in its own
/// variables.
///
/// The field vanishes on `E` and equals 1 at distance `≥ ε H_δ(1)`, so it
/// approximates the indicator of the complement of `E`; both have the same
/// perimeter and the same Allen-Cahn energy as `1 − u_ε`.
pub fn recovery_sequence<W: Potential>(
    set: &SetDescriptor,
    eps: f64,
    delta: f64,
    grid: &Arc<GaussianGrid>,
    well: W,
) -> Result<ScalarField> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(crate::error::domain("eps", eps, "(0, ∞)"));
    }
    let k = set.base_dim();
    if k == 0 || k > grid.dim() {
        return Err(Error::InvalidArgument(format!(
            "set lives in {k} variables, grid has {}",
            grid.dim()
        )));
    }
    let profile = recovery_profile(delta, well, PROFILE_SAMPLES)?;
    let base = grid.with_dim(k)?;
    let d = set.distance(&base)?;
    let u = d.map(|v| profile.eval(v / eps));
    cylindrical_extension(&u, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allen_cahn::descent::allen_cahn_energy;
    use crate::allen_cahn::well::{well_constant, DoubleWell, TruncatedWell};
    use crate::gaussian::INV_SQRT_2PI;
    use crate::grid::build_grid;

    #[test]
    fn half_space_recovery_respects_limsup_bound() {
        let g = build_grid(1, 6.0, 2048).unwrap();
        let w = DoubleWell::quartic();
        let set = SetDescriptor::half_space(&[1.0], 0.0);
        let u = recovery_sequence(&set, 0.05, 0.02, &g, w).unwrap();
        let bound = well_constant(&TruncatedWell::new(w, 0.02).unwrap(), 64).unwrap() * INV_SQRT_2PI;
        let e = allen_cahn_energy(&u, 0.05, &w).unwrap();
        assert!(e <= 1.03 * bound, "{e} vs {bound}");
        assert!(u.values().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn recovery_field_is_complement_indicator_outside_tube() {
        let g = build_grid(1, 6.0, 1024).unwrap();
        let w = DoubleWell::quartic();
        let eps = 0.1;
        let u = recovery_sequence(&SetDescriptor::half_space(&[1.0], 0.5), eps, 0.02, &g, w).unwrap();
        let width = eps * crate::allen_cahn::profile::transition_time(0.02, w, 1.0).unwrap();
        for (x, v) in g.axis().iter().zip(u.values()) {
            if *x < 0.5 {
                assert_eq!(*v, 0.0);
            } else if *x > 0.5 + width {
                assert_eq!(*v, 1.0);
            }
        }
    }

    #[test]
    fn sublevel_distance_matches_analytic() {
        let g = build_grid(2, 6.0, 128).unwrap();
        let disc = SetDescriptor::sublevel(2, |x| x[0] * x[0] + x[1] * x[1] - 1.0);
        let d = disc.distance(&g).unwrap();
        let dx = g.spacing();
        for i in 0..g.len() {
            let p = g.point(i);
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let exact = (r - 1.0).max(0.0);
            assert!((d.values()[i] - exact).abs() < dx, "{} vs {exact}", d.values()[i]);
        }
        let line = SetDescriptor::sublevel(1, |x| x[0] - 0.3);
        let h = build_grid(1, 6.0, 256).unwrap();
        let d1 = line.distance(&h).unwrap();
        let d2 = SetDescriptor::half_space(&[1.0], 0.3).distance(&h).unwrap();
        assert!(d1.l2_distance(&d2).unwrap() < 1e-12);
    }

    #[test]
    fn cylindrical_recovery_in_two_dimensions() {
        let g = build_grid(2, 6.0, 64).unwrap();
        let u = recovery_sequence(
            &SetDescriptor::half_space(&[1.0], 0.0),
            0.2,
            0.02,
            &g,
            DoubleWell::quartic(),
        )
        .unwrap();
        let n = g.points_per_axis();
        for i in 0..n {
            let row = &u.values()[i * n..(i + 1) * n];
            assert!(row.iter().all(|&v| v == row[0]));
        }
        assert!(recovery_sequence(
            &SetDescriptor::half_space(&[1.0, 0.0, 0.0], 0.0),
            0.2,
            0.02,
            &g,
            DoubleWell::quartic()
        )
        .is_err());
    }
}
