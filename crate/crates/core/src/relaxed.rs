//! The relaxed perimeter `F̄(u) = ∫ √(U(u)² + |D_γ u|²) dγ`, its dual lower
//! bound, the isoperimetric deficit and prescribed-curvature energies.
//!
//! On the grid `|D_γ u|` is the stencil density `G(x) = Σ_d a_{x,d} |u(x+d) − u(x)|`
//! of [`crate::calculus::tv_density`]. Since `G` is a weighted `ℓ¹` sum over
//! directions, the dual variable is a flux `ψ_{x,d}` per node and stencil
//! direction together with a scalar `ξ`, constrained by
//! `ξ(x)² + max_d ψ_{x,d}² ≤ 1`. In one dimension there is a single direction
//! and the constraint is the Euclidean unit disc.

use std::sync::Arc;

use crate::calculus::{total_variation_gamma, tv_density};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::gaussian::{profile_clamped, quantile_unchecked, std_normal_pdf};
use crate::grid::GaussianGrid;
use crate::sets::superlevel_set;
use crate::stencil::{for_each_pair, Stencil};

/// Smoothing used by [`minimize_prescribed_curvature`].
pub const CURVATURE_SMOOTHING: f64 = 1e-6;

const FEASIBILITY_SLACK: f64 = 1e-12;

fn in_unit_interval(u: &ScalarField) -> bool {
    u.values().iter().all(|v| (0.0..=1.0).contains(v))
}

fn relaxed_energy_smoothed(u: &ScalarField, delta: f64) -> f64 {
    let g = tv_density(u);
    u.values()
        .iter()
        .zip(&g)
        .zip(u.grid().weights())
        .map(|((&v, gv), w)| {
            let p = profile_clamped(v);
            w * (p * p + gv * gv + delta * delta).sqrt()
        })
        .sum()
}

/// `F̄(u)`; `+∞` unless `0 ≤ u ≤ 1` everywhere.
pub fn relaxed_energy(u: &ScalarField) -> f64 {
    if !in_unit_interval(u) {
        return f64::INFINITY;
    }
    relaxed_energy_smoothed(u, 0.0)
}

/// Dual variables `(ψ, ξ)`; `ψ` is stored node-major, one entry per stencil
/// direction. Entries of pairs that leave the grid are ignored.
#[derive(Debug, Clone)]
pub struct DualTestPair {
    grid: Arc<GaussianGrid>,
    flux: Vec<f64>,
    xi: Vec<f64>,
}

impl DualTestPair {
    pub fn zero(grid: &Arc<GaussianGrid>) -> Self {
        let d = Stencil::for_dim(grid.dim()).len();
        Self {
            grid: Arc::clone(grid),
            flux: vec![0.0; grid.len() * d],
            xi: vec![0.0; grid.len()],
        }
    }

    /// Build a pair from raw values; the lengths must match the grid.
    pub fn new(grid: &Arc<GaussianGrid>, flux: Vec<f64>, xi: ScalarField) -> Result<Self> {
        grid.check_same(xi.grid(), "DualTestPair")?;
        let d = Stencil::for_dim(grid.dim()).len();
        if flux.len() != grid.len() * d {
            return Err(Error::ShapeMismatch(format!(
                "flux has {} entries, expected {}",
                flux.len(),
                grid.len() * d
            )));
        }
        if flux.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite flux".into()));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            flux,
            xi: xi.into_values(),
        })
    }

    pub fn grid(&self) -> &Arc<GaussianGrid> {
        &self.grid
    }

    pub fn flux(&self) -> &[f64] {
        &self.flux
    }

    pub fn xi(&self) -> ScalarField {
        ScalarField::from_vec_unchecked(&self.grid, self.xi.clone())
    }

    fn directions(&self) -> usize {
        self.flux.len() / self.xi.len()
    }

    /// Largest `ξ² + max_d ψ_d²` over the nodes, with its node.
    pub fn max_constraint(&self) -> (usize, f64) {
        let d = self.directions();
        self.xi
            .iter()
            .zip(self.flux.chunks_exact(d))
            .map(|(x, f)| x * x + f.iter().map(|v| v * v).fold(0.0, f64::max))
            .enumerate()
            .fold((0, 0.0), |best, (i, v)| if v > best.1 { (i, v) } else { best })
    }

    pub fn is_feasible(&self) -> bool {
        self.max_constraint().1 <= 1.0 + FEASIBILITY_SLACK
    }

    /// The flux divergence `div ψ`, defined by
    /// `∫ v div ψ dγ = Σ_pairs coef · ψ · (v(y) − v(x))` for every `v`.
    pub fn divergence(&self) -> ScalarField {
        let d = self.directions();
        let w = self.grid.weights();
        let mut div = vec![0.0; self.grid.len()];
        for_each_pair(&self.grid, |x, y, k, coef| {
            let f = coef * self.flux[x * d + k];
            div[y] += f;
            div[x] -= f;
        });
        for (v, wv) in div.iter_mut().zip(w) {
            *v /= wv;
        }
        ScalarField::from_vec_unchecked(&self.grid, div)
    }
}

/// `∫ (u div ψ + U(u) ξ) dγ`.
pub fn dual_pairing(u: &ScalarField, pair: &DualTestPair) -> Result<f64> {
    u.grid().check_same(pair.grid(), "dual_pairing")?;
    let (node, norm) = pair.max_constraint();
    if norm > 1.0 + FEASIBILITY_SLACK {
        return Err(Error::InfeasiblePair { node, norm });
    }
    Ok(pairing_unchecked(u, pair))
}

fn pairing_unchecked(u: &ScalarField, pair: &DualTestPair) -> f64 {
    let d = pair.directions();
    let v = u.values();
    let mut s: f64 = v
        .iter()
        .zip(&pair.xi)
        .zip(u.grid().weights())
        .map(|((&a, x), w)| w * x * profile_clamped(a))
        .sum();
    for_each_pair(u.grid(), |x, y, k, coef| {
        s += coef * pair.flux[x * d + k] * (v[y] - v[x])
    });
    s
}

/// Project `(a, b)` onto `{a² + max_d b_d² ≤ 1}`.
///
/// For a fixed bound `r` on `|b_d|` the nearest point is `clip(b, ±r)`
/// together with `a` clipped to `±√(1 − r²)`; the squared distance is convex
/// in `r`, so its derivative is bisected for the optimal `r`.
fn project(a: &mut f64, b: &mut [f64]) {
    let bmax = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if *a * *a + bmax * bmax <= 1.0 {
        return;
    }
    let slope = |r: f64| {
        let s = (1.0 - r * r).max(0.0).sqrt();
        let da = if a.abs() > s {
            if s > 0.0 {
                (a.abs() - s) * r / s
            } else {
                f64::INFINITY
            }
        } else {
            0.0
        };
        da - b.iter().map(|v| (v.abs() - r).max(0.0)).sum::<f64>()
    };
    let (mut lo, mut hi) = (0.0, bmax.min(1.0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    let s = (1.0 - r * r).max(0.0).sqrt();
    *a = a.signum() * a.abs().min(s);
    for v in b.iter_mut() {
        *v = v.clamp(-r, r);
    }
}

/// Projected gradient ascent on the dual pairing from the zero pair.
///
/// Returns the best value seen and its pair; the value never decreases with
/// more iterations and stays below `F̄(u)` by weak duality.
pub fn duality_lower_bound(u: &ScalarField, iterations: usize) -> Result<(f64, DualTestPair)> {
    u.require_unit_interval("duality_lower_bound")?;
    let grid = u.grid();
    let d = Stencil::for_dim(grid.dim()).len();
    let w = grid.weights();
    let v = u.values();

    // ascent direction in the per-node metric, fixed because the pairing is linear
    let dir_xi: Vec<f64> = v.iter().map(|&a| profile_clamped(a)).collect();
    let mut dir_flux = vec![0.0; grid.len() * d];
    for_each_pair(grid, |x, y, k, coef| {
        dir_flux[x * d + k] = coef * (v[y] - v[x]) / w[x]
    });

    let step = 1.0;
    let mut pair = DualTestPair::zero(grid);
    let mut best = (pairing_unchecked(u, &pair), pair.clone());
    for _ in 0..iterations {
        for (i, (xi, flux)) in pair.xi.iter_mut().zip(pair.flux.chunks_exact_mut(d)).enumerate() {
            *xi += step * dir_xi[i];
            for (f, g) in flux.iter_mut().zip(&dir_flux[i * d..(i + 1) * d]) {
                *f += step * g;
            }
            project(xi, flux);
        }
        let value = pairing_unchecked(u, &pair);
        if value >= best.0 {
            best = (value, pair.clone());
        }
    }
    Ok(best)
}

/// `P_γ(E) − U(γ(E))`.
pub fn isoperimetric_deficit(e: &ScalarField) -> Result<f64> {
    e.require_indicator("isoperimetric_deficit")?;
    Ok(total_variation_gamma(e) - profile_clamped(e.integral()))
}

/// `F̄(u) + ∫ u g dγ`.
pub fn prescribed_curvature_energy(u: &ScalarField, g: &ScalarField) -> Result<f64> {
    u.grid().check_same(g.grid(), "prescribed_curvature_energy")?;
    u.require_unit_interval("prescribed_curvature_energy")?;
    Ok(relaxed_energy(u) + crate::calculus::weak_pairing(u, g)?)
}

fn smoothed_curvature_energy(u: &ScalarField, g: &ScalarField) -> f64 {
    relaxed_energy_smoothed(u, CURVATURE_SMOOTHING)
        + u.values()
            .iter()
            .zip(g.values())
            .zip(u.grid().weights())
            .map(|((a, b), w)| a * b * w)
            .sum::<f64>()
}

/// Gradient of the smoothed energy in the `L²_γ` metric.
fn smoothed_curvature_gradient(u: &ScalarField, g: &ScalarField) -> Vec<f64> {
    let grid = u.grid();
    let v = u.values();
    let w = grid.weights();
    let density = tv_density(u);
    let delta2 = CURVATURE_SMOOTHING * CURVATURE_SMOOTHING;
    let root: Vec<f64> = v
        .iter()
        .zip(&density)
        .map(|(&a, gv)| {
            let p = profile_clamped(a);
            (p * p + gv * gv + delta2).sqrt()
        })
        .collect();
    let mut grad: Vec<f64> = v
        .iter()
        .zip(&root)
        .zip(g.values())
        .map(|((&a, s), gv)| {
            // U U' = −α φ(α), bounded up to the endpoints
            let uu = if a <= 0.0 || a >= 1.0 {
                0.0
            } else {
                let al = quantile_unchecked(a);
                -al * std_normal_pdf(al)
            };
            uu / s + gv
        })
        .collect();
    let mut pair_part = vec![0.0; v.len()];
    for_each_pair(grid, |x, y, _, coef| {
        let diff = v[y] - v[x];
        if diff != 0.0 {
            let t = coef * diff.signum() * density[x] / root[x];
            pair_part[y] += t;
            pair_part[x] -= t;
        }
    });
    for ((gr, p), wv) in grad.iter_mut().zip(&pair_part).zip(w) {
        *gr += p / wv;
    }
    grad
}

/// Default starting point `clip(0.45 − 0.4 tanh(g), 0, 1)`.
pub fn curvature_initializer(g: &ScalarField) -> ScalarField {
    g.map(|v| (0.45 - 0.4 * v.tanh()).clamp(0.0, 1.0))
}

/// Projected descent on `F̄(u) + ∫ug` over `0 ≤ u ≤ 1` from the default start.
pub fn minimize_prescribed_curvature(g: &ScalarField, steps: usize) -> ScalarField {
    let init = curvature_initializer(g);
    minimize_prescribed_curvature_from(g, &init, steps).expect("initializer matches g")
}

/// Level sets tried by one thresholding step.
const THRESHOLD_CANDIDATES: usize = 256;
/// Descent steps between thresholding steps.
const THRESHOLD_EVERY: usize = 50;

/// The superlevel set `{u > t}` of least smoothed energy, with `t` running
/// over an even spread of the values of `u`.
fn best_superlevel(u: &ScalarField, g: &ScalarField) -> (ScalarField, f64) {
    let mut levels = u.values().to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let stride = levels.len().div_ceil(THRESHOLD_CANDIDATES).max(1);
    let mut candidates: Vec<f64> = levels.iter().copied().step_by(stride).collect();
    candidates.push(*levels.last().expect("fields are non-empty"));
    candidates
        .into_iter()
        .map(|t| {
            let e = superlevel_set(u, t);
            let energy = smoothed_curvature_energy(&e, g);
            (e, energy)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one candidate")
}

/// Projected descent from `init`, with the square root smoothed by
/// [`CURVATURE_SMOOTHING`]. Steps that do not lower the smoothed energy
/// are retried with half the step size.
///
/// Every few steps, and whenever the descent stalls, the iterate is replaced
/// by its best superlevel set if that has lower energy. By the coarea
/// formula the energy of `u` is at least the average over `t` of the
/// energies of `{u > t}`, so some level set is always at least as good;
/// this lets the iteration leave diffuse stationary points.
pub fn minimize_prescribed_curvature_from(
    g: &ScalarField,
    init: &ScalarField,
    steps: usize,
) -> Result<ScalarField> {
    g.grid()
        .check_same(init.grid(), "minimize_prescribed_curvature")?;
    init.require_unit_interval("minimize_prescribed_curvature")?;
    let mut u = init.clone();
    let mut energy = smoothed_curvature_energy(&u, g);
    let mut tau = 0.1;
    for step in 0..steps {
        let grad = smoothed_curvature_gradient(&u, g);
        let mut accepted = false;
        for _ in 0..40 {
            let trial = ScalarField::from_vec_unchecked(
                u.grid(),
                u.values()
                    .iter()
                    .zip(&grad)
                    .map(|(a, d)| (a - tau * d).clamp(0.0, 1.0))
                    .collect(),
            );
            let e = smoothed_curvature_energy(&trial, g);
            if e < energy {
                u = trial;
                energy = e;
                tau *= 1.5;
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if !accepted || (step + 1) % THRESHOLD_EVERY == 0 {
            let (set, e) = best_superlevel(&u, g);
            if e < energy {
                u = set;
                energy = e;
                tau = 0.1;
                accepted = true;
            }
        }
        if !accepted {
            break;
        }
    }
    Ok(u)
}
