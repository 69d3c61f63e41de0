//! Multi-direction difference stencil behind the discrete total variation.
//!
//! The total variation of a grid function is assembled from pair terms
//!
//! ```text
//! TV(u) = Σ_d c_d Σ_x |u(x + dΔx) − u(x)| / Δx · Δx^m φ_m(x + dΔx/2)
//! ```
//!
//! over a fixed set of lattice directions `d` (one representative per
//! line). For a linear function `ν·x` the pair terms integrate to
//! `N(ν) = Σ_d c_d |d·ν|`; the weights `c_d` are chosen so that `N` is as
//! close to the Euclidean norm as the direction set allows, with `N(e_j) = 1`
//! exactly. Because every pair term is a function of `|u(y) − u(x)|`, the
//! discrete layer-cake identity `TV(u) = ∫ TV(χ_{u>t}) dt` holds exactly.
//! Pairs whose far end falls outside the grid are dropped.

use std::sync::OnceLock;

use crate::gaussian::std_normal_pdf;
use crate::grid::{GaussianGrid, MAX_DIM};

/// Weight of each direction class, keyed by the sorted absolute offsets.
const CLASSES_1D: &[([isize; MAX_DIM], f64)] = &[([1, 0, 0], 1.0)];

const CLASSES_2D: &[([isize; MAX_DIM], f64)] = &[
    ([1, 0, 0], 0.101_783_973_028_514_16),
    ([1, 1, 0], 0.101_652_105_545_296_16),
    ([2, 1, 0], 0.054_273_617_205_450_59),
    ([3, 2, 0], 0.006_246_587_113_496_156),
    ([4, 1, 0], 0.030_680_424_151_322_855),
];

const CLASSES_3D: &[([isize; MAX_DIM], f64)] = &[
    ([1, 0, 0], 0.014_909_799_852_461_849),
    ([2, 1, 0], 0.029_836_522_188_522_105),
    ([2, 1, 1], 0.026_929_157_010_721_676),
    ([2, 2, 1], 0.009_809_271_085_686_301),
];

/// Directions and weights for one dimension.
#[derive(Debug)]
pub struct Stencil {
    dim: usize,
    offsets: Vec<[isize; MAX_DIM]>,
    weights: Vec<f64>,
    reach: usize,
}

impl Stencil {
    /// The shared stencil for `dim ∈ {1, 2, 3}`.
    pub fn for_dim(dim: usize) -> &'static Stencil {
        static CACHE: [OnceLock<Stencil>; MAX_DIM] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
        assert!((1..=MAX_DIM).contains(&dim), "stencil dimension {dim}");
        CACHE[dim - 1].get_or_init(|| {
            let classes = match dim {
                1 => CLASSES_1D,
                2 => CLASSES_2D,
                _ => CLASSES_3D,
            };
            Stencil::from_classes(dim, classes)
        })
    }

    fn from_classes(dim: usize, classes: &[([isize; MAX_DIM], f64)]) -> Self {
        let mut offsets = Vec::new();
        let mut weights = Vec::new();
        for (class, c) in classes {
            for d in representatives(dim, &class[..dim]) {
                offsets.push(d);
                weights.push(*c);
            }
        }
        let axis_norm: f64 = offsets
            .iter()
            .zip(&weights)
            .map(|(d, c)| c * d[0].unsigned_abs() as f64)
            .sum();
        for c in &mut weights {
            *c /= axis_norm;
        }
        let reach = offsets
            .iter()
            .flat_map(|d| d.iter().map(|v| v.unsigned_abs()))
            .max()
            .unwrap_or(1);
        Self {
            dim,
            offsets,
            weights,
            reach,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Lattice offsets, one per undirected line.
    pub fn offsets(&self) -> &[[isize; MAX_DIM]] {
        &self.offsets
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Largest per-axis offset.
    pub fn reach(&self) -> usize {
        self.reach
    }

    /// The norm `N(ν) = Σ_d c_d |d·ν|` that the stencil measures gradients with.
    pub fn gradient_norm(&self, nu: &[f64]) -> f64 {
        self.offsets
            .iter()
            .zip(&self.weights)
            .map(|(d, c)| {
                let dot: f64 = (0..self.dim).map(|a| d[a] as f64 * nu[a]).sum();
                c * dot.abs()
            })
            .sum()
    }
}

/// All signed permutations of `class`, keeping one of `±d`.
fn representatives(dim: usize, class: &[isize]) -> Vec<[isize; MAX_DIM]> {
    let mut out: Vec<[isize; MAX_DIM]> = Vec::new();
    let mut perm: Vec<usize> = (0..dim).collect();
    loop {
        for signs in 0..(1u32 << dim) {
            let mut d = [0isize; MAX_DIM];
            for a in 0..dim {
                let v = class[perm[a]];
                d[a] = if signs >> a & 1 == 1 { -v } else { v };
            }
            let leading = d[..dim].iter().find(|&&v| v != 0).copied().unwrap_or(0);
            if leading > 0 && !out.contains(&d) {
                out.push(d);
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Visit every in-grid pair `(x, y = x + d)` of the stencil.
///
/// The callback receives `x`, `y`, the direction index and the pair
/// coefficient `c_d Δx^{m−1} φ_m(midpoint)`, so that the pair's total
/// variation contribution is `coefficient · |u(y) − u(x)|`.
pub(crate) fn for_each_pair(grid: &GaussianGrid, mut f: impl FnMut(usize, usize, usize, f64)) {
    let dim = grid.dim();
    let stencil = Stencil::for_dim(dim);
    let n = grid.points_per_axis();
    let dx = grid.spacing();
    let reach = stencil.reach() as isize;

    // half[h + reach][i] = φ(x_i + h Δx / 2)
    let half: Vec<Vec<f64>> = (-reach..=reach)
        .map(|h| {
            grid.axis()
                .iter()
                .map(|&x| std_normal_pdf(x + h as f64 * 0.5 * dx))
                .collect()
        })
        .collect();
    let scale = dx.powi(dim as i32 - 1);
    let flat_offsets: Vec<isize> = stencil
        .offsets()
        .iter()
        .map(|d| (0..dim).map(|a| d[a] * grid.stride(a) as isize).sum())
        .collect();

    let mut idx = [0usize; MAX_DIM];
    for x in 0..grid.len() {
        for (k, d) in stencil.offsets().iter().enumerate() {
            let mut coef = stencil.weights()[k] * scale;
            let mut inside = true;
            for a in 0..dim {
                let j = idx[a] as isize + d[a];
                if j < 0 || j >= n as isize {
                    inside = false;
                    break;
                }
                coef *= half[(d[a] + reach) as usize][idx[a]];
            }
            if inside {
                f(x, (x as isize + flat_offsets[k]) as usize, k, coef);
            }
        }
        // odometer over row-major indices, last axis fastest
        for a in (0..dim).rev() {
            idx[a] += 1;
            if idx[a] < n {
                break;
            }
            idx[a] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Rng;

    #[test]
    fn direction_counts() {
        assert_eq!(Stencil::for_dim(1).len(), 1);
        // (1,0):2 (1,1):2 (2,1):4 (3,2):4 (4,1):4
        assert_eq!(Stencil::for_dim(2).len(), 16);
        // (1,0,0):3 (2,1,0):12 (2,1,1):12 (2,2,1):12
        assert_eq!(Stencil::for_dim(3).len(), 39);
        assert_eq!(Stencil::for_dim(2).reach(), 4);
        assert_eq!(Stencil::for_dim(3).reach(), 2);
    }

    #[test]
    fn no_direction_is_repeated_up_to_sign() {
        for dim in 1..=3 {
            let s = Stencil::for_dim(dim);
            for (i, a) in s.offsets().iter().enumerate() {
                for b in &s.offsets()[i + 1..] {
                    let neg = [-b[0], -b[1], -b[2]];
                    assert!(a != b && *a != neg);
                }
            }
        }
    }

    #[test]
    fn axis_norm_is_exactly_one() {
        for dim in 1..=3 {
            let s = Stencil::for_dim(dim);
            for a in 0..dim {
                let mut e = [0.0; MAX_DIM];
                e[a] = 1.0;
                assert!(
                    (s.gradient_norm(&e[..dim]) - 1.0).abs() < 1e-15,
                    "dim {dim} axis {a}"
                );
            }
        }
    }

    #[test]
    fn stencil_norm_is_nearly_euclidean() {
        let mut rng = Rng::new(11);
        for (dim, bound) in [(2, 0.0053), (3, 0.0188)] {
            let s = Stencil::for_dim(dim);
            let mut worst: f64 = 0.0;
            for _ in 0..20_000 {
                let mut v = [0.0; MAX_DIM];
                for c in v.iter_mut().take(dim) {
                    *c = rng.normal();
                }
                let len = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                let nu: Vec<f64> = v[..dim].iter().map(|c| c / len).collect();
                worst = worst.max((s.gradient_norm(&nu) - 1.0).abs());
            }
            assert!(worst <= bound, "dim {dim}: anisotropy {worst}");
        }
    }

    #[test]
    fn pairs_stay_inside_the_grid() {
        let g = crate::grid::build_grid(2, 6.0, 16).unwrap();
        let mut count = 0;
        for_each_pair(&g, |x, y, _, coef| {
            assert!(x < g.len() && y < g.len() && coef > 0.0);
            count += 1;
        });
        // each direction (a, b) has (16 - |a|)(16 - |b|) pairs
        let expect: usize = Stencil::for_dim(2)
            .offsets()
            .iter()
            .map(|d| (16 - d[0].unsigned_abs()) * (16 - d[1].unsigned_abs()))
            .sum();
        assert_eq!(count, expect);
    }
}
