//! Seeded randomness and random smooth test fields.
//!
//! The generator is xoshiro256** seeded through SplitMix64, so streams are
//! reproducible from the seed alone in any language that implements the
//! published algorithms.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand_xoshiro::rand_core::{Rng as _, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::field::ScalarField;
use crate::grid::{GaussianGrid, MAX_DIM};

#[derive(Debug, Clone)]
pub struct Rng(Xoshiro256StarStar);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal variate (Box-Muller, one of the pair is used).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
    }
}

/// A random trigonometric sum `Σ a_k cos(ω_k·x + θ_k)` with Gaussian
/// frequencies of standard deviation `bandwidth`.
#[derive(Debug, Clone)]
pub struct BandLimited {
    dim: usize,
    freqs: Vec<[f64; MAX_DIM]>,
    phases: Vec<f64>,
    amps: Vec<f64>,
    offset: f64,
}

impl BandLimited {
    pub fn sample(rng: &mut Rng, dim: usize, modes: usize, bandwidth: f64) -> Self {
        let mut freqs = Vec::with_capacity(modes);
        let mut phases = Vec::with_capacity(modes);
        let mut amps = Vec::with_capacity(modes);
        let scale = 1.0 / (modes.max(1) as f64).sqrt();
        for _ in 0..modes {
            let mut w = [0.0; MAX_DIM];
            for c in w.iter_mut().take(dim) {
                *c = bandwidth * rng.normal();
            }
            freqs.push(w);
            phases.push(rng.uniform_in(0.0, TAU));
            amps.push(scale * rng.normal());
        }
        Self {
            dim,
            freqs,
            phases,
            amps,
            offset: 0.0,
        }
    }

    /// Add a constant to the field.
    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut s = self.offset;
        for ((w, th), a) in self.freqs.iter().zip(&self.phases).zip(&self.amps) {
            let arg: f64 = (0..self.dim).map(|j| w[j] * x[j]).sum::<f64>() + th;
            s += a * arg.cos();
        }
        s
    }

    pub fn field(&self, grid: &Arc<GaussianGrid>) -> ScalarField {
        ScalarField::from_fn(grid, |x| self.eval(x))
    }
}

/// Level `t` such that `{u > t}` has Gaussian mass as close to `volume` as
/// the node values allow.
pub fn threshold_for_volume(u: &ScalarField, volume: f64) -> f64 {
    let w = u.grid().weights();
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&a, &b| u.values()[b].total_cmp(&u.values()[a]));
    let mut acc = 0.0;
    for (pos, &i) in order.iter().enumerate() {
        let next = acc + w[i];
        if next >= volume {
            // include node i if that lands closer to the target
            let cut = if next - volume < volume - acc {
                pos + 1
            } else {
                pos
            };
            return match (cut.checked_sub(1), order.get(cut)) {
                (Some(p), Some(&q)) => 0.5 * (u.values()[order[p]] + u.values()[q]),
                (None, _) => u.values()[order[0]],
                (Some(_), None) => u.min() - 1.0,
            };
        }
        acc = next;
    }
    u.min() - 1.0
}

/// A random set `{f > t}` with `f` band-limited and `t` chosen for a volume
/// drawn uniformly from `[0.2, 0.8]`. The result is binary.
pub fn random_smooth_set(rng: &mut Rng, grid: &Arc<GaussianGrid>) -> ScalarField {
    let f = BandLimited::sample(rng, grid.dim(), 6, 0.7).field(grid);
    let volume = rng.uniform_in(0.2, 0.8);
    let t = threshold_for_volume(&f, volume);
    crate::sets::superlevel_set(&f, t)
}

/// A random smooth `[0, 1]`-valued function `Φ(s·(f + c))`, with the offset
/// `c` solved for a Gaussian mean drawn uniformly from `[0.2, 0.8]`.
pub fn random_smooth_function(rng: &mut Rng, grid: &Arc<GaussianGrid>) -> ScalarField {
    let f = BandLimited::sample(rng, grid.dim(), 6, 0.6).field(grid);
    let s = rng.uniform_in(1.0, 2.5);
    let mean = rng.uniform_in(0.2, 0.8);
    let at = |c: f64| f.map(|v| crate::gaussian::std_normal_cdf(s * (v + c)));
    let (mut lo, mut hi) = (-20.0, 20.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if at(mid).integral() < mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}
