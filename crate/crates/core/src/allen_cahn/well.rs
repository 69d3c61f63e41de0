//! Double-well potentials and the well constant `c_W = ∫₀¹ √(2W)`.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{domain, Error, Result};

/// A potential `W` on the real line.
pub trait Potential {
    fn value(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;
    /// Points in `(0, 1)` where `W` or `W'` may be discontinuous.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<P: Potential + ?Sized> Potential for &P {
    fn value(&self, t: f64) -> f64 {
        (**self).value(t)
    }
    fn derivative(&self, t: f64) -> f64 {
        (**self).derivative(t)
    }
    fn kinks(&self) -> Vec<f64> {
        (**self).kinks()
    }
}

/// The quartic well `W(t) = s · t²(1 − t)²`.
///
/// Carries a coercivity witness `(C, K)` with `W(t) ≥ C(t² − K)` on `ℝ`,
/// checked by sampling when set. The default witness `C = 1, K = 2` holds for
/// `s = 1` (the sharp `K` at `C = 1` is 27/16).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleWell {
    scale: f64,
    coercivity: (f64, f64),
}

impl Default for DoubleWell {
    fn default() -> Self {
        Self::quartic()
    }
}

impl DoubleWell {
    pub fn quartic() -> Self {
        Self {
            scale: 1.0,
            coercivity: (1.0, 2.0),
        }
    }

    /// `s · t²(1 − t)²`; the witness is rescaled to `(s, 2)`.
    pub fn scaled(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(domain("scale", scale, "(0, ∞)"));
        }
        Ok(Self {
            scale,
            coercivity: (scale, 2.0),
        })
    }

    /// Replace the coercivity witness after checking it on a sample of `ℝ`.
    pub fn with_coercivity(self, c: f64, k: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite() && k.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "coercivity witness needs C > 0 and finite K, got ({c}, {k})"
            )));
        }
        let candidate = Self {
            coercivity: (c, k),
            ..self
        };
        if let Some(t) = candidate.coercivity_violation() {
            return Err(Error::InvalidArgument(format!(
                "W(t) >= {c}(t^2 - {k}) fails at t = {t}"
            )));
        }
        Ok(candidate)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The witness `(C, K)`.
    pub fn coercivity(&self) -> (f64, f64) {
        self.coercivity
    }

    /// First sampled `t ∈ [−20, 20]` violating the witness.
    pub fn coercivity_violation(&self) -> Option<f64> {
        let (c, k) = self.coercivity;
        (0..=40_000)
            .map(|i| -20.0 + i as f64 * 1e-3)
            .find(|&t| self.value(t) < c * (t * t - k))
    }

    /// Closed form `√s · √2 / 6`.
    pub fn well_constant_exact(&self) -> f64 {
        self.scale.sqrt() * std::f64::consts::SQRT_2 / 6.0
    }
}

impl Potential for DoubleWell {
    fn value(&self, t: f64) -> f64 {
        let a = t * (t - 1.0);
        self.scale * a * a
    }

    fn derivative(&self, t: f64) -> f64 {
        2.0 * self.scale * t * (t - 1.0) * (2.0 * t - 1.0)
    }
}

/// `W_δ`: equal to `W` on `[δ, 1 − δ]` and to `α_δ = max W` over
/// `[0, δ] ∪ [1 − δ, 1]` on those end intervals. Outside `[0, 1]` it agrees
/// with `W`.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedWell<W> {
    base: W,
    delta: f64,
    plateau: f64,
}

impl<W: Potential> TruncatedWell<W> {
    pub fn new(base: W, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.25) {
            return Err(domain("delta", delta, "(0, 1/4)"));
        }
        let steps = 10_000;
        let plateau = (0..=steps)
            .flat_map(|i| {
                let s = delta * i as f64 / steps as f64;
                [base.value(s), base.value(1.0 - s)]
            })
            .fold(0.0, f64::max);
        Ok(Self { base, delta, plateau })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `α_δ`.
    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    pub fn base(&self) -> &W {
        &self.base
    }

    fn on_plateau(&self, t: f64) -> bool {
        (0.0..=self.delta).contains(&t) || (1.0 - self.delta..=1.0).contains(&t)
    }
}

impl<W: Potential> Potential for TruncatedWell<W> {
    fn value(&self, t: f64) -> f64 {
        if self.on_plateau(t) {
            self.plateau
        } else {
            self.base.value(t)
        }
    }

    fn derivative(&self, t: f64) -> f64 {
        if self.on_plateau(t) {
            0.0
        } else {
            self.base.derivative(t)
        }
    }

    fn kinks(&self) -> Vec<f64> {
        let mut k = self.base.kinks();
        k.extend([self.delta, 1.0 - self.delta]);
        k.sort_by(f64::total_cmp);
        k
    }
}

/// Break points `0 = b_0 < … < b_r = 1` at the kinks of `w`.
pub(crate) fn segments(w: &impl Potential) -> Vec<f64> {
    let mut b = vec![0.0];
    b.extend(w.kinks().into_iter().filter(|&k| k > 0.0 && k < 1.0));
    b.push(1.0);
    b.dedup();
    b
}

/// `c_W = ∫₀¹ √(2W(t)) dt` by Gauss-Legendre quadrature with `quad_points`
/// nodes on each smooth piece of `W`.
pub fn well_constant(w: &impl Potential, quad_points: usize) -> Result<f64> {
    if quad_points < 64 {
        return Err(Error::InvalidArgument(format!(
            "quad_points must be at least 64, got {quad_points}"
        )));
    }
    let rule = GaussLegendre::new(NonZeroUsize::new(quad_points).unwrap());
    let b = segments(w);
    Ok(b.windows(2)
        .map(|s| rule.integrate(s[0], s[1], |t| (2.0 * w.value(t).max(0.0)).sqrt()))
        .sum())
}
