//! Sampled one-dimensional profiles and the truncated transition profile
//! `η_δ = H_δ⁻¹`.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use super::well::{segments, Potential, TruncatedWell};
use crate::error::{Error, Result};

/// A function of one variable sampled at increasing points with slopes,
/// evaluated by cubic Hermite interpolation and held constant beyond the
/// sampled range.
#[derive(Debug, Clone)]
pub struct Profile {
    t: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    monotone: bool,
}

impl Profile {
    pub fn new(t: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        if t.len() < 2 || t.len() != values.len() || t.len() != slopes.len() {
            return Err(Error::ShapeMismatch(
                "profile needs >= 2 samples of equal length".into(),
            ));
        }
        if !t.windows(2).all(|p| p[1] > p[0]) {
            return Err(Error::InvalidArgument(
                "profile sample points must increase".into(),
            ));
        }
        if t.iter().chain(&values).chain(&slopes).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite profile sample".into()));
        }
        let monotone = values.windows(2).all(|p| p[1] >= p[0]);
        Ok(Self {
            t,
            values,
            slopes,
            monotone,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Samples are nondecreasing.
    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn start(&self) -> f64 {
        self.t[0]
    }

    pub fn end(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    fn segment(&self, x: f64) -> usize {
        self.t.partition_point(|&s| s <= x).clamp(1, self.t.len() - 1) - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.start() {
            return self.values[0];
        }
        if x >= self.end() {
            return self.values[self.values.len() - 1];
        }
        let i = self.segment(x);
        let h = self.t[i + 1] - self.t[i];
        let s = (x - self.t[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.values[i]
            + (s3 - 2.0 * s2 + s) * h * self.slopes[i]
            + (-2.0 * s3 + 3.0 * s2) * self.values[i + 1]
            + (s3 - s2) * h * self.slopes[i + 1]
    }

    /// Derivative of the interpolant; zero outside the sampled range.
    pub fn derivative(&self, x: f64) -> f64 {
        if x <= self.start() || x >= self.end() {
            return 0.0;
        }
        let i = self.segment(x);
        let h = self.t[i + 1] - self.t[i];
        let s = (x - self.t[i]) / h;
        let s2 = s * s;
        ((6.0 * s2 - 6.0 * s) * self.values[i] + (-6.0 * s2 + 6.0 * s) * self.values[i + 1]) / h
            + (3.0 * s2 - 4.0 * s + 1.0) * self.slopes[i]
            + (3.0 * s2 - 2.0 * s) * self.slopes[i + 1]
    }

    /// Smallest `x` with `eval(x) = y` for a monotone profile, by bisection.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !self.monotone {
            return Err(Error::InvalidArgument("inverse of a non-monotone profile".into()));
        }
        let (lo_v, hi_v) = (self.values[0], self.values[self.values.len() - 1]);
        if !(lo_v..=hi_v).contains(&y) {
            return Err(Error::InvalidArgument(format!(
                "{y} is outside the profile range [{lo_v}, {hi_v}]"
            )));
        }
        let (mut lo, mut hi) = (self.start(), self.end());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }
}

/// `H_δ(t) = ∫₀ᵗ ds / √(2W_δ(s))` tabulated on a fine partition of `[0, 1]`.
struct InverseSlope<'a, W> {
    well: &'a TruncatedWell<W>,
    rule: GaussLegendre,
    knots: Vec<f64>,
    cumulative: Vec<f64>,
}

impl<'a, W: Potential> InverseSlope<'a, W> {
    fn new(well: &'a TruncatedWell<W>) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(16).unwrap());
        let mut knots = vec![0.0];
        for piece in segments(well).windows(2) {
            let panels = 256;
            for j in 1..=panels {
                knots.push(piece[0] + (piece[1] - piece[0]) * j as f64 / panels as f64);
            }
        }
        let mut s = Self {
            well,
            rule,
            knots,
            cumulative: Vec::new(),
        };
        let mut acc = 0.0;
        let mut cumulative = vec![0.0];
        for k in s.knots.windows(2) {
            acc += s.panel(k[0], k[1]);
            cumulative.push(acc);
        }
        s.cumulative = cumulative;
        s
    }

    fn integrand(&self, t: f64) -> f64 {
        1.0 / (2.0 * self.well.value(t)).sqrt()
    }

    fn panel(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        self.rule.integrate(a, b, |t| self.integrand(t))
    }

    fn eval(&self, t: f64) -> f64 {
        let k = self.knots.partition_point(|&s| s <= t).clamp(1, self.knots.len()) - 1;
        self.cumulative[k] + self.panel(self.knots[k], t)
    }

    fn total(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    /// Solve `H(η) = target` by safeguarded Newton.
    fn invert(&self, target: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut x = (target / self.total()).clamp(0.0, 1.0);
        for _ in 0..100 {
            let r = self.eval(x) - target;
            if r.abs() <= 1e-15 * self.total() {
                break;
            }
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let next = x - r / self.integrand(x);
            x = if next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
        }
        x
    }
}

/// The truncated transition profile `η_δ`, sampled at `samples` equispaced
/// points of `[0, H_δ(1)]`. It is 0 before and 1 after that range and solves
/// `η'²/2 = W_δ(η)` inside.
pub fn recovery_profile<W: Potential>(delta: f64, well: W, samples: usize) -> Result<Profile> {
    if samples < 2 {
        return Err(Error::InvalidArgument(
            "recovery profile needs >= 2 samples".into(),
        ));
    }
    let truncated = TruncatedWell::new(well, delta)?;
    if (1..1000).any(|i| {
        let t = delta + (1.0 - 2.0 * delta) * i as f64 / 1000.0;
        truncated.value(t) <= 0.0
    }) {
        return Err(Error::InvalidArgument(format!(
            "W vanishes inside ({delta}, {})",
            1.0 - delta
        )));
    }
    let h = InverseSlope::new(&truncated);
    let end = h.total();
    let t: Vec<f64> = (0..samples)
        .map(|i| end * i as f64 / (samples - 1) as f64)
        .collect();
    let mut values: Vec<f64> = t.iter().map(|&s| h.invert(s)).collect();
    values[0] = 0.0;
    values[samples - 1] = 1.0;
    let slopes = values
        .iter()
        .map(|&v| (2.0 * truncated.value(v)).sqrt())
        .collect();
    Profile::new(t, values, slopes)
}

/// `H_δ(t)`, exposed for checks of the inverse relation.
pub fn transition_time<W: Potential>(delta: f64, well: W, t: f64) -> Result<f64> {
    let truncated = TruncatedWell::new(well, delta)?;
    Ok(InverseSlope::new(&truncated).eval(t.clamp(0.0, 1.0)))
}
