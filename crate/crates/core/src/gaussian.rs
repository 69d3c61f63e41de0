//! Scalar Gaussian calculus: the standard normal CDF `Φ`, its inverse `α`,
//! and the isoperimetric profile `U = Φ' ∘ α`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{domain, Result};

/// `1/√(2π)`, the perimeter of a half-space through the origin.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// `√(2π)`.
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF `Φ(x)`.
///
/// Evaluated through `erfc` on the side where it does not cancel, so the
/// lower tail keeps full relative precision down to the subnormal range
/// (`Φ(-38) ≈ 2.9e-316`).
pub fn std_normal_cdf(x: f64) -> f64 {
    if x < 0.0 {
        0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
    } else {
        1.0 - 0.5 * libm::erfc(x * FRAC_1_SQRT_2)
    }
}

// Acklam's rational approximation; relative error about 1e-9.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.024_25;

fn acklam_lower(p: f64) -> f64 {
    // p in (0, 1/2]
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Quantile `α(p) = Φ⁻¹(p)` for `p ∈ (0, 1/2]`, polished by two Newton steps.
fn quantile_lower(p: f64) -> f64 {
    let mut x = acklam_lower(p);
    for _ in 0..2 {
        let density = std_normal_pdf(x);
        if density == 0.0 {
            break;
        }
        x -= (std_normal_cdf(x) - p) / density;
    }
    x
}

/// Standard normal quantile `α(p) = Φ⁻¹(p)`, defined for `p ∈ (0, 1)`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("p", p, "(0, 1)"));
    }
    Ok(quantile_unchecked(p))
}

/// `α(p)` without the domain check. `1 - p` is exact for `p ≥ 1/2`, so the
/// upper half is mapped onto the lower one by symmetry.
pub(crate) fn quantile_unchecked(p: f64) -> f64 {
    if p <= 0.5 {
        quantile_lower(p)
    } else {
        -quantile_lower(1.0 - p)
    }
}

/// The Gaussian isoperimetric profile `U(p) = φ(α(p))`.
///
/// `U(p)` is the perimeter of a half-space of Gaussian volume `p`. Inputs
/// within `clamp_eps` of `0` or `1` evaluate to the limit value `0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoperimetricProfile {
    pub clamp_eps: f64,
}

impl Default for IsoperimetricProfile {
    fn default() -> Self {
        Self { clamp_eps: 1e-15 }
    }
}

impl IsoperimetricProfile {
    pub fn new(clamp_eps: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&clamp_eps) {
            return Err(domain("clamp_eps", clamp_eps, "[0, 1/2)"));
        }
        Ok(Self { clamp_eps })
    }

    pub fn value(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain("p", p, "[0, 1]"));
        }
        Ok(self.value_unchecked(p))
    }

    /// `U(p)` for `p` already known to lie in `[0, 1]`.
    #[inline]
    pub(crate) fn value_unchecked(&self, p: f64) -> f64 {
        if p <= self.clamp_eps || p >= 1.0 - self.clamp_eps {
            0.0
        } else {
            std_normal_pdf(quantile_unchecked(p))
        }
    }

    /// Closed-form derivatives `(U'(p), U''(p)) = (-α(p), -1/U(p))`.
    pub fn derivatives(&self, p: f64) -> Result<(f64, f64)> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("p", p, "(0, 1)"));
        }
        let a = quantile_unchecked(p);
        Ok((-a, -1.0 / std_normal_pdf(a)))
    }
}

/// `U(p)` with the default clamp.
pub fn isoperimetric_profile(p: f64) -> Result<f64> {
    IsoperimetricProfile::default().value(p)
}

/// `(U'(p), U''(p))` with the default clamp.
pub fn isoperimetric_profile_derivatives(p: f64) -> Result<(f64, f64)> {
    IsoperimetricProfile::default().derivatives(p)
}

/// `U` clamped onto `[0, 1]` first; used inside integrands whose arguments
/// may drift by rounding.
#[inline]
pub(crate) fn profile_clamped(p: f64) -> f64 {
    IsoperimetricProfile::default().value_unchecked(p.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin series of erf, summed term by term. Converges quickly for
    /// the moderate arguments used here and shares no code with `libm`.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for n in 1..200 {
            term *= -x * x / n as f64;
            sum += term / (2 * n + 1) as f64;
        }
        sum * 2.0 / std::f64::consts::PI.sqrt()
    }

    #[test]
    fn cdf_at_zero_is_half() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
    }

    #[test]
    fn cdf_at_one_matches_series_oracle() {
        let oracle = 0.5 * (1.0 + erf_series(FRAC_1_SQRT_2));
        assert!((oracle - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!((std_normal_cdf(1.0) - oracle).abs() <= 1e-14);
    }

    #[test]
    fn cdf_matches_series_on_a_sweep() {
        for i in -30..=30 {
            let x = i as f64 / 10.0;
            let oracle = 0.5 * (1.0 + erf_series(x * FRAC_1_SQRT_2));
            assert!((std_normal_cdf(x) - oracle).abs() <= 1e-14, "x = {x}");
        }
    }

    #[test]
    fn deep_lower_tail_does_not_underflow() {
        let v = std_normal_cdf(-38.0);
        assert!(v > 0.0 && v < 1e-300, "{v}");
        // Mills ratio asymptotics: Φ(-x) ≈ φ(x)/x · (1 - 1/x²).
        let asym = std_normal_pdf(38.0) / 38.0 * (1.0 - 1.0 / (38.0 * 38.0));
        assert!((v / asym - 1.0).abs() < 1e-3);
    }

    #[test]
    fn cdf_is_monotone() {
        let mut prev = 0.0;
        for i in -4000..=4000 {
            let v = std_normal_cdf(i as f64 / 500.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        let x = std_normal_quantile(0.841_344_746_068_542_9).unwrap();
        assert!((x - 1.0).abs() < 1e-10);
        for p in [1e-6, 0.3, 1.0 - 1e-6] {
            let back = std_normal_cdf(std_normal_quantile(p).unwrap());
            assert!((back - p).abs() <= 1e-12, "p = {p}");
        }
    }

    #[test]
    fn quantile_rejects_endpoints() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(std_normal_quantile(p).is_err());
        }
    }

    #[test]
    fn quantile_is_strictly_increasing() {
        let mut prev = f64::NEG_INFINITY;
        for i in 1..10_000 {
            let x = std_normal_quantile(i as f64 / 10_000.0).unwrap();
            assert!(x > prev);
            prev = x;
        }
    }

    #[test]
    fn profile_examples() {
        assert!((isoperimetric_profile(0.5).unwrap() - INV_SQRT_2PI).abs() < 1e-16);
        assert_eq!(isoperimetric_profile(0.0).unwrap(), 0.0);
        assert_eq!(isoperimetric_profile(1.0).unwrap(), 0.0);
        let u = isoperimetric_profile(std_normal_cdf(1.0)).unwrap();
        assert!((u - 0.241_970_724_519_143_37).abs() < 1e-13);
        assert!(isoperimetric_profile(-1e-3).is_err());
        assert!(isoperimetric_profile(1.0 + 1e-9).is_err());
    }

    #[test]
    fn profile_clamps_near_endpoints() {
        assert_eq!(isoperimetric_profile(5e-16).unwrap(), 0.0);
        assert_eq!(isoperimetric_profile(1.0 - 5e-16).unwrap(), 0.0);
        assert!(isoperimetric_profile(1e-14).unwrap() > 0.0);
    }

    #[test]
    fn derivative_examples() {
        let (d1, d2) = isoperimetric_profile_derivatives(0.5).unwrap();
        assert_eq!(d1, 0.0);
        assert!((d2 + SQRT_2PI).abs() < 1e-12);

        let p = 0.3;
        let h = 1e-6;
        let fd = (isoperimetric_profile(p + h).unwrap() - isoperimetric_profile(p - h).unwrap()) / (2.0 * h);
        let (d1, _) = isoperimetric_profile_derivatives(p).unwrap();
        assert!((d1 - fd).abs() < 1e-6);

        let (a, _) = isoperimetric_profile_derivatives(0.2).unwrap();
        let (b, _) = isoperimetric_profile_derivatives(0.8).unwrap();
        assert!((a + b).abs() < 1e-14);
        assert!(isoperimetric_profile_derivatives(0.0).is_err());
        assert!(isoperimetric_profile_derivatives(1.0).is_err());
    }

    #[test]
    fn sqrt_2pi_constants_agree() {
        assert!((SQRT_2PI * INV_SQRT_2PI - 1.0).abs() < 1e-15);
        assert!((SQRT_2PI - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
    }
}
