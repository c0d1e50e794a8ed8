//! Error function, Dawson function and the singularity-free ratios built on
//! them.
//!
//! The imaginary-argument error function never appears directly. Its
//! Gaussian-weighted form is carried by Dawson's integral
//!
//! ```text
//! i·erf(i y) = −(2/√π) · exp(y²) · D(y),    D(y) = exp(−y²) ∫₀^y exp(t²) dt
//! ```
//!
//! so callers can combine the `exp(y²)` factor with other exponentials
//! before evaluating anything that might overflow.
//!
//! Both ratios `erf(a)/a` and `D(b)/b` are even, entire functions of their
//! argument. The `*_slope` functions differentiate them with respect to the
//! squared argument, which is the form the energy gradients need.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// 2/√π
pub const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Tolerances that govern the series/direct branch switch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyBudget {
    pub abs_tol: f64,
    /// Below this argument the ratios use their Maclaurin series.
    pub switch_threshold: f64,
}

impl Default for AccuracyBudget {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            switch_threshold: 1e-2,
        }
    }
}

// Below this squared argument the slopes are summed as power series; the
// closed forms lose about ε/s relative accuracy to cancellation.
const SLOPE_SERIES_LIMIT: f64 = 0.25;

// Switch from the positive-term series to the continued fraction / asymptotic
// expansion.
const ERF_SERIES_LIMIT: f64 = 2.5;
const DAWSON_SERIES_LIMIT: f64 = 6.0;

fn check_finite(function: &'static str, y: f64) -> Result<()> {
    if y.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            function,
            value: y,
            reason: "not finite",
        })
    }
}

fn check_non_negative(function: &'static str, y: f64) -> Result<()> {
    check_finite(function, y)?;
    if y < 0.0 {
        return Err(Error::Domain {
            function,
            value: y,
            reason: "negative",
        });
    }
    Ok(())
}

/// Error function.
pub fn erf(y: f64) -> Result<f64> {
    check_finite("erf", y)?;
    Ok(y.signum() * erf_non_negative(y.abs()))
}

/// Dawson's integral `exp(−y²) ∫₀^y exp(t²) dt`.
pub fn dawson(y: f64) -> Result<f64> {
    check_finite("dawson", y)?;
    Ok(y.signum() * dawson_non_negative(y.abs()))
}

/// `erf(a)/a`, continuous at zero where it equals 2/√π.
pub fn erf_ratio(a: f64) -> Result<f64> {
    erf_ratio_with(a, &AccuracyBudget::default())
}

pub fn erf_ratio_with(a: f64, budget: &AccuracyBudget) -> Result<f64> {
    check_non_negative("erf_ratio", a)?;
    if a < budget.switch_threshold {
        let s = a * a;
        Ok(TWO_OVER_SQRT_PI * (1.0 - s / 3.0 + s * s / 10.0 - s * s * s / 42.0))
    } else {
        Ok(erf_non_negative(a) / a)
    }
}

/// `D(b)/b`, continuous at zero where it equals 1.
pub fn dawson_ratio(b: f64) -> Result<f64> {
    dawson_ratio_with(b, &AccuracyBudget::default())
}

pub fn dawson_ratio_with(b: f64, budget: &AccuracyBudget) -> Result<f64> {
    check_non_negative("dawson_ratio", b)?;
    if b < budget.switch_threshold {
        let s = b * b;
        Ok(1.0 - 2.0 * s / 3.0 + 4.0 * s * s / 15.0 - 8.0 * s * s * s / 105.0)
    } else {
        Ok(dawson_non_negative(b) / b)
    }
}

/// Derivative of `erf(a)/a` with respect to `s = a²`.
pub fn erf_ratio_slope(s: f64) -> Result<f64> {
    check_non_negative("erf_ratio_slope", s)?;
    Ok(if s < SLOPE_SERIES_LIMIT {
        erf_ratio_slope_series(s)
    } else {
        erf_ratio_slope_direct(s)
    })
}

/// Derivative of `D(b)/b` with respect to `s = b²`.
pub fn dawson_ratio_slope(s: f64) -> Result<f64> {
    check_non_negative("dawson_ratio_slope", s)?;
    Ok(if s < SLOPE_SERIES_LIMIT {
        dawson_ratio_slope_series(s)
    } else {
        dawson_ratio_slope_direct(s)
    })
}

/// `erf(a)/a − 2/√π` as a function of `s = a²`, accurate near zero.
pub fn erf_ratio_excess(s: f64) -> Result<f64> {
    check_non_negative("erf_ratio_excess", s)?;
    if s < SLOPE_SERIES_LIMIT {
        // Σ_{n≥1} (−s)^n / (n! (2n+1))
        let mut power = 1.0;
        let mut sum = 0.0;
        for n in 1..40 {
            power *= -s / f64::from(n);
            let term = power / f64::from(2 * n + 1);
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        Ok(TWO_OVER_SQRT_PI * sum)
    } else {
        let a = s.sqrt();
        Ok(erf_non_negative(a) / a - TWO_OVER_SQRT_PI)
    }
}

/// `D(b)/b − 1` as a function of `s = b²`, accurate near zero.
pub fn dawson_ratio_excess(s: f64) -> Result<f64> {
    check_non_negative("dawson_ratio_excess", s)?;
    if s < SLOPE_SERIES_LIMIT {
        // Σ_{n≥1} (−2s)^n / (2n+1)!!
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 1..60 {
            term *= -2.0 * s / f64::from(2 * n + 1);
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        Ok(sum)
    } else {
        let b = s.sqrt();
        Ok(dawson_non_negative(b) / b - 1.0)
    }
}

fn erf_ratio_slope_series(s: f64) -> f64 {
    // Σ_k (−1)^{k+1} s^k / (k! (2k+3))
    let mut power = 1.0; // (−s)^k / k!
    let mut sum = 0.0;
    for k in 0..40 {
        let term = -power / f64::from(2 * k + 3);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        power *= -s / f64::from(k + 1);
    }
    TWO_OVER_SQRT_PI * sum
}

fn erf_ratio_slope_direct(s: f64) -> f64 {
    let a = s.sqrt();
    (TWO_OVER_SQRT_PI * (-s).exp() * a - erf_non_negative(a)) / (2.0 * a * s)
}

fn dawson_ratio_slope_series(s: f64) -> f64 {
    // Σ_k (k+1) (−2)^{k+1} s^k / (2k+3)!!
    let mut ratio = -2.0 / 3.0;
    let mut sum = 0.0;
    for k in 0..60 {
        let term = f64::from(k + 1) * ratio;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        ratio *= -2.0 * s / f64::from(2 * k + 5);
    }
    sum
}

fn dawson_ratio_slope_direct(s: f64) -> f64 {
    let b = s.sqrt();
    let d = dawson_non_negative(b);
    (b - 2.0 * s * d - d) / (2.0 * b * s)
}

fn erf_non_negative(y: f64) -> f64 {
    if y <= ERF_SERIES_LIMIT {
        // erf(y) = (2/√π) e^{−y²} Σ 2^n y^{2n+1} / (2n+1)!!, all terms positive.
        let s = y * y;
        let mut term = y;
        let mut sum = y;
        let mut n = 0u32;
        while term > 1e-17 * sum && n < 200 {
            term *= 2.0 * s / f64::from(2 * n + 3);
            sum += term;
            n += 1;
        }
        TWO_OVER_SQRT_PI * (-s).exp() * sum
    } else {
        1.0 - erfc_continued_fraction(y)
    }
}

/// erfc(y) = e^{−y²}/√π · 1/(y + (1/2)/(y + 1/(y + (3/2)/(y + …)))) for y > 0,
/// evaluated with the modified Lentz algorithm.
fn erfc_continued_fraction(y: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = y;
    let mut c = y;
    let mut d = 0.0;
    for n in 1..500 {
        let an = 0.5 * f64::from(n);
        d = y + an * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = y + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-y * y).exp() / (PI.sqrt() * f)
}

fn dawson_non_negative(y: f64) -> f64 {
    if y <= DAWSON_SERIES_LIMIT {
        // D(y) = e^{−y²} Σ y^{2n+1} / (n! (2n+1)), all terms positive.
        let s = y * y;
        let mut power = y; // y^{2n+1}/n!
        let mut sum = y;
        let mut n = 0u32;
        loop {
            power *= s / f64::from(n + 1);
            let term = power / f64::from(2 * n + 3);
            sum += term;
            n += 1;
            if term <= 1e-17 * sum || n > 400 {
                break;
            }
        }
        (-s).exp() * sum
    } else {
        // D(y) ~ 1/(2y) Σ (2n−1)!! / (2y²)^n, truncated before the terms grow.
        let inv = 1.0 / (2.0 * y * y);
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 0..200u32 {
            let next = term * f64::from(2 * n + 1) * inv;
            if next >= term || next < 1e-18 * sum {
                break;
            }
            term = next;
            sum += term;
        }
        sum / (2.0 * y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(erf(0.0).unwrap(), 0.0);
        assert!((erf(1.0).unwrap() - 0.842700792949715).abs() < 1e-15);
        assert!((erf(5.0).unwrap() - 0.9999999999984626).abs() < 1e-15);
        assert_eq!(dawson(0.0).unwrap(), 0.0);
        assert!((dawson(1.0).unwrap() - 0.538079506912768).abs() < 1e-15);
        // high-precision quadrature: D(10) = 0.05025384718759852803…
        assert!((dawson(10.0).unwrap() - 0.05025384718759853).abs() < 1e-15);
    }

    #[test]
    fn ratios_at_reference_points() {
        assert_eq!(erf_ratio(0.0).unwrap(), TWO_OVER_SQRT_PI);
        assert_eq!(TWO_OVER_SQRT_PI, std::f64::consts::FRAC_2_SQRT_PI);
        assert!((erf_ratio(1.0).unwrap() - 0.842700792949715).abs() < 1e-15);
        assert_eq!(dawson_ratio(0.0).unwrap(), 1.0);
        assert!((dawson_ratio(1.0).unwrap() - 0.538079506912768).abs() < 1e-15);
        // D(3) = 0.178271030610558287… by quadrature
        assert!((dawson_ratio(3.0).unwrap() - 0.1782710306105583 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn branches_agree_at_threshold() {
        let t = AccuracyBudget::default().switch_threshold;
        let series = AccuracyBudget {
            switch_threshold: 1.0,
            ..AccuracyBudget::default()
        };
        let direct = AccuracyBudget {
            switch_threshold: 0.0,
            ..AccuracyBudget::default()
        };
        let eps = t / 100.0;
        for a in [1e-4, t - eps, t, t + eps] {
            let gap = erf_ratio_with(a, &series).unwrap() - erf_ratio_with(a, &direct).unwrap();
            assert!(gap.abs() < 1e-13, "erf_ratio at {a}: {gap:e}");
            let gap =
                dawson_ratio_with(a, &series).unwrap() - dawson_ratio_with(a, &direct).unwrap();
            assert!(gap.abs() < 1e-13, "dawson_ratio at {a}: {gap:e}");
        }
        // the jump across the switch, with the smooth variation removed
        for f in [erf_ratio_with, dawson_ratio_with] {
            let across = f(t + eps, &AccuracyBudget::default()).unwrap()
                - f(t - eps, &AccuracyBudget::default()).unwrap();
            let smooth = f(t + eps, &direct).unwrap() - f(t - eps, &direct).unwrap();
            assert!((across - smooth).abs() < 1e-12);
        }
    }

    #[test]
    fn slope_branches_agree_at_switch() {
        for s in [
            0.5 * SLOPE_SERIES_LIMIT,
            SLOPE_SERIES_LIMIT,
            1.5 * SLOPE_SERIES_LIMIT,
        ] {
            let gap = erf_ratio_slope_series(s) - erf_ratio_slope_direct(s);
            assert!(gap.abs() < 1e-14, "erf slope at {s}: {gap:e}");
            let gap = dawson_ratio_slope_series(s) - dawson_ratio_slope_direct(s);
            assert!(gap.abs() < 1e-14, "dawson slope at {s}: {gap:e}");
        }
        assert!((erf_ratio_slope(0.0).unwrap() + TWO_OVER_SQRT_PI / 3.0).abs() < 1e-16);
        assert!((dawson_ratio_slope(0.0).unwrap() + 2.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn slopes_match_finite_differences() {
        for s in [1e-6f64, 0.01, 0.2, 0.3, 1.0, 4.0, 25.0, 100.0] {
            let h = (1e-4 * s.max(1e-2)).min(0.5 * s);
            let fd = |f: fn(f64) -> Result<f64>| {
                let g = |u: f64| f(u.sqrt()).unwrap();
                (g(s + h) - g(s - h)) / (2.0 * h)
            };
            let a = erf_ratio_slope(s).unwrap();
            assert!(
                (a - fd(erf_ratio)).abs() < 1e-6 * a.abs(),
                "erf slope at {s}"
            );
            let d = dawson_ratio_slope(s).unwrap();
            assert!(
                (d - fd(dawson_ratio)).abs() < 1e-6 * d.abs(),
                "dawson slope at {s}"
            );
        }
    }

    #[test]
    fn excess_forms_match_ratios() {
        for s in [1e-20f64, 1e-8, 1e-3, 0.2, 0.25, 0.3, 2.0, 50.0] {
            let a = s.sqrt();
            let e = erf_ratio_excess(s).unwrap();
            let reference = if s < 1e-4 {
                TWO_OVER_SQRT_PI * (-s / 3.0 + s * s / 10.0 - s * s * s / 42.0)
            } else {
                erf_ratio(a).unwrap() - TWO_OVER_SQRT_PI
            };
            assert!(
                (e - reference).abs() <= 1e-13 * reference.abs().max(s) + 1e-15,
                "erf excess at {s}"
            );
            let d = dawson_ratio_excess(s).unwrap();
            let reference = if s < 1e-4 {
                -2.0 * s / 3.0 + 4.0 * s * s / 15.0 - 8.0 * s * s * s / 105.0
            } else {
                dawson_ratio(a).unwrap() - 1.0
            };
            assert!(
                (d - reference).abs() <= 1e-13 * reference.abs().max(s) + 1e-15,
                "dawson excess at {s}"
            );
        }
        let s = SLOPE_SERIES_LIMIT;
        let below = s * (1.0 - 1e-15);
        assert!((erf_ratio_excess(below).unwrap() - erf_ratio_excess(s).unwrap()).abs() < 1e-15);
        assert!(
            (dawson_ratio_excess(below).unwrap() - dawson_ratio_excess(s).unwrap()).abs() < 1e-15
        );
    }

    #[test]
    fn domain_errors() {
        assert!(erf(f64::NAN).is_err());
        assert!(erf(f64::INFINITY).is_err());
        assert!(dawson(f64::NEG_INFINITY).is_err());
        assert!(erf_ratio(-1e-3).is_err());
        assert!(dawson_ratio(-1.0).is_err());
        assert!(dawson_ratio(f64::NAN).is_err());
        assert!(erf_ratio_slope(-1.0).is_err());
    }

    #[test]
    fn large_arguments_do_not_overflow() {
        assert_eq!(erf(40.0).unwrap(), 1.0);
        assert_eq!(erf(-1e300).unwrap(), -1.0);
        let d = dawson(1e8).unwrap();
        assert!((d - 0.5e-8).abs() < 1e-22);
        assert!(dawson_ratio(1e150).unwrap() > 0.0);
    }
}
