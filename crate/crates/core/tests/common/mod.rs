//! Reference values computed independently of the library: composite
//! Gauss–Legendre quadrature of the defining integrals.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::OnceLock;

const ORDER: usize = 20;

/// Nodes and weights on [−1, 1] by Newton iteration on P_n.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut rule = Vec::with_capacity(n);
        for i in 0..n {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            rule.push((z, 2.0 / ((1.0 - z * z) * dp * dp)));
        }
        rule
    })
}

/// ∫_a^b f with `panels` equal Gauss–Legendre panels.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre();
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * width;
        let half = 0.5 * width;
        let panel: f64 = rule.iter().map(|&(z, w)| w * f(mid + half * z)).sum();
        total += half * panel;
    }
    total
}

/// erf(y) for y ≥ 0. Beyond 6 the complement is below 1e−17.
pub fn erf(y: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let c = 2.0 / PI.sqrt();
    if y <= 6.0 {
        let panels = (y * 8.0).ceil().max(1.0) as usize;
        c * integrate(|t| (-t * t).exp(), 0.0, y, panels)
    } else {
        let tail = c * integrate(|t| (-t * t).exp(), y, y + 6.0, 48);
        1.0 - tail
    }
}

/// D(y) = ∫₀^y exp(−u(2y − u)) du with u = y − t, for y ≥ 0.
pub fn dawson(y: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    // beyond u_max the integrand is below e^−50
    let u_max = if y * y > 50.0 {
        y - (y * y - 50.0).sqrt()
    } else {
        y
    };
    let panels = ((u_max * y).ceil() as usize * 4).clamp(8, 4000);
    integrate(|u| (-u * (2.0 * y - u)).exp(), 0.0, u_max, panels)
}

pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Five-point central difference.
pub fn derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}
