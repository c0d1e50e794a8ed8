//! Effective Hamiltonian of the head-on pair, `H = ⟨T⟩ + ⟨V⟩`, and its
//! analytic phase-space gradient.
//!
//! The collision is collinear, so the state reduces to the mean position `x`
//! and momentum `p` of electron 1; electron 2 sits at `(−x, −p)`. With
//! `|α|² = σ²x²/ħ² + p²/(4σ²)` and `|N|² = exp(−4|α|²)` the kinetic energy
//! splits into
//!
//! ```text
//! T_cl = p²/m,   T_conf = 3σ²/m,   T_corr = (4σ²/m) |α|² |N|² / (1 − |N|²)
//! ```
//!
//! and the triplet Coulomb expectation, with the imaginary error function
//! written through Dawson's integral, is
//!
//! ```text
//! ⟨V⟩ = e₀² (σ/ħs) [ erf(A)/A − (2/√π) (D(B)/B) exp(B² − 4|α|²) ] / (1 − |N|²)
//! A = 2σ|x|/(ħs),   B = σ|L|/(ħs),   L = (ħ/σ²) p − 2xωτ,   s = √(1 + ω²τ²)
//! ```
//!
//! where `τ = 0` for the frozen-width model and `τ = t` when spreading. For
//! `τ = 0` the exponent reduces exactly to `−A²`.
//!
//! Every term depends on the state only through `x²`, `p²` and `L²`, which
//! keeps `H` smooth through `x = 0`. The bracket is evaluated from the
//! excesses `erf(A)/A − 2/√π`, `D(B)/B − 1` and `expm1`, so it keeps full
//! relative precision as `|α| → 0`.

use crate::error::{Error, Result};
use crate::params::{ModelKind, PhysicalParams};
use crate::special::{
    dawson_ratio, dawson_ratio_excess, dawson_ratio_slope, erf_ratio_excess, erf_ratio_slope,
    TWO_OVER_SQRT_PI,
};

/// Below this `|α|²` the Coulomb gradient keeps less than about six correct
/// digits, so evaluation is refused.
pub const ALPHA_SQ_GUARD: f64 = 1e-10;

/// Largest exponent passed to `exp` in the spreading model.
pub const MAX_EXPONENT: f64 = 700.0;

// t_corr switches to its Taylor form below this |α|², and to zero above the
// upper limit.
const CORR_SERIES_LIMIT: f64 = 1e-3;
const CORR_ZERO_LIMIT: f64 = 100.0;

/// Mean position and momentum of electron 1 at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub x: f64,
    pub p: f64,
    pub t: f64,
}

impl PhaseState {
    pub fn new(x: f64, p: f64, t: f64) -> Self {
        Self { x, p, t }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    pub t_cl: f64,
    pub t_conf: f64,
    pub t_corr: f64,
    pub v: f64,
    pub h_total: f64,
}

/// `∂H/∂x` and `∂H/∂p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub dx: f64,
    pub dp: f64,
}

/// Dimensionless arguments of the two error-function terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombArguments {
    /// Widening factor √(1 + ω²τ²).
    pub spread: f64,
    pub a_arg: f64,
    pub b_arg: f64,
}

/// `|α|²` for the collinear state.
pub fn alpha_sq(state: &PhaseState, params: &PhysicalParams) -> f64 {
    let PhysicalParams { sigma, hbar, .. } = *params;
    let sx = sigma * state.x / hbar;
    let sp = state.p / (2.0 * sigma);
    sx * sx + sp * sp
}

/// `|N|² = exp(−4|α|²)`, the squared overlap of `|α⟩` and `|−α⟩`.
pub fn overlap_sq(a2: f64) -> Result<f64> {
    if !(a2.is_finite() && a2 >= 0.0) {
        return Err(Error::Domain {
            function: "overlap_sq",
            value: a2,
            reason: "must be finite and >= 0",
        });
    }
    Ok((-4.0 * a2).exp())
}

/// `a2·|N|²/(1 − |N|²) = a2/(exp(4 a2) − 1)`, tending to 1/4 at zero.
fn corr_kernel(a2: f64) -> f64 {
    if a2 < CORR_SERIES_LIMIT {
        let s2 = a2 * a2;
        0.25 - 0.5 * a2 + s2 / 3.0 - 4.0 * s2 * s2 / 45.0
    } else if a2 > CORR_ZERO_LIMIT {
        0.0
    } else {
        let q = (-4.0 * a2).exp();
        a2 * q / -(-4.0 * a2).exp_m1()
    }
}

fn corr_kernel_slope(a2: f64) -> f64 {
    if a2 < CORR_SERIES_LIMIT {
        -0.5 + 2.0 * a2 / 3.0 - 16.0 * a2 * a2 * a2 / 45.0
    } else if a2 > CORR_ZERO_LIMIT {
        0.0
    } else {
        let q = (-4.0 * a2).exp();
        let one_minus_q = -(-4.0 * a2).exp_m1();
        q * (one_minus_q - 4.0 * a2) / (one_minus_q * one_minus_q)
    }
}

/// Kinetic terms `(T_cl, T_conf, T_corr)`. Point-particle models carry only `T_cl`.
pub fn kinetic_breakdown(
    state: &PhaseState,
    params: &PhysicalParams,
    model: ModelKind,
) -> (f64, f64, f64) {
    let m = params.mass;
    let t_cl = state.p * state.p / m;
    if !model.is_coherent() {
        return (t_cl, 0.0, 0.0);
    }
    let s2m = params.sigma * params.sigma / m;
    let a2 = alpha_sq(state, params);
    (t_cl, 3.0 * s2m, 4.0 * s2m * corr_kernel(a2))
}

/// Effective time entering the Coulomb arguments.
fn coulomb_time(state: &PhaseState, model: ModelKind) -> f64 {
    match model {
        ModelKind::CoherentSpreading => state.t,
        _ => 0.0,
    }
}

pub fn coulomb_arguments(
    state: &PhaseState,
    params: &PhysicalParams,
    model: ModelKind,
) -> CoulombArguments {
    let geo = Geometry::new(state, params, coulomb_time(state, model));
    CoulombArguments {
        spread: geo.spread,
        a_arg: geo.a_sq.sqrt(),
        b_arg: geo.b_sq.sqrt(),
    }
}

/// Squared arguments and their phase-space derivatives.
struct Geometry {
    spread: f64,
    a2: f64,
    a_sq: f64,
    b_sq: f64,
    /// `B² − 4|α|²`, never positive.
    exponent: f64,
    d_a_sq: (f64, f64),
    d_b_sq: (f64, f64),
    d_exponent: (f64, f64),
    d_a2: (f64, f64),
}

impl Geometry {
    fn new(state: &PhaseState, params: &PhysicalParams, tau: f64) -> Self {
        let PhysicalParams { sigma, hbar, .. } = *params;
        let (x, p) = (state.x, state.p);
        let a2 = alpha_sq(state, params);
        let d_a2 = (
            2.0 * sigma * sigma * x / (hbar * hbar),
            p / (2.0 * sigma * sigma),
        );

        if tau == 0.0 {
            let k = 2.0 * sigma / hbar;
            let a_sq = k * k * x * x;
            let b_sq = p * p / (sigma * sigma);
            let d_a_sq = (2.0 * k * k * x, 0.0);
            return Self {
                spread: 1.0,
                a2,
                a_sq,
                b_sq,
                exponent: -a_sq,
                d_a_sq,
                d_b_sq: (0.0, 2.0 * p / (sigma * sigma)),
                d_exponent: (-d_a_sq.0, 0.0),
                d_a2,
            };
        }

        let wt = params.omega() * tau;
        let s_sq = 1.0 + wt * wt;
        let k = 2.0 * sigma / hbar;
        let a_sq = k * k * x * x / s_sq;
        let l = hbar * p / (sigma * sigma) - 2.0 * x * wt;
        let c = sigma * sigma / (hbar * hbar * s_sq);
        let b_sq = c * l * l;
        let d_b_sq = (
            2.0 * c * l * (-2.0 * wt),
            2.0 * c * l * hbar / (sigma * sigma),
        );
        Self {
            spread: s_sq.sqrt(),
            a2,
            a_sq,
            b_sq,
            exponent: b_sq - 4.0 * a2,
            d_a_sq: (2.0 * k * k * x / s_sq, 0.0),
            d_b_sq,
            d_exponent: (d_b_sq.0 - 4.0 * d_a2.0, d_b_sq.1 - 4.0 * d_a2.1),
            d_a2,
        }
    }
}

fn check_guard(a2: f64) -> Result<()> {
    if a2 < ALPHA_SQ_GUARD {
        Err(Error::Guard {
            alpha_sq: a2,
            guard: ALPHA_SQ_GUARD,
        })
    } else {
        Ok(())
    }
}

fn check_exponent(exponent: f64) -> Result<f64> {
    if exponent > MAX_EXPONENT {
        Err(Error::NumericalRange { exponent })
    } else {
        Ok(exponent.exp())
    }
}

/// `⟨V⟩` for the given model. Zero for the free model and for `e₀² = 0`.
pub fn coulomb_expectation(
    state: &PhaseState,
    params: &PhysicalParams,
    model: ModelKind,
) -> Result<f64> {
    Ok(coulomb_with_gradient(state, params, model, false)?.0)
}

fn coulomb_with_gradient(
    state: &PhaseState,
    params: &PhysicalParams,
    model: ModelKind,
    want_gradient: bool,
) -> Result<(f64, Gradient)> {
    let zero = Gradient { dx: 0.0, dp: 0.0 };
    let e0sq = params.e0sq;
    match model {
        ModelKind::Free => Ok((0.0, zero)),
        _ if e0sq == 0.0 => Ok((0.0, zero)),
        ModelKind::ClassicalCoulomb => {
            let x = state.x;
            if x == 0.0 {
                return Err(Error::Singularity);
            }
            let v = e0sq / (2.0 * x.abs());
            Ok((
                v,
                Gradient {
                    dx: -v / x,
                    dp: 0.0,
                },
            ))
        }
        ModelKind::CoherentFrozen | ModelKind::CoherentSpreading => {
            let geo = Geometry::new(state, params, coulomb_time(state, model));
            check_guard(geo.a2)?;
            let scale = e0sq * params.sigma / (params.hbar * geo.spread);

            // f − (2/√π)·g·w regrouped so every piece keeps its relative
            // precision as |α| → 0:
            // (f − 2/√π) − (2/√π)(g − 1)·w − (2/√π)(w − 1)
            let f_excess = erf_ratio_excess(geo.a_sq)?;
            let g = dawson_ratio(geo.b_sq.sqrt())?;
            let g_excess = dawson_ratio_excess(geo.b_sq)?;
            let w = check_exponent(geo.exponent)?;
            let w_excess = geo.exponent.exp_m1();
            let q = (-4.0 * geo.a2).exp();
            let den = -(-4.0 * geo.a2).exp_m1();

            let num = f_excess - TWO_OVER_SQRT_PI * (g_excess * w + w_excess);
            let ratio = num / den;
            let v = scale * ratio;
            if !want_gradient {
                return Ok((v, zero));
            }

            let fs = erf_ratio_slope(geo.a_sq)?;
            let gs = dawson_ratio_slope(geo.b_sq)?;
            let d_num = |i: usize| {
                let pick = |d: (f64, f64)| if i == 0 { d.0 } else { d.1 };
                fs * pick(geo.d_a_sq)
                    - TWO_OVER_SQRT_PI * w * (gs * pick(geo.d_b_sq) + g * pick(geo.d_exponent))
            };
            let d_den = |i: usize| 4.0 * q * if i == 0 { geo.d_a2.0 } else { geo.d_a2.1 };
            let partial = |i: usize| scale * (d_num(i) - ratio * d_den(i)) / den;
            Ok((
                v,
                Gradient {
                    dx: partial(0),
                    dp: partial(1),
                },
            ))
        }
    }
}

/// All energy terms for the given model.
pub fn hamiltonian(
    state: &PhaseState,
    params: &PhysicalParams,
    model: ModelKind,
) -> Result<EnergyBreakdown> {
    let (t_cl, t_conf, t_corr) = kinetic_breakdown(state, params, model);
    let v = coulomb_expectation(state, params, model)?;
    Ok(EnergyBreakdown {
        t_cl,
        t_conf,
        t_corr,
        v,
        h_total: t_cl + t_conf + t_corr + v,
    })
}

/// Analytic `(∂H/∂x, ∂H/∂p)`.
pub fn grad_hamiltonian(
    state: &PhaseState,
    params: &PhysicalParams,
    model: ModelKind,
) -> Result<Gradient> {
    let m = params.mass;
    let mut dx = 0.0;
    let mut dp = 2.0 * state.p / m;
    if model.is_coherent() {
        let a2 = alpha_sq(state, params);
        let sigma = params.sigma;
        let k = 4.0 * sigma * sigma / m * corr_kernel_slope(a2);
        dx += k * 2.0 * sigma * sigma * state.x / (params.hbar * params.hbar);
        dp += k * state.p / (2.0 * sigma * sigma);
    }
    let (_, gv) = coulomb_with_gradient(state, params, model, true)?;
    dx += gv.dx;
    dp += gv.dp;
    Ok(Gradient { dx, dp })
}
