//! Semiclassical equations of motion, trajectory recording and the return
//! event.
//!
//! The mean position and momentum of electron 1 follow the halved Hamilton
//! equations
//!
//! ```text
//! dx/dt = ½ ∂H/∂p,    dp/dt = −½ ∂H/∂x
//! ```
//!
//! starting from `(x0, −p0)`. With `H` the energy of the pair, the halving
//! makes a free electron move at `p/m`, so its return time is `2·m·x0/p0`.
//!
//! Integration stops at the first time the separation regains its initial
//! value while growing (the return event) or at `t_max`. A sign change of
//! `x` between samples marks a penetrating trajectory.

use std::fmt;

use crate::energy::{alpha_sq, grad_hamiltonian, hamiltonian, EnergyBreakdown, PhaseState};
use crate::error::{Error, Result};
use crate::ode::{DenseSegment, DormandPrince, State, StepControl};
use crate::params::{ModelKind, PhysicalParams, ScenarioConfig};
use crate::quadrature;

/// Steps shorter than this abort the run.
pub const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    /// The electrons turn around before meeting.
    Deflection,
    /// The mean positions pass through each other.
    Penetration,
    /// Neither happened within the horizon.
    Undetermined,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Deflection => "deflection",
            Classification::Penetration => "penetration",
            Classification::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub event_tol: f64,
}

impl IntegratorConfig {
    /// Tolerances from the scenario, with `max_step = t_max / 10`.
    pub fn from_scenario(scenario: &ScenarioConfig) -> Self {
        Self {
            rtol: scenario.rtol,
            atol: scenario.atol,
            max_step: scenario.t_max / 10.0,
            event_tol: scenario.event_tol,
        }
    }

    pub fn validate(&self, t_max: f64) -> Result<()> {
        let checks = [
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("max_step", self.max_step),
            ("event_tol", self.event_tol),
        ];
        for (field, value) in checks {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Validation {
                    field,
                    value,
                    bound: "finite and > 0",
                });
            }
        }
        if self.max_step > t_max / 10.0 {
            return Err(Error::Validation {
                field: "max_step",
                value: self.max_step,
                bound: "<= t_max / 10",
            });
        }
        Ok(())
    }

    fn step_control(&self) -> StepControl {
        StepControl {
            rtol: self.rtol,
            atol: self.atol,
            max_step: self.max_step,
            min_step: MIN_STEP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub p: f64,
    pub energy: EnergyBreakdown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub classification: Classification,
    pub return_time: Option<f64>,
    /// First time `x` changed sign.
    pub crossing_time: Option<f64>,
    /// Smallest sampled separation `2|x|`.
    pub min_separation: f64,
    pub min_alpha_sq: f64,
    pub model: ModelKind,
    pub scenario: ScenarioConfig,
    pub params: PhysicalParams,
}

impl Trajectory {
    fn new(scenario: &ScenarioConfig, params: &PhysicalParams) -> Self {
        Self {
            samples: Vec::new(),
            classification: Classification::Undetermined,
            return_time: None,
            crossing_time: None,
            min_separation: f64::INFINITY,
            min_alpha_sq: f64::INFINITY,
            model: scenario.model,
            scenario: *scenario,
            params: *params,
        }
    }

    fn push(&mut self, t: f64, y: State) -> Result<()> {
        let state = PhaseState::new(y[0], y[1], t);
        let energy = hamiltonian(&state, &self.params, self.model)?;
        self.min_separation = self.min_separation.min(2.0 * y[0].abs());
        self.min_alpha_sq = self.min_alpha_sq.min(alpha_sq(&state, &self.params));
        self.samples.push(Sample {
            t,
            x: y[0],
            p: y[1],
            energy,
        });
        Ok(())
    }
}

/// `(dx/dt, dp/dt) = (½ ∂H/∂p, −½ ∂H/∂x)`.
pub fn rhs(state: &PhaseState, params: &PhysicalParams, model: ModelKind) -> Result<(f64, f64)> {
    let g = grad_hamiltonian(state, params, model)?;
    Ok((0.5 * g.dp, -0.5 * g.dx))
}

fn solver<'a>(
    params: &'a PhysicalParams,
    model: ModelKind,
    t0: f64,
    y0: State,
    integ: &IntegratorConfig,
) -> Result<DormandPrince<impl FnMut(f64, &State) -> Result<State> + 'a>> {
    let f = move |t: f64, y: &State| {
        rhs(&PhaseState::new(y[0], y[1], t), params, model).map(|(dx, dp)| [dx, dp])
    };
    DormandPrince::new(f, t0, y0, integ.step_control())
}

/// Bisects `g` on `[lo, hi]` where `g(lo) < 0 <= g(hi)`.
fn locate(
    seg: &DenseSegment,
    g: impl Fn(&State) -> f64,
    mut lo: f64,
    mut hi: f64,
    time_tol: f64,
    value_tol: f64,
) -> f64 {
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let gm = g(&seg.eval(mid));
        if hi - lo <= time_tol && gm.abs() <= value_tol {
            break;
        }
        if gm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid <= lo && mid >= hi {
            break;
        }
    }
    mid
}

/// Number of sub-samples that keeps adjacent positions within `x0/100`.
fn subdivisions(seg: &DenseSegment, x0: f64) -> usize {
    const PROBES: usize = 16;
    let mut prev = seg.y0[0];
    let mut variation = 0.0;
    for j in 1..=PROBES {
        let x = seg.eval(seg.t0 + seg.h * j as f64 / PROBES as f64)[0];
        variation += (x - prev).abs();
        prev = x;
    }
    let n = (variation / (x0 / 200.0)).ceil();
    (n as usize).clamp(2, 1 << 20)
}

/// Integrates one head-on collision from `(x0, −p0)`.
///
/// On failure after the start the error is [`Error::Aborted`], which carries
/// the trajectory computed so far.
pub fn integrate(
    scenario: &ScenarioConfig,
    params: &PhysicalParams,
    integ: &IntegratorConfig,
) -> Result<Trajectory> {
    scenario.validate()?;
    params.validate()?;
    integ.validate(scenario.t_max)?;

    let x0 = scenario.x0;
    let t_max = scenario.t_max;
    let mut traj = Trajectory::new(scenario, params);

    let abort = |source: Error, traj: &Trajectory| Error::Aborted {
        source: Box::new(source),
        partial: Box::new(traj.clone()),
    };

    let y_start = [x0, -scenario.p0];
    traj.push(0.0, y_start).map_err(|e| abort(e, &traj))?;
    let mut ode =
        solver(params, scenario.model, 0.0, y_start, integ).map_err(|e| abort(e, &traj))?;

    let value_tol = 0.5 * integ.event_tol * x0.max(1.0);
    let mut last_sign = 1.0;

    'outer: while ode.t() < t_max {
        let seg = match ode.step(t_max) {
            Ok(seg) => seg,
            Err(e) => return Err(abort(e, &traj)),
        };
        let n = subdivisions(&seg, x0);
        let (mut t_prev, mut y_prev) = (seg.t0, seg.y0);
        for j in 1..=n {
            let (t, y) = if j == n {
                (seg.t1(), seg.y1)
            } else {
                let t = seg.t0 + seg.h * j as f64 / n as f64;
                (t, seg.eval(t))
            };

            if traj.crossing_time.is_none() && y[0] != 0.0 && y[0].signum() != last_sign {
                let tc = locate(
                    &seg,
                    |s| -s[0] * last_sign,
                    t_prev,
                    t,
                    integ.event_tol,
                    value_tol,
                );
                traj.crossing_time = Some(tc);
            }
            if y[0] != 0.0 {
                last_sign = y[0].signum();
            }

            let g_prev = y_prev[0].abs() - x0;
            let g = y[0].abs() - x0;
            if g_prev < 0.0 && g >= 0.0 {
                let tr = locate(
                    &seg,
                    |s| s[0].abs() - x0,
                    t_prev,
                    t,
                    integ.event_tol,
                    value_tol,
                );
                traj.push(tr, seg.eval(tr)).map_err(|e| abort(e, &traj))?;
                traj.return_time = Some(tr);
                break 'outer;
            }

            traj.push(t, y).map_err(|e| abort(e, &traj))?;
            t_prev = t;
            y_prev = y;
        }
    }

    traj.classification = classify_samples(&traj.samples);
    Ok(traj)
}

/// Integrates an arbitrary state forward by `duration` without event handling.
pub fn propagate(
    state: &PhaseState,
    duration: f64,
    params: &PhysicalParams,
    model: ModelKind,
    integ: &IntegratorConfig,
) -> Result<PhaseState> {
    let t_end = state.t + duration;
    let mut ode = solver(params, model, state.t, [state.x, state.p], integ)?;
    while ode.t() < t_end {
        ode.step(t_end)?;
    }
    let y = ode.y();
    Ok(PhaseState::new(y[0], y[1], t_end))
}

/// Zero-crossing rule: any strict sign change of `x` is a penetration; a
/// reversal of the initially negative momentum without one is a deflection.
pub fn classify_samples(samples: &[Sample]) -> Classification {
    let mut last_sign = 0.0;
    for s in samples {
        if s.x != 0.0 {
            let sign = s.x.signum();
            if last_sign != 0.0 && sign != last_sign {
                return Classification::Penetration;
            }
            last_sign = sign;
        }
    }
    if samples.iter().any(|s| s.p > 0.0) {
        Classification::Deflection
    } else {
        Classification::Undetermined
    }
}

/// Classification, return time and its excess over the free-particle value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnSummary {
    pub classification: Classification,
    pub return_time: Option<f64>,
    /// `return_time − 2·m·x0/p0`.
    pub delay: Option<f64>,
}

pub fn classify_and_return(traj: &Trajectory) -> ReturnSummary {
    if traj.samples.len() < 2 {
        return ReturnSummary {
            classification: Classification::Undetermined,
            return_time: None,
            delay: None,
        };
    }
    let free = free_return_time(traj.scenario.x0, traj.scenario.p0, &traj.params);
    ReturnSummary {
        classification: classify_samples(&traj.samples),
        return_time: traj.return_time,
        delay: traj.return_time.map(|t| t - free),
    }
}

/// `2·m·x0/p0`.
pub fn free_return_time(x0: f64, p0: f64, params: &PhysicalParams) -> f64 {
    2.0 * params.mass * x0 / p0
}

/// Return time of two classical point charges by quadrature over the
/// approach leg, independent of the ODE integrator.
///
/// With `E = p0²/m + e₀²/(2x0)` and turning point `x_min = e₀²/(2E)`,
/// `t = 2m ∫_{x_min}^{x0} dx / √(m(E − e₀²/(2x)))`; the substitution
/// `x = x_min + u²` removes the inverse-square-root endpoint singularity.
pub fn classical_return_time(x0: f64, p0: f64, params: &PhysicalParams) -> f64 {
    let PhysicalParams { mass, e0sq, .. } = *params;
    if e0sq == 0.0 {
        return free_return_time(x0, p0, params);
    }
    let energy = p0 * p0 / mass + e0sq / (2.0 * x0);
    let x_min = e0sq / (2.0 * energy);
    // E − e₀²/(2x) = (e₀²/2)(x − x_min)/(x·x_min), so u cancels analytically
    let integrand = |u: f64| {
        let x = x_min + u * u;
        2.0 * (2.0 * x * x_min / (mass * e0sq)).sqrt()
    };
    let upper = (x0 - x_min).sqrt();
    let q = quadrature::integrate(integrand, 0.0, upper, 0.0, 1e-13);
    2.0 * mass * q.value
}
