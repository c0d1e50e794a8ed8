//! Return time against initial momentum, and the critical momentum that
//! separates deflection from penetration.

use rayon::prelude::*;

use crate::dynamics::{free_return_time, integrate, Classification, IntegratorConfig};
use crate::error::{Error, Result};
use crate::params::{ModelKind, PhysicalParams, ScenarioConfig};

pub const DEFAULT_GRID_POINTS: usize = 60;
pub const DEFAULT_GRID_RANGE: (f64, f64) = (0.05, 3.0);

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p0: f64,
    pub p0_over_sigma: f64,
    /// `None` when the coherent run did not return within the horizon or failed.
    pub t_ret_coherent: Option<f64>,
    pub t_ret_classical: Option<f64>,
    pub t_ret_free: f64,
    /// Regime of the coherent run.
    pub classification: Classification,
    /// Set when one of the integrations failed.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub params: PhysicalParams,
    pub scenario: ScenarioConfig,
    pub grid_spec: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

/// `n` log-spaced momenta with `p0/σ` running from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize, params: &PhysicalParams) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo * params.sigma],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    let ratio = match i {
                        0 => lo,
                        _ if i == n - 1 => hi,
                        _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
                    };
                    params.sigma * ratio
                })
                .collect()
        }
    }
}

pub fn default_grid(params: &PhysicalParams) -> Vec<f64> {
    log_grid(
        DEFAULT_GRID_RANGE.0,
        DEFAULT_GRID_RANGE.1,
        DEFAULT_GRID_POINTS,
        params,
    )
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Validation {
            field: "grid",
            value: 0.0,
            bound: "non-empty",
        });
    }
    if let Some(&bad) = grid.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::Validation {
            field: "grid",
            value: bad,
            bound: "finite and > 0 at every point",
        });
    }
    Ok(())
}

fn sweep_point(p0: f64, template: &ScenarioConfig, params: &PhysicalParams) -> SweepRow {
    let coherent = template.with_p0(p0);
    let classical = coherent.with_model(ModelKind::ClassicalCoulomb);
    let mut errors = Vec::new();

    let (t_ret_coherent, classification) = match integrate(
        &coherent,
        params,
        &IntegratorConfig::from_scenario(&coherent),
    ) {
        Ok(traj) => (traj.return_time, traj.classification),
        Err(e) => {
            errors.push(format!("{}: {e}", coherent.model));
            (None, Classification::Undetermined)
        }
    };
    let t_ret_classical = match integrate(
        &classical,
        params,
        &IntegratorConfig::from_scenario(&classical),
    ) {
        Ok(traj) => traj.return_time,
        Err(e) => {
            errors.push(format!("classical: {e}"));
            None
        }
    };

    SweepRow {
        p0,
        p0_over_sigma: p0 / params.sigma,
        t_ret_coherent,
        t_ret_classical,
        t_ret_free: free_return_time(template.x0, p0, params),
        classification,
        error: (!errors.is_empty()).then(|| errors.join("; ")),
    }
}

/// Return times of the template's model, classical point charges and free
/// particles at every grid momentum, in ascending `p0` order.
///
/// A failing point is recorded in its row and does not stop the sweep.
pub fn sweep_return_time(
    grid: &[f64],
    template: &ScenarioConfig,
    params: &PhysicalParams,
) -> Result<SweepResult> {
    sweep_return_time_with(grid, template, params, Execution::Parallel)
}

pub fn sweep_return_time_with(
    grid: &[f64],
    template: &ScenarioConfig,
    params: &PhysicalParams,
    execution: Execution,
) -> Result<SweepResult> {
    validate_grid(grid)?;
    params.validate()?;
    template.validate()?;

    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);

    let rows: Vec<SweepRow> = match execution {
        Execution::Serial => sorted
            .iter()
            .map(|&p| sweep_point(p, template, params))
            .collect(),
        Execution::Parallel => sorted
            .par_iter()
            .map(|&p| sweep_point(p, template, params))
            .collect(),
    };

    let default = default_grid(params);
    let grid_spec = if sorted == default {
        format!(
            "{} log-spaced points, p0/sigma in [{}, {}]",
            DEFAULT_GRID_POINTS, DEFAULT_GRID_RANGE.0, DEFAULT_GRID_RANGE.1
        )
    } else {
        format!(
            "{} points, p0 in [{:?}, {:?}]",
            sorted.len(),
            sorted[0],
            sorted[sorted.len() - 1]
        )
    };

    Ok(SweepResult {
        rows,
        params: *params,
        scenario: *template,
        grid_spec,
    })
}

/// Regime of a single run at momentum `p0`.
pub fn classify_momentum(
    p0: f64,
    template: &ScenarioConfig,
    params: &PhysicalParams,
) -> Result<Classification> {
    let sc = template.with_p0(p0);
    Ok(integrate(&sc, params, &IntegratorConfig::from_scenario(&sc))?.classification)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalMomentum {
    pub p_cr: f64,
    /// Final bracket; deflection at the low end, penetration at the high end.
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub tol: f64,
}

/// Bisects the regime boundary inside `bracket` down to width `tol`.
pub fn find_critical_momentum(
    bracket: (f64, f64),
    template: &ScenarioConfig,
    params: &PhysicalParams,
    tol: f64,
) -> Result<CriticalMomentum> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Validation {
            field: "tol",
            value: tol,
            bound: "finite and > 0",
        });
    }
    let (mut lo, mut hi) = bracket;
    if !(lo.is_finite() && lo > 0.0 && hi.is_finite() && hi > lo) {
        return Err(Error::Validation {
            field: "bracket",
            value: hi - lo,
            bound: "0 < p_lo < p_hi",
        });
    }

    let at_lo = classify_momentum(lo, template, params)?;
    let at_hi = classify_momentum(hi, template, params)?;
    if at_lo != Classification::Deflection || at_hi != Classification::Penetration {
        return Err(Error::Bracket {
            p_lo: lo,
            p_hi: hi,
            lo: at_lo,
            hi: at_hi,
        });
    }

    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match classify_momentum(mid, template, params)? {
            Classification::Deflection => lo = mid,
            Classification::Penetration => hi = mid,
            Classification::Undetermined => {
                return Err(Error::Bracket {
                    p_lo: lo,
                    p_hi: hi,
                    lo: Classification::Deflection,
                    hi: Classification::Undetermined,
                })
            }
        }
        iterations += 1;
    }

    Ok(CriticalMomentum {
        p_cr: 0.5 * (lo + hi),
        bracket: (lo, hi),
        iterations,
        tol,
    })
}
