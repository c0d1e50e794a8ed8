//! Head-on collision of two coherent-state electrons in the centre-of-mass
//! frame.
//!
//! The crate evaluates the kinetic and Coulomb expectation values of the
//! antisymmetrised (triplet) two-electron state, integrates the resulting
//! semiclassical equations for the mean position and momentum, and sweeps the
//! return time over the initial momentum.
//!
//! All quantities are in atomic units unless [`PhysicalParams`] says otherwise.

pub mod dynamics;
pub mod energy;
pub mod error;
pub mod ode;
pub mod params;
pub mod quadrature;
pub mod special;
pub mod sweep;

pub use dynamics::{
    classical_return_time, classify_and_return, free_return_time, integrate, propagate, rhs,
    Classification, IntegratorConfig, ReturnSummary, Sample, Trajectory,
};
pub use energy::{
    alpha_sq, coulomb_expectation, grad_hamiltonian, hamiltonian, kinetic_breakdown, overlap_sq,
    CoulombArguments, EnergyBreakdown, Gradient, PhaseState,
};
pub use error::{Error, Result};
pub use params::{
    load_config, load_config_str, ConfigOverrides, ModelKind, PhysicalParams, ScenarioConfig,
};
pub use sweep::{
    default_grid, find_critical_momentum, sweep_return_time, CriticalMomentum, SweepResult,
    SweepRow,
};
