//! Command-line driver: trajectories, return-time sweeps, the critical
//! momentum and energy surfaces, written as CSV.

pub mod csv;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use cohere::params::config_entries;
use cohere::sweep::log_grid;
use cohere::{
    find_critical_momentum, hamiltonian, integrate, kinetic_breakdown, sweep_return_time,
    ConfigOverrides, IntegratorConfig, ModelKind, PhaseState, PhysicalParams, ScenarioConfig,
};

use crate::csv::Cell;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cohere",
    version,
    about = "Head-on collision of two coherent-state electrons"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One run: x, p and the energy terms against time.
    #[command(allow_negative_numbers = true)]
    Trajectory {
        #[command(flatten)]
        common: Common,
    },
    /// Return time against initial momentum for the coherent, classical and free models.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Number of log-spaced grid points.
        #[arg(long, default_value_t = cohere::sweep::DEFAULT_GRID_POINTS)]
        points: usize,
        /// Smallest p0/sigma on the grid.
        #[arg(long, default_value_t = cohere::sweep::DEFAULT_GRID_RANGE.0)]
        grid_min: f64,
        /// Largest p0/sigma on the grid.
        #[arg(long, default_value_t = cohere::sweep::DEFAULT_GRID_RANGE.1)]
        grid_max: f64,
    },
    /// Bisects the momentum separating deflection from penetration.
    #[command(allow_negative_numbers = true)]
    Critical {
        #[command(flatten)]
        common: Common,
        /// Lower end of the bracket [default: 0.2 sigma].
        #[arg(long)]
        p_lo: Option<f64>,
        /// Upper end of the bracket [default: 2 sigma].
        #[arg(long)]
        p_hi: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Energy terms on a rectangular (x, p) grid.
    #[command(allow_negative_numbers = true)]
    Energy {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = -10.0)]
        x_min: f64,
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        #[arg(long, default_value_t = 41)]
        nx: usize,
        #[arg(long, default_value_t = -5.0)]
        p_min: f64,
        #[arg(long, default_value_t = 5.0)]
        p_max: f64,
        #[arg(long, default_value_t = 21)]
        np: usize,
        /// Time at which the spreading model is evaluated.
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Configuration document of `key = value` lines; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long)]
    pub e0sq: Option<f64>,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub p0: Option<f64>,
    /// coherent-frozen, coherent-spreading, classical or free.
    #[arg(long)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub event_tol: Option<f64>,
}

impl Common {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            sigma: self.sigma,
            mass: self.mass,
            hbar: self.hbar,
            e0sq: self.e0sq,
            x0: self.x0,
            p0: self.p0,
            model: self.model,
            t_max: self.t_max,
            rtol: self.rtol,
            atol: self.atol,
            event_tol: self.event_tol,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] cohere::Error),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        }
    }
}

impl From<csv::CsvError> for CliError {
    fn from(e: csv::CsvError) -> Self {
        CliError::Internal(e.to_string())
    }
}

struct Resolved {
    scenario: ScenarioConfig,
    params: PhysicalParams,
}

impl Resolved {
    fn metadata(&self, dataset: &str) -> Vec<(String, String)> {
        let mut meta = vec![("dataset".to_owned(), dataset.to_owned())];
        meta.extend(
            config_entries(&self.scenario, &self.params)
                .into_iter()
                .map(|(k, v)| (k.to_owned(), v)),
        );
        meta
    }
}

fn resolve(common: &Common) -> Result<Resolved, CliError> {
    let (scenario, params) = cohere::load_config(common.config.as_deref(), &common.overrides())?;
    Ok(Resolved { scenario, params })
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Output {
            path: path.display().to_string(),
            source,
        }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Output {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn meta_float(v: Option<f64>) -> String {
    v.map_or_else(|| csv::MISSING.to_owned(), |v| format!("{v:?}"))
}

fn trajectory(common: &Common, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = resolve(common)?;
    let integ = IntegratorConfig::from_scenario(&cfg.scenario);
    let traj = integrate(&cfg.scenario, &cfg.params, &integ)?;
    let mut meta = cfg.metadata(csv::TRAJECTORY.name);
    meta.push(("classification".into(), traj.classification.to_string()));
    meta.push(("return_time".into(), meta_float(traj.return_time)));
    meta.push(("crossing_time".into(), meta_float(traj.crossing_time)));
    meta.push((
        "min_separation".into(),
        format!("{:?}", traj.min_separation),
    ));
    let rows: Vec<Vec<Cell>> = traj
        .samples
        .iter()
        .map(|s| {
            let e = &s.energy;
            [s.t, s.x, s.p, e.t_cl, e.t_conf, e.t_corr, e.v, e.h_total]
                .into_iter()
                .map(Cell::from)
                .collect()
        })
        .collect();
    emit(
        common.out.as_deref(),
        &csv::render(&csv::TRAJECTORY, &meta, &rows)?,
        stdout,
    )
}

fn sweep(
    common: &Common,
    points: usize,
    grid_min: f64,
    grid_max: f64,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = resolve(common)?;
    if points == 0 {
        return Err(CliError::Usage("invalid points = 0: must be >= 1".into()));
    }
    if !(grid_min.is_finite() && grid_min > 0.0 && grid_max.is_finite() && grid_max >= grid_min) {
        return Err(CliError::Usage(format!(
            "invalid grid [{grid_min}, {grid_max}]: need 0 < grid-min <= grid-max"
        )));
    }
    let grid = log_grid(grid_min, grid_max, points, &cfg.params);
    let result = sweep_return_time(&grid, &cfg.scenario, &cfg.params)?;

    let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
    let mut meta = cfg.metadata(csv::SWEEP.name);
    meta.push(("grid".into(), result.grid_spec.clone()));
    meta.push(("failed_points".into(), failed.to_string()));
    let rows: Vec<Vec<Cell>> = result
        .rows
        .iter()
        .map(|r| {
            let class = if r.error.is_some() {
                "error"
            } else {
                r.classification.as_str()
            };
            vec![
                Cell::from(r.p0),
                Cell::from(r.p0_over_sigma),
                Cell::from(r.t_ret_coherent),
                Cell::from(r.t_ret_classical),
                Cell::from(r.t_ret_free),
                Cell::from(class),
            ]
        })
        .collect();
    for r in result.rows.iter().filter(|r| r.error.is_some()) {
        let _ = writeln!(
            stderr,
            "warning: p0 = {:?}: {}",
            r.p0,
            r.error.as_deref().unwrap_or_default()
        );
    }
    emit(
        common.out.as_deref(),
        &csv::render(&csv::SWEEP, &meta, &rows)?,
        stdout,
    )
}

fn critical(
    common: &Common,
    p_lo: Option<f64>,
    p_hi: Option<f64>,
    tol: f64,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = resolve(common)?;
    let sigma = cfg.params.sigma;
    let bracket = (p_lo.unwrap_or(0.2 * sigma), p_hi.unwrap_or(2.0 * sigma));
    let crit = find_critical_momentum(bracket, &cfg.scenario, &cfg.params, tol)?;
    let mut text = String::new();
    for (k, v) in cfg.metadata("critical") {
        text.push_str(&format!("# {k} = {v}\n"));
    }
    let (lo, hi) = crit.bracket;
    for (k, v) in [
        ("p_cr", format!("{:?}", crit.p_cr)),
        ("p_cr_over_sigma", format!("{:?}", crit.p_cr / sigma)),
        ("bracket_lo", format!("{lo:?}")),
        ("bracket_hi", format!("{hi:?}")),
        ("width", format!("{:?}", hi - lo)),
        ("iterations", crit.iterations.to_string()),
        ("tol", format!("{:?}", crit.tol)),
    ] {
        text.push_str(&format!("{k} = {v}\n"));
    }
    emit(common.out.as_deref(), &text, stdout)
}

fn axis(name: &str, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if n == 0 || !(lo.is_finite() && hi.is_finite() && hi >= lo) {
        return Err(CliError::Usage(format!(
            "invalid {name} axis [{lo}, {hi}] with {n} points: need min <= max and at least one point"
        )));
    }
    Ok(match n {
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    })
}

fn energy(
    common: &Common,
    x_range: (f64, f64, usize),
    p_range: (f64, f64, usize),
    t: f64,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = resolve(common)?;
    let xs = axis("x", x_range.0, x_range.1, x_range.2)?;
    let ps = axis("p", p_range.0, p_range.1, p_range.2)?;
    if !t.is_finite() {
        return Err(CliError::Usage(format!("invalid t = {t}: must be finite")));
    }
    let model = cfg.scenario.model;
    let mut undefined = 0;
    let mut rows = Vec::with_capacity(xs.len() * ps.len());
    for &x in &xs {
        for &p in &ps {
            let state = PhaseState::new(x, p, t);
            let row: Vec<Cell> = match hamiltonian(&state, &cfg.params, model) {
                Ok(e) => [x, p, e.t_cl, e.t_conf, e.t_corr, e.v, e.h_total]
                    .into_iter()
                    .map(Cell::from)
                    .collect(),
                // singular or guarded points keep their kinetic terms
                Err(err) if err.is_numerical() => {
                    undefined += 1;
                    let (t_cl, t_conf, t_corr) = kinetic_breakdown(&state, &cfg.params, model);
                    vec![
                        Cell::from(x),
                        Cell::from(p),
                        Cell::from(t_cl),
                        Cell::from(t_conf),
                        Cell::from(t_corr),
                        Cell::Missing,
                        Cell::Missing,
                    ]
                }
                Err(err) => return Err(err.into()),
            };
            rows.push(row);
        }
    }
    let mut meta = cfg.metadata(csv::ENERGY.name);
    meta.push(("t".into(), format!("{t:?}")));
    meta.push((
        "x_grid".into(),
        format!("{:?}..{:?} ({} points)", x_range.0, x_range.1, x_range.2),
    ));
    meta.push((
        "p_grid".into(),
        format!("{:?}..{:?} ({} points)", p_range.0, p_range.1, p_range.2),
    ));
    meta.push(("undefined_points".into(), undefined.to_string()));
    emit(
        common.out.as_deref(),
        &csv::render(&csv::ENERGY, &meta, &rows)?,
        stdout,
    )
}

fn common(command: &Command) -> &Common {
    match command {
        Command::Trajectory { common }
        | Command::Sweep { common, .. }
        | Command::Critical { common, .. }
        | Command::Energy { common, .. } => common,
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Trajectory { common } => trajectory(common, stdout),
        Command::Sweep {
            common,
            points,
            grid_min,
            grid_max,
        } => sweep(common, *points, *grid_min, *grid_max, stdout, stderr),
        Command::Critical {
            common,
            p_lo,
            p_hi,
            tol,
        } => critical(common, *p_lo, *p_hi, *tol, stdout),
        Command::Energy {
            common,
            x_min,
            x_max,
            nx,
            p_min,
            p_max,
            np,
            t,
        } => energy(
            common,
            (*x_min, *x_max, *nx),
            (*p_min, *p_max, *np),
            *t,
            stdout,
        ),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            let code = err.exit_code();
            if code == EXIT_NUMERICAL {
                report_failure(&cli, &err, stderr);
            }
            code
        }
    }
}

/// Echoes the parameters of a failed run so that it can be reproduced.
fn report_failure(cli: &Cli, err: &CliError, stderr: &mut dyn Write) {
    let _ = writeln!(stderr, "failing parameters:");
    if let Ok(cfg) = resolve(common(&cli.command)) {
        for (k, v) in config_entries(&cfg.scenario, &cfg.params) {
            let _ = writeln!(stderr, "  {k} = {v}");
        }
    }
    if let CliError::Core(cohere::Error::Aborted { partial, .. }) = err {
        if let Some(s) = partial.samples.last() {
            let _ = writeln!(
                stderr,
                "last state: t = {:?}, x = {:?}, p = {:?}",
                s.t, s.x, s.p
            );
        }
    }
}
