//! Unit system, physical constants and run configuration.
//!
//! Everything is expressed in atomic units by default (ħ = m = e₀² = 1). The
//! constants stay configurable so that unit-scaling checks can be run.
//!
//! Configuration documents are flat `key = value` lines with `#` comments.
//! Keys are the field names of [`PhysicalParams`] and [`ScenarioConfig`].
//! Values given through [`ConfigOverrides`] (the CLI flags) take precedence
//! over the document.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Momentum uncertainty of every Cartesian component.
    pub sigma: f64,
    pub mass: f64,
    pub hbar: f64,
    /// Squared elementary charge; zero switches the interaction off.
    pub e0sq: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            mass: 1.0,
            hbar: 1.0,
            e0sq: 1.0,
        }
    }
}

impl PhysicalParams {
    /// Wavepacket spreading frequency 2σ²/(ħm).
    pub fn omega(&self) -> f64 {
        2.0 * self.sigma * self.sigma / (self.hbar * self.mass)
    }

    pub fn validate(&self) -> Result<()> {
        positive("sigma", self.sigma)?;
        positive("mass", self.mass)?;
        positive("hbar", self.hbar)?;
        if !(self.e0sq.is_finite() && self.e0sq >= 0.0) {
            return Err(Error::Validation {
                field: "e0sq",
                value: self.e0sq,
                bound: "finite and >= 0",
            });
        }
        Ok(())
    }
}

/// Which effective Hamiltonian drives the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ModelKind {
    /// Coherent-state energy with the spreading factor held at its t = 0 value.
    #[default]
    CoherentFrozen,
    /// Coherent-state energy with the explicit wall-clock spreading.
    CoherentSpreading,
    /// Point charges.
    ClassicalCoulomb,
    /// Non-interacting point particles.
    Free,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::CoherentFrozen,
        ModelKind::CoherentSpreading,
        ModelKind::ClassicalCoulomb,
        ModelKind::Free,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::CoherentFrozen => "coherent-frozen",
            ModelKind::CoherentSpreading => "coherent-spreading",
            ModelKind::ClassicalCoulomb => "classical",
            ModelKind::Free => "free",
        }
    }

    pub fn is_coherent(self) -> bool {
        matches!(
            self,
            ModelKind::CoherentFrozen | ModelKind::CoherentSpreading
        )
    }

    /// True when the Hamiltonian has no explicit time dependence.
    pub fn is_autonomous(self) -> bool {
        self != ModelKind::CoherentSpreading
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownModel(pub String);

impl fmt::Display for UnknownModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown model `{}` (expected coherent-frozen, coherent-spreading, classical or free)",
            self.0
        )
    }
}

impl std::error::Error for UnknownModel {}

impl FromStr for ModelKind {
    type Err = UnknownModel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| UnknownModel(s.to_owned()))
    }
}

/// One head-on collision run.
///
/// Electron 1 starts at `x0` moving inward with momentum `-p0`; electron 2
/// is its mirror image, so the initial separation is `2 * x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub x0: f64,
    pub p0: f64,
    pub model: ModelKind,
    pub t_max: f64,
    pub rtol: f64,
    pub atol: f64,
    pub event_tol: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            x0: 2.5,
            p0: 1.0,
            model: ModelKind::CoherentFrozen,
            t_max: 200.0,
            rtol: 1e-10,
            atol: 1e-12,
            event_tol: 1e-8,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        positive("x0", self.x0)?;
        positive("p0", self.p0)?;
        positive("t_max", self.t_max)?;
        positive("rtol", self.rtol)?;
        positive("atol", self.atol)?;
        positive("event_tol", self.event_tol)?;
        Ok(())
    }

    pub fn with_p0(self, p0: f64) -> Self {
        Self { p0, ..self }
    }

    pub fn with_model(self, model: ModelKind) -> Self {
        Self { model, ..self }
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Validation {
            field,
            value,
            bound: "finite and > 0",
        })
    }
}

/// Values supplied on the command line; `None` leaves the file or default value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub sigma: Option<f64>,
    pub mass: Option<f64>,
    pub hbar: Option<f64>,
    pub e0sq: Option<f64>,
    pub x0: Option<f64>,
    pub p0: Option<f64>,
    pub model: Option<ModelKind>,
    pub t_max: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub event_tol: Option<f64>,
}

impl ConfigOverrides {
    fn apply(&self, scenario: &mut ScenarioConfig, params: &mut PhysicalParams) {
        fn set<T: Copy>(slot: &mut T, value: Option<T>) {
            if let Some(v) = value {
                *slot = v;
            }
        }
        set(&mut params.sigma, self.sigma);
        set(&mut params.mass, self.mass);
        set(&mut params.hbar, self.hbar);
        set(&mut params.e0sq, self.e0sq);
        set(&mut scenario.x0, self.x0);
        set(&mut scenario.p0, self.p0);
        set(&mut scenario.model, self.model);
        set(&mut scenario.t_max, self.t_max);
        set(&mut scenario.rtol, self.rtol);
        set(&mut scenario.atol, self.atol);
        set(&mut scenario.event_tol, self.event_tol);
    }
}

/// Resolves a configuration from an optional document plus overrides.
pub fn load_config(
    path: Option<&Path>,
    overrides: &ConfigOverrides,
) -> Result<(ScenarioConfig, PhysicalParams)> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|source| Error::Io {
            path: p.display().to_string(),
            source,
        })?,
        None => String::new(),
    };
    load_config_str(&text, overrides)
}

pub fn load_config_str(
    text: &str,
    overrides: &ConfigOverrides,
) -> Result<(ScenarioConfig, PhysicalParams)> {
    let from_file = parse_document(text)?;
    let (mut scenario, mut params) = (ScenarioConfig::default(), PhysicalParams::default());
    // document first, flags second
    from_file.apply(&mut scenario, &mut params);
    overrides.apply(&mut scenario, &mut params);
    params.validate()?;
    scenario.validate()?;
    Ok((scenario, params))
}

fn parse_document(text: &str) -> Result<ConfigOverrides> {
    let mut out = ConfigOverrides::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: line_no,
                key: line.to_owned(),
                message: "expected `key = value`".into(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            key: key.to_owned(),
            message,
        };
        let num = || {
            value
                .parse::<f64>()
                .map_err(|e| parse_err(format!("`{value}`: {e}")))
        };
        match key {
            "sigma" => out.sigma = Some(num()?),
            "mass" => out.mass = Some(num()?),
            "hbar" => out.hbar = Some(num()?),
            "e0sq" => out.e0sq = Some(num()?),
            "x0" => out.x0 = Some(num()?),
            "p0" => out.p0 = Some(num()?),
            "t_max" => out.t_max = Some(num()?),
            "rtol" => out.rtol = Some(num()?),
            "atol" => out.atol = Some(num()?),
            "event_tol" => out.event_tol = Some(num()?),
            "model" => {
                out.model = Some(
                    value
                        .parse()
                        .map_err(|e: UnknownModel| parse_err(e.to_string()))?,
                )
            }
            _ => return Err(parse_err("unknown key".into())),
        }
    }
    Ok(out)
}

/// Ordered `(key, value)` pairs of a resolved configuration.
///
/// Floats are written with `{:?}`, which round-trips exactly through
/// [`load_config_str`].
pub fn config_entries(
    scenario: &ScenarioConfig,
    params: &PhysicalParams,
) -> Vec<(&'static str, String)> {
    vec![
        ("sigma", format!("{:?}", params.sigma)),
        ("mass", format!("{:?}", params.mass)),
        ("hbar", format!("{:?}", params.hbar)),
        ("e0sq", format!("{:?}", params.e0sq)),
        ("x0", format!("{:?}", scenario.x0)),
        ("p0", format!("{:?}", scenario.p0)),
        ("model", scenario.model.to_string()),
        ("t_max", format!("{:?}", scenario.t_max)),
        ("rtol", format!("{:?}", scenario.rtol)),
        ("atol", format!("{:?}", scenario.atol)),
        ("event_tol", format!("{:?}", scenario.event_tol)),
    ]
}

/// Serialises a configuration as a document accepted by [`load_config_str`].
pub fn to_document(scenario: &ScenarioConfig, params: &PhysicalParams) -> String {
    config_entries(scenario, params)
        .into_iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_input_gives_defaults() {
        let (sc, pp) = load_config_str("", &ConfigOverrides::default()).unwrap();
        assert_eq!(sc, ScenarioConfig::default());
        assert_eq!(pp, PhysicalParams::default());
        assert_eq!(pp.omega(), 2.0);
        assert_eq!(sc.x0, 2.5);
        assert_eq!(sc.t_max, 200.0);
        assert_eq!(sc.rtol, 1e-10);
        assert_eq!(sc.atol, 1e-12);
        assert_eq!(sc.event_tol, 1e-8);
    }

    #[test]
    fn negative_sigma_is_rejected() {
        let err = load_config_str("sigma = -1", &ConfigOverrides::default()).unwrap_err();
        match err {
            Error::Validation { field, .. } => assert_eq!(field, "sigma"),
            other => panic!("unexpected {other:?}"),
        }
        let ov = ConfigOverrides {
            sigma: Some(-1.0),
            ..Default::default()
        };
        assert!(matches!(
            load_config_str("", &ov),
            Err(Error::Validation { field: "sigma", .. })
        ));
    }

    #[test]
    fn flags_override_file() {
        let ov = ConfigOverrides {
            p0: Some(2.0),
            ..Default::default()
        };
        let (sc, _) = load_config_str("p0 = 0.5\nx0 = 3 # comment\n", &ov).unwrap();
        assert_eq!(sc.p0, 2.0);
        assert_eq!(sc.x0, 3.0);
    }

    #[test]
    fn zero_charge_is_allowed_but_negative_is_not() {
        assert!(load_config_str("e0sq = 0", &ConfigOverrides::default()).is_ok());
        assert!(matches!(
            load_config_str("e0sq = -0.5", &ConfigOverrides::default()),
            Err(Error::Validation { field: "e0sq", .. })
        ));
    }

    #[test]
    fn malformed_documents_name_the_key() {
        match load_config_str("# header\nrtol = fast\n", &ConfigOverrides::default()) {
            Err(Error::Parse { line, key, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(key, "rtol");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            load_config_str("speed = 3", &ConfigOverrides::default()),
            Err(Error::Parse { key, .. }) if key == "speed"
        ));
        assert!(matches!(
            load_config_str("model = quantum", &ConfigOverrides::default()),
            Err(Error::Parse { key, .. }) if key == "model"
        ));
        assert!(matches!(
            load_config_str("just words", &ConfigOverrides::default()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn model_names_are_stable() {
        for m in ModelKind::ALL {
            assert_eq!(m.as_str().parse::<ModelKind>().unwrap(), m);
        }
        assert_eq!(ModelKind::ClassicalCoulomb.as_str(), "classical");
    }

    fn finite_positive() -> impl Strategy<Value = f64> {
        (1e-6f64..1e6).prop_map(|v| v)
    }

    proptest! {
        #[test]
        fn document_round_trip(
            sigma in finite_positive(), mass in finite_positive(), hbar in finite_positive(),
            e0sq in 0.0f64..10.0, x0 in finite_positive(), p0 in finite_positive(),
            model in prop::sample::select(ModelKind::ALL.to_vec()),
            t_max in finite_positive(), rtol in 1e-14f64..1e-2, atol in 1e-16f64..1e-2,
            event_tol in 1e-12f64..1e-2,
        ) {
            let sc = ScenarioConfig { x0, p0, model, t_max, rtol, atol, event_tol };
            let pp = PhysicalParams { sigma, mass, hbar, e0sq };
            let doc = to_document(&sc, &pp);
            let (sc2, pp2) = load_config_str(&doc, &ConfigOverrides::default()).unwrap();
            prop_assert_eq!(sc, sc2);
            prop_assert_eq!(pp, pp2);
            prop_assert_eq!(pp2.omega(), 2.0 * sigma * sigma / (hbar * mass));
        }
    }
}
