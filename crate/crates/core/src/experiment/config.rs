//! Sweep configuration files.
//!
//! A config is TOML with five tables. Every key is optional and falls back to
//! the reference deployment:
//!
//! ```toml
//! [game]
//! alpha = 1e3
//! beta = 1.0
//! c = 1.0
//! tau = 0.5
//!
//! [channel]
//! sigma2 = 1e-8
//! gamma = 3.5
//! phase_model = "zero"      # or "uniform"
//! # sigma1_sq = 1e-4        # error variance override (default d^-γ)
//! # theta2 = 0.1            # single-antenna non-centrality override
//!
//! [geometry]
//! antennas = 5
//! sensors = 20
//! bs = [-10.0, 0.0]
//! pb = [10.0, 0.0]
//! region = [[-4.0, -10.0], [4.0, -10.0], [4.0, 10.0], [-4.0, 10.0]]
//! # sensor_positions = [[0.0, 0.0]]
//!
//! [sweep]
//! variable = "distance"     # distance | uncertainty | antennas
//! values = [2.0, 4.0, 6.0]
//! relative = false          # uncertainty values in units of d^-γ
//! replications = 100
//! seed = 1
//! solvers = ["nu_min", "nu_max", "sdp", "global_search"]
//! mc_samples = 0
//!
//! [solver]
//! sdp_tol = 1e-9
//! sdp_max_iterations = 200
//! rounding_samples = 1000
//! search_budget = 20000
//! search_restarts = 20
//! search_iterations = 500
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::channel::{PhaseModel, Point, Rect, Scenario};
use crate::error::{Error, Result};
use crate::multinode::{BoundOptions, SdpOptions, SearchOptions};

/// Distances 2, 4, ..., 20.
pub fn default_distance_grid() -> Vec<f64> {
    (1..=10).map(|k| 2.0 * k as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Beacon x-coordinate `d`.
    Distance,
    /// Entry `Σ(1,1)` of the error covariance.
    Uncertainty,
    /// Number of beacon antennas.
    Antennas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    ClosedForm,
    M1Exact,
    NuMin,
    NuMax,
    Sdp,
    GlobalSearch,
}

impl SolverKind {
    pub const ALL: [SolverKind; 6] = [
        SolverKind::ClosedForm,
        SolverKind::M1Exact,
        SolverKind::NuMin,
        SolverKind::NuMax,
        SolverKind::Sdp,
        SolverKind::GlobalSearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::ClosedForm => "closed_form",
            SolverKind::M1Exact => "m1_exact",
            SolverKind::NuMin => "nu_min",
            SolverKind::NuMax => "nu_max",
            SolverKind::Sdp => "sdp",
            SolverKind::GlobalSearch => "global_search",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::validation(format!("unknown solver {s:?}")))
    }
}

/// A fully validated sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub scenario: Scenario,
    pub sweep_variable: SweepVariable,
    pub sweep_values: Vec<f64>,
    /// Uncertainty values are multiples of `d^-γ` rather than absolute.
    pub relative_values: bool,
    pub replications: usize,
    pub base_seed: u64,
    pub solvers: Vec<SolverKind>,
    /// Monte-Carlo draws per sensor for `p_nonoutage_hat`; 0 disables it.
    pub mc_samples: usize,
    /// Error variance override; the default is `d^-γ` per sensor.
    pub sigma1_sq: Option<f64>,
    /// Non-centrality override for single-antenna runs.
    pub theta2: Option<f64>,
    /// Fixed sensor positions; random placement when absent.
    pub sensor_positions: Option<Vec<Point>>,
    pub bounds: BoundOptions,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::default(),
            sweep_variable: SweepVariable::Distance,
            sweep_values: default_distance_grid(),
            relative_values: false,
            replications: 100,
            base_seed: 1,
            solvers: vec![
                SolverKind::NuMin,
                SolverKind::NuMax,
                SolverKind::Sdp,
                SolverKind::GlobalSearch,
            ],
            mc_samples: 0,
            sigma1_sq: None,
            theta2: None,
            sensor_positions: None,
            bounds: BoundOptions::default(),
        }
    }
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_str_over(text, SweepConfig::default())
    }

    /// Parses `text`, taking every absent key from `base`.
    pub fn from_toml_str_over(text: &str, base: SweepConfig) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::validation(format!("config: {e}")))?;
        raw.into_config(base)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_path_over(path, SweepConfig::default())
    }

    pub fn from_path_over(path: impl AsRef<Path>, base: SweepConfig) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str_over(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.sweep_values.is_empty() {
            return Err(Error::validation("sweep.values: must be non-empty"));
        }
        if self.sweep_values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("sweep.values: must be finite"));
        }
        if self.sweep_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("sweep.values: must be strictly increasing"));
        }
        match self.sweep_variable {
            SweepVariable::Distance => {}
            SweepVariable::Uncertainty => {
                if self.sweep_values[0] <= 0.0 {
                    return Err(Error::validation("sweep.values: uncertainty must be positive"));
                }
            }
            SweepVariable::Antennas => {
                if self.sweep_values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
                    return Err(Error::validation(
                        "sweep.values: antenna counts must be integers >= 1",
                    ));
                }
            }
        }
        if self.replications == 0 {
            return Err(Error::validation("sweep.replications: must be at least 1"));
        }
        if self.solvers.is_empty() {
            return Err(Error::validation("sweep.solvers: must be non-empty"));
        }
        if let Some(s) = self.sigma1_sq {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::validation("channel.sigma1_sq: must be positive"));
            }
        }
        if let Some(t) = self.theta2 {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::validation("channel.theta2: must be nonnegative"));
            }
            if self.scenario.antennas != 1 {
                return Err(Error::validation(
                    "channel.theta2: only valid with geometry.antennas = 1",
                ));
            }
        }
        if let Some(p) = &self.sensor_positions {
            if p.len() != self.scenario.sensors {
                return Err(Error::validation(format!(
                    "geometry.sensor_positions: {} positions for {} sensors",
                    p.len(),
                    self.scenario.sensors
                )));
            }
        }
        if !(self.bounds.sdp.tol > 0.0) {
            return Err(Error::validation("solver.sdp_tol: must be positive"));
        }
        if self.bounds.search.budget == 0 {
            return Err(Error::validation("solver.search_budget: must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    game: RawGame,
    #[serde(default)]
    channel: RawChannel,
    #[serde(default)]
    geometry: RawGeometry,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    solver: RawSolver,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGame {
    alpha: Option<f64>,
    beta: Option<f64>,
    c: Option<f64>,
    tau: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    sigma2: Option<f64>,
    gamma: Option<f64>,
    phase_model: Option<PhaseModel>,
    sigma1_sq: Option<f64>,
    theta2: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    antennas: Option<usize>,
    sensors: Option<usize>,
    bs: Option<[f64; 2]>,
    pb: Option<[f64; 2]>,
    region: Option<[[f64; 2]; 4]>,
    sensor_positions: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: Option<SweepVariable>,
    values: Option<Vec<f64>>,
    relative: Option<bool>,
    replications: Option<usize>,
    seed: Option<u64>,
    solvers: Option<Vec<SolverKind>>,
    mc_samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    sdp_tol: Option<f64>,
    sdp_max_iterations: Option<usize>,
    rounding_samples: Option<usize>,
    search_budget: Option<usize>,
    search_restarts: Option<usize>,
    search_iterations: Option<usize>,
}

fn point(p: [f64; 2]) -> Point {
    Point::new(p[0], p[1])
}

impl RawConfig {
    fn into_config(self, base: SweepConfig) -> Result<SweepConfig> {
        let sc = base.scenario.clone();
        let region = match self.geometry.region {
            Some(c) => Rect::from_corners(&c.map(point))
                .map_err(|e| Error::validation(format!("geometry.region: {e}")))?,
            None => sc.sensor_region,
        };
        let scenario = Scenario {
            tau: self.game.tau.unwrap_or(sc.tau),
            beta: self.game.beta.unwrap_or(sc.beta),
            alpha: self.game.alpha.unwrap_or(sc.alpha),
            cost: self.game.c.unwrap_or(sc.cost),
            sigma2: self.channel.sigma2.unwrap_or(sc.sigma2),
            gamma: self.channel.gamma.unwrap_or(sc.gamma),
            antennas: self.geometry.antennas.unwrap_or(sc.antennas),
            sensors: self.geometry.sensors.unwrap_or(sc.sensors),
            bs_position: self.geometry.bs.map(point).unwrap_or(sc.bs_position),
            pb_position: self.geometry.pb.map(point).unwrap_or(sc.pb_position),
            sensor_region: region,
            phase_model: self.channel.phase_model.unwrap_or(sc.phase_model),
        };
        let variable = self.sweep.variable.unwrap_or(base.sweep_variable);
        let values = match (self.sweep.values, variable) {
            (Some(v), _) => v,
            (None, v) if v == base.sweep_variable => base.sweep_values,
            (None, SweepVariable::Distance) => default_distance_grid(),
            (None, _) => {
                return Err(Error::validation(
                    "sweep.values: required unless sweep.variable = \"distance\"",
                ))
            }
        };
        let d = base.bounds.sdp;
        let s = base.bounds.search;
        let r = self.solver;
        let config = SweepConfig {
            scenario,
            sweep_variable: variable,
            sweep_values: values,
            relative_values: self.sweep.relative.unwrap_or(base.relative_values),
            replications: self.sweep.replications.unwrap_or(base.replications),
            base_seed: self.sweep.seed.unwrap_or(base.base_seed),
            solvers: self.sweep.solvers.unwrap_or(base.solvers),
            mc_samples: self.sweep.mc_samples.unwrap_or(base.mc_samples),
            sigma1_sq: self.channel.sigma1_sq.or(base.sigma1_sq),
            theta2: self.channel.theta2.or(base.theta2),
            sensor_positions: match self.geometry.sensor_positions {
                Some(v) => Some(v.into_iter().map(point).collect()),
                None => base.sensor_positions,
            },
            bounds: BoundOptions {
                sdp: SdpOptions {
                    tol: r.sdp_tol.unwrap_or(d.tol),
                    max_iterations: r.sdp_max_iterations.unwrap_or(d.max_iterations),
                    rounding_samples: r.rounding_samples.unwrap_or(d.rounding_samples),
                },
                search: SearchOptions {
                    budget: r.search_budget.unwrap_or(s.budget),
                    restarts: r.search_restarts.unwrap_or(s.restarts),
                    iterations: r.search_iterations.unwrap_or(s.iterations),
                    ..s
                },
            },
        };
        config.validate()?;
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_reference_deployment() {
        let c = SweepConfig::from_toml_str("").unwrap();
        assert_eq!(c, SweepConfig::default());
        assert_eq!(c.sweep_values.first(), Some(&2.0));
        assert_eq!(c.sweep_values.last(), Some(&20.0));
    }

    #[test]
    fn overrides_apply() {
        let c = SweepConfig::from_toml_str(
            r#"
            [game]
            alpha = 50.0
            [geometry]
            antennas = 1
            sensors = 1
            sensor_positions = [[0.0, 0.0]]
            [channel]
            theta2 = 0.1
            [sweep]
            solvers = ["closed_form", "m1_exact"]
            seed = 7
            "#,
        )
        .unwrap();
        assert_eq!(c.scenario.alpha, 50.0);
        assert_eq!(c.theta2, Some(0.1));
        assert_eq!(c.base_seed, 7);
        assert_eq!(c.solvers, vec![SolverKind::ClosedForm, SolverKind::M1Exact]);
        assert_eq!(c.sensor_positions, Some(vec![Point::new(0.0, 0.0)]));
    }

    #[test]
    fn base_supplies_missing_keys() {
        let base = SweepConfig {
            sweep_variable: SweepVariable::Uncertainty,
            sweep_values: vec![1.0, 2.0],
            relative_values: true,
            mc_samples: 5,
            ..SweepConfig::default()
        };
        let c = SweepConfig::from_toml_str_over("[sweep]\nseed = 3", base.clone()).unwrap();
        assert_eq!(c, SweepConfig { base_seed: 3, ..base });
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            ("[sweep]\nvalues = [3.0, 2.0]", "sweep.values"),
            ("[sweep]\nvalues = []", "sweep.values"),
            ("[sweep]\nreplications = 0", "sweep.replications"),
            ("[sweep]\nsolvers = []", "sweep.solvers"),
            ("[sweep]\nvariable = \"uncertainty\"", "sweep.values"),
            ("[channel]\ntheta2 = 0.1", "channel.theta2"),
            ("[game]\ntau = 1.5", "tau"),
            (
                "[geometry]\nsensors = 2\nsensor_positions = [[0.0, 0.0]]",
                "geometry.sensor_positions",
            ),
            (
                "[geometry]\nregion = [[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [2.0, 5.0]]",
                "geometry.region",
            ),
        ];
        for (text, field) in cases {
            let err = SweepConfig::from_toml_str(text).unwrap_err();
            assert!(err.is_validation());
            assert!(err.to_string().contains(field), "{text:?}: {err}");
        }
    }

    #[test]
    fn unknown_keys_and_solvers_rejected() {
        assert!(SweepConfig::from_toml_str("[game]\nalfa = 1.0").is_err());
        assert!(SweepConfig::from_toml_str("[sweep]\nsolvers = [\"magic\"]").is_err());
        assert!("magic".parse::<SolverKind>().is_err());
        for k in SolverKind::ALL {
            assert_eq!(k.name().parse::<SolverKind>().unwrap(), k);
        }
    }
}
