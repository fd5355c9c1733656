//! Seeded sweeps over distance, uncertainty or antenna count.

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{SolverKind, SweepConfig, SweepVariable};
use crate::channel::{build_channels, place_sensors, ChannelState, Point, Scenario};
use crate::error::{Error, Result};
use crate::game::{
    alpha_eff, estimate_non_outage, gamma_bound, single_node_solve, throughput_for_gain, Equilibrium,
};
use crate::linalg::{ComplexVector, HermitianMatrix};
use crate::multinode::{
    equilibrium_from_nu, global_search_with, nu_bounds, solve_sdp_with, WeightedInstance,
};
use crate::rng::{splitmix64, RandomStream};
use crate::single_antenna::{chi_square_params, equilibrium_m1_exact};

/// One solver's equilibrium for one sweep value and replication.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub sweep_value: f64,
    pub replication: usize,
    /// Seed of the replication's stream; reproduces its placement and phases.
    pub seed: u64,
    pub solver: SolverKind,
    /// Gain value behind the equilibrium: `ν` (or `|h_s|²μ*`), `η` for `m1_exact`.
    pub nu: f64,
    pub rho_star: f64,
    pub p_star: f64,
    pub u_bs: f64,
    pub u_pb: f64,
    /// `minᵢ Γᵢ` at the equilibrium.
    pub gamma_min: f64,
    /// Worst-sensor Monte-Carlo non-outage, when sampling is enabled and a beam exists.
    pub p_nonoutage_hat: Option<f64>,
    /// `|w*ₘ|²·P*` when the solver produces a beam.
    pub per_antenna_power: Option<Vec<f64>>,
}

/// Seed of replication `r` under `base_seed`.
pub fn replication_seed(base_seed: u64, replication: usize) -> u64 {
    splitmix64(base_seed ^ splitmix64(replication as u64))
}

const PLACEMENT: u64 = 1;
const PHASES: u64 = 2;
const SOLVERS: u64 = 3;
const MONTE_CARLO: u64 = 4;

/// Runs every requested solver for each sweep value and replication.
///
/// Within a replication the sensor placement and channel phases are shared by
/// all sweep values, so only the swept quantity changes along a curve. Rows are
/// sorted by `(sweep_value, replication, solver name)` regardless of the order
/// replications finish in.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    if config.sweep_variable == SweepVariable::Uncertainty {
        check_uncertainty(config)?;
    }
    let per_rep: Vec<Vec<SweepRecord>> = (0..config.replications)
        .into_par_iter()
        .map(|r| run_replication(config, r))
        .collect::<Result<_>>()?;
    let mut records: Vec<SweepRecord> = per_rep.into_iter().flatten().collect();
    sort_records(&mut records);
    Ok(records)
}

/// Distance sweep: the beacon sits at `(d, 0)` for each `d`.
pub fn run_distance_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    if config.sweep_variable != SweepVariable::Distance {
        return Err(Error::validation("sweep.variable: expected \"distance\""));
    }
    run_sweep(config)
}

/// Uncertainty sweep for one sensor: `Σ(1,1) = ζ`, other diagonal entries at `d^-γ`.
pub fn run_uncertainty_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    if config.sweep_variable != SweepVariable::Uncertainty {
        return Err(Error::validation("sweep.variable: expected \"uncertainty\""));
    }
    run_sweep(config)
}

fn check_uncertainty(config: &SweepConfig) -> Result<()> {
    if config.scenario.sensors != 1 {
        return Err(Error::validation(
            "geometry.sensors: uncertainty sweep needs exactly one sensor",
        ));
    }
    if config.scenario.antennas < 2 {
        return Err(Error::validation(
            "geometry.antennas: uncertainty sweep needs at least two antennas",
        ));
    }
    Ok(())
}

pub(crate) fn sort_records(records: &mut [SweepRecord]) {
    records.sort_by(|a, b| {
        a.sweep_value
            .total_cmp(&b.sweep_value)
            .then(a.replication.cmp(&b.replication))
            .then(a.solver.name().cmp(b.solver.name()))
    });
}

/// Scenario with the swept quantity applied (distance and antenna count).
pub(crate) fn scenario_at(config: &SweepConfig, value: f64) -> Scenario {
    let mut sc = config.scenario.clone();
    match config.sweep_variable {
        SweepVariable::Distance => sc.pb_position = Point::new(value, 0.0),
        SweepVariable::Antennas => sc.antennas = value as usize,
        SweepVariable::Uncertainty => {}
    }
    sc
}

pub(crate) fn positions(config: &SweepConfig, stream: &RandomStream) -> Result<Vec<Point>> {
    match &config.sensor_positions {
        Some(p) => Ok(p.clone()),
        None => place_sensors(&config.scenario, &mut stream.derive(PLACEMENT)),
    }
}

/// Channels for one sweep value, with the config's variance overrides and the
/// swept covariance entry applied.
pub(crate) fn channels_at(
    config: &SweepConfig,
    scenario: &Scenario,
    value: f64,
    positions: &[Point],
    stream: &RandomStream,
) -> Result<ChannelState> {
    let ch = build_channels(scenario, positions, &mut stream.derive(PHASES))?;
    let m = scenario.antennas;
    let mut sigma_mat = ch.sigma_mat.clone();
    if let Some(s) = config.sigma1_sq {
        sigma_mat = vec![HermitianMatrix::identity(m).scale(s); ch.sensors()];
    }
    let mut h_hat = ch.h_hat.clone();
    if let Some(theta2) = config.theta2 {
        // θ² = 2|ĥ|²/σ₁², keeping the estimate's phase.
        for (h, s) in h_hat.iter_mut().zip(&sigma_mat) {
            let target = (theta2 * s.get(0, 0).re / 2.0).sqrt();
            let phase = if h[0].norm() > 0.0 {
                h[0] / h[0].norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            *h = ComplexVector::new(vec![phase * target])?;
        }
    }
    if config.sweep_variable == SweepVariable::Uncertainty {
        for (i, s) in sigma_mat.iter_mut().enumerate() {
            let zeta = if config.relative_values {
                value * scenario.path_gain(positions[i].distance(&scenario.pb_position))
            } else {
                value
            };
            let diag: Vec<f64> = (0..m)
                .map(|k| if k == 0 { zeta } else { s.get(k, k).re })
                .collect();
            *s = HermitianMatrix::diag(&diag);
        }
    }
    ChannelState::from_parts(h_hat, sigma_mat, ch.h_s, ch.sensor_positions)
}

fn run_replication(config: &SweepConfig, replication: usize) -> Result<Vec<SweepRecord>> {
    let seed = replication_seed(config.base_seed, replication);
    let stream = RandomStream::new(seed, 0);
    let pos = positions(config, &stream)?;
    let mut out = Vec::new();
    for (vi, &value) in config.sweep_values.iter().enumerate() {
        let sc = scenario_at(config, value);
        let ch = channels_at(config, &sc, value, &pos, &stream)?;
        let solver_stream = stream.derive(SOLVERS).derive(vi as u64);
        let mc_stream = stream.derive(MONTE_CARLO).derive(vi as u64);
        let mut ctx = Context::new(config, &sc, &ch, &solver_stream);
        for &kind in &config.solvers {
            let (eq, nu) = ctx.solve(kind)?;
            let gamma_min = match &eq.w_star {
                Some(w) => min_gamma(eq.p_star, w, &ch, &sc)?,
                None => throughput_for_gain(&sc, 1.0, nu, eq.p_star) / sc.beta,
            };
            let p_nonoutage_hat = match (&eq.w_star, config.mc_samples) {
                (Some(w), n) if n > 0 => {
                    let mut s = mc_stream.derive(kind as u64);
                    let mut worst = f64::INFINITY;
                    for i in 0..ch.sensors() {
                        let (p, _) = estimate_non_outage(eq.p_star, w, &ch, i, &sc, n, &mut s)?;
                        worst = worst.min(p);
                    }
                    Some(worst)
                }
                _ => None,
            };
            out.push(SweepRecord {
                sweep_value: value,
                replication,
                seed,
                solver: kind,
                nu,
                rho_star: eq.rho_star,
                p_star: eq.p_star,
                u_bs: eq.u_bs,
                u_pb: eq.u_pb,
                gamma_min,
                p_nonoutage_hat,
                per_antenna_power: if sc.antennas > 1 {
                    eq.per_antenna_power()
                } else {
                    None
                },
            });
        }
    }
    Ok(out)
}

fn min_gamma(power: f64, w: &ComplexVector, ch: &ChannelState, sc: &Scenario) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for i in 0..ch.sensors() {
        worst = worst.min(gamma_bound(power, w, ch, i, sc)?);
    }
    Ok(worst)
}

/// Lazily shared per-instance work so the bounds are computed at most once.
struct Context<'a> {
    config: &'a SweepConfig,
    scenario: &'a Scenario,
    channels: &'a ChannelState,
    stream: &'a RandomStream,
    instance: Option<WeightedInstance>,
    bounds: Option<(f64, f64)>,
}

impl<'a> Context<'a> {
    fn new(
        config: &'a SweepConfig,
        scenario: &'a Scenario,
        channels: &'a ChannelState,
        stream: &'a RandomStream,
    ) -> Self {
        Self {
            config,
            scenario,
            channels,
            stream,
            instance: None,
            bounds: None,
        }
    }

    fn instance(&mut self) -> Result<&WeightedInstance> {
        if self.instance.is_none() {
            self.instance = Some(WeightedInstance::from_channels(self.channels)?);
        }
        Ok(self.instance.as_ref().expect("just set"))
    }

    fn bounds(&mut self) -> Result<(f64, f64)> {
        if let Some(b) = self.bounds {
            return Ok(b);
        }
        let b = nu_bounds(self.instance()?)?;
        self.bounds = Some(b);
        Ok(b)
    }

    /// Equilibrium and the gain value it was computed from.
    fn solve(&mut self, kind: SolverKind) -> Result<(Equilibrium, f64)> {
        let sc = self.scenario;
        match kind {
            SolverKind::ClosedForm => {
                let eq = single_node_solve(self.channels, sc)?;
                let nu = self.channels.bs_gain(0) * eq.nu_or_mu;
                Ok((eq, nu))
            }
            SolverKind::M1Exact => {
                let sigma1_sq = self.channels.sigma_mat[0].get(0, 0).re;
                let params = chi_square_params(self.channels, sc, sigma1_sq)?;
                let mut eq = equilibrium_m1_exact(&params, alpha_eff(sc), sc.tau, sc.cost)?;
                eq.w_star = Some(ComplexVector::basis(1, 0));
                Ok((eq, params.eta))
            }
            SolverKind::NuMin => {
                let nu = self.bounds()?.0;
                Ok((equilibrium_from_nu(nu, sc)?, nu))
            }
            SolverKind::NuMax => {
                let nu = self.bounds()?.1;
                Ok((equilibrium_from_nu(nu, sc)?, nu))
            }
            SolverKind::Sdp => {
                let opts = self.config.bounds.sdp;
                let mut s = self.stream.derive(1);
                let sol = solve_sdp_with(self.instance()?, &opts, &mut s)?;
                let mut eq = equilibrium_from_nu(sol.nu_sdp, sc)?;
                eq.w_star = Some(sol.w_sdp);
                Ok((eq, sol.nu_sdp))
            }
            SolverKind::GlobalSearch => {
                let opts = self.config.bounds.search;
                let mut s = self.stream.derive(2);
                let (nu, w) = global_search_with(self.instance()?, &opts, &mut s)?;
                let mut eq = equilibrium_from_nu(nu, sc)?;
                eq.w_star = Some(w);
                Ok((eq, nu))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(solvers: Vec<SolverKind>) -> SweepConfig {
        SweepConfig {
            sweep_values: vec![4.0, 8.0],
            replications: 3,
            solvers,
            scenario: Scenario {
                sensors: 4,
                antennas: 3,
                ..Scenario::default()
            },
            ..SweepConfig::default()
        }
    }

    #[test]
    fn one_row_per_value_replication_solver() {
        let c = small(vec![
            SolverKind::NuMax,
            SolverKind::NuMin,
            SolverKind::GlobalSearch,
        ]);
        let rows = run_distance_sweep(&c).unwrap();
        assert_eq!(rows.len(), 2 * 3 * 3);
        assert_eq!(rows[0].solver, SolverKind::GlobalSearch);
        assert_eq!(rows[1].solver, SolverKind::NuMax);
        assert_eq!(rows[2].solver, SolverKind::NuMin);
        assert!(rows.windows(2).all(|w| w[0].sweep_value <= w[1].sweep_value));
        for r in &rows {
            if let Some(p) = &r.per_antenna_power {
                assert!((p.iter().sum::<f64>() - r.p_star).abs() <= 1e-8 * r.p_star.max(1.0));
            }
        }
    }

    #[test]
    fn placement_shared_along_the_curve() {
        let c = small(vec![SolverKind::NuMin]);
        let rows = run_distance_sweep(&c).unwrap();
        let seeds: Vec<u64> = rows
            .iter()
            .filter(|r| r.replication == 1)
            .map(|r| r.seed)
            .collect();
        assert_eq!(seeds.len(), 2);
        assert_eq!(seeds[0], seeds[1]);
        assert_eq!(seeds[0], replication_seed(c.base_seed, 1));
    }

    #[test]
    fn replications_are_independent_of_count() {
        let c = small(vec![SolverKind::Sdp]);
        let three = run_distance_sweep(&c).unwrap();
        let one = run_distance_sweep(&SweepConfig { replications: 1, ..c }).unwrap();
        let first: Vec<_> = three.iter().filter(|r| r.replication == 0).cloned().collect();
        assert_eq!(first, one);
    }

    #[test]
    fn uncertainty_sweep_preconditions() {
        let mut c = SweepConfig {
            sweep_variable: SweepVariable::Uncertainty,
            sweep_values: vec![1.0, 2.0],
            relative_values: true,
            solvers: vec![SolverKind::ClosedForm],
            replications: 1,
            ..SweepConfig::default()
        };
        assert!(run_uncertainty_sweep(&c).unwrap_err().is_validation());
        c.scenario.sensors = 1;
        c.scenario.antennas = 1;
        assert!(run_uncertainty_sweep(&c).unwrap_err().is_validation());
        c.scenario.antennas = 5;
        assert!(run_distance_sweep(&c).unwrap_err().is_validation());
        assert_eq!(run_uncertainty_sweep(&c).unwrap().len(), 2);
    }

    #[test]
    fn symmetric_covariance_follows_the_estimate() {
        // ζ equal to the other diagonal entries: the beam is ĥ/‖ĥ‖, equal power.
        let c = SweepConfig {
            sweep_variable: SweepVariable::Uncertainty,
            sweep_values: vec![1.0],
            relative_values: true,
            solvers: vec![SolverKind::ClosedForm],
            replications: 1,
            sensor_positions: Some(vec![Point::new(0.0, 0.0)]),
            scenario: Scenario {
                sensors: 1,
                antennas: 5,
                ..Scenario::default()
            },
            ..SweepConfig::default()
        };
        let rows = run_uncertainty_sweep(&c).unwrap();
        let p = rows[0].per_antenna_power.as_ref().unwrap();
        for v in p {
            assert!((v - rows[0].p_star / 5.0).abs() <= 1e-10 * rows[0].p_star);
        }
    }

    #[test]
    fn theta2_override_sets_eta() {
        let c = SweepConfig {
            sweep_values: vec![10.0],
            replications: 1,
            solvers: vec![SolverKind::M1Exact, SolverKind::ClosedForm],
            theta2: Some(0.1),
            sensor_positions: Some(vec![Point::new(0.0, 0.0)]),
            scenario: Scenario {
                sensors: 1,
                antennas: 1,
                ..Scenario::default()
            },
            ..SweepConfig::default()
        };
        let rows = run_distance_sweep(&c).unwrap();
        let m1 = rows.iter().find(|r| r.solver == SolverKind::M1Exact).unwrap();
        let sc = &c.scenario;
        let s = sc.path_gain(10.0);
        let want = 15.0 * 0.5 * sc.sigma2 / (0.5 * sc.path_gain(10.0) * s * 1.05);
        assert!((m1.nu - want).abs() <= 1e-12 * want, "{} vs {want}", m1.nu);
        assert!(m1.rho_star > sc.cost);
        assert!(m1.per_antenna_power.is_none());
    }
}
