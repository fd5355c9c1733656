//! Monte-Carlo check of the non-outage bound at equilibrium.

use super::config::SweepConfig;
use super::sweep::{channels_at, positions, replication_seed, scenario_at};
use crate::channel::{ChannelState, Scenario};
use crate::error::{Error, Result};
use crate::game::{estimate_non_outage, gamma_bound, single_node_solve};
use crate::linalg::ComplexVector;
use crate::multinode::{equilibrium_from_nu, global_search_with, WeightedInstance};
use crate::rng::RandomStream;

/// Minimum sample count accepted by [`validate_bound`].
pub const MIN_MC_SAMPLES: usize = 10_000;

/// One sensor's empirical non-outage against its bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheckRow {
    pub sweep_value: f64,
    pub replication: usize,
    pub seed: u64,
    pub sensor: usize,
    pub p_star: f64,
    pub p_hat: f64,
    pub std_err: f64,
    /// Raw `Γᵢ`, possibly above 1.
    pub gamma: f64,
}

impl BoundCheckRow {
    /// `p_hat − 3·std_err − min(1, Γ)`; positive means a violation.
    pub fn margin(&self) -> f64 {
        self.p_hat - 3.0 * self.std_err - self.gamma.min(1.0)
    }

    pub fn violated(&self) -> bool {
        self.margin() > 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub rows: Vec<BoundCheckRow>,
}

impl BoundReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violated()).count()
    }
}

/// Rows for every sensor at power `power` and beam `w`. The sweep fields are
/// left at zero for the caller to fill in.
pub fn check_bound(
    power: f64,
    w: &ComplexVector,
    channels: &ChannelState,
    scenario: &Scenario,
    mc_samples: usize,
    stream: &RandomStream,
) -> Result<Vec<BoundCheckRow>> {
    (0..channels.sensors())
        .map(|i| {
            let mut s = stream.derive(i as u64);
            let (p_hat, std_err) = estimate_non_outage(power, w, channels, i, scenario, mc_samples, &mut s)?;
            Ok(BoundCheckRow {
                sweep_value: 0.0,
                replication: 0,
                seed: 0,
                sensor: i,
                p_star: power,
                p_hat,
                std_err,
                gamma: gamma_bound(power, w, channels, i, scenario)?,
            })
        })
        .collect()
}

/// Samples each sensor's throughput at the equilibrium of every sweep point.
///
/// One sensor uses the eigenvector solution; several sensors use the
/// global-search beam and its value `ν`.
pub fn validate_bound(config: &SweepConfig) -> Result<BoundReport> {
    config.validate()?;
    if config.mc_samples < MIN_MC_SAMPLES {
        return Err(Error::validation(format!(
            "sweep.mc_samples: bound validation needs at least {MIN_MC_SAMPLES}, got {}",
            config.mc_samples
        )));
    }
    let mut rows = Vec::new();
    for replication in 0..config.replications {
        let seed = replication_seed(config.base_seed, replication);
        let stream = RandomStream::new(seed, 0);
        let pos = positions(config, &stream)?;
        for (vi, &value) in config.sweep_values.iter().enumerate() {
            let sc = scenario_at(config, value);
            let ch = channels_at(config, &sc, value, &pos, &stream)?;
            let (power, w) = if ch.sensors() == 1 {
                let eq = single_node_solve(&ch, &sc)?;
                (eq.p_star, eq.w_star.expect("single-node solution carries a beam"))
            } else {
                let inst = WeightedInstance::from_channels(&ch)?;
                let mut s = stream.derive(3).derive(vi as u64).derive(2);
                let (nu, w) = global_search_with(&inst, &config.bounds.search, &mut s)?;
                (equilibrium_from_nu(nu, &sc)?.p_star, w)
            };
            let mc = stream.derive(4).derive(vi as u64);
            for mut row in check_bound(power, &w, &ch, &sc, config.mc_samples, &mc)? {
                row.sweep_value = value;
                row.replication = replication;
                row.seed = seed;
                rows.push(row);
            }
        }
    }
    Ok(BoundReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Point;
    use crate::linalg::HermitianMatrix;
    use num_complex::Complex64;

    fn scalar(sigma: f64) -> (ChannelState, Scenario) {
        let sc = Scenario {
            sensors: 1,
            antennas: 1,
            sigma2: 1.0,
            ..Scenario::default()
        };
        let ch = ChannelState::from_parts(
            vec![ComplexVector::from_real(&[2.0])],
            vec![HermitianMatrix::diag(&[sigma])],
            vec![Complex64::new(1.0, 0.0)],
            vec![Point::new(0.0, 0.0)],
        )
        .unwrap();
        (ch, sc)
    }

    #[test]
    fn deterministic_channel_above_threshold() {
        let (ch, sc) = scalar(0.0);
        let w = ComplexVector::basis(1, 0);
        let rows = check_bound(100.0, &w, &ch, &sc, 1000, &RandomStream::new(1, 0)).unwrap();
        assert_eq!(rows[0].p_hat, 1.0);
        assert!(rows[0].gamma >= 1.0);
        assert!(!rows[0].violated());
    }

    #[test]
    fn zero_power() {
        let (ch, sc) = scalar(0.5);
        let w = ComplexVector::basis(1, 0);
        let rows = check_bound(0.0, &w, &ch, &sc, 1000, &RandomStream::new(1, 0)).unwrap();
        assert_eq!((rows[0].p_hat, rows[0].gamma), (0.0, 0.0));
        assert!(!rows[0].violated());
    }

    #[test]
    fn sample_floor_enforced() {
        let c = SweepConfig {
            mc_samples: 100,
            ..SweepConfig::default()
        };
        assert!(validate_bound(&c)
            .unwrap_err()
            .to_string()
            .contains("sweep.mc_samples"));
    }

    #[test]
    fn reference_single_node_has_no_violation() {
        let c = SweepConfig {
            sweep_values: vec![4.0, 12.0],
            replications: 2,
            mc_samples: MIN_MC_SAMPLES,
            scenario: Scenario {
                sensors: 1,
                ..Scenario::default()
            },
            ..SweepConfig::default()
        };
        let report = validate_bound(&c).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.violations(), 0);
    }
}
