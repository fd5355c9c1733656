//! Scenario geometry, path-loss channel estimates and channel-error draws.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{psd_sqrt, ComplexVector, HermitianMatrix};
use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned rectangle in which sensors are dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    /// Builds the rectangle from its four corners, in any order.
    pub fn from_corners(corners: &[Point; 4]) -> Result<Self> {
        let mut xs: Vec<f64> = corners.iter().map(|p| p.x).collect();
        let mut ys: Vec<f64> = corners.iter().map(|p| p.y).collect();
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);
        if xs[0] != xs[1] || xs[2] != xs[3] || ys[0] != ys[1] || ys[2] != ys[3] {
            return Err(Error::validation(
                "sensor_region: corners do not form an axis-aligned rectangle",
            ));
        }
        // Every (x, y) combination must be present.
        for &x in &[xs[0], xs[3]] {
            for &y in &[ys[0], ys[3]] {
                if !corners.iter().any(|p| p.x == x && p.y == y) {
                    return Err(Error::validation(
                        "sensor_region: corners do not form an axis-aligned rectangle",
                    ));
                }
            }
        }
        Ok(Self {
            x_min: xs[0],
            x_max: xs[3],
            y_min: ys[0],
            y_max: ys[3],
        })
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x_min, self.y_min),
            Point::new(self.x_max, self.y_min),
            Point::new(self.x_max, self.y_max),
            Point::new(self.x_min, self.y_max),
        ]
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }
}

/// How the phases of the estimated beacon-to-sensor channel entries are set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseModel {
    /// Real, positive path-loss gains `d^(-γ/2)` on every antenna.
    Zero,
    /// Independent phases uniform on `[0, 2π)` per antenna entry.
    Uniform,
}

/// Game and physical parameters of one deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Fraction of the slot spent harvesting.
    pub tau: f64,
    /// Throughput threshold.
    pub beta: f64,
    /// Weight on the non-outage term of the base station's utility.
    pub alpha: f64,
    /// Beacon's operational cost per unit power.
    pub cost: f64,
    /// Receiver noise variance.
    pub sigma2: f64,
    /// Path-loss exponent.
    pub gamma: f64,
    pub antennas: usize,
    pub sensors: usize,
    pub bs_position: Point,
    pub pb_position: Point,
    pub sensor_region: Rect,
    pub phase_model: PhaseModel,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            tau: 0.5,
            beta: 1.0,
            alpha: 1e3,
            cost: 1.0,
            sigma2: 1e-8,
            gamma: 3.5,
            antennas: 5,
            sensors: 20,
            bs_position: Point::new(-10.0, 0.0),
            pb_position: Point::new(10.0, 0.0),
            sensor_region: Rect {
                x_min: -4.0,
                x_max: 4.0,
                y_min: -10.0,
                y_max: 10.0,
            },
            phase_model: PhaseModel::Zero,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::validation(what.to_string()))
            }
        };
        check(self.tau > 0.0 && self.tau < 1.0, "tau: must satisfy 0 < tau < 1")?;
        check(self.beta > 0.0, "beta: must be positive")?;
        check(self.alpha > 0.0, "alpha: must be positive")?;
        check(self.cost > 0.0, "c: must be positive")?;
        check(self.sigma2 > 0.0, "sigma2: must be positive")?;
        check(self.gamma > 0.0, "gamma: must be positive")?;
        check(self.antennas >= 1, "antennas: must be at least 1")?;
        check(self.sensors >= 1, "sensors: must be at least 1")?;
        let finite = [
            self.tau,
            self.beta,
            self.alpha,
            self.cost,
            self.sigma2,
            self.gamma,
        ]
        .iter()
        .all(|v| v.is_finite());
        check(finite, "scenario parameters must be finite")
    }

    /// Path-loss gain `d^(-γ)` (power) at distance `d`.
    pub fn path_gain(&self, distance: f64) -> f64 {
        distance.powf(-self.gamma)
    }
}

/// Channel knowledge available to the base station for one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    /// Estimated beacon-to-sensor channels `ĥᵢ`.
    pub h_hat: Vec<ComplexVector>,
    /// Estimation-error covariances `Σᵢ`.
    pub sigma_mat: Vec<HermitianMatrix>,
    /// Sensor-to-base-station gains `h_sᵢ`.
    pub h_s: Vec<Complex64>,
    /// Channel correlations `Qᵢ = ĥᵢĥᵢ† + Σᵢ`.
    pub q_mat: Vec<HermitianMatrix>,
    pub sensor_positions: Vec<Point>,
}

impl ChannelState {
    /// Assembles the state and each `Qᵢ` from its parts.
    pub fn from_parts(
        h_hat: Vec<ComplexVector>,
        sigma_mat: Vec<HermitianMatrix>,
        h_s: Vec<Complex64>,
        sensor_positions: Vec<Point>,
    ) -> Result<Self> {
        let n = h_hat.len();
        if n == 0 || sigma_mat.len() != n || h_s.len() != n {
            return Err(Error::validation(
                "channel state needs one estimate, covariance and BS gain per sensor",
            ));
        }
        let m = h_hat[0].len();
        for (h, s) in h_hat.iter().zip(&sigma_mat) {
            if h.len() != m || s.dim() != m {
                return Err(Error::validation("inconsistent antenna dimensions"));
            }
        }
        let q_mat = h_hat
            .iter()
            .zip(&sigma_mat)
            .map(|(h, s)| HermitianMatrix::outer(h).add(s))
            .collect();
        Ok(Self {
            h_hat,
            sigma_mat,
            h_s,
            q_mat,
            sensor_positions,
        })
    }

    pub fn sensors(&self) -> usize {
        self.h_hat.len()
    }

    pub fn antennas(&self) -> usize {
        self.h_hat[0].len()
    }

    /// `|h_sᵢ|²`
    pub fn bs_gain(&self, i: usize) -> f64 {
        self.h_s[i].norm_sqr()
    }

    /// Replaces `Σᵢ` and rebuilds `Qᵢ`.
    pub fn set_covariance(&mut self, i: usize, sigma: HermitianMatrix) -> Result<()> {
        if sigma.dim() != self.antennas() {
            return Err(Error::validation("covariance dimension mismatch"));
        }
        self.q_mat[i] = HermitianMatrix::outer(&self.h_hat[i]).add(&sigma);
        self.sigma_mat[i] = sigma;
        Ok(())
    }
}

/// Drops `scenario.sensors` points i.i.d. uniformly over the sensor region.
pub fn place_sensors(scenario: &Scenario, stream: &mut RandomStream) -> Result<Vec<Point>> {
    let r = &scenario.sensor_region;
    if !(r.area() > 0.0) || !r.area().is_finite() {
        return Err(Error::validation("sensor_region: rectangle has zero area"));
    }
    Ok((0..scenario.sensors)
        .map(|_| {
            let x = stream.uniform_range(r.x_min, r.x_max);
            let y = stream.uniform_range(r.y_min, r.y_max);
            Point::new(x, y)
        })
        .collect())
}

/// Path-loss channel estimates with `Σᵢ = I·dᵢ^(-γ)` for sensors at `positions`.
pub fn build_channels(
    scenario: &Scenario,
    positions: &[Point],
    stream: &mut RandomStream,
) -> Result<ChannelState> {
    scenario.validate()?;
    if positions.is_empty() {
        return Err(Error::validation("at least one sensor position is required"));
    }
    let m = scenario.antennas;
    let mut h_hat = Vec::with_capacity(positions.len());
    let mut sigma_mat = Vec::with_capacity(positions.len());
    let mut h_s = Vec::with_capacity(positions.len());
    for (i, p) in positions.iter().enumerate() {
        let d_pb = p.distance(&scenario.pb_position);
        let d_bs = p.distance(&scenario.bs_position);
        if !(d_pb > 0.0) || !(d_bs > 0.0) {
            return Err(Error::validation(format!(
                "sensor {i} coincides with the power beacon or the base station"
            )));
        }
        let amp = d_pb.powf(-scenario.gamma / 2.0);
        let entries: Vec<Complex64> = match scenario.phase_model {
            PhaseModel::Zero => vec![Complex64::new(amp, 0.0); m],
            PhaseModel::Uniform => (0..m).map(|_| stream.unit_phase() * amp).collect(),
        };
        h_hat.push(ComplexVector::new(entries)?);
        sigma_mat.push(HermitianMatrix::identity(m).scale(scenario.path_gain(d_pb)));

        let amp_s = d_bs.powf(-scenario.gamma / 2.0);
        h_s.push(match scenario.phase_model {
            PhaseModel::Zero => Complex64::new(amp_s, 0.0),
            PhaseModel::Uniform => stream.unit_phase() * amp_s,
        });
    }
    ChannelState::from_parts(h_hat, sigma_mat, h_s, positions.to_vec())
}

/// Draws `e ~ CN(0, Σ)` as `Σ^(1/2) g` with `g` standard complex Gaussian.
#[derive(Debug, Clone)]
pub struct ErrorSampler {
    root: HermitianMatrix,
}

impl ErrorSampler {
    pub fn new(sigma: &HermitianMatrix) -> Result<Self> {
        Ok(Self {
            root: psd_sqrt(sigma)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.root.dim()
    }

    pub fn sample(&self, stream: &mut RandomStream) -> ComplexVector {
        let g = ComplexVector::new((0..self.dim()).map(|_| stream.complex_gaussian()).collect())
            .expect("dimension >= 1");
        self.root.mul_vec(&g)
    }
}

/// One draw of the channel-estimation error with covariance `sigma`.
pub fn sample_error(sigma: &HermitianMatrix, stream: &mut RandomStream) -> Result<ComplexVector> {
    Ok(ErrorSampler::new(sigma)?.sample(stream))
}
