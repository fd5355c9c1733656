//! Utilities of the two players and the closed-form Stackelberg equilibrium.
//!
//! The beacon (leader) posts a price `ρ ≥ c` per unit power; the base station
//! (follower) buys power `P ≥ 0` and picks the beam `w`. With the beam fixed at
//! the one maximizing the effective gain, the follower's utility reduces to
//! `α_eff · ln(1 + gP) − τρP`, which has the closed-form best response
//! `P(ρ) = (α_eff·g/(τρ) − 1)/g` and the leader's optimal price
//! `ρ* = √(α_eff·c·g/τ)`.

use std::f64::consts::LN_2;

use crate::channel::{ChannelState, ErrorSampler, Scenario};
use crate::error::{Error, Result};
use crate::linalg::{max_eigenpair, rayleigh, ComplexVector};
use crate::rng::RandomStream;

/// Reduced parameters of the one-dimensional game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveGameParams {
    /// Effective SNR gain per unit power, `g`.
    pub gain: f64,
    /// `α_eff = α(1−τ) / (2Nβ ln 2)`.
    pub alpha_eff: f64,
    pub tau: f64,
    pub cost: f64,
}

impl EffectiveGameParams {
    pub fn new(gain: f64, alpha_eff: f64, tau: f64, cost: f64) -> Result<Self> {
        if !(gain > 0.0) || !gain.is_finite() {
            return Err(Error::validation(format!(
                "effective gain must be positive, got {gain}"
            )));
        }
        if !(alpha_eff > 0.0) || !alpha_eff.is_finite() {
            return Err(Error::validation(format!(
                "alpha_eff must be positive, got {alpha_eff}"
            )));
        }
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::validation(format!("tau must lie in (0, 1), got {tau}")));
        }
        if !(cost > 0.0) {
            return Err(Error::validation(format!("cost must be positive, got {cost}")));
        }
        Ok(Self {
            gain,
            alpha_eff,
            tau,
            cost,
        })
    }

    /// Parameters for a max-min beam value `ν = minᵢ |h_sᵢ|² w†Qᵢw`.
    ///
    /// `g = τNν / ((1−τ)σ²)` and `α_eff = α(1−τ)/(2Nβ ln 2)`; for `N = 1` and
    /// `ν = |h_s|²μ` this is exactly `g = μκ`, `α_eff = α′`.
    pub fn from_nu(nu: f64, scenario: &Scenario) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::validation(format!(
                "nu must be positive for a power trade to exist, got {nu}"
            )));
        }
        scenario.validate()?;
        let n = scenario.sensors as f64;
        let tau = scenario.tau;
        let gain = tau * n * nu / ((1.0 - tau) * scenario.sigma2);
        Self::new(gain, alpha_eff(scenario), tau, scenario.cost)
    }

    /// `α_eff ln(1 + gP) − τρP`
    pub fn utility_bs(&self, rho: f64, power: f64) -> f64 {
        self.alpha_eff * (self.gain * power).ln_1p() - self.tau * rho * power
    }

    pub fn utility_pb(&self, rho: f64, power: f64) -> f64 {
        utility_pb(rho, power, self.cost)
    }
}

/// `α(1−τ) / (2Nβ ln 2)`
pub fn alpha_eff(scenario: &Scenario) -> f64 {
    scenario.alpha * (1.0 - scenario.tau) / (2.0 * scenario.sensors as f64 * scenario.beta * LN_2)
}

/// Strategy profile at equilibrium with both utilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub rho_star: f64,
    pub p_star: f64,
    /// Beam actually realizing the gain; absent for bound-only solutions and `M = 1`.
    pub w_star: Option<ComplexVector>,
    /// Gain value the equilibrium was computed from (`μ*`, `ν`, or `η` for the
    /// single-antenna exponential model).
    pub nu_or_mu: f64,
    pub u_bs: f64,
    pub u_pb: f64,
}

impl Equilibrium {
    /// Power per antenna `|w_m|²·P*`, when a beam is attached.
    pub fn per_antenna_power(&self) -> Option<Vec<f64>> {
        self.w_star
            .as_ref()
            .map(|w| w.powers().into_iter().map(|p| p * self.p_star).collect())
    }
}

/// `(1−τ)/(2N) · log₂(1 + τN|h_s|²·beam·P / (σ²(1−τ)))` for a realized beam gain.
pub fn throughput_for_gain(scenario: &Scenario, bs_gain: f64, beam_gain: f64, power: f64) -> f64 {
    let n = scenario.sensors as f64;
    let tau = scenario.tau;
    let snr = tau * n * bs_gain * beam_gain * power / (scenario.sigma2 * (1.0 - tau));
    (1.0 - tau) / (2.0 * n) * snr.ln_1p() / LN_2
}

fn check_common(power: f64, w: &ComplexVector, channels: &ChannelState, i: usize) -> Result<()> {
    if !(power >= 0.0) {
        return Err(Error::validation(format!(
            "power must be nonnegative, got {power}"
        )));
    }
    if i >= channels.sensors() {
        return Err(Error::validation(format!("sensor index {i} out of range")));
    }
    if w.len() != channels.antennas() {
        return Err(Error::validation("beam length does not match antenna count"));
    }
    if !w.is_unit() {
        return Err(Error::validation("beam must be unit-norm"));
    }
    Ok(())
}

/// Data throughput of sensor `i` for the realized channel `ĥᵢ + error`.
pub fn throughput(
    power: f64,
    w: &ComplexVector,
    channels: &ChannelState,
    i: usize,
    scenario: &Scenario,
    error: &ComplexVector,
) -> Result<f64> {
    check_common(power, w, channels, i)?;
    let h = channels.h_hat[i].add(error);
    let beam_gain = h.inner(w).norm_sqr();
    Ok(throughput_for_gain(
        scenario,
        channels.bs_gain(i),
        beam_gain,
        power,
    ))
}

/// Markov/Jensen upper bound `Γᵢ` on the non-outage probability of sensor `i`.
///
/// The raw value is returned; it may exceed 1.
pub fn gamma_bound(
    power: f64,
    w: &ComplexVector,
    channels: &ChannelState,
    i: usize,
    scenario: &Scenario,
) -> Result<f64> {
    check_common(power, w, channels, i)?;
    let mu = rayleigh(&channels.q_mat[i], w)?;
    Ok(throughput_for_gain(scenario, channels.bs_gain(i), mu, power) / scenario.beta)
}

/// `minᵢ αΓᵢ(P, w) − τρP`
pub fn utility_bs(
    rho: f64,
    power: f64,
    w: &ComplexVector,
    channels: &ChannelState,
    scenario: &Scenario,
) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for i in 0..channels.sensors() {
        worst = worst.min(scenario.alpha * gamma_bound(power, w, channels, i, scenario)?);
    }
    Ok(worst - scenario.tau * rho * power)
}

/// `(ρ − c)·P`
pub fn utility_pb(rho: f64, power: f64, cost: f64) -> f64 {
    (rho - cost) * power
}

/// Follower's best response to price `ρ`, clamped at zero power.
pub fn best_response_power(rho: f64, params: &EffectiveGameParams) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::validation(format!("price must be positive, got {rho}")));
    }
    let g = params.gain;
    Ok(((params.alpha_eff * g / (params.tau * rho) - 1.0) / g).max(0.0))
}

/// Leader's optimal price (floored at cost) and the follower's response.
pub fn equilibrium_closed_form(params: &EffectiveGameParams) -> Equilibrium {
    let EffectiveGameParams {
        gain,
        alpha_eff,
        tau,
        cost,
    } = *params;
    let root = (alpha_eff * cost * gain / tau).sqrt();
    let (rho_star, p_star) = if root >= cost {
        let p = (((alpha_eff * gain / (tau * cost)).sqrt() - 1.0) / gain).max(0.0);
        (root, p)
    } else {
        // The unconstrained optimum prices below cost; the beacon sells at cost
        // and the follower's demand there is already zero.
        let p = best_response_power(cost, params).expect("cost > 0");
        (cost, p)
    };
    Equilibrium {
        rho_star,
        p_star,
        w_star: None,
        nu_or_mu: gain,
        u_bs: params.utility_bs(rho_star, p_star),
        u_pb: params.utility_pb(rho_star, p_star),
    }
}

/// Equilibrium for a single sensor: top eigenvector of `Q` as the beam, then
/// the closed form with `g = μ*κ`.
pub fn single_node_solve(channels: &ChannelState, scenario: &Scenario) -> Result<Equilibrium> {
    if channels.sensors() != 1 || scenario.sensors != 1 {
        return Err(Error::validation(format!(
            "single-node solver needs exactly one sensor, got {}",
            channels.sensors()
        )));
    }
    let (mu, w) = max_eigenpair(&channels.q_mat[0])?;
    let params = EffectiveGameParams::from_nu(channels.bs_gain(0) * mu, scenario)?;
    let mut eq = equilibrium_closed_form(&params);
    eq.w_star = Some(w);
    eq.nu_or_mu = mu;
    Ok(eq)
}

/// Monte-Carlo estimate of `Pr(Dᵢ > β)` and its binomial standard error.
pub fn estimate_non_outage(
    power: f64,
    w: &ComplexVector,
    channels: &ChannelState,
    i: usize,
    scenario: &Scenario,
    n_samples: usize,
    stream: &mut RandomStream,
) -> Result<(f64, f64)> {
    check_common(power, w, channels, i)?;
    if n_samples == 0 {
        return Err(Error::validation("n_samples must be at least 1"));
    }
    let sampler = ErrorSampler::new(&channels.sigma_mat[i])?;
    let bs_gain = channels.bs_gain(i);
    let h_hat = &channels.h_hat[i];
    let mut hits = 0usize;
    for _ in 0..n_samples {
        let e = sampler.sample(stream);
        let beam_gain = h_hat.add(&e).inner(w).norm_sqr();
        if throughput_for_gain(scenario, bs_gain, beam_gain, power) > scenario.beta {
            hits += 1;
        }
    }
    let n = n_samples as f64;
    let p = hits as f64 / n;
    Ok((p, (p * (1.0 - p) / n).sqrt()))
}
