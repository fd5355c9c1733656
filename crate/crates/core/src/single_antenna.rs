//! Single-antenna, single-sensor game with the exponential tail model.
//!
//! With one antenna the realized gain `|h|²` is non-central chi-square with two
//! degrees of freedom. Replacing it by an exponential of the same mean gives
//! `Pr(D ≥ β) ≈ exp(−η/P)`, and the follower's utility becomes
//! `α′·exp(−η/P) − τρP`. Stationarity of both players reduces to
//!
//! ```text
//! α′ η e^(−η/P) − τ ρ P² = 0,        η/P − c/ρ = 1.
//! ```

use crate::channel::{ChannelState, Scenario};
use crate::error::{Error, Result};
use crate::game::{utility_pb, Equilibrium};

/// Parameters of the exponential tail model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareParams {
    /// Non-centrality `θ² = 2|ĥ|²/σ₁²`.
    pub theta2: f64,
    /// Outage scale `η`: the model predicts `Pr(D ≥ β) ≈ exp(−η/P)`.
    pub eta: f64,
}

impl ChiSquareParams {
    /// Builds `η` for a given non-centrality.
    ///
    /// `η = (4^(β/(1−τ)) − 1)(1−τ)σ² / (τ|h_s|² σ₁² (1 + θ²/2))`; the factor
    /// `σ₁²(1 + θ²/2)` is the mean of `|h|²`.
    pub fn from_theta2(theta2: f64, sigma1_sq: f64, bs_gain: f64, scenario: &Scenario) -> Result<Self> {
        if !(theta2 >= 0.0) || !theta2.is_finite() {
            return Err(Error::validation(format!(
                "theta2 must be nonnegative, got {theta2}"
            )));
        }
        if !(sigma1_sq > 0.0) {
            return Err(Error::validation(format!(
                "sigma1_sq must be positive, got {sigma1_sq}"
            )));
        }
        if !(bs_gain > 0.0) {
            return Err(Error::validation("sensor-to-BS gain must be positive"));
        }
        scenario.validate()?;
        let tau = scenario.tau;
        let threshold =
            (4f64.powf(scenario.beta / (1.0 - tau)) - 1.0) * (1.0 - tau) * scenario.sigma2 / (tau * bs_gain);
        let eta = threshold / (sigma1_sq * (1.0 + theta2 / 2.0));
        Ok(Self { theta2, eta })
    }

    /// `exp(−η/P)`
    pub fn approx_non_outage(&self, power: f64) -> f64 {
        if power <= 0.0 {
            0.0
        } else {
            (-self.eta / power).exp()
        }
    }
}

/// Chi-square model parameters of a one-antenna, one-sensor channel.
pub fn chi_square_params(
    channels: &ChannelState,
    scenario: &Scenario,
    sigma1_sq: f64,
) -> Result<ChiSquareParams> {
    if channels.antennas() != 1 || scenario.antennas != 1 {
        return Err(Error::validation(
            "chi-square model requires a single antenna (M = 1)",
        ));
    }
    if channels.sensors() != 1 || scenario.sensors != 1 {
        return Err(Error::validation(
            "chi-square model requires a single sensor (N = 1)",
        ));
    }
    if !(sigma1_sq > 0.0) {
        return Err(Error::validation(format!(
            "sigma1_sq must be positive, got {sigma1_sq}"
        )));
    }
    let theta2 = 2.0 * channels.h_hat[0][0].norm_sqr() / sigma1_sq;
    ChiSquareParams::from_theta2(theta2, sigma1_sq, channels.bs_gain(0), scenario)
}

const GRID: usize = 256;
const EDGE: f64 = 1e-9;

/// Solves the two stationarity conditions for `(P*, ρ*)`.
///
/// Eliminating `ρ = cP/(η − P)` leaves one equation in `P`. A price above cost
/// needs `P ∈ (η/2, η)`, which is also where the follower's utility is concave,
/// so roots are bracketed on a grid over that interval, bisected, polished with
/// Newton steps, and the one giving the leader the highest profit is returned.
pub fn equilibrium_m1_exact(
    params: &ChiSquareParams,
    alpha_eff: f64,
    tau: f64,
    cost: f64,
) -> Result<Equilibrium> {
    let eta = params.eta;
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::validation(format!("eta must be positive, got {eta}")));
    }
    if !(alpha_eff > 0.0) || !(tau > 0.0 && tau < 1.0) || !(cost > 0.0) {
        return Err(Error::validation(
            "alpha_eff, tau and cost must be positive (tau < 1)",
        ));
    }

    let price = |p: f64| cost * p / (eta - p);
    // Residual of the follower's condition after eliminating ρ, scaled by the
    // benefit term so it is dimensionless.
    let residual = |p: f64| {
        let benefit = alpha_eff * eta * (-eta / p).exp();
        (benefit - tau * price(p) * p * p) / benefit
    };

    let lo = 0.5 * eta;
    let hi = eta * (1.0 - EDGE);
    if residual(lo) <= 0.0 {
        return Err(Error::NoInteriorEquilibrium(format!(
            "at P = η/2 the price equals cost and the follower already wants less power \
             (residual {:.3e}); the leader's optimum is on the boundary ρ = c",
            residual(lo)
        )));
    }

    let mut roots = Vec::new();
    let mut a = lo;
    let mut fa = residual(a);
    for k in 1..=GRID {
        let b = lo + (hi - lo) * k as f64 / GRID as f64;
        let fb = residual(b);
        if fa > 0.0 && fb <= 0.0 {
            roots.push(polish(&residual, a, b));
        }
        a = b;
        fa = fb;
    }
    let best = roots
        .into_iter()
        .map(|p| (p, price(p)))
        .max_by(|x, y| utility_pb(x.1, x.0, cost).total_cmp(&utility_pb(y.1, y.0, cost)))
        .ok_or_else(|| Error::numeric("no sign change of the stationarity residual found"))?;
    let (p_star, rho_star) = best;

    let r1 = residual(p_star).abs();
    let r2 = (eta / p_star - cost / rho_star - 1.0).abs();
    if r1 > 1e-10 || r2 > 1e-10 {
        return Err(Error::numeric(format!(
            "stationarity residuals too large after polishing ({r1:.3e}, {r2:.3e})"
        )));
    }
    let u_bs = alpha_eff * (-eta / p_star).exp() - tau * rho_star * p_star;
    Ok(Equilibrium {
        rho_star,
        p_star,
        w_star: None,
        nu_or_mu: eta,
        u_bs,
        u_pb: utility_pb(rho_star, p_star, cost),
    })
}

/// Bisection on `[a, b]` with `f(a) > 0 ≥ f(b)`, then two guarded Newton steps.
fn polish(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if f(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..2 {
        let h = 1e-7 * x;
        let d = (f(x + h) - f(x - h)) / (2.0 * h);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - f(x) / d;
        if next > a && next < b && f(next).abs() <= f(x).abs() {
            x = next;
        }
    }
    x
}
