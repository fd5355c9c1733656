//! Max-min beamforming for several sensors and the equilibria it induces.
//!
//! The beam problem is `ν* = max_{‖w‖=1} minᵢ w†Aᵢw` with `Aᵢ = |h_sᵢ|²Qᵢ`.
//! It is non-convex, so four values are produced: eigenvalue bounds
//! `ν_min ≤ ν* ≤ ν_max`, the semidefinite relaxation value `ν_sdp ≥ ν*`, and a
//! best-effort search value `ν_gs ≤ ν*`. Each one maps to an equilibrium
//! through the same closed form used for a single sensor.

mod sdp;
mod search;

pub use sdp::{
    solve_sdp_relaxation, solve_sdp_with, SdpOptions, SdpSolution, DEFAULT_MAX_ITERATIONS,
    DEFAULT_ROUNDING_SAMPLES, DEFAULT_SDP_TOL,
};
pub use search::{global_search, global_search_with, SearchOptions, DEFAULT_SEARCH_BUDGET};

use crate::channel::{ChannelState, Scenario};
use crate::error::{Error, Result};
use crate::game::{equilibrium_closed_form, EffectiveGameParams, Equilibrium};
use crate::linalg::{eigh, ComplexVector, HermitianMatrix};
use crate::rng::RandomStream;

/// The constraint matrices `Aᵢ = |h_sᵢ|²Qᵢ` of the max-min beam problem.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedInstance {
    a_mat: Vec<HermitianMatrix>,
}

impl WeightedInstance {
    pub fn new(a_mat: Vec<HermitianMatrix>) -> Result<Self> {
        let first = a_mat
            .first()
            .ok_or_else(|| Error::validation("instance needs at least one sensor"))?;
        let m = first.dim();
        for (i, a) in a_mat.iter().enumerate() {
            if a.dim() != m {
                return Err(Error::validation(format!(
                    "A[{i}] has dimension {} != {m}",
                    a.dim()
                )));
            }
            if !a.is_psd()? {
                return Err(Error::validation(format!("A[{i}] is not positive semidefinite")));
            }
        }
        Ok(Self { a_mat })
    }

    pub fn from_channels(channels: &ChannelState) -> Result<Self> {
        Self::new(
            channels
                .q_mat
                .iter()
                .enumerate()
                .map(|(i, q)| q.scale(channels.bs_gain(i)))
                .collect(),
        )
    }

    pub fn matrices(&self) -> &[HermitianMatrix] {
        &self.a_mat
    }

    pub fn sensors(&self) -> usize {
        self.a_mat.len()
    }

    pub fn antennas(&self) -> usize {
        self.a_mat[0].dim()
    }

    /// `minᵢ w†Aᵢw`
    pub fn min_value(&self, w: &ComplexVector) -> f64 {
        self.a_mat
            .iter()
            .map(|a| a.quadratic_form(w))
            .fold(f64::INFINITY, f64::min)
    }

    /// `minᵢ Tr(AᵢW)`
    pub fn min_trace_product(&self, w: &HermitianMatrix) -> f64 {
        self.a_mat
            .iter()
            .map(|a| a.trace_product(w))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `(minᵢ λ_min(Aᵢ), minᵢ λ_max(Aᵢ))`
pub fn nu_bounds(instance: &WeightedInstance) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::INFINITY;
    for a in instance.matrices() {
        let d = eigh(a)?;
        lo = lo.min(d.eigenvalues[0]);
        hi = hi.min(*d.eigenvalues.last().expect("dimension >= 1"));
    }
    Ok((lo, hi))
}

/// All four beam values for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSet {
    pub nu_min: f64,
    pub nu_max: f64,
    pub sdp: SdpSolution,
    pub nu_gs: f64,
    pub w_gs: ComplexVector,
}

impl BoundSet {
    pub fn nu_sdp(&self) -> f64 {
        self.sdp.nu_sdp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundOptions {
    pub sdp: SdpOptions,
    pub search: SearchOptions,
}

/// Computes every bound. The relaxation and the search draw from independent
/// children of `stream`.
pub fn bound_set(
    instance: &WeightedInstance,
    opts: &BoundOptions,
    stream: &RandomStream,
) -> Result<BoundSet> {
    let (nu_min, nu_max) = nu_bounds(instance)?;
    let sdp = solve_sdp_with(instance, &opts.sdp, &mut stream.derive(1))?;
    let (nu_gs, w_gs) = global_search_with(instance, &opts.search, &mut stream.derive(2))?;
    Ok(BoundSet {
        nu_min,
        nu_max,
        sdp,
        nu_gs,
        w_gs,
    })
}

/// Closed-form equilibrium for the beam value `ν`.
pub fn equilibrium_from_nu(nu: f64, scenario: &Scenario) -> Result<Equilibrium> {
    let params = EffectiveGameParams::from_nu(nu, scenario)?;
    let mut eq = equilibrium_closed_form(&params);
    eq.nu_or_mu = nu;
    Ok(eq)
}
