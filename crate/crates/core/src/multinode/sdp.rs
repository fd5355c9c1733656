//! Semidefinite relaxation of the max-min beamforming problem.
//!
//! ```text
//! max_W  minᵢ Tr(AᵢW)   s.t.  Tr(W) = 1,  W ⪰ 0
//!   =  min_{λ ∈ Δ}  λ_max(Σᵢ λᵢAᵢ)
//! ```
//!
//! When every `Aᵢ ≠ 0` the optimum is positive and the problem is equivalent to
//! the standard-form pair
//!
//! ```text
//! (P)  min Tr(X)   s.t.  Tr(AᵢX) − sᵢ = 1,  X ⪰ 0,  s ≥ 0
//! (D)  max Σyᵢ     s.t.  Z = I − Σ yᵢAᵢ ⪰ 0,  y ≥ 0
//! ```
//!
//! with `W = X/Tr(X)` and `λ = y/Σy`. Both sides have obvious strictly feasible
//! points, so a feasible primal-dual path-following method (HKM direction,
//! Mehrotra-style centering) is used. The returned pair `(W, λ)` certifies the
//! gap `λ_max(ΣλᵢAᵢ) − minᵢ Tr(AᵢW)` directly.

use super::WeightedInstance;
use crate::error::{Error, Result};
use crate::linalg::{eigh, max_eigenpair, psd_sqrt, CMat, ComplexVector, HermitianMatrix};
use crate::rng::RandomStream;

/// Default relative duality-gap target.
pub const DEFAULT_SDP_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITERATIONS: usize = 200;
pub const DEFAULT_ROUNDING_SAMPLES: usize = 1000;
const STEP_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpOptions {
    /// Stop once `dual − primal ≤ tol · dual`.
    pub tol: f64,
    pub max_iterations: usize,
    /// Gaussian randomization draws `w ~ CN(0, W)` used for rank-one recovery.
    pub rounding_samples: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_SDP_TOL,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            rounding_samples: DEFAULT_ROUNDING_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    /// `minᵢ Tr(AᵢW)` of the returned `W` (a certified lower bound on the relaxation).
    pub nu_sdp: f64,
    /// `λ_max(Σ λᵢAᵢ)` of the returned weights (a certified upper bound).
    pub dual_value: f64,
    /// Relaxed beamforming matrix: Hermitian, PSD, unit trace.
    pub w_matrix: HermitianMatrix,
    /// Recovered rank-one beam.
    pub w_sdp: ComplexVector,
    /// `minᵢ w_sdp† Aᵢ w_sdp`
    pub nu_rounded: f64,
    /// Dual weights on the simplex.
    pub dual_weights: Vec<f64>,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn gap(&self) -> f64 {
        self.dual_value - self.nu_sdp
    }
}

/// Solves the relaxation to relative gap `tol` and recovers a rank-one beam.
pub fn solve_sdp_relaxation(
    instance: &WeightedInstance,
    tol: f64,
    stream: &mut RandomStream,
) -> Result<SdpSolution> {
    solve_sdp_with(
        instance,
        &SdpOptions {
            tol,
            ..SdpOptions::default()
        },
        stream,
    )
}

pub fn solve_sdp_with(
    instance: &WeightedInstance,
    opts: &SdpOptions,
    stream: &mut RandomStream,
) -> Result<SdpSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::validation(format!(
            "tol must be positive, got {}",
            opts.tol
        )));
    }
    let m = instance.antennas();
    let a = instance.matrices();

    // A zero constraint pins the optimum at 0; any W is optimal.
    if let Some(k) = a.iter().position(|ai| ai.max_abs_entry() == 0.0) {
        let w_matrix = HermitianMatrix::identity(m).scale(1.0 / m as f64);
        let mut dual_weights = vec![0.0; a.len()];
        dual_weights[k] = 1.0;
        let (w_sdp, nu_rounded) = round(instance, &w_matrix, opts.rounding_samples, stream)?;
        return Ok(SdpSolution {
            nu_sdp: 0.0,
            dual_value: 0.0,
            w_matrix,
            w_sdp,
            nu_rounded,
            dual_weights,
            iterations: 0,
        });
    }

    let scale = a.iter().map(|ai| ai.trace()).fold(0.0, f64::max);
    let b: Vec<HermitianMatrix> = a.iter().map(|ai| ai.scale(1.0 / scale)).collect();
    let (x, y, iterations) = interior_point(&b, opts)?;

    let w_matrix = HermitianMatrix::from_cmat_unchecked(x.scale(1.0 / x.trace().re));
    let nu_sdp = instance.min_trace_product(&w_matrix);
    let total: f64 = y.iter().sum();
    let dual_weights: Vec<f64> = y.iter().map(|v| v / total).collect();
    let dual_value = max_eigenpair(&HermitianMatrix::weighted_sum(a, &dual_weights))?.0;

    let (w_sdp, nu_rounded) = round(instance, &w_matrix, opts.rounding_samples, stream)?;
    Ok(SdpSolution {
        nu_sdp,
        dual_value,
        w_matrix,
        w_sdp,
        nu_rounded,
        dual_weights,
        iterations,
    })
}

/// Runs the path-following iterations on the scaled instance; returns `(X, y)`.
fn interior_point(b: &[HermitianMatrix], opts: &SdpOptions) -> Result<(CMat, Vec<f64>, usize)> {
    let m = b[0].dim();
    let n = b.len();
    let traces: Vec<f64> = b.iter().map(|bi| bi.trace()).collect();
    let min_trace = traces.iter().cloned().fold(f64::INFINITY, f64::min);
    let top: Vec<f64> = b
        .iter()
        .map(|bi| max_eigenpair(bi).map(|(l, _)| l))
        .collect::<Result<_>>()?;
    let max_top = top.iter().cloned().fold(0.0, f64::max);

    // Strictly feasible start: Tr(BᵢX) = 2·Tr(Bᵢ)/min Tr ≥ 2, and ΣyᵢBᵢ ⪯ I/2.
    let kappa = 2.0 / min_trace;
    let mut x = CMat::identity(m).scale(kappa);
    let mut s: Vec<f64> = traces.iter().map(|t| kappa * t - 1.0).collect();
    let mut y = vec![0.5 / (n as f64 * max_top); n];

    let dim = (m + n) as f64;
    let mut best_gap = f64::INFINITY;
    for iter in 0..opts.max_iterations {
        let z = dual_slack(b, &y);

        // Certificate check on the normalized pair.
        let w = HermitianMatrix::from_cmat_unchecked(x.scale(1.0 / x.trace().re));
        let primal = b
            .iter()
            .map(|bi| bi.trace_product(&w))
            .fold(f64::INFINITY, f64::min);
        let total: f64 = y.iter().sum();
        let lam: Vec<f64> = y.iter().map(|v| v / total).collect();
        let dual = max_eigenpair(&HermitianMatrix::weighted_sum(b, &lam))?.0;
        let gap = dual - primal;
        best_gap = best_gap.min(gap / dual);
        if gap <= opts.tol * dual {
            return Ok((x, y, iter));
        }

        let mu = (x.trace_product(&z).re + s.iter().zip(&y).map(|(a, c)| a * c).sum::<f64>()) / dim;
        let z_inv = hermitian_inverse(&z)?;
        let schur = schur_matrix(b, &x, &z_inv, &s, &y);
        let schur_chol = real_cholesky(&schur, n)?;

        let direction = |sigma: f64| -> Direction {
            let target = sigma * mu;
            // Newton equations for Tr(BₖdX) − dsₖ = 1 − Tr(BₖX) + sₖ, which also
            // removes any drift off the primal constraints.
            let rhs: Vec<f64> = (0..n)
                .map(|k| 1.0 - target * (b[k].as_cmat().trace_product(&z_inv).re - 1.0 / y[k]))
                .collect();
            let dy = real_cholesky_solve(&schur_chol, n, &rhs);
            let dz = dual_slack_step(b, &dy);
            let raw = &(&z_inv.scale(target) - &x) - &(&(&x * &dz) * &z_inv);
            let dx = raw.hermitian_part();
            let ds: Vec<f64> = (0..n)
                .map(|k| target / y[k] - s[k] - s[k] * dy[k] / y[k])
                .collect();
            Direction { dx, ds, dy, dz }
        };

        let pred = direction(0.0);
        let (ap, ad) = step_lengths(&x, &s, &z, &y, &pred)?;
        let x_aff = &x + &pred.dx.scale(ap);
        let z_aff = &z + &pred.dz.scale(ad);
        let mu_aff = (x_aff.trace_product(&z_aff).re
            + (0..n)
                .map(|k| (s[k] + ap * pred.ds[k]) * (y[k] + ad * pred.dy[k]))
                .sum::<f64>())
            / dim;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let corr = direction(sigma);
        let (ap, ad) = step_lengths(&x, &s, &z, &y, &corr)?;
        x = &x + &corr.dx.scale(ap);
        x = x.hermitian_part();
        for k in 0..n {
            s[k] += ap * corr.ds[k];
            y[k] += ad * corr.dy[k];
        }
    }
    Err(Error::Convergence {
        iterations: opts.max_iterations,
        best_gap,
    })
}

struct Direction {
    dx: CMat,
    ds: Vec<f64>,
    dy: Vec<f64>,
    dz: CMat,
}

fn dual_slack(b: &[HermitianMatrix], y: &[f64]) -> CMat {
    let m = b[0].dim();
    &CMat::identity(m) - HermitianMatrix::weighted_sum(b, y).as_cmat()
}

fn dual_slack_step(b: &[HermitianMatrix], dy: &[f64]) -> CMat {
    HermitianMatrix::weighted_sum(b, dy).as_cmat().scale(-1.0)
}

/// `H_kl = Re Tr(B_k X B_l Z⁻¹) + δ_kl s_k / y_k`
fn schur_matrix(b: &[HermitianMatrix], x: &CMat, z_inv: &CMat, s: &[f64], y: &[f64]) -> Vec<f64> {
    let n = b.len();
    let g: Vec<CMat> = b.iter().map(|bl| &(x * bl.as_cmat()) * z_inv).collect();
    let mut h = vec![0.0; n * n];
    for k in 0..n {
        for l in k..n {
            let v = b[k].as_cmat().trace_product(&g[l]).re;
            h[k * n + l] = v;
            h[l * n + k] = v;
        }
        h[k * n + k] += s[k] / y[k];
    }
    h
}

fn hermitian_inverse(z: &CMat) -> Result<CMat> {
    let l = z.cholesky()?;
    let li = l.lower_triangular_inverse();
    Ok(&li.adjoint() * &li)
}

/// Largest `α ∈ (0, 1]` (times the step fraction) keeping both iterates interior.
fn step_lengths(x: &CMat, s: &[f64], z: &CMat, y: &[f64], d: &Direction) -> Result<(f64, f64)> {
    let ap = psd_step(x, &d.dx)?.min(lp_step(s, &d.ds));
    let ad = psd_step(z, &d.dz)?.min(lp_step(y, &d.dy));
    Ok(((STEP_FRACTION * ap).min(1.0), (STEP_FRACTION * ad).min(1.0)))
}

fn psd_step(x: &CMat, dx: &CMat) -> Result<f64> {
    let li = x.cholesky()?.lower_triangular_inverse();
    let t = &(&li * dx) * &li.adjoint();
    let lmin = eigh(&HermitianMatrix::from_cmat_unchecked(t))?.eigenvalues[0];
    Ok(if lmin < 0.0 { -1.0 / lmin } else { f64::INFINITY })
}

fn lp_step(v: &[f64], dv: &[f64]) -> f64 {
    v.iter()
        .zip(dv)
        .filter(|(_, &d)| d < 0.0)
        .map(|(&a, &d)| -a / d)
        .fold(f64::INFINITY, f64::min)
}

fn real_cholesky(h: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = h[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return Err(Error::numeric("Schur complement lost positive definiteness"));
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in (j + 1)..n {
            let mut v = h[i * n + j];
            for k in 0..j {
                v -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = v / djj;
        }
    }
    Ok(l)
}

fn real_cholesky_solve(l: &[f64], n: usize, rhs: &[f64]) -> Vec<f64> {
    let mut t = rhs.to_vec();
    for i in 0..n {
        for k in 0..i {
            t[i] -= l[i * n + k] * t[k];
        }
        t[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            t[i] -= l[k * n + i] * t[k];
        }
        t[i] /= l[i * n + i];
    }
    t
}

/// Best of the top eigenvector of `W` and `samples` draws `w ~ CN(0, W)`,
/// scored by `minᵢ w†Aᵢw` after normalization.
fn round(
    instance: &WeightedInstance,
    w_matrix: &HermitianMatrix,
    samples: usize,
    stream: &mut RandomStream,
) -> Result<(ComplexVector, f64)> {
    let (_, top) = max_eigenpair(w_matrix)?;
    let mut best_val = instance.min_value(&top);
    let mut best = top;
    let root = psd_sqrt(w_matrix)?;
    let m = instance.antennas();
    for _ in 0..samples {
        let g = ComplexVector::new((0..m).map(|_| stream.complex_gaussian()).collect())?;
        let Some(w) = root.mul_vec(&g).normalized() else {
            continue;
        };
        let v = instance.min_value(&w);
        if v > best_val {
            best_val = v;
            best = w;
        }
    }
    Ok((best, best_val))
}
