use num_complex::Complex64;

use super::{CMat, ComplexVector, HermitianMatrix, PSD_TOL, UNIT_NORM_TOL};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<ComplexVector>,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max(&self) -> (f64, &ComplexVector) {
        let k = self.len() - 1;
        (self.eigenvalues[k], &self.eigenvectors[k])
    }

    pub fn min(&self) -> (f64, &ComplexVector) {
        (self.eigenvalues[0], &self.eigenvectors[0])
    }
}

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.
///
/// Output is deterministic: eigenvalues ascend (exact ties keep the highest
/// original diagonal slot first, so the top pair comes from the lowest index),
/// and each eigenvector is rotated so that its first largest-modulus
/// component is real and nonnegative.
pub fn eigh(q: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = q.dim();
    let mut a = q.as_cmat().clone();
    let mut v = CMat::identity(n);

    let norm = a.frobenius_norm();
    if !norm.is_finite() {
        return Err(Error::validation("matrix has non-finite entries"));
    }
    let tol = OFF_DIAGONAL_TOL * norm;

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q_ in (p + 1)..n {
                rotate(&mut a, &mut v, p, q_);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > tol {
        return Err(Error::numeric(format!(
            "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(j.cmp(&i)));

    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| normalize_phase((0..n).map(|r| v[(r, k)]).collect()))
        .collect();
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &CMat) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[p][q]` with the unitary `U = diag(1, e^{-iφ}) · R(θ)`
/// acting on rows/columns `p, q`, and accumulates `V ← V U`.
fn rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.dim();
    let conj_phase = phase.conj();
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -conj_phase * s;
    let u_qq = conj_phase * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(app - t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * r, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

fn normalize_phase(mut entries: Vec<Complex64>) -> ComplexVector {
    let norm = entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in entries.iter_mut() {
            *z /= norm;
        }
    }
    let max_mod = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_mod > 0.0 {
        let pivot = entries
            .iter()
            .position(|z| z.norm() >= max_mod * (1.0 - 1e-9))
            .unwrap_or(0);
        let rot = entries[pivot].conj() / entries[pivot].norm();
        for z in entries.iter_mut() {
            *z *= rot;
        }
        entries[pivot] = Complex64::new(entries[pivot].re, 0.0);
    }
    ComplexVector(entries)
}

/// Largest eigenvalue and its unit eigenvector (the Rayleigh-quotient maximizer).
pub fn max_eigenpair(q: &HermitianMatrix) -> Result<(f64, ComplexVector)> {
    let mut d = eigh(q)?;
    let lambda = *d.eigenvalues.last().expect("dimension >= 1");
    let v = d.eigenvectors.pop().expect("dimension >= 1");
    Ok((lambda, v))
}

pub fn min_eigenvalue(q: &HermitianMatrix) -> Result<f64> {
    Ok(eigh(q)?.eigenvalues[0])
}

/// `w† Q w` for a unit-norm `w`.
pub fn rayleigh(q: &HermitianMatrix, w: &ComplexVector) -> Result<f64> {
    if w.len() != q.dim() {
        return Err(Error::validation(format!(
            "vector length {} does not match matrix dimension {}",
            w.len(),
            q.dim()
        )));
    }
    if (w.norm_sqr() - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::validation(format!(
            "weight vector is not unit-norm (|w|^2 = {})",
            w.norm_sqr()
        )));
    }
    Ok(q.quadratic_form(w))
}

/// Principal square root of a PSD matrix; eigenvalues in `[PSD_TOL, 0)` are
/// clamped to zero.
pub fn psd_sqrt(q: &HermitianMatrix) -> Result<HermitianMatrix> {
    let d = eigh(q)?;
    let scale = q.frobenius_norm().max(1.0);
    if d.eigenvalues[0] < PSD_TOL * scale {
        return Err(Error::validation(format!(
            "matrix is not positive semidefinite (λ_min = {:.3e})",
            d.eigenvalues[0]
        )));
    }
    let n = q.dim();
    let mut out = CMat::zeros(n);
    for (lambda, vec) in d.eigenvalues.iter().zip(&d.eigenvectors) {
        let root = lambda.max(0.0).sqrt();
        if root == 0.0 {
            continue;
        }
        let vs = vec.as_slice();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += vs[i] * vs[j].conj() * root;
            }
        }
    }
    Ok(HermitianMatrix::from_cmat_unchecked(out))
}
