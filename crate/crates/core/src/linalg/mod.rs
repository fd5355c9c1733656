//! Dense complex Hermitian linear algebra.
//!
//! Matrices here are small (antenna counts of a few tens at most), so
//! everything is stored densely and row-major.

mod dense;
mod eigen;

pub use dense::CMat;
pub use eigen::{eigh, max_eigenpair, min_eigenvalue, psd_sqrt, rayleigh, EigenDecomposition};

use num_complex::Complex64;
use std::ops::Index;

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Tolerance on `|‖v‖² − 1|` for a vector to count as unit-norm.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Largest componentwise `|a_ij − conj(a_ji)|` accepted as Hermitian (scaled by
/// `max(1, max|a_ij|)`).
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-10;

/// A complex column vector (channels, beamforming weights, error draws).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::validation("vector must have at least one entry"));
        }
        Ok(Self(entries))
    }

    pub fn zeros(m: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); m])
    }

    /// The `k`-th standard basis vector of length `m`.
    pub fn basis(m: usize, k: usize) -> Self {
        let mut v = Self::zeros(m);
        v.0[k] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_unit(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= UNIT_NORM_TOL
    }

    /// `self† · other`
    pub fn inner(&self, other: &ComplexVector) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(&self) -> Option<ComplexVector> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(Self(self.0.iter().map(|z| z / n).collect()))
    }

    pub fn scale(&self, s: Complex64) -> ComplexVector {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    pub fn add(&self, other: &ComplexVector) -> ComplexVector {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Squared moduli `|v_m|²`.
    pub fn powers(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

/// Complex Hermitian matrix, stored densely.
///
/// Construction checks Hermitian symmetry to [`HERMITIAN_TOL`] and then stores
/// the exact Hermitian part, so `a_ij == conj(a_ji)` holds bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMat);

impl HermitianMatrix {
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("matrix dimension must be at least 1"));
        }
        if entries.len() != n * n {
            return Err(Error::validation(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        Self::from_cmat(CMat::from_fn(n, |i, j| entries[i * n + j]))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("matrix dimension must be at least 1"));
        }
        Self::from_cmat(CMat::from_fn(n, f))
    }

    /// Validates symmetry and keeps the Hermitian part.
    pub fn from_cmat(m: CMat) -> Result<Self> {
        let n = m.dim();
        let mut scale: f64 = 1.0;
        for i in 0..n {
            for j in 0..n {
                scale = scale.max(m[(i, j)].norm());
            }
        }
        for i in 0..n {
            for j in i..n {
                let asym = (m[(i, j)] - m[(j, i)].conj()).norm();
                if !asym.is_finite() || asym > HERMITIAN_TOL * scale {
                    return Err(Error::validation(format!(
                        "matrix is not Hermitian: |a[{i}][{j}] - conj(a[{j}][{i}])| = {asym:.3e}"
                    )));
                }
            }
        }
        Ok(Self(m.hermitian_part()))
    }

    pub(crate) fn from_cmat_unchecked(m: CMat) -> Self {
        Self(m.hermitian_part())
    }

    pub fn identity(n: usize) -> Self {
        Self(CMat::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMat::zeros(n))
    }

    pub fn diag(values: &[f64]) -> Self {
        Self(CMat::from_fn(values.len(), |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// `v v†`
    pub fn outer(v: &ComplexVector) -> Self {
        let s = v.as_slice();
        Self(CMat::from_fn(s.len(), |i, j| s[i] * s[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn as_cmat(&self) -> &CMat {
        &self.0
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &HermitianMatrix) -> HermitianMatrix {
        Self(&self.0 - &other.0)
    }

    pub fn scale(&self, s: f64) -> HermitianMatrix {
        Self(self.0.scale(s))
    }

    /// Real trace.
    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `Tr(self · other)`, real for Hermitian arguments.
    pub fn trace_product(&self, other: &HermitianMatrix) -> f64 {
        self.0.trace_product(&other.0).re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    pub fn max_abs_entry(&self) -> f64 {
        let n = self.dim();
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                m = m.max(self.0[(i, j)].norm());
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        ComplexVector(self.0.mul_vec(v.as_slice()))
    }

    /// `w† Q w` for arbitrary `w` (no normalization check).
    pub fn quadratic_form(&self, w: &ComplexVector) -> f64 {
        let n = self.dim();
        let ws = w.as_slice();
        let data = self.0.as_slice();
        // Diagonal plus twice the real part of the strict upper triangle.
        let mut diag = 0.0;
        let mut upper = Complex64::new(0.0, 0.0);
        for (i, (row, wi)) in data.chunks_exact(n).zip(ws).enumerate() {
            diag += row[i].re * wi.norm_sqr();
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, wj) in row[i + 1..].iter().zip(&ws[i + 1..]) {
                acc += a * wj;
            }
            upper += wi.conj() * acc;
        }
        diag + 2.0 * upper.re
    }

    /// `Σ_k weights[k] · mats[k]`
    pub fn weighted_sum(mats: &[HermitianMatrix], weights: &[f64]) -> HermitianMatrix {
        let n = mats[0].dim();
        let mut acc = CMat::zeros(n);
        for (m, &w) in mats.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    acc[(i, j)] += m.0[(i, j)] * w;
                }
            }
        }
        Self(acc)
    }

    /// `λ_min ≥ PSD_TOL · max(1, ‖Q‖_F)`.
    pub fn is_psd(&self) -> Result<bool> {
        let lmin = min_eigenvalue(self)?;
        Ok(lmin >= PSD_TOL * self.frobenius_norm().max(1.0))
    }
}

/// Uniformly distributed direction on the complex unit sphere in `C^m`.
pub fn sample_unit_sphere(m: usize, stream: &mut RandomStream) -> Result<ComplexVector> {
    if m == 0 {
        return Err(Error::validation("sphere dimension must be at least 1"));
    }
    loop {
        let v = ComplexVector((0..m).map(|_| stream.complex_gaussian()).collect());
        if let Some(u) = v.normalized() {
            return Ok(u);
        }
    }
}
