//! Truncated Fock-space states and ladder/displacement operators.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::special::{assoc_laguerre_scaled, ln_factorial};

/// A complex phase-space amplitude `α = x + iy`.
pub type ComplexAmplitude = Complex64;

/// Tolerance on `|ρ − ρ†|` elementwise.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on `|Tr ρ − 1|`.
pub const TRACE_TOL: f64 = 1e-9;
/// Most negative eigenvalue accepted as round-off.
pub const EIGEN_TOL: f64 = 1e-9;

/// Normalized pure state `Σ c_n |n⟩` in a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
}

impl FockVector {
    /// Normalizes `amps` on construction.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let norm2: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return Err(Error::NotNormalizable);
        }
        let inv = 1.0 / libm::sqrt(norm2);
        Ok(FockVector { amps: amps.into_iter().map(|c| c * inv).collect() })
    }

    /// The number state `|k⟩` in dimension `dim`.
    pub fn number_state(k: usize, dim: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::TruncationTooSmall { dim, leakage: 1.0 });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(FockVector { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> CMatrix {
        CMatrix::from_fn(self.dim(), |m, n| self.amps[m] * self.amps[n].conj())
    }
}

/// Hermitian, unit-trace, positive-semidefinite matrix over the truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    elems: CMatrix,
}

impl DensityMatrix {
    /// Validates every density-matrix invariant.
    pub fn new(elems: CMatrix) -> Result<Self> {
        validate(&elems)?;
        Ok(DensityMatrix { elems })
    }

    /// Wraps a matrix the caller guarantees to be physical; no validation.
    pub fn from_matrix_unchecked(elems: CMatrix) -> Self {
        DensityMatrix { elems }
    }

    pub fn from_pure(psi: &FockVector) -> Self {
        DensityMatrix { elems: psi.projector() }
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(DensityMatrix { elems: CMatrix::identity(dim).scale(1.0 / dim as f64) })
    }

    /// Diagonal state with the given populations, renormalized to unit trace.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|p| *p < 0.0 || !p.is_finite()) || total <= 0.0 {
            return Err(Error::NotNormalizable);
        }
        let mut m = CMatrix::zeros(probs.len());
        for (i, p) in probs.iter().enumerate() {
            m[(i, i)] = Complex64::new(p / total, 0.0);
        }
        Ok(DensityMatrix { elems: m })
    }

    pub fn dim(&self) -> usize {
        self.elems.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.elems
    }

    pub fn into_matrix(self) -> CMatrix {
        self.elems
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.elems[(m, n)]
    }

    /// `Tr(ρ A)`.
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        let n = self.dim();
        assert_eq!(op.dim(), n);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.elems[(i, j)] * op[(j, i)];
            }
        }
        acc
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.elems.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Phase-space rotation `e^{iφ a†a} ρ e^{−iφ a†a}`, i.e. `ρ_mn e^{i(m−n)φ}`.
    pub fn rotated(&self, phi: f64) -> Self {
        let elems = CMatrix::from_fn(self.dim(), |m, n| {
            self.elems[(m, n)] * Complex64::from_polar(1.0, (m as f64 - n as f64) * phi)
        });
        DensityMatrix { elems }
    }
}

/// Checks Hermiticity, unit trace and positivity, reporting the first violation.
pub fn validate(elems: &CMatrix) -> Result<()> {
    if elems.dim() == 0 {
        return Err(Error::ZeroDimension);
    }
    if elems.as_slice().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NotNormalizable);
    }
    let dev = elems.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { max_deviation: dev });
    }
    let tr = elems.trace().re;
    if libm::fabs(tr - 1.0) > TRACE_TOL {
        return Err(Error::TraceNotOne { trace: tr });
    }
    let min_ev = elems.min_hermitian_eigenvalue();
    if min_ev < -EIGEN_TOL {
        return Err(Error::NegativeEigenvalue { min_eigenvalue: min_ev });
    }
    Ok(())
}

/// Lowering operator `a` with `a_{n−1,n} = √n`.
pub fn annihilation_matrix(dim: usize) -> CMatrix {
    let mut a = CMatrix::zeros(dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new(libm::sqrt(n as f64), 0.0);
    }
    a
}

/// Number operator `a†a`.
pub fn number_matrix(dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim);
    for n in 0..dim {
        m[(n, n)] = Complex64::new(n as f64, 0.0);
    }
    m
}

/// Matrix elements `⟨m|D(α)|n⟩` for `m, n < dim` from the associated-Laguerre closed form
///
/// `⟨m|D(α)|n⟩ = √(n!/m!) α^{m−n} e^{−|α|²/2} L_n^{(m−n)}(|α|²)` for `m ≥ n`, and the
/// same with `m ↔ n`, `α → −α*` below the diagonal.
pub fn displacement_matrix(alpha: ComplexAmplitude, dim: usize) -> CMatrix {
    let mut out = CMatrix::zeros(dim);
    let r2 = alpha.norm_sqr();
    if r2 == 0.0 {
        return CMatrix::identity(dim);
    }
    let ln_r = libm::log(alpha.norm());
    let arg = alpha.arg();
    for d in 0..dim {
        let lag = assoc_laguerre_scaled(dim - d, d as f64, r2);
        for (j, &(mant, ln_scale)) in lag.iter().enumerate() {
            // Lower triangle element (m, n) = (j + d, j).
            let (m, n) = (j + d, j);
            let ln_mag = 0.5 * (ln_factorial(n) - ln_factorial(m)) + d as f64 * ln_r - 0.5 * r2 + ln_scale;
            let mag = mant * libm::exp(ln_mag);
            out[(m, n)] = Complex64::from_polar(mag, d as f64 * arg);
            if d > 0 {
                // (n, m): (−α*)^d has phase d·(π − arg α).
                out[(n, m)] = Complex64::from_polar(mag, d as f64 * (core::f64::consts::PI - arg));
            }
        }
    }
    out
}

/// Column `k` of [`displacement_matrix`], i.e. the amplitudes of `D(α)|k⟩`.
pub fn displaced_number_amplitudes(alpha: ComplexAmplitude, k: usize, dim: usize) -> Vec<Complex64> {
    let d = displacement_matrix(alpha, dim);
    (0..dim).map(|m| d[(m, k)]).collect()
}
