//! Dense square complex matrices and a Hermitian eigensolver.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

/// Dense `dim × dim` complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        CMatrix { dim, data }
    }

    /// Builds from row-major data; `None` when the length is not a perfect square of `dim`.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Option<Self> {
        (data.len() == dim * dim).then_some(CMatrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        CMatrix { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest elementwise modulus of `self − self†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Real symmetric `2n × 2n` embedding `[[Re, −Im], [Im, Re]]`.
    fn real_embedding(&self) -> Vec<f64> {
        let n = self.dim;
        let m = 2 * n;
        let mut out = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                let z = self[(i, j)];
                out[i * m + j] = z.re;
                out[(i + n) * m + j + n] = z.re;
                out[i * m + j + n] = -z.im;
                out[(i + n) * m + j] = z.im;
            }
        }
        out
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Only the Hermitian part `(A + A†)/2` is seen by the solver.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        let mut a = self.hermitian_part().real_embedding();
        let (vals, _) = symmetric_eigen(&mut a, 2 * n, false);
        // The embedding doubles every eigenvalue.
        vals.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_hermitian_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `f(A)` for Hermitian `A`, applied through its spectral decomposition.
    pub fn hermitian_map(&self, f: impl Fn(f64) -> f64) -> Self {
        let n = self.dim;
        let m = 2 * n;
        let mut a = self.hermitian_part().real_embedding();
        let (vals, vecs) = symmetric_eigen(&mut a, m, true);
        let fv: Vec<f64> = vals.iter().map(|&v| f(v)).collect();
        // embed(f(A)) = Q f(Λ) Qᵀ; read back the left column blocks.
        Self::from_fn(n, |i, j| {
            let (mut re, mut im) = (0.0, 0.0);
            for k in 0..m {
                let w = fv[k] * vecs[j * m + k];
                re += vecs[i * m + k] * w;
                im += vecs[(i + n) * m + k] * w;
            }
            Complex64::new(re, im)
        })
    }

    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| 0.5 * (self[(i, j)] + self[(j, i)].conj()))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            let orow = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (o, b) in orow.iter_mut().zip(&rhs.data[k * n..(k + 1) * n]) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

/// Cyclic Jacobi diagonalization of a real symmetric `n × n` matrix (row-major, destroyed).
///
/// Returns eigenvalues ascending and, if requested, the matching eigenvectors as the
/// columns of a row-major `n × n` matrix.
pub fn symmetric_eigen(a: &mut [f64], n: usize, want_vectors: bool) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n);
    let mut v = if want_vectors {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        v
    } else {
        Vec::new()
    };
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off <= 1e-32 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = libm::copysign(1.0, theta) / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                if want_vectors {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let vals: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let vecs = if want_vectors {
        let mut sorted = vec![0.0; n * n];
        for (new, &old) in order.iter().enumerate() {
            for k in 0..n {
                sorted[k * n + new] = v[k * n + old];
            }
        }
        sorted
    } else {
        Vec::new()
    };
    (vals, vecs)
}
