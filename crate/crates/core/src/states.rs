//! Analytic states, photon statistics, Wigner functions and quadrature densities.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{annihilation_matrix, displaced_number_amplitudes, ComplexAmplitude, DensityMatrix, FockVector};
use crate::linalg::CMatrix;
use crate::special::{assoc_laguerre_scaled, hermite_gauss_fill, laguerre, ln_factorial};

/// Largest tolerated probability mass outside the truncated basis.
pub const MAX_LEAKAGE: f64 = 1e-6;
/// Negative populations smaller than this in magnitude are silently clamped.
pub const CLAMP_WARN: f64 = 1e-9;

/// An analytic single-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Coherent { alpha: ComplexAmplitude },
    Fock { k: usize },
    DisplacedFock { alpha: ComplexAmplitude, k: usize },
    Thermal { nbar: f64 },
}

impl StateSpec {
    /// Phase-space centroid `⟨a⟩`.
    pub fn centroid(&self) -> ComplexAmplitude {
        match *self {
            StateSpec::Coherent { alpha } | StateSpec::DisplacedFock { alpha, .. } => alpha,
            StateSpec::Fock { .. } | StateSpec::Thermal { .. } => Complex64::new(0.0, 0.0),
        }
    }

    /// Exact photon-number probability `p_n`.
    pub fn pn(&self, n: usize) -> f64 {
        match *self {
            StateSpec::Coherent { alpha } => poisson_pn(alpha.norm_sqr(), n),
            StateSpec::Fock { k } => (n == k) as u8 as f64,
            StateSpec::DisplacedFock { alpha, k } => dfs_pn(alpha, k, n),
            StateSpec::Thermal { nbar } => thermal_pn(nbar, n),
        }
    }

    /// Mean photon number.
    pub fn mean_photons(&self) -> f64 {
        match *self {
            StateSpec::Coherent { alpha } => alpha.norm_sqr(),
            StateSpec::Fock { k } => k as f64,
            StateSpec::DisplacedFock { alpha, k } => alpha.norm_sqr() + k as f64,
            StateSpec::Thermal { nbar } => nbar,
        }
    }
}

/// Photon-number probabilities `p_0 … p_{N−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    pub probs: Vec<f64>,
}

impl PhotonDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || total > 1.0 + 1e-9 {
            return Err(Error::InvalidParameter("photon probabilities must be non-negative and sum to at most 1"));
        }
        Ok(PhotonDistribution { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `Σ n p_n`, not renormalized.
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// `Σ (−1)^n p_n`.
    pub fn parity(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| if n % 2 == 0 { *p } else { -*p }).sum()
    }

    /// Normalized moments `(⟨n⟩, ⟨n²⟩)`.
    fn moments(&self) -> (f64, f64) {
        let total = self.total();
        let (m1, m2) = self
            .probs
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(a, b), (n, p)| (a + n as f64 * p, b + (n * n) as f64 * p));
        (m1 / total, m2 / total)
    }
}

/// Wigner function sampled on a rectangular grid; `values[ix * ny + iy] = W(x_ix, y_iy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub x_axis: Vec<f64>,
    pub y_axis: Vec<f64>,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.y_axis.len() + iy]
    }

    /// Uniform spacing `(Δx, Δy)`; zero along an axis with a single point.
    pub fn spacing(&self) -> (f64, f64) {
        let step = |a: &[f64]| if a.len() > 1 { (a[a.len() - 1] - a[0]) / (a.len() - 1) as f64 } else { 0.0 };
        (step(&self.x_axis), step(&self.y_axis))
    }

    /// Riemann sum `Σ W Δx Δy`.
    pub fn integral(&self) -> f64 {
        let (dx, dy) = self.spacing();
        self.values.iter().sum::<f64>() * dx * dy
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Default grid axes: `points` per axis spanning `center ± half_width`.
pub fn default_axes(center: ComplexAmplitude, half_width: f64, points: usize) -> (Vec<f64>, Vec<f64>) {
    (
        linspace(center.re - half_width, center.re + half_width, points),
        linspace(center.im - half_width, center.im + half_width, points),
    )
}

/// Poisson probability `⟨n⟩^n e^{−⟨n⟩} / n!`, evaluated in log space.
pub fn poisson_pn(nbar: f64, n: usize) -> f64 {
    if nbar == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    libm::exp(n as f64 * libm::log(nbar) - nbar - ln_factorial(n))
}

/// Bose–Einstein probability `nbar^n / (1 + nbar)^{n+1}`.
pub fn thermal_pn(nbar: f64, n: usize) -> f64 {
    if nbar == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    libm::exp(n as f64 * libm::log(nbar) - (n as f64 + 1.0) * libm::log1p(nbar))
}

/// Photon-number distribution of the displaced Fock state `|α, k⟩`:
///
/// `p_n = e^{−|α|²} |α|^{2(n−k)} / (n! k!) · |Σ_m n! k! (−1)^m |α|^{2(k−m)} / (m! (k−m)! (n−m)!)|²`
///
/// with the inner sum running over `m = 0 … min(k, n)` (`1/(n−m)!` vanishes beyond).
pub fn dfs_pn(alpha: ComplexAmplitude, k: usize, n: usize) -> f64 {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        return if n == k { 1.0 } else { 0.0 };
    }
    let ln_x = libm::log(x);
    let common = 0.5 * (-x + ln_factorial(n) + ln_factorial(k));
    let half_total = 0.5 * (n + k) as f64;
    let mut sum = 0.0;
    for m in 0..=k.min(n) {
        let ln_term = common + (half_total - m as f64) * ln_x
            - ln_factorial(m)
            - ln_factorial(k - m)
            - ln_factorial(n - m);
        let t = libm::exp(ln_term);
        if m % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
    }
    sum * sum
}

/// Wigner function of `|α, k⟩`: `(2(−1)^k/π) e^{−2|β−α|²} L_k(4|β−α|²)`.
pub fn dfs_wigner(alpha: ComplexAmplitude, k: usize, beta: ComplexAmplitude) -> f64 {
    let r2 = (beta - alpha).norm_sqr();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    // k is bounded by the truncation in every caller; MAX_ORDER is far beyond it.
    let lag = laguerre(k, 4.0 * r2).unwrap_or(f64::NAN);
    sign * FRAC_2_PI * libm::exp(-2.0 * r2) * lag
}

fn leakage_check(dim: usize, leakage: f64) -> Result<()> {
    if leakage > MAX_LEAKAGE {
        Err(Error::TruncationTooSmall { dim, leakage })
    } else {
        Ok(())
    }
}

/// Probability outside `n < dim`, summed directly over the tail.
fn tail_mass(dim: usize, mean: f64, pn: impl Fn(usize) -> f64) -> f64 {
    let stop = dim + 64 + (20.0 * mean + 40.0 * libm::sqrt(mean + 1.0)) as usize;
    (dim..stop).map(pn).sum()
}

/// Realizes an analytic state as a density matrix in dimension `dim`.
pub fn state_to_density(spec: &StateSpec, dim: usize) -> Result<DensityMatrix> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    match *spec {
        StateSpec::Coherent { alpha } => {
            leakage_check(dim, tail_mass(dim, spec.mean_photons(), |n| spec.pn(n)))?;
            let x = alpha.norm_sqr();
            let amps = (0..dim)
                .map(|n| {
                    if x == 0.0 {
                        return Complex64::new((n == 0) as u8 as f64, 0.0);
                    }
                    let ln_mag = -0.5 * x + 0.5 * n as f64 * libm::log(x) - 0.5 * ln_factorial(n);
                    Complex64::from_polar(libm::exp(ln_mag), n as f64 * alpha.arg())
                })
                .collect();
            Ok(DensityMatrix::from_pure(&FockVector::new(amps)?))
        }
        StateSpec::Fock { k } => Ok(DensityMatrix::from_pure(&FockVector::number_state(k, dim)?)),
        StateSpec::DisplacedFock { alpha, k } => {
            if k >= dim {
                return Err(Error::TruncationTooSmall { dim, leakage: 1.0 });
            }
            leakage_check(dim, tail_mass(dim, spec.mean_photons(), |n| spec.pn(n)))?;
            let amps = displaced_number_amplitudes(alpha, k, dim);
            Ok(DensityMatrix::from_pure(&FockVector::new(amps)?))
        }
        StateSpec::Thermal { nbar } => {
            if !(nbar >= 0.0 && nbar.is_finite()) {
                return Err(Error::InvalidParameter("thermal occupation must be finite and >= 0"));
            }
            let ratio = nbar / (1.0 + nbar);
            leakage_check(dim, libm::pow(ratio, dim as f64))?;
            let probs: Vec<f64> = (0..dim).map(|n| thermal_pn(nbar, n)).collect();
            DensityMatrix::diagonal(&probs)
        }
    }
}

/// Statistics of the negative-population clamp applied by [`photon_distribution`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClampStats {
    pub clamped: usize,
    pub max_magnitude: f64,
}

/// Diagonal `p_n = Re ρ_nn`, clamped at zero.
pub fn photon_distribution(rho: &DensityMatrix) -> PhotonDistribution {
    photon_distribution_with_stats(rho).0
}

pub fn photon_distribution_with_stats(rho: &DensityMatrix) -> (PhotonDistribution, ClampStats) {
    let mut stats = ClampStats::default();
    let probs = (0..rho.dim())
        .map(|n| {
            let p = rho.get(n, n).re;
            if p < 0.0 {
                stats.clamped += 1;
                stats.max_magnitude = stats.max_magnitude.max(-p);
                0.0
            } else {
                p
            }
        })
        .collect();
    if stats.max_magnitude > CLAMP_WARN {
        log::warn!(
            "clamped {} negative populations (largest magnitude {:e})",
            stats.clamped,
            stats.max_magnitude
        );
    }
    (PhotonDistribution { probs }, stats)
}

/// `⟨a⟩ = Tr(ρ a)`, the phase-space centroid of `ρ`.
pub fn centroid(rho: &DensityMatrix) -> ComplexAmplitude {
    rho.expectation(&annihilation_matrix(rho.dim()))
}

/// Wigner function of `ρ` at one phase-space point.
///
/// `W(β) = (2/π) Σ_{mn} ρ_mn ⟨n|D(β)(−1)^{a†a}D(β)†|m⟩`, with the displaced-parity
/// elements for `m ≥ n`
/// `(−1)^n √(n!/m!) (2β*)^{m−n} e^{−2|β|²} L_n^{(m−n)}(4|β|²)`.
pub fn wigner_at(rho: &DensityMatrix, beta: ComplexAmplitude) -> f64 {
    let dim = rho.dim();
    let r2 = beta.norm_sqr();
    let ln_2r = if r2 > 0.0 { libm::log(2.0 * libm::sqrt(r2)) } else { f64::NEG_INFINITY };
    let arg = beta.arg();
    let mut acc = 0.0;
    for d in 0..dim {
        if d > 0 && r2 == 0.0 {
            break;
        }
        let lag = assoc_laguerre_scaled(dim - d, d as f64, 4.0 * r2);
        let phase = Complex64::from_polar(1.0, -(d as f64) * arg);
        let mut part = 0.0;
        for (n, &(mant, ln_scale)) in lag.iter().enumerate() {
            let m = n + d;
            let mut ln_mag = -2.0 * r2 + ln_scale;
            if d > 0 {
                ln_mag += 0.5 * (ln_factorial(n) - ln_factorial(m)) + d as f64 * ln_2r;
            }
            let kernel = mant * libm::exp(ln_mag);
            let signed = if n % 2 == 0 { kernel } else { -kernel };
            if d == 0 {
                part += rho.get(n, n).re * signed;
            } else {
                part += 2.0 * (rho.get(m, n) * phase).re * signed;
            }
        }
        acc += part;
    }
    FRAC_2_PI * acc
}

/// Evaluates [`wigner_at`] on the tensor grid `x_axis × y_axis` (β = x + iy).
pub fn wigner_from_density(rho: &DensityMatrix, x_axis: &[f64], y_axis: &[f64]) -> Result<WignerGrid> {
    check_axis(x_axis)?;
    check_axis(y_axis)?;
    let mut values = Vec::with_capacity(x_axis.len() * y_axis.len());
    for &x in x_axis {
        for &y in y_axis {
            values.push(wigner_at(rho, Complex64::new(x, y)));
        }
    }
    Ok(WignerGrid { x_axis: x_axis.to_vec(), y_axis: y_axis.to_vec(), values })
}

/// Rejects empty, non-finite or non-increasing axes.
pub fn check_axis(axis: &[f64]) -> Result<()> {
    if axis.is_empty() || axis.iter().any(|v| !v.is_finite()) || axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("grid axes must be finite and strictly ascending"));
    }
    Ok(())
}

/// Born-rule density of quadrature value `x` at local-oscillator phase `θ`:
/// `pr(x|θ) = Σ_{mn} ρ_mn e^{i(n−m)θ} ψ_m(x) ψ_n(x)`.
pub fn quadrature_pdf(rho: &DensityMatrix, theta: f64, x: f64) -> f64 {
    let dim = rho.dim();
    let mut psi = vec![0.0; dim];
    hermite_gauss_fill(x, &mut psi);
    quadrature_pdf_with(rho.matrix(), theta, &psi)
}

pub(crate) fn quadrature_pdf_with(rho: &CMatrix, theta: f64, psi: &[f64]) -> f64 {
    let dim = rho.dim();
    let mut acc = 0.0;
    for m in 0..dim {
        acc += rho[(m, m)].re * psi[m] * psi[m];
        for n in m + 1..dim {
            let rot = Complex64::from_polar(1.0, (n - m) as f64 * theta);
            acc += 2.0 * (rho[(m, n)] * rot).re * psi[m] * psi[n];
        }
    }
    acc.max(0.0)
}

/// Normally ordered `g²(0) = (⟨n²⟩ − ⟨n⟩) / ⟨n⟩²`.
pub fn g2_zero(pn: &PhotonDistribution) -> Result<f64> {
    let (m1, m2) = checked_moments(pn)?;
    Ok((m2 - m1) / (m1 * m1))
}

/// The alternative expression `(⟨n²⟩ − ⟨n⟩²) / ⟨n⟩²` (the Fano factor over `⟨n⟩`).
///
/// It equals `1/⟨n⟩` for Poisson light, not 1; kept for comparison with
/// [`g2_zero`].
pub fn g2_as_printed(pn: &PhotonDistribution) -> Result<f64> {
    let (m1, m2) = checked_moments(pn)?;
    Ok((m2 - m1 * m1) / (m1 * m1))
}

fn checked_moments(pn: &PhotonDistribution) -> Result<(f64, f64)> {
    let total = pn.total();
    if total <= 0.99 {
        return Err(Error::IncompleteDistribution { total });
    }
    let (m1, m2) = pn.moments();
    if m1 < 1e-9 {
        return Err(Error::DegenerateDistribution);
    }
    Ok((m1, m2))
}

/// Wigner value at the origin expressed through parity, `(2/π) Σ (−1)^n p_n`.
pub fn wigner_origin_from_parity(pn: &PhotonDistribution) -> f64 {
    2.0 / PI * pn.parity()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn poisson_basics() {
        assert_eq!(poisson_pn(0.0, 0), 1.0);
        assert_eq!(poisson_pn(0.0, 3), 0.0);
        for nbar in [0.3, 5.0, 14.0] {
            assert!((poisson_pn(nbar, 0) - (-nbar as f64).exp()).abs() < 1e-15);
        }
        let total: f64 = (0..=60).map(|n| poisson_pn(14.0, n)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mode = (0..=60).max_by(|&a, &b| poisson_pn(14.0, a).total_cmp(&poisson_pn(14.0, b))).unwrap();
        assert!(mode == 13 || mode == 14);
    }

    #[test]
    fn dfs_special_cases() {
        assert!(dfs_pn(c(3.0, 0.0), 1, 9) < 1e-14);
        for k in 0..4 {
            for n in 0..8 {
                assert_eq!(dfs_pn(c(0.0, 0.0), k, n), (n == k) as u8 as f64);
            }
        }
        let a = c(1.1, -2.0);
        for n in 0..30 {
            assert!((dfs_pn(a, 0, n) - poisson_pn(a.norm_sqr(), n)).abs() < 1e-15);
        }
    }

    #[test]
    fn dfs_matches_displacement_column() {
        let alpha = c(1.2, 0.7);
        let d = crate::fock::displacement_matrix(alpha, 40);
        for n in 0..40 {
            assert!((dfs_pn(alpha, 2, n) - d[(n, 2)].norm_sqr()).abs() < 1e-10);
        }
    }

    #[test]
    fn dfs_wigner_peak_values() {
        let a = c(2.15, 2.1);
        assert!((dfs_wigner(a, 1, a) + 2.0 / PI).abs() < 1e-15);
        assert!((dfs_wigner(c(0.0, 0.0), 0, c(0.0, 0.0)) - 2.0 / PI).abs() < 1e-15);
        assert!((dfs_wigner(a, 2, a) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn state_to_density_fock_and_coherent() {
        let rho = state_to_density(&StateSpec::Fock { k: 2 }, 10).unwrap();
        for m in 0..10 {
            for n in 0..10 {
                let expect = if m == 2 && n == 2 { 1.0 } else { 0.0 };
                assert_eq!(rho.get(m, n), c(expect, 0.0));
            }
        }
        let alpha = c(5f64.sqrt(), 0.0);
        let rho = state_to_density(&StateSpec::Coherent { alpha }, 40).unwrap();
        for n in 0..40 {
            assert!((rho.get(n, n).re - poisson_pn(5.0, n)).abs() < 1e-12);
        }
    }

    #[test]
    fn state_to_density_rejects_small_truncation() {
        let spec = StateSpec::Coherent { alpha: c(4.0, 0.0) };
        assert!(matches!(state_to_density(&spec, 10), Err(Error::TruncationTooSmall { .. })));
        assert!(matches!(
            state_to_density(&StateSpec::Fock { k: 5 }, 5),
            Err(Error::TruncationTooSmall { .. })
        ));
        assert!(matches!(
            state_to_density(&StateSpec::Thermal { nbar: 3.0 }, 20),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn dfs_density_diag_matches_eq3() {
        let spec = StateSpec::DisplacedFock { alpha: c(2.15, 2.1), k: 1 };
        let rho = state_to_density(&spec, 40).unwrap();
        for n in 0..40 {
            assert!((rho.get(n, n).re - dfs_pn(c(2.15, 2.1), 1, n)).abs() < 1e-10);
        }
    }

    #[test]
    fn photon_distribution_of_mixed_is_uniform() {
        let rho = DensityMatrix::maximally_mixed(8).unwrap();
        let pn = photon_distribution(&rho);
        assert!(pn.probs.iter().all(|p| (p - 0.125).abs() < 1e-15));
    }

    #[test]
    fn photon_distribution_clamps_negative() {
        let mut m = CMatrix::identity(2).scale(0.5);
        m[(0, 0)] = c(1.0 + 1e-12, 0.0);
        m[(1, 1)] = c(-1e-12, 0.0);
        let (pn, stats) = photon_distribution_with_stats(&DensityMatrix::from_matrix_unchecked(m));
        assert_eq!(pn.probs[1], 0.0);
        assert_eq!(stats.clamped, 1);
    }

    #[test]
    fn wigner_fixed_points() {
        let vac = state_to_density(&StateSpec::Fock { k: 0 }, 10).unwrap();
        assert!((wigner_at(&vac, c(0.0, 0.0)) - 2.0 / PI).abs() < 1e-14);
        let b = c(0.4, -0.3);
        assert!((wigner_at(&vac, b) - 2.0 / PI * (-2.0 * b.norm_sqr()).exp()).abs() < 1e-14);
        let one = state_to_density(&StateSpec::Fock { k: 1 }, 10).unwrap();
        assert!((wigner_at(&one, c(0.0, 0.0)) + 2.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn wigner_of_coherent_is_shifted_gaussian() {
        let alpha = c(1.0, -0.5);
        let rho = state_to_density(&StateSpec::Coherent { alpha }, 30).unwrap();
        for beta in [c(0.0, 0.0), c(1.0, -0.5), c(2.0, 1.0), c(-0.3, 0.2)] {
            let expect = dfs_wigner(alpha, 0, beta);
            assert!((wigner_at(&rho, beta) - expect).abs() < 1e-10, "{beta}");
        }
    }

    #[test]
    fn wigner_grid_rejects_bad_axes() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(wigner_from_density(&rho, &[0.0, 0.0], &[0.0]).is_err());
        assert!(wigner_from_density(&rho, &[], &[0.0]).is_err());
        assert!(wigner_from_density(&rho, &[1.0, 0.0], &[0.0]).is_err());
    }

    #[test]
    fn quadrature_pdf_vacuum_and_coherent() {
        let vac = state_to_density(&StateSpec::Fock { k: 0 }, 12).unwrap();
        for &x in &[-1.5, 0.0, 0.7] {
            for &th in &[0.0, 1.0, 4.0] {
                let expect = (-x * x as f64).exp() / PI.sqrt();
                assert!((quadrature_pdf(&vac, th, x) - expect).abs() < 1e-14);
            }
        }
        let alpha = Complex64::from_polar(1.5, 0.6);
        let rho = state_to_density(&StateSpec::Coherent { alpha }, 40).unwrap();
        for &th in &[0.0, 0.9, 2.5] {
            let mean = 2f64.sqrt() * alpha.norm() * (th - alpha.arg()).cos();
            for &x in &[-1.0, 0.5, 2.0] {
                let expect = (-(x - mean) * (x - mean)).exp() / PI.sqrt();
                assert!((quadrature_pdf(&rho, th, x) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn g2_values() {
        let poisson = PhotonDistribution::new((0..120).map(|n| poisson_pn(14.0, n)).collect()).unwrap();
        assert!((g2_zero(&poisson).unwrap() - 1.0).abs() < 1e-9);
        assert!((g2_as_printed(&poisson).unwrap() - 1.0 / 14.0).abs() < 1e-9);
        for k in 1..6 {
            let mut p = vec![0.0; 10];
            p[k] = 1.0;
            let g = g2_zero(&PhotonDistribution::new(p).unwrap()).unwrap();
            assert!((g - (1.0 - 1.0 / k as f64)).abs() < 1e-15);
        }
        let mut vac = vec![0.0; 4];
        vac[0] = 1.0;
        assert_eq!(g2_zero(&PhotonDistribution::new(vac).unwrap()), Err(Error::DegenerateDistribution));
        let short = PhotonDistribution::new(vec![0.5, 0.3]).unwrap();
        assert!(matches!(g2_zero(&short), Err(Error::IncompleteDistribution { .. })));
    }

    #[test]
    fn g2_thermal_is_two() {
        // Moments of the geometric distribution computed by direct summation.
        let nbar = 3.0;
        let probs: Vec<f64> = (0..400).map(|n| thermal_pn(nbar, n)).collect();
        let m1: f64 = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        let m2: f64 = probs.iter().enumerate().map(|(n, p)| (n * n) as f64 * p).sum();
        let oracle = (m2 - m1) / (m1 * m1);
        assert!((oracle - 2.0).abs() < 1e-9);
        let g = g2_zero(&PhotonDistribution::new(probs).unwrap()).unwrap();
        assert!((g - oracle).abs() < 1e-12);
    }
}
