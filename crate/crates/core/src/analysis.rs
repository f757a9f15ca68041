//! Post-reconstruction analytics.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fock::DensityMatrix;
use crate::states::{dfs_pn, poisson_pn, PhotonDistribution, WignerGrid};
use num_complex::Complex64;

/// Purity above which a state is treated as pure in [`fidelity`].
const PURE: f64 = 1.0 - 1e-10;
const FIT_SCAN_POINTS: usize = 64;
const FIT_TOLERANCE: f64 = 1e-8;
/// Residuals closer than this count as a tie, resolved toward smaller `k`.
const FIT_TIE: f64 = 1e-12;

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(())
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`; `Tr(ρσ)` when either state is pure.
pub fn fidelity(rho: &DensityMatrix, target: &DensityMatrix) -> Result<f64> {
    same_dim(rho, target)?;
    let raw = if rho.purity() > PURE || target.purity() > PURE {
        rho.expectation(target.matrix()).re
    } else {
        let s = rho.matrix().hermitian_map(|v| libm::sqrt(v.max(0.0)));
        let inner = &(&s * target.matrix()) * &s;
        let t: f64 = inner.hermitian_eigenvalues().iter().map(|v| libm::sqrt(v.max(0.0))).sum();
        t * t
    };
    let clamped = raw.clamp(0.0, 1.0);
    if libm::fabs(clamped - raw) > 1e-9 {
        log::warn!("fidelity {raw} clamped to [0, 1]");
    }
    Ok(clamped)
}

/// `½ Σ |λ_i(ρ − σ)|`.
pub fn trace_distance(rho: &DensityMatrix, other: &DensityMatrix) -> Result<f64> {
    same_dim(rho, other)?;
    let diff = rho.matrix() - other.matrix();
    Ok(0.5 * diff.hermitian_eigenvalues().iter().map(|v| libm::fabs(*v)).sum::<f64>())
}

/// Distance of a photon distribution from the Poisson law with the same mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonDeviation {
    pub nbar_hat: f64,
    /// Total-variation distance, including the Poisson mass beyond the truncation.
    pub tv_distance: f64,
}

fn require_complete(pn: &PhotonDistribution) -> Result<()> {
    let total = pn.total();
    if total <= 0.99 {
        return Err(Error::IncompleteDistribution { total });
    }
    Ok(())
}

pub fn poisson_deviation(pn: &PhotonDistribution) -> Result<PoissonDeviation> {
    require_complete(pn)?;
    let nbar = pn.mean();
    let n = pn.len();
    let inside: f64 = pn.probs.iter().enumerate().map(|(i, p)| libm::fabs(p - poisson_pn(nbar, i))).sum();
    let stop = n + 64 + (20.0 * nbar + 40.0 * libm::sqrt(nbar + 1.0)) as usize;
    let tail: f64 = (n..stop).map(|i| poisson_pn(nbar, i)).sum();
    Ok(PoissonDeviation { nbar_hat: nbar, tv_distance: 0.5 * (inside + tail) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    Coherent,
    DisplacedFock,
}

/// Best displaced-Fock description of a photon distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// `Coherent` when the best `k` is 0.
    pub model: FitModel,
    pub k: usize,
    /// Fitted `|α|²` (the mean photon number when `k = 0`).
    pub alpha_sq: f64,
    /// Sum of squared residuals.
    pub goodness: f64,
    /// `p_n − p_n^{fit}` for each `n` of the input.
    pub residuals: Vec<f64>,
}

impl FitResult {
    pub fn fitted(&self, n: usize) -> f64 {
        dfs_pn(Complex64::new(libm::sqrt(self.alpha_sq), 0.0), self.k, n)
    }
}

fn dfs_residual(pn: &PhotonDistribution, k: usize, alpha_sq: f64) -> f64 {
    let alpha = Complex64::new(libm::sqrt(alpha_sq.max(0.0)), 0.0);
    pn.probs
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let r = p - dfs_pn(alpha, k, n);
            r * r
        })
        .sum()
}

/// Golden-section minimization of `f` on `[a, b]`.
fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Least-squares fit of `p_n` by `dfs_pn(|α|², k, ·)` for every `k ≤ k_max`.
///
/// For each `k` the residual is scanned over
/// `[max(0, n̂ − k − 3√n̂), n̂ + 3√n̂] ∩ [0, N]` and the best scan cell refined by
/// golden-section search to 1e−8 in `|α|²`.
pub fn fit_dfs(pn: &PhotonDistribution, k_max: usize) -> Result<FitResult> {
    require_complete(pn)?;
    let nbar = pn.mean();
    let cap = pn.len() as f64;
    let mut best: Option<(usize, f64, f64)> = None;
    for k in 0..=k_max {
        let spread = 3.0 * libm::sqrt(nbar);
        let lo = (nbar - k as f64 - spread).max(0.0);
        let hi = (nbar + spread).min(cap).max(lo + 1e-6);
        let step = (hi - lo) / (FIT_SCAN_POINTS - 1) as f64;
        let objective = |a: f64| dfs_residual(pn, k, a);
        let (mut arg, mut val) = (lo, f64::INFINITY);
        for i in 0..FIT_SCAN_POINTS {
            let a = lo + step * i as f64;
            let v = objective(a);
            if v < val {
                arg = a;
                val = v;
            }
        }
        let refined = golden_section(objective, (arg - step).max(lo), (arg + step).min(hi), FIT_TOLERANCE);
        let refined_val = objective(refined);
        let (a, v) = if refined_val <= val { (refined, refined_val) } else { (arg, val) };
        match best {
            Some((_, _, bv)) if v >= bv - FIT_TIE => {}
            _ => best = Some((k, a, v)),
        }
    }
    let (k, alpha_sq, goodness) = best.expect("k_max >= 0 yields one candidate");
    let mut result = FitResult {
        model: if k == 0 { FitModel::Coherent } else { FitModel::DisplacedFock },
        k,
        alpha_sq,
        goodness,
        residuals: Vec::new(),
    };
    result.residuals = pn.probs.iter().enumerate().map(|(n, p)| p - result.fitted(n)).collect();
    Ok(result)
}

/// Negativity summary of a Wigner grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerNegativity {
    pub min_value: f64,
    pub min_location: (f64, f64),
    /// `Σ_{W<0} |W| Δx Δy` over grid cells.
    pub negative_volume: f64,
}

pub fn wigner_negativity(grid: &WignerGrid) -> WignerNegativity {
    let (dx, dy) = grid.spacing();
    let ny = grid.y_axis.len();
    let (mut min_value, mut at) = (f64::INFINITY, 0usize);
    let mut negative = 0.0;
    for (i, &w) in grid.values.iter().enumerate() {
        if w < min_value {
            min_value = w;
            at = i;
        }
        if w < 0.0 {
            negative -= w;
        }
    }
    WignerNegativity {
        min_value,
        min_location: (grid.x_axis[at / ny], grid.y_axis[at % ny]),
        negative_volume: negative * dx * dy,
    }
}

/// Shape comparison between a measured and a model Wigner grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerComparison {
    /// `min W_measured / min W_model`.
    pub min_ratio: f64,
    /// Ratio of second moments `∫ |β − β̄|² W` about each grid's own centroid.
    pub second_moment_ratio: f64,
}

fn second_moment(grid: &WignerGrid) -> f64 {
    let ny = grid.y_axis.len();
    let (mut w0, mut wx, mut wy) = (0.0, 0.0, 0.0);
    for (i, &w) in grid.values.iter().enumerate() {
        let (x, y) = (grid.x_axis[i / ny], grid.y_axis[i % ny]);
        w0 += w;
        wx += w * x;
        wy += w * y;
    }
    let (cx, cy) = (wx / w0, wy / w0);
    grid.values
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let (x, y) = (grid.x_axis[i / ny] - cx, grid.y_axis[i % ny] - cy);
            w * (x * x + y * y)
        })
        .sum::<f64>()
        / w0
}

pub fn compare_wigner(measured: &WignerGrid, model: &WignerGrid) -> WignerComparison {
    WignerComparison {
        min_ratio: measured.min() / model.min(),
        second_moment_ratio: second_moment(measured) / second_moment(model),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{default_axes, state_to_density, wigner_from_density, StateSpec};
    use alloc::vec;
    use core::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dist(f: impl Fn(usize) -> f64, n: usize) -> PhotonDistribution {
        PhotonDistribution::new((0..n).map(f).collect()).unwrap()
    }

    #[test]
    fn fidelity_basics() {
        let a = state_to_density(&StateSpec::Coherent { alpha: c(1.0, 0.3) }, 20).unwrap();
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let f0 = state_to_density(&StateSpec::Fock { k: 0 }, 5).unwrap();
        let f1 = state_to_density(&StateSpec::Fock { k: 1 }, 5).unwrap();
        assert_eq!(fidelity(&f0, &f1).unwrap(), 0.0);
        let coh = state_to_density(&StateSpec::Coherent { alpha: c(5f64.sqrt(), 0.0) }, 40).unwrap();
        let mixed = DensityMatrix::maximally_mixed(40).unwrap();
        assert!((fidelity(&coh, &mixed).unwrap() - 1.0 / 40.0).abs() < 1e-12);
        assert!(matches!(fidelity(&f0, &a), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn fidelity_mixed_pair_symmetric() {
        let th1 = state_to_density(&StateSpec::Thermal { nbar: 0.5 }, 30).unwrap();
        let th2 = state_to_density(&StateSpec::Thermal { nbar: 0.8 }, 30).unwrap();
        let f12 = fidelity(&th1, &th2).unwrap();
        let f21 = fidelity(&th2, &th1).unwrap();
        assert!((f12 - f21).abs() < 1e-9);
        // Commuting diagonal states: F = (Σ √(p q))².
        let bc: f64 = (0..30)
            .map(|n| (crate::states::thermal_pn(0.5, n) * crate::states::thermal_pn(0.8, n)).sqrt())
            .sum();
        assert!((f12 - bc * bc).abs() < 1e-9);
    }

    #[test]
    fn trace_distance_orthogonal() {
        let f0 = state_to_density(&StateSpec::Fock { k: 0 }, 4).unwrap();
        let f1 = state_to_density(&StateSpec::Fock { k: 1 }, 4).unwrap();
        assert!((trace_distance(&f0, &f1).unwrap() - 1.0).abs() < 1e-12);
        assert!(trace_distance(&f0, &f0).unwrap() < 1e-12);
    }

    #[test]
    fn poisson_deviation_values() {
        for lam in [0.5, 5.0, 14.0] {
            let d = poisson_deviation(&dist(|n| poisson_pn(lam, n), 120)).unwrap();
            assert!(d.tv_distance < 1e-9);
            assert!((d.nbar_hat - lam).abs() < 1e-9);
        }
        let mut p = vec![0.0; 40];
        p[1] = 1.0;
        let d = poisson_deviation(&PhotonDistribution::new(p).unwrap()).unwrap();
        assert_eq!(d.nbar_hat, 1.0);
        assert!((d.tv_distance - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        let dfs = poisson_deviation(&dist(|n| dfs_pn(c(3f64.sqrt(), 0.0), 1, n), 40)).unwrap();
        assert!(dfs.tv_distance > 0.1);
    }

    #[test]
    fn fit_recovers_own_models() {
        let r = fit_dfs(&dist(|n| dfs_pn(c(3.0, 0.0), 1, n), 40), 5).unwrap();
        assert_eq!((r.k, r.model), (1, FitModel::DisplacedFock));
        assert!((r.alpha_sq - 9.0).abs() < 1e-6, "{}", r.alpha_sq);
        let r = fit_dfs(&dist(|n| poisson_pn(5.0, n), 40), 5).unwrap();
        assert_eq!((r.k, r.model), (0, FitModel::Coherent));
        assert!((r.alpha_sq - 5.0).abs() < 1e-6);
    }

    #[test]
    fn fit_mixture_beats_pure_models() {
        let a2 = c(2.0, 0.0);
        let mix = dist(|n| 0.5 * poisson_pn(4.0, n) + 0.5 * dfs_pn(a2, 1, n), 40);
        let r = fit_dfs(&mix, 5).unwrap();
        let pure_coh = dfs_residual(&mix, 0, 4.0);
        let pure_dfs = dfs_residual(&mix, 1, 4.0);
        assert!(r.goodness > 0.0);
        assert!(r.goodness < pure_coh && r.goodness < pure_dfs);
    }

    #[test]
    fn fit_is_phase_blind() {
        let base = c(2.15, 2.1);
        let r0 = fit_dfs(&dist(|n| dfs_pn(base, 1, n), 40), 3).unwrap();
        for i in 1..8 {
            let rot = base * Complex64::from_polar(1.0, i as f64 * PI / 4.0);
            let r = fit_dfs(&dist(|n| dfs_pn(rot, 1, n), 40), 3).unwrap();
            assert_eq!(r.k, r0.k);
            assert!((r.alpha_sq - r0.alpha_sq).abs() < 1e-9);
        }
    }

    #[test]
    fn negativity_of_vacuum_and_dfs() {
        let vac = state_to_density(&StateSpec::Fock { k: 0 }, 10).unwrap();
        let (x, y) = default_axes(c(0.0, 0.0), 4.0, 41);
        let g = wigner_from_density(&vac, &x, &y).unwrap();
        let neg = wigner_negativity(&g);
        assert!(neg.min_value >= -1e-9);
        assert!(neg.negative_volume < 1e-9);
        let alpha = c(1.0, -0.5);
        let dfs = state_to_density(&StateSpec::DisplacedFock { alpha, k: 1 }, 30).unwrap();
        let (x, y) = default_axes(alpha, 4.0, 81);
        let g = wigner_from_density(&dfs, &x, &y).unwrap();
        let neg = wigner_negativity(&g);
        assert!((neg.min_value + 2.0 / PI).abs() < 1e-8);
        assert!((neg.min_location.0 - 1.0).abs() < 1e-12 && (neg.min_location.1 + 0.5).abs() < 1e-12);
        assert!(neg.negative_volume > 0.0);
        let cmp = compare_wigner(&g, &g);
        assert!((cmp.min_ratio - 1.0).abs() < 1e-15 && (cmp.second_moment_ratio - 1.0).abs() < 1e-15);
    }
}
