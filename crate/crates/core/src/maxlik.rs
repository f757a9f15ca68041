//! Maximum-likelihood density-matrix reconstruction from phase-tagged quadratures.
//!
//! Samples are histogrammed on a (phase × quadrature) grid. Each bin owns a POVM
//! element `Π_b` and the state is refined by the fixed-point map
//! `ρ ← N[R(ρ) ρ R(ρ)]`, `R(ρ) = Σ_b (n_b / Tr(ρΠ_b)) Π_b`, starting from `I/dim`.
//!
//! Every `Π_b` factorizes as `U_θ H_j U_θ†` with `U_θ = diag(e^{imθ})` and a real
//! symmetric `H_j` that depends on the quadrature bin only, so one iteration costs two
//! passes over the packed upper triangles of the `H_j`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::DensityMatrix;
use crate::homodyne::QuadratureRecord;
use crate::linalg::CMatrix;
use crate::special::{gauss_legendre_on, hermite_gauss_fill};
use crate::states::quadrature_pdf_with;

/// Probabilities below this for a populated bin abort the reconstruction.
pub const MIN_BIN_PROBABILITY: f64 = 1e-300;
const POVM_TOL: f64 = 1e-10;
const POVM_MAX_NODES: usize = 256;
const POVM_START_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionConfig {
    pub dim: usize,
    pub max_iters: usize,
    /// Stop once the per-sample log-likelihood gain of an iteration falls below this.
    pub ll_tolerance: f64,
    pub n_theta: usize,
    pub n_x: usize,
    /// Quadrature bins cover `[−x_range, x_range]`.
    pub x_range: f64,
    /// Average each bin's POVM over the width of its phase bin.
    pub phase_averaged: bool,
    /// Record trace and minimum eigenvalue after every iteration.
    pub track_physicality: bool,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        ReconstructionConfig {
            dim: crate::DEFAULT_DIM,
            max_iters: 2000,
            ll_tolerance: 1e-9,
            n_theta: 24,
            n_x: 128,
            x_range: 8.0,
            phase_averaged: true,
            track_physicality: false,
        }
    }
}

impl ReconstructionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidParameter("truncation dim must be at least 2"));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter("max_iters must be at least 1"));
        }
        if !(self.ll_tolerance > 0.0) || !(self.x_range > 0.0) {
            return Err(Error::InvalidParameter("tolerance and x_range must be positive"));
        }
        if self.n_theta == 0 || self.n_x == 0 {
            return Err(Error::InvalidParameter("bin counts must be positive"));
        }
        Ok(())
    }
}

/// One histogram cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub theta_center: f64,
    pub x_center: f64,
    pub count: u64,
}

/// Phase × quadrature histogram. Phases are binned modulo 2π.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedData {
    pub n_theta: usize,
    pub n_x: usize,
    pub x_range: f64,
    /// `counts[t * n_x + j]`.
    pub counts: Vec<u64>,
    pub total_count: u64,
    /// Records with `|y| ≥ x_range`, excluded from the histogram.
    pub overflow: u64,
}

impl BinnedData {
    /// Bin widths `(Δθ, Δx)`.
    pub fn widths(&self) -> (f64, f64) {
        (TAU / self.n_theta as f64, 2.0 * self.x_range / self.n_x as f64)
    }

    pub fn theta_center(&self, t: usize) -> f64 {
        (t as f64 + 0.5) * self.widths().0
    }

    pub fn x_edges(&self, j: usize) -> (f64, f64) {
        let dx = self.widths().1;
        (-self.x_range + j as f64 * dx, -self.x_range + (j + 1) as f64 * dx)
    }

    pub fn count(&self, t: usize, j: usize) -> u64 {
        self.counts[t * self.n_x + j]
    }

    pub fn bins(&self) -> impl Iterator<Item = Bin> + '_ {
        (0..self.n_theta).flat_map(move |t| {
            (0..self.n_x).map(move |j| {
                let (lo, hi) = self.x_edges(j);
                Bin { theta_center: self.theta_center(t), x_center: 0.5 * (lo + hi), count: self.count(t, j) }
            })
        })
    }
}

/// Builds the phase × quadrature histogram.
pub fn bin_quadratures(records: &[QuadratureRecord], config: &ReconstructionConfig) -> Result<BinnedData> {
    if records.is_empty() {
        return Err(Error::EmptyData);
    }
    config.validate()?;
    let (n_theta, n_x, range) = (config.n_theta, config.n_x, config.x_range);
    let dtheta = TAU / n_theta as f64;
    let dx = 2.0 * range / n_x as f64;
    let mut counts = vec![0u64; n_theta * n_x];
    let mut total = 0;
    let mut overflow = 0;
    for r in records {
        if !(r.y.is_finite() && r.theta.is_finite()) {
            return Err(Error::InvalidParameter("non-finite quadrature record"));
        }
        if libm::fabs(r.y) >= range {
            overflow += 1;
            continue;
        }
        let th = match libm::fmod(r.theta, TAU) {
            w if w < 0.0 => w + TAU,
            w => w,
        };
        let t = ((th / dtheta) as usize).min(n_theta - 1);
        let j = (((r.y + range) / dx) as usize).min(n_x - 1);
        counts[t * n_x + j] += 1;
        total += 1;
    }
    if overflow > 0 {
        log::warn!("{overflow} records outside ±{range} excluded from the histogram");
    }
    Ok(BinnedData { n_theta, n_x, x_range: range, counts, total_count: total, overflow })
}

/// `G_mn = ∫_{lo}^{hi} ψ_m(x) ψ_n(x) dx` as a dense row-major real matrix, by
/// Gauss–Legendre quadrature doubled until no element moves by more than 1e−10.
pub fn overlap_integrals(x_lo: f64, x_hi: f64, dim: usize) -> Vec<f64> {
    let eval = |order: usize| {
        let (xs, ws) = gauss_legendre_on(order, x_lo, x_hi);
        let mut g = vec![0.0; dim * dim];
        let mut psi = vec![0.0; dim];
        for (x, w) in xs.iter().zip(&ws) {
            hermite_gauss_fill(*x, &mut psi);
            for m in 0..dim {
                let wm = w * psi[m];
                for n in m..dim {
                    g[m * dim + n] += wm * psi[n];
                }
            }
        }
        for m in 0..dim {
            for n in 0..m {
                g[m * dim + n] = g[n * dim + m];
            }
        }
        g
    };
    let mut order = POVM_START_NODES;
    let mut g = eval(order);
    while order < POVM_MAX_NODES {
        order *= 2;
        let next = eval(order);
        let change = g.iter().zip(&next).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max);
        g = next;
        if change < POVM_TOL {
            break;
        }
    }
    g
}

/// Replaces infinite integration limits by a point beyond every retained wavefunction.
fn finite_limit(x: f64, dim: usize) -> f64 {
    let edge = libm::sqrt(2.0 * dim as f64 + 1.0) + 12.0;
    x.clamp(-edge, edge)
}

/// `Π_mn = ∫_{x_lo}^{x_hi} ⟨m|x_θ⟩⟨x_θ|n⟩ dx = e^{i(m−n)θ} ∫ ψ_m ψ_n dx`, so that
/// `Tr(ρΠ)` is the probability of a quadrature in `[x_lo, x_hi]` at phase `θ`.
pub fn povm_element(theta: f64, x_lo: f64, x_hi: f64, dim: usize) -> Result<CMatrix> {
    povm_element_averaged(theta, 0.0, x_lo, x_hi, dim)
}

/// [`povm_element`] averaged uniformly over phases `theta ± dtheta/2`.
pub fn povm_element_averaged(theta: f64, dtheta: f64, x_lo: f64, x_hi: f64, dim: usize) -> Result<CMatrix> {
    if !(x_lo < x_hi) {
        return Err(Error::InvalidParameter("povm bin needs x_lo < x_hi"));
    }
    let g = overlap_integrals(finite_limit(x_lo, dim), finite_limit(x_hi, dim), dim);
    Ok(CMatrix::from_fn(dim, |m, n| {
        let d = m as f64 - n as f64;
        Complex64::from_polar(sinc(0.5 * d * dtheta), d * theta) * g[m * dim + n]
    }))
}

fn sinc(x: f64) -> f64 {
    if libm::fabs(x) < 1e-8 {
        1.0
    } else {
        libm::sin(x) / x
    }
}

/// Index of `(m, n)`, `m ≤ n`, in a packed upper triangle of order `dim`.
fn packed_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

/// Precomputed POVM factors for one histogram geometry.
pub struct PovmSet {
    dim: usize,
    n_theta: usize,
    n_x: usize,
    /// Packed upper triangles of `H_j` (off-diagonals doubled in `h_weighted`).
    h: Vec<f64>,
    h_weighted: Vec<f64>,
    /// `e^{iθ_t}` per phase bin.
    phases: Vec<Complex64>,
}

impl PovmSet {
    pub fn new(data: &BinnedData, dim: usize, phase_averaged: bool) -> Self {
        let (dtheta, _) = data.widths();
        let plen = packed_len(dim);
        let mut h = Vec::with_capacity(data.n_x * plen);
        let mut h_weighted = Vec::with_capacity(data.n_x * plen);
        let damp: Vec<f64> = (0..dim)
            .map(|d| if phase_averaged { sinc(0.5 * d as f64 * dtheta) } else { 1.0 })
            .collect();
        for j in 0..data.n_x {
            let (lo, hi) = data.x_edges(j);
            let g = overlap_integrals(lo, hi, dim);
            for m in 0..dim {
                for n in m..dim {
                    let v = g[m * dim + n] * damp[n - m];
                    h.push(v);
                    h_weighted.push(if n == m { v } else { 2.0 * v });
                }
            }
        }
        let phases = (0..data.n_theta).map(|t| Complex64::from_polar(1.0, data.theta_center(t))).collect();
        PovmSet { dim, n_theta: data.n_theta, n_x: data.n_x, h, h_weighted, phases }
    }

    /// Packed `Re(ρ_mn e^{i(n−m)θ_t})` for every phase bin.
    fn rotated_real_parts(&self, rho: &CMatrix) -> Vec<f64> {
        let dim = self.dim;
        let plen = packed_len(dim);
        let mut out = Vec::with_capacity(self.n_theta * plen);
        let mut pw = vec![Complex64::new(1.0, 0.0); dim];
        for ph in &self.phases {
            for d in 1..dim {
                pw[d] = pw[d - 1] * ph;
            }
            for m in 0..dim {
                for n in m..dim {
                    out.push((rho[(m, n)] * pw[n - m]).re);
                }
            }
        }
        out
    }

    /// `Tr(ρΠ_b)` for every bin with a nonzero count (`NaN` for empty bins).
    pub fn probabilities(&self, rho: &CMatrix, data: &BinnedData) -> Vec<f64> {
        let plen = packed_len(self.dim);
        let rot = self.rotated_real_parts(rho);
        let mut out = vec![f64::NAN; self.n_theta * self.n_x];
        for t in 0..self.n_theta {
            let a = &rot[t * plen..(t + 1) * plen];
            for j in 0..self.n_x {
                if data.count(t, j) == 0 {
                    continue;
                }
                let hj = &self.h_weighted[j * plen..(j + 1) * plen];
                out[t * self.n_x + j] = a.iter().zip(hj).map(|(x, y)| x * y).sum();
            }
        }
        out
    }

    /// `R = Σ_b (n_b / p_b) Π_b / N`.
    fn r_operator(&self, probs: &[f64], data: &BinnedData) -> CMatrix {
        let dim = self.dim;
        let plen = packed_len(dim);
        let inv_total = 1.0 / data.total_count as f64;
        let mut r = CMatrix::zeros(dim);
        let mut b = vec![0.0; plen];
        let mut pw = vec![Complex64::new(1.0, 0.0); dim];
        for t in 0..self.n_theta {
            b.iter_mut().for_each(|v| *v = 0.0);
            for j in 0..self.n_x {
                let c = data.count(t, j);
                if c == 0 {
                    continue;
                }
                let w = c as f64 * inv_total / probs[t * self.n_x + j];
                for (acc, hv) in b.iter_mut().zip(&self.h[j * plen..(j + 1) * plen]) {
                    *acc += w * hv;
                }
            }
            for d in 1..dim {
                pw[d] = pw[d - 1] * self.phases[t];
            }
            // R_mn += e^{i(m−n)θ} B_mn; lower triangle by Hermiticity.
            let mut k = 0;
            for m in 0..dim {
                for n in m..dim {
                    let z = pw[n - m].conj() * b[k];
                    r[(m, n)] += z;
                    if n != m {
                        r[(n, m)] += z.conj();
                    }
                    k += 1;
                }
            }
        }
        r
    }
}

/// Total and per-sample log-likelihood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLikelihood {
    pub total: f64,
    pub per_sample: f64,
}

fn ll_from_probs(probs: &[f64], data: &BinnedData) -> Result<LogLikelihood> {
    let mut total = 0.0;
    for t in 0..data.n_theta {
        for j in 0..data.n_x {
            let c = data.count(t, j);
            if c == 0 {
                continue;
            }
            let p = probs[t * data.n_x + j];
            if !(p >= MIN_BIN_PROBABILITY) {
                let (lo, hi) = data.x_edges(j);
                return Err(Error::ZeroProbabilityBin { theta: data.theta_center(t), x: 0.5 * (lo + hi), probability: p });
            }
            total += c as f64 * libm::log(p);
        }
    }
    Ok(LogLikelihood { total, per_sample: total / data.total_count.max(1) as f64 })
}

/// `Σ_b n_b ln Tr(ρΠ_b)` with phase-averaged bin POVMs.
pub fn log_likelihood(rho: &DensityMatrix, data: &BinnedData) -> Result<LogLikelihood> {
    let povms = PovmSet::new(data, rho.dim(), true);
    ll_from_probs(&povms.probabilities(rho.matrix(), data), data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Tolerance,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub rho: DensityMatrix,
    pub iterations_used: usize,
    pub ll_per_sample: f64,
    /// Per-sample log-likelihood of the start point and of every iterate.
    pub ll_trace: Vec<f64>,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Iterations where plain RρR lowered the likelihood and a diluted step was taken.
    pub diluted_steps: usize,
    /// `(|Tr ρ − 1|, λ_min)` after each iteration, when tracked.
    pub physicality: Vec<(f64, f64)>,
}

/// `N[(I + εR) ρ (I + εR)]` with Hermitian symmetrization; `ε = ∞` gives `N[RρR]`.
fn step(rho: &CMatrix, r: &CMatrix, eps: Option<f64>) -> CMatrix {
    let dim = rho.dim();
    let op = match eps {
        None => r.clone(),
        Some(e) => &CMatrix::identity(dim) + &r.scale(e),
    };
    let next = &(&op * rho) * &op;
    let sym = next.hermitian_part();
    let tr = sym.trace().re;
    sym.scale(1.0 / tr)
}

/// Iterative maximum-likelihood reconstruction from a histogram.
pub fn maxlik_reconstruct(data: &BinnedData, config: &ReconstructionConfig) -> Result<ReconstructionReport> {
    config.validate()?;
    if data.total_count == 0 {
        return Err(Error::EmptyData);
    }
    if data.total_count < 1000 {
        log::warn!("reconstructing from only {} samples", data.total_count);
    }
    let povms = PovmSet::new(data, config.dim, config.phase_averaged);
    iterate(config, CMatrix::identity(config.dim).scale(1.0 / config.dim as f64), |rho| {
        let probs = povms.probabilities(rho, data);
        let ll = ll_from_probs(&probs, data)?;
        Ok((ll.per_sample, probs))
    }, |probs| povms.r_operator(probs, data))
}

/// Shared fixed-point loop. `evaluate` returns the per-sample likelihood and whatever
/// `r_of` needs to build `R/N` at that point.
fn iterate<P>(
    config: &ReconstructionConfig,
    start: CMatrix,
    evaluate: impl Fn(&CMatrix) -> Result<(f64, P)>,
    r_of: impl Fn(&P) -> CMatrix,
) -> Result<ReconstructionReport> {
    let mut rho = start;
    let (mut ll, mut aux) = evaluate(&rho)?;
    let mut ll_trace = vec![ll];
    let mut physicality = Vec::new();
    let mut diluted_steps = 0;
    let mut stop_reason = StopReason::MaxIterations;
    let mut iterations = 0;
    while iterations < config.max_iters {
        iterations += 1;
        let r = r_of(&aux);
        let mut candidate = step(&rho, &r, None);
        let (mut cand_ll, mut cand_aux) = evaluate(&candidate)?;
        if cand_ll < ll {
            diluted_steps += 1;
            let mut eps = 1.0;
            loop {
                candidate = step(&rho, &r, Some(eps));
                let (l, a) = evaluate(&candidate)?;
                if l >= ll {
                    cand_ll = l;
                    cand_aux = a;
                    break;
                }
                eps *= 0.5;
                if eps < 1e-12 {
                    // No ascent direction left at working precision.
                    candidate = rho.clone();
                    cand_ll = ll;
                    cand_aux = aux;
                    break;
                }
            }
        }
        let gain = cand_ll - ll;
        rho = candidate;
        ll = cand_ll;
        aux = cand_aux;
        ll_trace.push(ll);
        if config.track_physicality {
            physicality.push((libm::fabs(rho.trace().re - 1.0), rho.min_hermitian_eigenvalue()));
        }
        if gain < config.ll_tolerance {
            stop_reason = StopReason::Tolerance;
            break;
        }
    }
    Ok(ReconstructionReport {
        rho: DensityMatrix::from_matrix_unchecked(rho),
        iterations_used: iterations,
        ll_per_sample: ll,
        ll_trace,
        converged: stop_reason == StopReason::Tolerance,
        stop_reason,
        diluted_steps,
        physicality,
    })
}

/// Reconstruction with one projector `|x_θ⟩⟨x_θ|` per sample instead of histogram bins.
///
/// Likelihoods are densities, so absolute values differ from the binned mode by the
/// bin-width terms; cost per iteration grows with the sample count.
pub fn maxlik_reconstruct_unbinned(
    records: &[QuadratureRecord],
    config: &ReconstructionConfig,
) -> Result<ReconstructionReport> {
    config.validate()?;
    if records.is_empty() {
        return Err(Error::EmptyData);
    }
    let dim = config.dim;
    let psis: Vec<Vec<f64>> = records
        .iter()
        .map(|r| {
            let mut p = vec![0.0; dim];
            hermite_gauss_fill(r.y, &mut p);
            p
        })
        .collect();
    let n = records.len() as f64;
    let evaluate = |rho: &CMatrix| -> Result<(f64, Vec<f64>)> {
        let mut total = 0.0;
        let mut probs = Vec::with_capacity(records.len());
        for (r, psi) in records.iter().zip(&psis) {
            let p = quadrature_pdf_with(rho, r.theta, psi);
            if !(p >= MIN_BIN_PROBABILITY) {
                return Err(Error::ZeroProbabilityBin { theta: r.theta, x: r.y, probability: p });
            }
            total += libm::log(p);
            probs.push(p);
        }
        Ok((total / n, probs))
    };
    let r_of = |probs: &Vec<f64>| {
        let mut r = CMatrix::zeros(dim);
        for ((rec, psi), p) in records.iter().zip(&psis).zip(probs) {
            let w = 1.0 / (p * n);
            let v: Vec<Complex64> = (0..dim).map(|m| Complex64::from_polar(psi[m], m as f64 * rec.theta)).collect();
            for a in 0..dim {
                for b in a..dim {
                    let z = v[a] * v[b].conj() * w;
                    r[(a, b)] += z;
                    if a != b {
                        r[(b, a)] += z.conj();
                    }
                }
            }
        }
        r
    };
    iterate(config, CMatrix::identity(dim).scale(1.0 / dim as f64), evaluate, r_of)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homodyne::{sample_quadratures, PhaseSchedule};
    use crate::states::{quadrature_pdf, state_to_density, StateSpec};
    use crate::special::hermite_gauss_all;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_record_single_bin() {
        let cfg = ReconstructionConfig::default();
        let data = bin_quadratures(&[QuadratureRecord { theta: 1.0, y: 0.3 }], &cfg).unwrap();
        assert_eq!(data.total_count, 1);
        assert_eq!(data.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(data.bins().map(|b| b.count).sum::<u64>(), 1);
        assert_eq!(bin_quadratures(&[], &cfg), Err(Error::EmptyData));
    }

    #[test]
    fn binning_wraps_phases_and_counts_overflow() {
        let cfg = ReconstructionConfig { n_theta: 4, n_x: 4, x_range: 2.0, ..Default::default() };
        let recs = [
            QuadratureRecord { theta: -0.1, y: 0.1 },
            QuadratureRecord { theta: TAU - 0.1, y: 0.1 },
            QuadratureRecord { theta: 0.0, y: 3.0 },
        ];
        let data = bin_quadratures(&recs, &cfg).unwrap();
        assert_eq!(data.count(3, 2), 2);
        assert_eq!(data.overflow, 1);
        assert_eq!(data.total_count, 2);
    }

    #[test]
    fn povm_completeness_full_line() {
        for th in [0.0, 1.3] {
            let p = povm_element(th, f64::NEG_INFINITY, f64::INFINITY, 12).unwrap();
            assert!(p.max_abs_diff(&CMatrix::identity(12)) < 1e-8);
        }
    }

    #[test]
    fn povm_partition_resolves_identity() {
        let dim = 10;
        let edges = [-14.0, -3.0, -1.0, -0.2, 0.5, 2.0, 14.0];
        let mut sum = CMatrix::zeros(dim);
        for w in edges.windows(2) {
            sum = &sum + &povm_element(0.7, w[0], w[1], dim).unwrap();
        }
        assert!(sum.max_abs_diff(&CMatrix::identity(dim)) < 1e-8);
    }

    #[test]
    fn povm_narrow_bin_midpoint_limit() {
        let (x0, h) = (0.4, 1e-4);
        let p = povm_element(0.0, x0 - h / 2.0, x0 + h / 2.0, 2).unwrap();
        let psi = hermite_gauss_all(2, x0);
        for m in 0..2 {
            for n in 0..2 {
                assert!((p[(m, n)].re - h * psi[m] * psi[n]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn povm_trace_integrates_pdf() {
        let rho = state_to_density(&StateSpec::DisplacedFock { alpha: c(1.0, -0.8), k: 1 }, 20).unwrap();
        let (th, lo, hi) = (2.1, -0.4, 0.9);
        let p = rho.expectation(&povm_element(th, lo, hi, 20).unwrap());
        let (xs, ws) = gauss_legendre_on(80, lo, hi);
        let direct: f64 = xs.iter().zip(&ws).map(|(x, w)| w * quadrature_pdf(&rho, th, *x)).sum();
        assert!(p.im.abs() < 1e-14);
        assert!((p.re - direct).abs() < 1e-12);
        assert!(povm_element(0.0, 1.0, 1.0, 3).is_err());
    }

    #[test]
    fn povm_is_positive() {
        let p = povm_element_averaged(0.4, 0.3, -0.5, 0.25, 15).unwrap();
        assert!(p.min_hermitian_eigenvalue() > -1e-14);
        assert!(p.hermitian_deviation() < 1e-15);
    }

    #[test]
    fn log_likelihood_simple_cases() {
        let vac = state_to_density(&StateSpec::Fock { k: 0 }, 6).unwrap();
        let one_bin = ReconstructionConfig { n_theta: 1, n_x: 1, x_range: 8.0, ..Default::default() };
        let data = bin_quadratures(&[QuadratureRecord { theta: 0.0, y: 0.1 }], &one_bin).unwrap();
        assert!(log_likelihood(&vac, &data).unwrap().total.abs() < 1e-12);
        let two = ReconstructionConfig { n_x: 2, ..one_bin };
        let recs = [QuadratureRecord { theta: 0.0, y: -0.5 }, QuadratureRecord { theta: 0.0, y: 0.5 }];
        let data = bin_quadratures(&recs, &two).unwrap();
        let ll = log_likelihood(&vac, &data).unwrap();
        assert!((ll.total - 2.0 * 0.5f64.ln()).abs() < 1e-12);
        assert!((ll.per_sample - 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_probability_bin_is_reported() {
        // The vacuum mass in [60, 120] is ~e^{-3600}, far below the f64 range.
        let vac = state_to_density(&StateSpec::Fock { k: 0 }, 2).unwrap();
        let cfg = ReconstructionConfig { n_theta: 1, n_x: 4, x_range: 120.0, ..Default::default() };
        let data = bin_quadratures(&[QuadratureRecord { theta: 0.0, y: 100.0 }], &cfg).unwrap();
        assert!(matches!(log_likelihood(&vac, &data), Err(Error::ZeroProbabilityBin { .. })));
    }

    #[test]
    fn vacuum_recovery_small() {
        let rho = state_to_density(&StateSpec::Fock { k: 0 }, 10).unwrap();
        let recs = sample_quadratures(&rho, &PhaseSchedule::full_circle(20_000), 3, 1.0).unwrap();
        let cfg = ReconstructionConfig { dim: 8, max_iters: 300, ..Default::default() };
        let data = bin_quadratures(&recs, &cfg).unwrap();
        let rep = maxlik_reconstruct(&data, &cfg).unwrap();
        assert!(rep.rho.get(0, 0).re > 0.98, "{}", rep.rho.get(0, 0).re);
        for w in rep.ll_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        crate::fock::validate(rep.rho.matrix()).unwrap();
    }

    #[test]
    fn unbinned_mode_recovers_coherent() {
        let alpha = c(0.9, 0.4);
        let rho = state_to_density(&StateSpec::Coherent { alpha }, 12).unwrap();
        let recs = sample_quadratures(&rho, &PhaseSchedule::full_circle(3000), 5, 1.0).unwrap();
        let cfg = ReconstructionConfig { dim: 12, max_iters: 200, ll_tolerance: 1e-7, ..Default::default() };
        let rep = maxlik_reconstruct_unbinned(&recs, &cfg).unwrap();
        let truth = rho;
        let f = rep.rho.expectation(truth.matrix()).re;
        assert!(f > 0.97, "{f}");
        for w in rep.ll_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn config_validation() {
        let bad = ReconstructionConfig { dim: 1, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ReconstructionConfig { max_iters: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ReconstructionConfig { ll_tolerance: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
