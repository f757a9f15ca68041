//! Synthetic pulsed-homodyne data: Born-rule quadrature sampling, photon loss and raw
//! balanced-detector traces.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::fock::{annihilation_matrix, DensityMatrix};
use crate::linalg::CMatrix;
use crate::rng;
use crate::special::{gauss_legendre, hermite_gauss_fill, ln_binomial};

/// Nodes of the tabulated cumulative distribution used for inverse-CDF sampling.
pub const CDF_NODES: usize = 4096;
/// Half-width of the tabulated support in standard deviations.
pub const CDF_SUPPORT_SIGMAS: f64 = 8.0;

/// Local-oscillator phases at which samples are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseSchedule {
    /// `n_samples` phases `start + (end − start)·i / n_samples`, end excluded, so a
    /// `0 → 2π` ramp covers the circle uniformly.
    LinearRamp { start: f64, end: f64, n_samples: usize },
    ExplicitList(Vec<f64>),
}

impl PhaseSchedule {
    /// Uniform `[0, 2π)` ramp.
    pub fn full_circle(n_samples: usize) -> Self {
        PhaseSchedule::LinearRamp { start: 0.0, end: TAU, n_samples }
    }

    pub fn phases(&self) -> Result<Vec<f64>> {
        let phases: Vec<f64> = match self {
            PhaseSchedule::LinearRamp { start, end, n_samples } => {
                if *n_samples == 0 {
                    return Err(Error::InvalidParameter("phase ramp needs at least one sample"));
                }
                (0..*n_samples).map(|i| start + (end - start) * i as f64 / *n_samples as f64).collect()
            }
            PhaseSchedule::ExplicitList(p) => p.clone(),
        };
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("phases must be finite"));
        }
        Ok(phases)
    }
}

/// One homodyne sample: LO phase (rad) and normalized quadrature (vacuum variance 1/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureRecord {
    pub theta: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceRole {
    Signal,
    Blocked,
}

/// Sampled balanced-detector voltage.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTrace {
    /// Seconds between samples.
    pub sample_period: f64,
    /// Volts.
    pub samples: Vec<f64>,
    /// Seconds between pulses.
    pub pulse_period: f64,
    pub role: TraceRole,
}

impl RawTrace {
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_period > 0.0 && self.sample_period.is_finite()) {
            return Err(Error::InvalidParameter("sample period must be positive"));
        }
        if !(self.pulse_period >= 2.0 * self.sample_period && self.pulse_period.is_finite()) {
            return Err(Error::InvalidParameter("pulse period must span at least two samples"));
        }
        Ok(())
    }

    /// Samples per pulse period.
    pub fn samples_per_period(&self) -> usize {
        libm::round(self.pulse_period / self.sample_period) as usize
    }

    /// Number of complete pulse periods in the trace.
    pub fn n_periods(&self) -> usize {
        self.samples.len() / self.samples_per_period()
    }
}

/// Gaussian difference-pulse envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseShape {
    /// Standard deviation of the envelope (s).
    pub width: f64,
    /// Peak voltage per unit normalized quadrature (V).
    pub amplitude_per_unit_y: f64,
}

impl PulseShape {
    /// Time integral of a unit-peak envelope, `width·√(2π)`.
    pub fn unit_area(&self) -> f64 {
        self.width * libm::sqrt(TAU)
    }

    /// Integral (V·s) of the pulse encoding quadrature `y`.
    pub fn integral_for(&self, y: f64) -> f64 {
        y * self.amplitude_per_unit_y * self.unit_area()
    }
}

/// Acquisition parameters for [`synth_trace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSettings {
    pub pulse: PulseShape,
    pub pulse_period: f64,
    /// Standard deviation of additive white noise per sample (V).
    pub noise_floor: f64,
    pub sample_period: f64,
}

/// A signal trace and its signal-blocked calibration partner.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesizedTraces {
    pub signal: RawTrace,
    pub blocked: RawTrace,
}

/// Photon-loss channel with transmission `eta`:
///
/// `ρ'_mn = Σ_k √(C(m+k,k) C(n+k,k)) η^{(m+n)/2} (1−η)^k ρ_{m+k,n+k}`.
pub fn apply_loss(rho: &DensityMatrix, eta: f64) -> Result<DensityMatrix> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParameter("efficiency must lie in (0, 1]"));
    }
    if eta == 1.0 {
        return Ok(rho.clone());
    }
    let dim = rho.dim();
    let ln_eta = libm::log(eta);
    let ln_loss = libm::log1p(-eta);
    let src = rho.matrix();
    let out = CMatrix::from_fn(dim, |m, n| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..dim - m.max(n) {
            let ln_w = 0.5 * (ln_binomial(m + k, k) + ln_binomial(n + k, k))
                + 0.5 * (m + n) as f64 * ln_eta
                + k as f64 * ln_loss;
            acc += src[(m + k, n + k)] * libm::exp(ln_w);
        }
        acc
    });
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Cumulative quadrature distribution tabulated on a fixed grid for all phases at once.
///
/// `F(x|θ) = Σ_d Re(w_d e^{idθ} C_d(x))` where `C_d` integrates
/// `Σ_m ρ_{m,m+d} ψ_m ψ_{m+d}` and `w_0 = 1`, `w_{d>0} = 2`. Inverse-CDF sampling
/// then costs one binary search over the nodes per draw.
pub struct QuadratureSampler {
    lo: f64,
    step: f64,
    dim: usize,
    /// `cumulative[j * dim + d] = w_d C_d(x_j)`.
    cumulative: Vec<Complex64>,
}

impl QuadratureSampler {
    pub fn new(rho: &DensityMatrix) -> Self {
        let dim = rho.dim();
        let (lo, hi) = support(rho);
        let cells = CDF_NODES - 1;
        let step = (hi - lo) / cells as f64;
        let (gx, gw) = gauss_legendre(6);
        let m = rho.matrix();
        let mut cumulative = vec![Complex64::new(0.0, 0.0); CDF_NODES * dim];
        let mut psi = vec![0.0; dim];
        let mut cell = vec![Complex64::new(0.0, 0.0); dim];
        for j in 0..cells {
            cell.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            let a = lo + j as f64 * step;
            for (u, w) in gx.iter().zip(&gw) {
                let x = a + 0.5 * step * (u + 1.0);
                hermite_gauss_fill(x, &mut psi);
                let w = 0.5 * step * w;
                for (d, acc) in cell.iter_mut().enumerate() {
                    let mut s = Complex64::new(0.0, 0.0);
                    for i in 0..dim - d {
                        s += m[(i, i + d)] * (psi[i] * psi[i + d]);
                    }
                    *acc += s * if d == 0 { w } else { 2.0 * w };
                }
            }
            for d in 0..dim {
                cumulative[(j + 1) * dim + d] = cumulative[j * dim + d] + cell[d];
            }
        }
        QuadratureSampler { lo, step, dim, cumulative }
    }

    fn cdf_at(&self, node: usize, rot: &[Complex64]) -> f64 {
        let row = &self.cumulative[node * self.dim..(node + 1) * self.dim];
        row.iter().zip(rot).map(|(c, r)| (c * r).re).sum()
    }

    /// Quadrature value at cumulative probability `u ∈ [0, 1)` for phase `theta`.
    pub fn quantile(&self, theta: f64, u: f64) -> f64 {
        let rot: Vec<Complex64> = (0..self.dim).map(|d| Complex64::from_polar(1.0, d as f64 * theta)).collect();
        let total = self.cdf_at(CDF_NODES - 1, &rot);
        let target = u * total;
        let (mut lo, mut hi) = (0usize, CDF_NODES - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.cdf_at(mid, &rot) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let f_lo = self.cdf_at(lo, &rot);
        let f_hi = self.cdf_at(hi, &rot);
        let frac = if f_hi > f_lo { ((target - f_lo) / (f_hi - f_lo)).clamp(0.0, 1.0) } else { 0.5 };
        self.lo + (lo as f64 + frac) * self.step
    }
}

/// Global sampling support `[c − 8σ_max, c + 8σ_max]` covering every phase.
fn support(rho: &DensityMatrix) -> (f64, f64) {
    let dim = rho.dim();
    let a = annihilation_matrix(dim);
    let mean_a = rho.expectation(&a);
    let mean_a2 = rho.expectation(&(&a * &a));
    let mean_n = rho.expectation(&(&a.adjoint() * &a)).re;
    let mut max_sigma: f64 = 0.0;
    let mut max_mean: f64 = 0.0;
    for i in 0..128 {
        let th = PI * i as f64 / 64.0;
        let mean = libm::sqrt(2.0) * (mean_a * Complex64::from_polar(1.0, -th)).re;
        let second = mean_n + 0.5 + (mean_a2 * Complex64::from_polar(1.0, -2.0 * th)).re;
        max_sigma = max_sigma.max(libm::sqrt((second - mean * mean).max(0.0)));
        max_mean = max_mean.max(libm::fabs(mean));
    }
    let half = max_mean + CDF_SUPPORT_SIGMAS * max_sigma.max(libm::sqrt(0.5));
    (-half, half)
}

/// Draws one quadrature per scheduled phase from `pr(x|θ)` of the (lossy) state.
pub fn sample_quadratures(
    rho: &DensityMatrix,
    schedule: &PhaseSchedule,
    seed: u64,
    efficiency: f64,
) -> Result<Vec<QuadratureRecord>> {
    let phases = schedule.phases()?;
    let state = apply_loss(rho, efficiency)?;
    let sampler = QuadratureSampler::new(&state);
    let mut rng = rng::stream(seed, rng::STREAM_QUADRATURES);
    Ok(phases
        .into_iter()
        .map(|theta| {
            let u: f64 = rng.random();
            QuadratureRecord { theta, y: sampler.quantile(theta, u) }
        })
        .collect())
}

/// Renders quadrature records as a pulse train, plus a matching signal-blocked trace.
///
/// Each record becomes one Gaussian pulse centered in its period whose integral is
/// `y · amplitude_per_unit_y · width·√(2π)`. The blocked trace carries as many vacuum
/// pulses, rescaled so their mean-square quadrature is exactly 1/2.
pub fn synth_trace(records: &[QuadratureRecord], settings: &TraceSettings, seed: u64) -> Result<SynthesizedTraces> {
    let TraceSettings { pulse, pulse_period, noise_floor, sample_period } = *settings;
    if !(pulse.width > 0.0 && pulse.width < pulse_period) {
        return Err(Error::InvalidParameter("pulse width must be positive and below the pulse period"));
    }
    if !(noise_floor >= 0.0) {
        return Err(Error::InvalidParameter("noise floor must be non-negative"));
    }
    let template = RawTrace { sample_period, samples: Vec::new(), pulse_period, role: TraceRole::Signal };
    template.validate()?;
    let spp = template.samples_per_period();

    let signal_y: Vec<f64> = records.iter().map(|r| r.y).collect();
    let mut vac_rng = rng::stream(seed, rng::STREAM_BLOCKED);
    let vac = Normal::new(0.0, libm::sqrt(0.5)).expect("valid normal");
    let mut blocked_y: Vec<f64> = (0..records.len()).map(|_| vac.sample(&mut vac_rng)).collect();
    let ms = blocked_y.iter().map(|y| y * y).sum::<f64>() / blocked_y.len().max(1) as f64;
    if ms > 0.0 {
        let s = libm::sqrt(0.5 / ms);
        blocked_y.iter_mut().for_each(|y| *y *= s);
    }

    let render = |ys: &[f64], stream: u64, role: TraceRole| -> RawTrace {
        let mut samples = vec![0.0; ys.len() * spp];
        let center = 0.5 * spp as f64 * sample_period;
        let inv = 1.0 / (2.0 * pulse.width * pulse.width);
        for (p, &y) in ys.iter().enumerate() {
            let peak = y * pulse.amplitude_per_unit_y;
            for (i, v) in samples[p * spp..(p + 1) * spp].iter_mut().enumerate() {
                let dt = i as f64 * sample_period - center;
                *v = peak * libm::exp(-dt * dt * inv);
            }
        }
        if noise_floor > 0.0 {
            let mut r = rng::stream(seed, stream);
            let noise = Normal::new(0.0, noise_floor).expect("valid normal");
            samples.iter_mut().for_each(|v| *v += noise.sample(&mut r));
        }
        RawTrace { sample_period, samples, pulse_period: spp as f64 * sample_period, role }
    };

    Ok(SynthesizedTraces {
        signal: render(&signal_y, rng::STREAM_SIGNAL_NOISE, TraceRole::Signal),
        blocked: render(&blocked_y, rng::STREAM_BLOCKED_NOISE, TraceRole::Blocked),
    })
}
