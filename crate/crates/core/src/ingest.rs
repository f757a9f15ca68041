//! Raw balanced-detector traces to normalized quadratures.
//!
//! Each difference pulse is integrated (trapezoidal rule over a window inside its
//! period), the signal-blocked integrals fix the scale `δ = √(2⟨V²⟩₀)`, and
//! `Y_i = V_i / δ` puts the vacuum at quadrature variance 1/2.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::homodyne::{QuadratureRecord, RawTrace};

/// Fraction of the pulse period trimmed from each end by the default window.
pub const GUARD_FRACTION: f64 = 0.1;
/// Blocked-signal sample count below which the calibration itself is uncertain by > 3 %.
pub const MIN_CALIBRATION_SAMPLES: usize = 1000;

/// Integration window within one pulse period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrationWindow {
    /// Offset from the period start and window length, both in seconds.
    Fixed { offset: f64, length: f64 },
    /// Window of `length` seconds placed where the ensemble-averaged `|V|` has the
    /// largest area.
    Auto { length: f64 },
}

impl IntegrationWindow {
    /// Full period minus guard bands of 10 % at both ends.
    pub fn guarded(pulse_period: f64) -> Self {
        IntegrationWindow::Fixed {
            offset: GUARD_FRACTION * pulse_period,
            length: (1.0 - 2.0 * GUARD_FRACTION) * pulse_period,
        }
    }

    pub fn auto(pulse_period: f64) -> Self {
        IntegrationWindow::Auto { length: (1.0 - 2.0 * GUARD_FRACTION) * pulse_period }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub window: IntegrationWindow,
    /// Subtract the trace median before integrating.
    pub remove_offset: bool,
}

/// Scale `δ` (V·s) mapping integrals to normalized quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationConstant(f64);

impl CalibrationConstant {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter("calibration constant must be positive"));
        }
        Ok(CalibrationConstant(delta))
    }

    pub fn delta(&self) -> f64 {
        self.0
    }
}

/// Outcome of a vacuum calibration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumCalibration {
    pub constant: CalibrationConstant,
    pub n_blocked: usize,
    /// Mean of the blocked integrals; far from zero signals detector imbalance.
    pub blocked_mean: f64,
}

/// How pulse indices map to LO phases.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseAssignment {
    /// Linear from `phi_start` (first pulse) to `phi_end` (last pulse), inclusive.
    Ramp { phi_start: f64, phi_end: f64 },
    Explicit(Vec<f64>),
}

/// Sample index range `[start, end]` (inclusive) of the window within a period.
fn window_indices(trace: &RawTrace, window: &IntegrationWindow) -> Result<(usize, usize)> {
    let spp = trace.samples_per_period();
    let dt = trace.sample_period;
    let period = spp as f64 * dt;
    match *window {
        IntegrationWindow::Fixed { offset, length } => {
            if !(offset >= 0.0 && length > 0.0) || offset + length > period * (1.0 + 1e-9) {
                return Err(Error::WindowOutsidePeriod);
            }
            let start = libm::round(offset / dt) as usize;
            let end = (start + libm::round(length / dt) as usize).min(spp - 1);
            if end <= start {
                return Err(Error::WindowOutsidePeriod);
            }
            Ok((start, end))
        }
        IntegrationWindow::Auto { length } => {
            if !(length > 0.0) || length > period * (1.0 + 1e-9) {
                return Err(Error::WindowOutsidePeriod);
            }
            let n = (libm::round(length / dt) as usize).min(spp - 1).max(1);
            let periods = trace.n_periods();
            let mut profile = alloc::vec![0.0; spp];
            for p in 0..periods {
                for (acc, v) in profile.iter_mut().zip(&trace.samples[p * spp..(p + 1) * spp]) {
                    *acc += libm::fabs(*v);
                }
            }
            let mut best = (f64::NEG_INFINITY, 0usize);
            let mut area: f64 = profile[..=n].iter().sum();
            for start in 0..spp - n {
                if start > 0 {
                    area += profile[start + n] - profile[start - 1];
                }
                if area > best.0 {
                    best = (area, start);
                }
            }
            Ok((best.1, best.1 + n))
        }
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// One trapezoidal integral (V·s) per complete pulse period.
pub fn integrate_pulses(trace: &RawTrace, options: &IntegrationOptions) -> Result<Vec<f64>> {
    trace.validate()?;
    let spp = trace.samples_per_period();
    if trace.samples.len() < spp {
        return Err(Error::EmptyInput);
    }
    let (start, end) = window_indices(trace, &options.window)?;
    let offset = if options.remove_offset { median(&trace.samples) } else { 0.0 };
    let dt = trace.sample_period;
    Ok(trace
        .samples
        .chunks_exact(spp)
        .map(|period| {
            let w = &period[start..=end];
            let inner: f64 = w.iter().map(|v| v - offset).sum();
            let edges = 0.5 * ((w[0] - offset) + (w[w.len() - 1] - offset));
            (inner - edges) * dt
        })
        .collect())
}

/// `δ = √(2 · mean(V²))` over blocked-signal integrals (raw second moment).
pub fn vacuum_calibration(blocked_integrals: &[f64]) -> Result<VacuumCalibration> {
    let n = blocked_integrals.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n < MIN_CALIBRATION_SAMPLES {
        log::warn!("vacuum calibration from {n} samples; scale uncertain by more than 3 %");
    }
    let mean_sq = blocked_integrals.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if !(mean_sq > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let blocked_mean = blocked_integrals.iter().sum::<f64>() / n as f64;
    Ok(VacuumCalibration {
        constant: CalibrationConstant::new(libm::sqrt(2.0 * mean_sq))?,
        n_blocked: n,
        blocked_mean,
    })
}

/// `Y_i = V_i / δ`.
pub fn normalize(integrals: &[f64], delta: CalibrationConstant) -> Vec<f64> {
    integrals.iter().map(|v| v / delta.delta()).collect()
}

/// LO phase for each of `n_pulses` pulses.
pub fn assign_phases(n_pulses: usize, assignment: &PhaseAssignment) -> Result<Vec<f64>> {
    if n_pulses == 0 {
        return Err(Error::EmptyInput);
    }
    match assignment {
        PhaseAssignment::Ramp { phi_start, phi_end } => Ok((0..n_pulses)
            .map(|i| {
                if n_pulses == 1 {
                    *phi_start
                } else {
                    phi_start + (phi_end - phi_start) * i as f64 / (n_pulses - 1) as f64
                }
            })
            .collect()),
        PhaseAssignment::Explicit(phases) => {
            if phases.len() != n_pulses {
                return Err(Error::InvalidParameter("explicit phase count differs from pulse count"));
            }
            Ok(phases.clone())
        }
    }
}

/// Pairs phases with normalized quadratures.
pub fn to_records(phases: &[f64], ys: &[f64]) -> Vec<QuadratureRecord> {
    phases.iter().zip(ys).map(|(&theta, &y)| QuadratureRecord { theta, y }).collect()
}
