//! Fock-space numerics for pulsed homodyne tomography of single-mode light.
//!
//! The crate covers the whole numerical path from phase-tagged quadrature
//! samples to a reconstructed density matrix and its derived observables:
//!
//! * [`special`]: oscillator wavefunctions, Laguerre polynomials, quadrature rules.
//! * [`linalg`] / [`fock`]: square complex matrices, [`FockVector`], [`DensityMatrix`],
//!   ladder and displacement operators.
//! * [`states`]: analytic states, photon statistics, Wigner functions, quadrature densities.
//! * [`homodyne`]: synthetic homodyne data, photon loss and raw detector traces.
//! * [`ingest`]: pulse integration, vacuum calibration and quadrature normalization.
//! * [`maxlik`]: iterative maximum-likelihood reconstruction.
//! * [`analysis`]: fidelity, Poisson deviation, displaced-Fock fitting, Wigner negativity.
//!
//! Quadratures use the convention `x = (a + a†)/√2`, so the vacuum has quadrature
//! variance 1/2. Phase-space points are complex amplitudes `β = x + iy` with the Wigner
//! function normalized as `W_vac(β) = (2/π) e^{-2|β|²}`.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod error;
pub mod fock;
pub mod homodyne;
pub mod ingest;
pub mod linalg;
pub mod maxlik;
pub mod rng;
pub mod special;
pub mod states;

pub use error::{Error, Result};
pub use fock::{ComplexAmplitude, DensityMatrix, FockVector};
pub use linalg::CMatrix;
pub use num_complex::Complex64;

/// Default Fock-space truncation.
pub const DEFAULT_DIM: usize = 40;
