//! Special functions on the real line.
//!
//! Everything here is evaluated by normalized three-term recurrences. Values that can
//! leave the `f64` range are carried as a mantissa plus a natural-log scale and only
//! recombined at the end.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Orders `n` with `n < MAX_ORDER` are supported by the recurrences.
pub const MAX_ORDER: usize = 512;

const RESCALE_ABOVE: f64 = 1e150;

const FACTORIALS: [f64; 21] = {
    let mut t = [1.0; 21];
    let mut i = 1;
    while i < 21 {
        t[i] = t[i - 1] * i as f64;
        i += 1;
    }
    t
};

/// `ln(n!)`; exact table up to 20, log-gamma beyond.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= 20 {
        libm::log(FACTORIALS[n])
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn check_order(n: usize) -> Result<()> {
    if n >= MAX_ORDER {
        return Err(Error::OrderOutOfRange { order: n, max: MAX_ORDER });
    }
    Ok(())
}

/// The `n`-th harmonic-oscillator eigenfunction
/// `ψ_n(x) = (2^n n! √π)^{-1/2} H_n(x) e^{-x²/2}` (vacuum variance 1/2).
pub fn hermite_gauss(n: usize, x: f64) -> Result<f64> {
    check_order(n)?;
    let mut out = vec![0.0; n + 1];
    hermite_gauss_fill(x, &mut out);
    Ok(out[n])
}

/// Fills `out[k] = ψ_k(x)` for `k < out.len()`.
///
/// The recurrence `ψ_{k+1} = √(2/(k+1)) x ψ_k − √(k/(k+1)) ψ_{k−1}` starts from the
/// bare constant `π^{-1/4}`; the Gaussian factor is tracked in log space so that large
/// `|x|` and high orders neither underflow nor overflow.
pub fn hermite_gauss_fill(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let mut ln_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = libm::pow(PI, -0.25);
    out[0] = cur * libm::exp(ln_scale);
    for k in 0..out.len() - 1 {
        let kf = k as f64;
        let next = libm::sqrt(2.0 / (kf + 1.0)) * x * cur - libm::sqrt(kf / (kf + 1.0)) * prev;
        prev = cur;
        cur = next;
        if libm::fabs(cur) > RESCALE_ABOVE {
            prev /= RESCALE_ABOVE;
            cur /= RESCALE_ABOVE;
            ln_scale += libm::log(RESCALE_ABOVE);
        }
        out[k + 1] = cur * libm::exp(ln_scale);
    }
}

/// `ψ_0(x) … ψ_{len−1}(x)` as a fresh vector.
pub fn hermite_gauss_all(len: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; len];
    hermite_gauss_fill(x, &mut out);
    out
}

/// Ordinary Laguerre polynomial `L_k(x)`.
pub fn laguerre(k: usize, x: f64) -> Result<f64> {
    assoc_laguerre(k, 0.0, x)
}

/// Associated Laguerre polynomial `L_k^{(a)}(x)` via
/// `(j+1) L_{j+1} = (2j + 1 + a − x) L_j − (j + a) L_{j−1}`.
pub fn assoc_laguerre(k: usize, a: f64, x: f64) -> Result<f64> {
    check_order(k)?;
    let (m, s) = *assoc_laguerre_scaled(k + 1, a, x).last().unwrap();
    Ok(m * libm::exp(s))
}

/// `L_j^{(a)}(x)` for `j < len` as `(mantissa, ln_scale)` pairs, value = `mantissa·e^{ln_scale}`.
pub fn assoc_laguerre_scaled(len: usize, a: f64, x: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    let mut ln_scale = 0.0;
    let mut prev = 0.0;
    let mut cur = 1.0;
    out.push((cur, ln_scale));
    for j in 0..len - 1 {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - x) * cur - (jf + a) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
        if libm::fabs(cur) > RESCALE_ABOVE {
            prev /= RESCALE_ABOVE;
            cur /= RESCALE_ABOVE;
            ln_scale += libm::log(RESCALE_ABOVE);
        }
        out.push((cur, ln_scale));
    }
    out
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut z = libm::cos(PI * (i as f64 + 0.75) / (n + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 1..order {
                let jf = j as f64;
                let p2 = ((2.0 * jf + 1.0) * z * p1 - jf * p0) / (jf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            let p = if order == 0 { 1.0 } else { p1 };
            let pm1 = if order == 1 { 1.0 } else { p0 };
            dp = n * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if libm::fabs(dz) < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[order - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped onto `[lo, hi]`.
pub fn gauss_legendre_on(order: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (mut nodes, mut weights) = gauss_legendre(order);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    for (x, w) in nodes.iter_mut().zip(weights.iter_mut()) {
        *x = mid + half * *x;
        *w *= half;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn hermite_gauss_low_orders() {
        assert!(close(hermite_gauss(0, 0.0).unwrap(), 0.751_125_544_464_942_5, 1e-15));
        assert_eq!(hermite_gauss(1, 0.0).unwrap(), 0.0);
        let x: f64 = 0.7;
        let psi1 = hermite_gauss(1, x).unwrap();
        assert!(close(psi1, 2f64.sqrt() * x * PI.powf(-0.25) * (-x * x / 2.0).exp(), 1e-15));
    }

    #[test]
    fn hermite_gauss_order_limit() {
        assert!(hermite_gauss(511, 1.0).is_ok());
        assert_eq!(
            hermite_gauss(512, 1.0),
            Err(Error::OrderOutOfRange { order: 512, max: 512 })
        );
    }

    #[test]
    fn hermite_gauss_high_order_stays_finite() {
        // Far outside the turning point the value is tiny but must not be NaN/inf.
        let mut out = vec![0.0; 512];
        hermite_gauss_fill(45.0, &mut out);
        assert!(out.iter().all(|v| v.is_finite()));
        // Near the turning point of n = 511 the magnitude is O(0.1–1).
        hermite_gauss_fill(31.0, &mut out);
        assert!(out[511].is_finite() && out[511].abs() > 1e-3);
    }

    #[test]
    fn hermite_gauss_recurrence_identity() {
        for &x in &[-3.2, -0.4, 0.0, 1.1, 5.5] {
            let psi = hermite_gauss_all(40, x);
            for n in 1..39 {
                let lhs = x * psi[n];
                let rhs = ((n as f64 + 1.0) / 2.0).sqrt() * psi[n + 1]
                    + (n as f64 / 2.0).sqrt() * psi[n - 1];
                assert!(close(lhs, rhs, 1e-10), "x={x} n={n}");
            }
        }
    }

    #[test]
    fn laguerre_closed_forms() {
        for k in 0..30 {
            assert_eq!(laguerre(k, 0.0).unwrap(), 1.0);
        }
        for &x in &[-1.0, 0.3, 2.0, 7.5] {
            assert!(close(laguerre(1, x).unwrap(), 1.0 - x, 1e-15));
            assert!(close(laguerre(2, x).unwrap(), 0.5 * (x * x - 4.0 * x + 2.0), 1e-14));
            assert!(close(assoc_laguerre(1, 2.0, x).unwrap(), 3.0 - x, 1e-15));
        }
        assert!(laguerre(512, 1.0).is_err());
    }

    #[test]
    fn laguerre_recurrence_exact() {
        let x = 3.7;
        let v = assoc_laguerre_scaled(60, 0.0, x);
        for k in 1..59 {
            let kf = k as f64;
            let (l_next, l_k, l_prev) = (v[k + 1].0, v[k].0, v[k - 1].0);
            assert_eq!(v[k + 1].1, 0.0);
            assert_eq!(l_next, ((2.0 * kf + 1.0 - x) * l_k - kf * l_prev) / (kf + 1.0));
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for order in [1usize, 2, 5, 16, 64, 256] {
            let (x, w) = gauss_legendre(order);
            assert!(close(w.iter().sum::<f64>(), 2.0, 1e-13));
            let deg = 2 * order - 1;
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!(close(got, exact, 1e-12), "order {order}");
            let even = 2 * order - 2;
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(even as i32)).sum();
            assert!(close(got, 2.0 / (even as f64 + 1.0), 1e-12), "order {order}");
        }
    }

    #[test]
    fn ln_factorial_switches_smoothly() {
        assert_eq!(ln_factorial(0), 0.0);
        assert!(close(ln_factorial(20), 2_432_902_008_176_640_000f64.ln(), 1e-12));
        assert!(close(ln_factorial(21) - ln_factorial(20), 21f64.ln(), 1e-12));
        assert!(close(ln_binomial(10, 3), 120f64.ln(), 1e-12));
    }
}
