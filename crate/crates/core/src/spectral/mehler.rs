//! Harmonic-oscillator heat kernel near a fixed component.
//!
//! The closed form
//!
//! `a / (8π sinh(at/2)) · exp(-(a/8) coth(at/2) |y|^2)`
//!
//! is the kernel from `0` to `y` of `H = -Δ + (a/4)^2 |y|^2` on `R^2`, where
//! `a = sqrt(-1) x_s` is the rescaled curvature parameter. The oracle sums the
//! same kernel from the Hermite eigenfunctions of `H`.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MehlerError {
    #[error("heat time must be positive, got {0}")]
    InvalidTime(f64),
    #[error("x_s t / 2 = {0} is at or beyond the first pole of sin")]
    PoleProximity(f64),
    #[error("Hermite expansion did not reach tolerance after {terms} terms (omega = {omega})")]
    NonConvergence { terms: usize, omega: f64 },
    #[error("kernel value is not finite")]
    NotFinite,
}

const POLE_GUARD: f64 = 1e-8;
const MAX_TERMS: usize = 5_000_000;
const TAIL_TOL: f64 = 1e-15;

/// `(h / sinh h, h coth h)`, both even in `h`.
fn hyperbolic_factors(h: f64) -> (f64, f64) {
    let h = h.abs();
    if h < 1e-4 {
        let h2 = h * h;
        (
            1.0 - h2 / 6.0 + 7.0 * h2 * h2 / 360.0,
            1.0 + h2 / 3.0 - h2 * h2 / 45.0,
        )
    } else {
        let e = (-2.0 * h).exp();
        let denom = -(-2.0 * h).exp_m1();
        (2.0 * h * (-h).exp() / denom, h * (1.0 + e) / denom)
    }
}

fn assemble(t: f64, ratio: f64, coth_term: f64, y: [f64; 2]) -> Result<f64, MehlerError> {
    let r2 = y[0] * y[0] + y[1] * y[1];
    let v = ratio / (4.0 * PI * t) * (-coth_term * r2 / (4.0 * t)).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(MehlerError::NotFinite)
    }
}

/// Closed-form Mehler density for a real parameter `a`.
pub fn mehler_density(a: f64, y: [f64; 2], t: f64) -> Result<f64, MehlerError> {
    if !(t > 0.0) {
        return Err(MehlerError::InvalidTime(t));
    }
    let (ratio, coth_term) = hyperbolic_factors(a * t / 2.0);
    assemble(t, ratio, coth_term, y)
}

/// Closed form in the curvature variable `x_s` itself (`a = sqrt(-1) x_s`),
/// where the hyperbolic functions turn trigonometric. Valid for
/// `|x_s t / 2| < π`.
pub fn mehler_density_curvature(x_s: f64, y: [f64; 2], t: f64) -> Result<f64, MehlerError> {
    if !(t > 0.0) {
        return Err(MehlerError::InvalidTime(t));
    }
    let theta = (x_s * t / 2.0).abs();
    if theta >= PI - POLE_GUARD {
        return Err(MehlerError::PoleProximity(x_s * t / 2.0));
    }
    let (ratio, cot_term) = if theta < 1e-4 {
        let t2 = theta * theta;
        (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0, 1.0 - t2 / 3.0 - t2 * t2 / 45.0)
    } else {
        let s = theta.sin();
        (theta / s, theta * theta.cos() / s)
    };
    assemble(t, ratio, cot_term, y)
}

/// 1-d kernel of `-d^2/dx^2 + ω^2 x^2` from its eigenfunction expansion.
fn oscillator_kernel_1d(omega: f64, x: f64, xp: f64, t: f64) -> Result<f64, MehlerError> {
    let s = omega.sqrt();
    let (u, v) = (s * x, s * xp);
    let norm = omega.sqrt(); // (ω^{1/4})^2
    let base = PI.powf(-0.25);
    // normalized Hermite functions h_n(u), h_n(v)
    let (mut hu_prev, mut hu) = (0.0, base * (-u * u / 2.0).exp());
    let (mut hv_prev, mut hv) = (0.0, base * (-v * v / 2.0).exp());
    let decay = (-2.0 * t * omega).exp();
    let mut weight = (-t * omega).exp();
    let mut acc = 0.0;
    for n in 0..MAX_TERMS {
        acc += weight * hu * hv;
        // |h_n| <= π^{-1/4}: remaining terms bounded by a geometric series
        let tail = norm * base * base * weight * decay / (1.0 - decay);
        if tail < TAIL_TOL {
            return Ok(norm * acc);
        }
        let nf = n as f64;
        let c1 = (2.0 / (nf + 1.0)).sqrt();
        let c0 = (nf / (nf + 1.0)).sqrt();
        let hu_next = c1 * u * hu - c0 * hu_prev;
        let hv_next = c1 * v * hv - c0 * hv_prev;
        hu_prev = hu;
        hu = hu_next;
        hv_prev = hv;
        hv = hv_next;
        weight *= decay;
    }
    Err(MehlerError::NonConvergence {
        terms: MAX_TERMS,
        omega,
    })
}

/// Kernel `K_t(y, y')` of `H = -Δ + (a/4)^2 |y|^2` on `R^2` summed from Hermite
/// eigenfunctions. Requires `a != 0`: the free operator has no discrete
/// spectrum to expand in.
pub fn hermite_heat_kernel(a: f64, y: [f64; 2], yp: [f64; 2], t: f64) -> Result<f64, MehlerError> {
    if !(t > 0.0) {
        return Err(MehlerError::InvalidTime(t));
    }
    let omega = a.abs() / 4.0;
    if omega == 0.0 {
        return Err(MehlerError::NonConvergence { terms: 0, omega });
    }
    let kx = oscillator_kernel_1d(omega, y[0], yp[0], t)?;
    let ky = oscillator_kernel_1d(omega, y[1], yp[1], t)?;
    Ok(kx * ky)
}

/// Oracle for [`mehler_density`]: `K_t(y, 0)`.
pub fn hermite_heat_oracle(a: f64, y: [f64; 2], t: f64) -> Result<f64, MehlerError> {
    hermite_heat_kernel(a, y, [0.0, 0.0], t)
}

/// Flat heat kernel `(4πt)^{-1} e^{-|y|^2/4t}`.
pub fn flat_gaussian(y: [f64; 2], t: f64) -> f64 {
    (-(y[0] * y[0] + y[1] * y[1]) / (4.0 * t)).exp() / (4.0 * PI * t)
}
