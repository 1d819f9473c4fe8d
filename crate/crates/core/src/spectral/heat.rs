//! Heat supertraces `Tr(τ̃ e^{-tD^2})` and their pointwise densities
//! `Tr[τ̃ P_t(τx, x)]` on the model geometries.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::ModeBasis;
use super::ModelGeometry;
use crate::quadrature::gauss_legendre;

/// Truncated trace together with a bound on the discarded modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatTrace {
    pub value: f64,
    pub tail_bound: f64,
}

/// `sum_m <φ_m, τ̃ φ_m> e^{-t λ_m^2}` over the truncated basis.
pub fn heat_supertrace(geom: &ModelGeometry, t: f64) -> HeatTrace {
    assert!(t > 0.0, "heat time must be positive");
    let tau = geom.tau_lift();
    let mut acc = 0.0;
    for (i, &d2) in geom.d_squared().iter().enumerate() {
        let diag = tau.get(i, i);
        if diag != Complex64::default() {
            acc += diag.re * (-t * d2).exp();
        }
    }
    HeatTrace {
        value: acc,
        tail_bound: tail_bound(geom.basis(), t),
    }
}

/// Bound on `sum |<φ, τ̃ φ>| e^{-tλ^2}` over modes outside the box, using
/// `|<φ, τ̃ φ>| <= 1` and geometric majorants of the 1-d Gaussian tails.
fn tail_bound(basis: &ModeBasis, t: f64) -> f64 {
    let k = basis.cutoff() as f64;
    let mut inside = 1.0;
    let mut total = 1.0;
    for &anti in basis.antiperiodic() {
        let first = if anti { k + 0.5 } else { k + 1.0 };
        let s_in: f64 = if anti {
            (0..basis.cutoff()).map(|n| 2.0 * (-t * (n as f64 + 0.5).powi(2)).exp()).sum()
        } else {
            1.0 + (1..=basis.cutoff()).map(|n| 2.0 * (-t * (n as f64).powi(2)).exp()).sum::<f64>()
        };
        let tail = 2.0 * (-t * first * first).exp() / (1.0 - (-2.0 * t * first).exp());
        inside *= s_in;
        total *= s_in + tail;
    }
    basis.spin_rank() as f64 * (total - inside)
}

/// Pointwise density `sum_m e^{-tλ_m^2} <φ_m(x), (τ̃ φ_m)(x)>` with plane
/// waves `φ = e^{ik·x} / sqrt(vol)`.
pub fn local_density(geom: &ModelGeometry, x: &[f64], t: f64) -> f64 {
    assert!(t > 0.0, "heat time must be positive");
    let basis = geom.basis();
    assert_eq!(x.len(), basis.axes(), "point has wrong dimension");
    let tau = geom.tau_lift();
    let vol = basis.volume();
    let mut acc = Complex64::default();
    for (m, &d2) in geom.d_squared().iter().enumerate() {
        let weight = (-t * d2).exp();
        let mode_m = basis.mode(m);
        for &(r, coeff) in tau.column(m) {
            let mode_r = basis.mode(r);
            if mode_r.spin != mode_m.spin {
                continue;
            }
            let phase: f64 = (0..basis.axes())
                .map(|a| (mode_r.k(a) - mode_m.k(a)) * x[a])
                .sum();
            acc += coeff * Complex64::from_polar(weight, phase);
        }
    }
    acc.re / vol
}

/// Trapezoidal integral of the density over the manifold. The density of the
/// flat models depends only on the reflected coordinate, so the tangential
/// directions contribute their volume `(2π)^{d-1}`.
pub fn integrate_density(geom: &ModelGeometry, t: f64, points: usize) -> f64 {
    let axes = geom.ambient_dim();
    let axis = geom.reflection_axis();
    let h = 2.0 * PI / points as f64;
    let mut x = vec![0.0; axes];
    let mut acc = 0.0;
    for j in 0..points {
        x[axis] = j as f64 * h;
        acc += local_density(geom, &x, t);
    }
    acc * h * (2.0 * PI).powi(axes as i32 - 1)
}

/// `∫ |density|` over the points whose distance to the fixed set exceeds `eps`,
/// by composite Gauss-Legendre along the reflected coordinate.
pub fn outside_mass(geom: &ModelGeometry, eps: f64, t: f64, panels: usize) -> f64 {
    assert!(eps > 0.0 && eps < PI / 2.0, "eps must lie in (0, π/2)");
    let axes = geom.ambient_dim();
    let axis = geom.reflection_axis();
    let (nodes, weights) = gauss_legendre(8);
    let mut x = vec![0.0; axes];
    let mut acc = 0.0;
    for (lo, hi) in [(eps, PI - eps), (PI + eps, 2.0 * PI - eps)] {
        let width = (hi - lo) / panels as f64;
        for p in 0..panels {
            let a = lo + p as f64 * width;
            for (u, w) in nodes.iter().zip(&weights) {
                x[axis] = a + u * width;
                acc += w * width * local_density(geom, &x, t).abs();
            }
        }
    }
    acc * (2.0 * PI).powi(axes as i32 - 1)
}

/// `(t, value)` samples with `t` strictly positive and strictly decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatCurve {
    pub samples: Vec<(f64, f64)>,
}

impl HeatCurve {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self, String> {
        if samples.iter().any(|(t, _)| !(*t > 0.0)) {
            return Err("heat times must be positive".into());
        }
        if samples.windows(2).any(|w| w[1].0 >= w[0].0) {
            return Err("heat times must decrease strictly".into());
        }
        Ok(HeatCurve { samples })
    }

    /// `max - min` of the sampled values.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, v)| {
                (lo.min(*v), hi.max(*v))
            });
        if self.samples.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }
}

/// `n` log-spaced times from `t_max` down to `t_min`.
pub fn log_spaced_grid(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    assert!(t_min > 0.0 && t_max > t_min && n >= 2);
    let (a, b) = (t_max.ln(), t_min.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn heat_curve(geom: &ModelGeometry, times: &[f64]) -> Result<HeatCurve, String> {
    HeatCurve::new(
        times
            .iter()
            .map(|&t| (t, heat_supertrace(geom, t).value))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{GeometryStanza, LiftPhase, SpinStructure::*};

    #[test]
    fn circle_supertraces() {
        let anti = GeometryStanza::circle(Antiperiodic, LiftPhase::Plus, 8).build().unwrap();
        let per = GeometryStanza::circle(Periodic, LiftPhase::Minus, 8).build().unwrap();
        for t in [0.05, 0.3, 1.0, 10.0] {
            assert_eq!(heat_supertrace(&anti, t).value, 0.0);
            assert_eq!(heat_supertrace(&per, t).value, -1.0);
        }
        assert!(heat_supertrace(&per, 0.05).tail_bound < 0.1);
        assert!(heat_supertrace(&per, 1.0).tail_bound < 1e-30);
    }

    #[test]
    fn large_time_counts_fixed_kernel_modes() {
        let per = GeometryStanza::circle(Periodic, LiftPhase::Plus, 4).build().unwrap();
        assert_eq!(heat_supertrace(&per, 1e3).value, 1.0);
        let torus = GeometryStanza::torus3(2, [Periodic; 3], LiftPhase::Plus, 3)
            .build()
            .unwrap();
        assert_eq!(heat_supertrace(&torus, 1e3).value, 0.0);
    }

    #[test]
    fn density_integrates_to_supertrace() {
        for spin in [Periodic, Antiperiodic] {
            let g = GeometryStanza::circle(spin, LiftPhase::Plus, 10).build().unwrap();
            for t in [0.05, 0.5] {
                let integral = integrate_density(&g, t, 64);
                assert!((integral - heat_supertrace(&g, t).value).abs() < 1e-8);
            }
        }
        let g = GeometryStanza::torus3(0, [Periodic, Periodic, Antiperiodic], LiftPhase::Plus, 3)
            .build()
            .unwrap();
        assert!(integrate_density(&g, 0.2, 32).abs() < 1e-12);
    }

    #[test]
    fn density_peaks_at_fixed_points_like_inverse_sqrt_t() {
        let g = GeometryStanza::circle(Periodic, LiftPhase::Plus, 80).build().unwrap();
        // Flat normal Gaussian: (4πt)^{-1/2} e^{-(2x)^2/4t} at x = 0.
        for t in [0.02, 0.05, 0.1] {
            let scaled = local_density(&g, &[0.0], t) * t.sqrt();
            assert!((scaled - 0.5 / PI.sqrt()).abs() < 1e-8, "{scaled}");
        }
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_spaced_grid(0.05, 1.0, 10);
        assert_eq!(g.len(), 10);
        assert!((g[0] - 1.0).abs() < 1e-15 && (g[9] - 0.05).abs() < 1e-15);
        assert!(HeatCurve::new(g.iter().map(|&t| (t, 0.0)).collect()).is_ok());
        assert!(HeatCurve::new(vec![(0.1, 0.0), (0.2, 0.0)]).is_err());
    }
}
