//! Deformed JLO character on the flat 3-torus with `z ↦ -z`, extrapolated to
//! `t = 0` and compared with the local fixed-point formula.

use num_complex::Complex64;
use odd_lefschetz::jlo::{
    d_lambda_supertrace, extrapolate_to_zero, fit_power_law, jlo_ch_k, limit_rhs, torus_fixture,
    FunctionSpec, LambdaMulti, QuadratureConfig,
};
use odd_lefschetz::spectral::{heat_supertrace, GeometryStanza, LiftPhase, SpinStructure::*};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let geom = GeometryStanza::torus3(2, [Periodic; 3], LiftPhase::Plus, 10).build()?;
    let fs = torus_fixture();
    let quad = QuadratureConfig::default();

    let one = [FunctionSpec::constant(1.0, 3)];
    let k0 = jlo_ch_k(&geom, &one, 0.2, quad)?;
    assert_eq!(k0.value.re, heat_supertrace(&geom, 0.2).value);

    let mut samples = Vec::new();
    for t in [0.4, 0.2, 0.1] {
        let r = jlo_ch_k(&geom, &fs, t, quad)?;
        println!("t = {t}: ch_2 = {:.10} (quadrature error {:.1e})", r.value, r.quadrature_error);
        samples.push((t, r.value));
    }
    let limit = extrapolate_to_zero(&samples, 0.5, 1e-6)?;
    let rhs = limit_rhs(geom.fixed_components(), &fs, 2, 32)?;
    let rel = (limit.value - rhs).norm() / rhs.norm();
    println!("extrapolated {:.6} ± {:.1e}; local formula {:.6}; relative gap {rel:.2e}", limit.value, limit.error, rhs);
    assert!(rel < 0.01);
    assert!((rhs - Complex64::new(0.0, -std::f64::consts::FRAC_PI_4)).norm() < 1e-12);

    for lambda in [vec![1, 0], vec![0, 1]] {
        let l = LambdaMulti(lambda);
        let pts = [0.4, 0.2, 0.1]
            .iter()
            .map(|&t| Ok((t, d_lambda_supertrace(&geom, &fs, &l, t)?.norm())))
            .collect::<Result<Vec<_>, Box<dyn std::error::Error>>>()?;
        let (c, p) = fit_power_law(&pts);
        println!("lambda = {:?}: |str| ≈ {c:.3} t^{p:.3}", l.0);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
