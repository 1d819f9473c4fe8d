//! Closed-form harmonic-oscillator kernel against its Hermite expansion.

use odd_lefschetz::spectral::mehler::{
    flat_gaussian, hermite_heat_oracle, mehler_density, mehler_density_curvature,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut worst: f64 = 0.0;
    for a in [0.5, 1.0, 2.0] {
        for t in [0.1, 0.5, 1.0] {
            for y in [[0.0, 0.0], [1.0, -0.5], [2.0, 2.0]] {
                let closed = mehler_density(a, y, t)?;
                let oracle = hermite_heat_oracle(a, y, t)?;
                worst = worst.max((closed - oracle).abs());
            }
        }
    }
    println!("max |closed form - Hermite sum| = {worst:e}");
    assert!(worst <= 1e-10);

    let y = [0.5, 0.5];
    let flat = flat_gaussian(y, 0.3);
    println!("a = 0: {} vs Gaussian {flat}", mehler_density(0.0, y, 0.3)?);
    for x_s in [0.5, 2.0, 5.0] {
        println!("x_s = {x_s}: density at origin {}", mehler_density_curvature(x_s, [0.0, 0.0], 1.0)?);
    }
    println!("x_s = 2π, t = 1: {}", mehler_density_curvature(std::f64::consts::TAU, [0.0, 0.0], 1.0).unwrap_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
