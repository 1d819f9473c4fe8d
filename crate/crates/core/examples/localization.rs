//! The supertrace density concentrates on the fixed points as `t → 0`.

use odd_lefschetz::spectral::{
    integrate_density, local_density, outside_mass, GeometryStanza, LiftPhase, SpinStructure,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let geom = GeometryStanza::circle(SpinStructure::Periodic, LiftPhase::Plus, 40).build()?;
    let eps = 0.3;
    println!("{:>6} {:>14} {:>14} {:>10}", "t", "outside mass", "density(0)", "integral");
    let mut last = f64::INFINITY;
    for t in [0.5, 0.2, 0.1, 0.05] {
        let mass = outside_mass(&geom, eps, t, 32);
        let peak = local_density(&geom, &[0.0], t);
        let total = integrate_density(&geom, t, 64);
        println!("{t:>6} {mass:>14.6e} {peak:>14.6} {total:>10.6}");
        assert!(mass < last);
        assert!((total - 1.0).abs() < 1e-10);
        last = mass;
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
