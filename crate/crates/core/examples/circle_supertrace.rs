//! Heat supertraces `Tr(τ̃ e^{-tD²})` of the model geometries against the
//! fixed-point index of their fixed sets.

use odd_lefschetz::lefschetz;
use odd_lefschetz::spectral::{
    heat_curve, log_spaced_grid, GeometryStanza, LiftPhase, SpinStructure::*,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let times = log_spaced_grid(0.05, 1.0, 10);
    let stanzas = [
        GeometryStanza::circle(Periodic, LiftPhase::Plus, 8),
        GeometryStanza::circle(Periodic, LiftPhase::Minus, 8),
        GeometryStanza::circle(Antiperiodic, LiftPhase::Plus, 8),
        GeometryStanza::torus3(2, [Periodic, Antiperiodic, Periodic], LiftPhase::Plus, 6),
    ];
    for stanza in &stanzas {
        let geom = stanza.build()?;
        let curve = heat_curve(&geom, &times)?;
        let index = lefschetz::index(geom.fixed_components())?;
        println!(
            "{:?} {:?} lift {:?}: supertrace {} (spread {:e}), index {}",
            stanza.model,
            stanza.spin_structure,
            stanza.lift_sign,
            curve.samples[0].1,
            curve.spread(),
            index.total_exact
        );
        assert!(curve.spread() <= 1e-10);
        assert!((curve.samples[0].1 - index.total).abs() <= 1e-8);
    }

    // A lift with phase sqrt(-1) squares to -1 and is rejected.
    let err = GeometryStanza::circle(Periodic, LiftPhase::PlusI, 4).build().unwrap_err();
    println!("phase +i: {err}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
