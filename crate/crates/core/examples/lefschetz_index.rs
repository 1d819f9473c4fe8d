//! Fixed-point index from fixed-component data, and the checks that guard it.

use odd_lefschetz::lefschetz::{self, FixedComponentSpec, LefschetzError};
use odd_lefschetz::series::rat;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // Reflection of the circle: two isolated fixed points.
    let points = [
        FixedComponentSpec::point("theta=0", 1, 1),
        FixedComponentSpec::point("theta=pi", 1, 1),
    ];
    let report = lefschetz::index(&points)?;
    println!("circle reflection: index {}", report.total_exact);
    assert_eq!(report.total, 1.0);

    // Two curved fixed 4-manifolds of codimension one.
    let curved = [
        FixedComponentSpec::flat("X", 4, 1, 1).with_char_number("p1(T)", rat(-48, 1)),
        FixedComponentSpec::flat("Y", 4, 1, -1).with_char_number("p1(T)", rat(48, 1)),
    ];
    let report = lefschetz::index(&curved)?;
    for c in &report.contributions {
        println!("  {}: {}", c.name, c.exact);
    }
    println!("curved components: index {}", report.total_exact);
    assert_eq!(report.total_exact, "2");

    // Re-basing the grading on a component with m - m1 = 2 flips every sign.
    let mixed = [
        FixedComponentSpec::point("a", 5, 1),
        FixedComponentSpec::flat("b", 4, 1, 1).with_char_number("p1(T)", rat(-24, 1)),
    ];
    let report = lefschetz::index(&mixed)?;
    let rebased = report.rebase(report.m1 - 2)?;
    println!("m1 = {}: {} ; re-based: {}", report.m1, report.total_exact, rebased.total_exact);
    assert_eq!(rebased.total, -report.total);

    // Codimensions 1 and 3 differ mod 4.
    let bad = [
        FixedComponentSpec::point("p", 1, 1),
        FixedComponentSpec::point("q", 3, 1),
    ];
    match lefschetz::index(&bad) {
        Err(e @ LefschetzError::CodimMod4Mismatch { .. }) => println!("rejected: {e}"),
        other => return Err(format!("expected CodimMod4Mismatch, got {other:?}").into()),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
