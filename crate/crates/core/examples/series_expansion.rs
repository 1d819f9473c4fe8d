//! Exact expansions of the characteristic classes entering the fixed-point
//! contribution, in roots and in Pontryagin classes.

use odd_lefschetz::charclass::{self, RootSet};
use odd_lefschetz::series::rat;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // dim F = 2, codim F = 3: one tangent root u1, one normal root v1.
    let roots = RootSet::new(1, 1);
    let cap = 4;
    println!("A-hat(TF):\n{}", charclass::ahat_series(&roots, cap));
    println!("ch Delta(N):\n{}", charclass::ch_delta(&roots, cap));
    let inv = charclass::ch_delta_inverse(&roots, cap);
    println!("ch Delta(N)^-1:\n{inv}");
    assert_eq!(inv.coeff(&[0, 4]), rat(5, 768));

    let product = charclass::ch_delta(&roots, cap).mul(&inv)?;
    assert_eq!(product.constant_term(), rat(1, 1));
    assert_eq!(product.len(), 1);

    // A four-dimensional tangent bundle, written in Pontryagin classes.
    let roots = RootSet::new(2, 0);
    let ahat = charclass::ahat_series(&roots, 4);
    let p = charclass::roots_to_pontryagin(&ahat, &roots)?;
    println!("A-hat in Pontryagin classes:\n{p}");
    // Top-degree parts: root degree 2 is a 4-form, root degree 4 an 8-form.
    let top4 = charclass::density_top_form(&roots, 2)?;
    assert_eq!(top4["p1(T)"], rat(-1, 24));
    let top8 = charclass::density_top_form(&RootSet::new(4, 0), 4)?;
    for (monomial, coeff) in &top8 {
        println!("8-dimensional A-hat genus: {coeff} {monomial}");
    }
    assert_eq!(top8["p1(T)^2"], rat(7, 5760));
    assert_eq!(top8["p2(T)"], rat(-4, 5760));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
