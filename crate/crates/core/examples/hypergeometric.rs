// Evaluating ₂F₁ across the unit interval, including the slow region near z = 1.

use gms_core::hypergeom::{hyp2f1_at_one, hyp2f1_direct};
use gms_core::{hyp2f1, HypParams, SeriesControl};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ctrl = SeriesControl::default();

    // F(1/2, 1; 2; z) = 2(1 - √(1-z))/z
    println!("{:>8} {:>22} {:>22}", "z", "2F1(1/2,1;2;z)", "closed form");
    for z in [-1.0, -0.5, 0.0, 0.5, 0.9, 0.999, 1.0] {
        let value = hyp2f1(&HypParams::new(0.5, 1.0, 2.0, z)?, &ctrl)?;
        let closed = if z == 0.0 { 1.0 } else { 2.0 * (1.0 - (1.0 - z).sqrt()) / z };
        println!("{z:>8} {value:>22.16} {closed:>22.16}");
        assert!((value - closed).abs() < 1e-13);
    }

    // Gauss summation at z = 1
    let at_one = hyp2f1_at_one(0.5, 1.0, 3.0)?;
    println!("\n2F1(1/2,1;3;1) = {at_one:.16} (Γ(3)Γ(3/2)/(Γ(5/2)Γ(2)) = 4/3)");

    // Near z = 1 the direct series needs many terms; a looser control fails fast.
    let tight = SeriesControl::new(1e-14, 2_000, 0.75)?;
    match hyp2f1_direct(0.5, 1.0, 2.0, 0.9999, &tight) {
        Ok(v) => println!("direct series converged: {v}"),
        Err(e) => println!("direct series with 2000 terms: {e}"),
    }
    let routed = hyp2f1(&HypParams::new(0.5, 1.0, 2.0, 0.9999)?, &tight)?;
    println!("dispatching evaluator with the same budget: {routed:.16}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
