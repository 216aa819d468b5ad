// Excursion lengths: the exact pmf next to frequencies from the shortcut sampler.

use gms_core::excursion::{sample_shortcut_batch, tau_mass_cutoff};
use gms_core::{tau_pmf_table, ModelParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::new(0.4, 2)?;
    let draws = 200_000;
    let records = sample_shortcut_batch(&params, draws, 11)?;

    let table = tau_pmf_table(&params, 20)?;
    println!("{:>7} {:>12} {:>12}", "length", "exact", "sampled");
    for entry in &table.entries {
        let hits = records.iter().filter(|r| r.length == entry.length).count();
        println!(
            "{:>7} {:>12.8} {:>12.8}",
            entry.length,
            entry.probability,
            hits as f64 / draws as f64
        );
    }
    println!("mass up to length 21: {:.8}", table.mass);

    let (k, mass) = tau_mass_cutoff(&params, 1e-6, 10_000_000)?;
    println!("1e-6 of the mass lies beyond k = {k} (mass {mass:.9})");

    // Every excursion balances births and deaths.
    assert!(records.iter().all(|r| r.is_consistent(2)));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
