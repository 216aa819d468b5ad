// Runs the step-by-step chain and compares histograms of the strongest
// fitness with the exact mean, for a few batch sizes.

use gms_core::gms_sim::fitness_panels;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let steps = 200_000;
    let panels = fitness_panels(0.5, &[1, 2, 10], steps, 20, 2024)?;
    for panel in &panels {
        println!(
            "m = {:>2}: {} excursions, mean {:.4} ± {:.4} (exact {:.4})",
            panel.m, panel.excursions, panel.sample_mean, panel.standard_error, panel.analytic_mean
        );
        let freq = panel.histogram.frequencies();
        let peak = freq.iter().cloned().fold(0.0, f64::max);
        for (i, f) in freq.iter().enumerate() {
            let (lo, hi) = panel.histogram.bin_edges(i);
            let bar = "#".repeat((40.0 * f / peak).round() as usize);
            println!("  [{lo:.2}, {hi:.2}) {bar}");
        }
        println!();
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
