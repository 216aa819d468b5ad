// Checks both samplers against the exact CDF and against each other.

use gms_core::excursion::sample_shortcut_batch;
use gms_core::gms_sim::strongest_fitnesses;
use gms_core::stats::{ks_one_sample, ks_two_sample};
use gms_core::{
    cdf, run_full_simulation, EmpiricalDistribution, ModelParams, SeriesControl, SimConfig,
    SimTarget,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::new(0.45, 3)?;
    let ctrl = SeriesControl::default();
    let n = 20_000;

    let full = run_full_simulation(&SimConfig::new(params, SimTarget::Excursions(n), 5))?;
    let shortcut = sample_shortcut_batch(&params, n, 6)?;
    let full = EmpiricalDistribution::new(strongest_fitnesses(&full))?;
    let shortcut = EmpiricalDistribution::new(strongest_fitnesses(&shortcut))?;

    let exact = |t: f64| cdf(&params, t, &ctrl).expect("cdf on [0, 1]");
    let reports = [
        ks_one_sample(&full, exact, 0.001).named("full vs exact"),
        ks_one_sample(&shortcut, exact, 0.001).named("shortcut vs exact"),
        ks_two_sample(&full, &shortcut, 0.001).named("full vs shortcut"),
    ];
    for r in &reports {
        println!(
            "{:<18} D = {:.5}  p ≈ {:.4}  {}",
            r.test,
            r.statistic,
            r.p_value_bound,
            if r.passed { "ok" } else { "REJECTED" }
        );
    }

    // A wrong model is rejected.
    let wrong = ks_one_sample(&full, |t| t, 0.001);
    println!("{:<18} D = {:.5}  p ≈ {:.2e}", "full vs uniform", wrong.statistic, wrong.p_value_bound);
    assert!(!wrong.passed);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
