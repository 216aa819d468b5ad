// Distribution of the strongest fitness in an excursion: CDF, density and mean.

use gms_core::{cdf, mean, mean_half, pdf, ModelParams, SeriesControl};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ctrl = SeriesControl::default();

    for (p, m) in [(0.25, 1), (0.45, 5), (0.5, 10)] {
        let params = ModelParams::new(p, m)?;
        println!("p = {p}, m = {m}");
        println!("{:>6} {:>14} {:>14}", "t", "cdf", "pdf");
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            let c = cdf(&params, t, &ctrl)?;
            // the density is unbounded at t = 1 when p = 1/2
            let d = pdf(&params, t, &ctrl).map(|d| format!("{d:14.8}"));
            println!("{t:>6.2} {c:>14.10} {:>14}", d.unwrap_or_else(|_| "-".into()));
        }
        println!("mean = {:.12}\n", mean(&params, &ctrl)?);
    }

    println!("{:>4} {:>16} {:>16}", "m", "mean at p=1/2", "1-2/((m+1)(m+2))");
    for m in [1, 2, 5, 10, 50] {
        let exact = mean(&ModelParams::new(0.5, m)?, &ctrl)?;
        println!("{m:>4} {exact:>16.12} {:>16.12}", mean_half(m));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
