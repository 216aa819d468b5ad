//! Exact law and Monte Carlo validation of the strongest individual's fitness
//! in the subcritical GMS(m) species model.
//!
//! The population size performs a reflected ±1 walk (birth with probability
//! `p ≤ 1/2`, death with `q = 1 - p`); every birth carries an independent
//! uniform fitness and every death removes the weakest individual. Whenever the
//! system is empty, a birth step places `m` individuals at once. The last
//! individual to die in an excursion is the strongest one born during it, and
//! its fitness `Z_m` satisfies
//!
//! ```text
//! P[Z_m ≤ t] = (q t)^m ₂F₁(m/2, (m+1)/2; m+1; 4 p q t)
//! ```
//!
//! Modules:
//! - [`hypergeom`]: ₂F₁ evaluation and gamma helpers
//! - [`fitness_law`]: CDF, PDF and mean of `Z_m`
//! - [`excursion`]: excursion-length law and the fast decomposition sampler
//! - [`gms_sim`]: event-by-event simulator
//! - [`stats`]: ECDF, Kolmogorov–Smirnov, chi-square, histograms
//! - [`cli`]: the `gms` command-line front end

pub mod cli;
pub mod error;
pub mod excursion;
pub mod fitness_law;
pub mod gms_sim;
pub mod hypergeom;
pub mod stats;

pub use error::{GmsError, Result};
pub use excursion::{sample_excursion_shortcut, tau_pmf, tau_pmf_table, TauPmfEntry, TauPmfTable};
pub use fitness_law::{cdf, cdf_closed_m1, mean, mean_half, pdf, ModelParams};
pub use gms_sim::{run_full_simulation, ExcursionRecord, SimConfig, SimTarget};
pub use hypergeom::{hyp2f1, hyp2f1_at_one, pochhammer, HypParams, SeriesControl};
pub use stats::{EmpiricalDistribution, KsReport};
