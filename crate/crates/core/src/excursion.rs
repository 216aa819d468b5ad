//! Excursion-length law and the decomposition sampler.
//!
//! An excursion starts with the step that places the `m` revival individuals
//! and ends with the step that empties the system. After the placement the
//! population walks from level `m` down to 0, so with `T₋ₘ` the first passage
//! of a ±1 walk from 0 to `-m`,
//!
//! ```text
//! P[τ = k+1] = P[T₋ₘ = k] = (m/k) C(k, (k-m)/2) p^{(k-m)/2} q^{(k+m)/2},  k ≥ m, k+m even.
//! ```
//!
//! Along such an excursion `(k+m)/2` individuals are born in total and the
//! last one to die is the strongest, so `Z_m` is the maximum of `(k+m)/2`
//! independent uniforms. [`sample_excursion_shortcut`] samples exactly that.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Binomial, Distribution};
use serde::Serialize;

use crate::error::{GmsError, Result};
use crate::fitness_law::ModelParams;
use crate::gms_sim::{ExcursionRecord, WORK_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauPmfEntry {
    /// Excursion length `τ = k + 1`.
    pub length: u64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauPmfTable {
    pub entries: Vec<TauPmfEntry>,
    /// Sum of the tabulated probabilities.
    pub mass: f64,
}

/// `P[τ = k+1] = P[T₋ₘ = k]`, computed in log space.
pub fn tau_pmf(params: &ModelParams, k: u64) -> Result<f64> {
    let m = params.m() as u64;
    if k < m {
        return Err(GmsError::domain(format!(
            "first passage to -{m} needs at least {m} steps, got k={k}"
        )));
    }
    if (k + m) % 2 == 1 {
        return Ok(0.0);
    }
    let ups = (k - m) / 2;
    let ln = (m as f64 / k as f64).ln() + ln_binomial_pmf(ups, k, params.p(), params.q());
    Ok(ln.exp())
}

/// `ln Γ(n+1) - (n+½) ln n + n - ½ ln 2π` for integer `n`.
fn stirling_error(n: u64) -> f64 {
    #[allow(clippy::excessive_precision)]
    const TABLE: [f64; 16] = [
        0.0,
        0.081_061_466_795_327_258_22,
        0.041_340_695_955_409_294_09,
        0.027_677_925_684_998_339_15,
        0.020_790_672_103_765_093_11,
        0.016_644_691_189_821_192_16,
        0.013_876_128_823_070_747_99,
        0.011_896_709_945_891_770_1,
        0.010_411_265_261_972_096_5,
        0.009_255_462_182_712_732_918,
        0.008_330_563_433_362_871_256,
        0.007_573_675_487_951_840_795,
        0.006_942_840_107_209_529_866,
        0.006_408_994_188_004_207_068,
        0.005_951_370_112_758_847_736,
        0.005_554_733_551_962_801_371,
    ];
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n < 16 {
        return TABLE[n as usize];
    }
    let n = n as f64;
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x/np) + np - x`, with a series when `x ≈ np`.
fn deviance(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let next = s + ej / (2 * j + 1) as f64;
            if next == s {
                return next;
            }
            s = next;
        }
        return s;
    }
    x * (x / np).ln() + np - x
}

/// `ln [C(n, x) p^x q^{n-x}]` via the saddle-point expansion, accurate to a few
/// ulps even where the individual log-gamma terms are huge.
fn ln_binomial_pmf(x: u64, n: u64, p: f64, q: f64) -> f64 {
    if x == 0 {
        return n as f64 * (-p).ln_1p();
    }
    if x == n {
        return n as f64 * p.ln();
    }
    let (xf, nf) = (x as f64, n as f64);
    let lc = stirling_error(n)
        - stirling_error(x)
        - stirling_error(n - x)
        - deviance(xf, nf * p)
        - deviance(nf - xf, nf * q);
    lc + 0.5 * (nf / (2.0 * std::f64::consts::PI * xf * (nf - xf))).ln()
}

/// Every admissible `k ≤ k_max`, in increasing length order.
pub fn tau_pmf_table(params: &ModelParams, k_max: u64) -> Result<TauPmfTable> {
    let m = params.m() as u64;
    if k_max < m {
        return Err(GmsError::domain(format!(
            "k_max must be at least m = {m}, got {k_max}"
        )));
    }
    let mut entries = Vec::with_capacity(((k_max - m) / 2 + 1) as usize);
    let mut mass = 0.0;
    for k in (m..=k_max).step_by(2) {
        let probability = tau_pmf(params, k)?;
        mass += probability;
        entries.push(TauPmfEntry {
            length: k + 1,
            probability,
        });
    }
    Ok(TauPmfTable { entries, mass })
}

/// Smallest admissible `K` with `Σ_{k ≤ K} P[T₋ₘ = k] ≥ 1 - deficit`.
///
/// Returns `(K, mass)`. Fails if the target is not reached by `k_limit`, which
/// is expected at `p = 1/2` where the tail only decays like `k^{-1/2}`.
pub fn tau_mass_cutoff(params: &ModelParams, deficit: f64, k_limit: u64) -> Result<(u64, f64)> {
    let m = params.m() as u64;
    let mut mass = 0.0;
    let mut k = m;
    while k <= k_limit {
        mass += tau_pmf(params, k)?;
        if mass >= 1.0 - deficit {
            return Ok((k, mass));
        }
        k += 2;
    }
    Err(GmsError::domain(format!(
        "pmf mass {mass} still short of 1 - {deficit} at k = {k_limit}"
    )))
}

/// Outcome of a first-passage run of the ±1 walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FirstPassage {
    pub steps: u64,
    pub up_steps: u64,
}

/// Below this level the walk is advanced one step at a time.
const BLOCK_LEVEL: u64 = 16;

/// Runs the walk from `start` until it first reaches 0.
///
/// From level `x ≥ BLOCK_LEVEL` the next `x` steps are taken as one block with
/// a binomial number of up-steps. No block can touch 0 before its last step,
/// and it ends at 0 only when every step went down, so the first passage is
/// never skipped over. `work_limit` bounds the number of loop iterations.
pub fn first_passage<R: Rng + ?Sized>(
    start: u64,
    p: f64,
    rng: &mut R,
    work_limit: u64,
) -> Result<FirstPassage> {
    let step = Bernoulli::new(p).map_err(|e| GmsError::domain(e.to_string()))?;
    let mut level = start;
    let mut steps = 0u64;
    let mut up_steps = 0u64;
    let mut work = 0u64;
    while level > 0 {
        work += 1;
        if work > work_limit {
            return Err(GmsError::RuntimeLimit { limit: work_limit });
        }
        if level < BLOCK_LEVEL {
            steps += 1;
            if step.sample(rng) {
                up_steps += 1;
                level += 1;
            } else {
                level -= 1;
            }
        } else {
            let block = level;
            let ups = Binomial::new(block, p)
                .map_err(|e| GmsError::domain(e.to_string()))?
                .sample(rng);
            level = level + 2 * ups - block;
            steps += block;
            up_steps += ups;
        }
    }
    Ok(FirstPassage { steps, up_steps })
}

/// Maximum of `n` independent uniforms on [0, 1); 0 when `n = 0`.
///
/// Small `n` draws every uniform; larger `n` inverts the CDF `t^n`.
pub fn max_of_uniforms<R: Rng + ?Sized>(n: u64, rng: &mut R) -> f64 {
    if n <= 64 {
        return (0..n).map(|_| rng.random::<f64>()).fold(0.0, f64::max);
    }
    let u = 1.0 - rng.random::<f64>();
    (u.ln() / n as f64).exp()
}

/// Draws one excursion from the decomposition: first-passage length of the
/// walk from `m`, then the strongest fitness as a maximum of uniforms.
pub fn sample_excursion_shortcut<R: Rng + ?Sized>(
    params: &ModelParams,
    rng: &mut R,
) -> Result<ExcursionRecord> {
    let m = params.m() as u64;
    let walk = first_passage(m, params.p(), rng, WORK_LIMIT)?;
    let births = m + walk.up_steps;
    let record = ExcursionRecord {
        length: walk.steps + 1,
        births,
        deaths: walk.steps - walk.up_steps,
        strongest_fitness: max_of_uniforms(births, rng),
    };
    debug_assert_eq!(record.deaths, (walk.steps + m) / 2);
    debug_assert!(record.is_consistent(params.m()));
    Ok(record)
}

/// Seed offset that keeps shortcut streams apart from the full simulator's.
const SHORTCUT_SEED_SALT: u64 = 0x5bd1_e995_9e37_79b9;

/// `n` shortcut excursions; draw `j` uses ChaCha8 stream `j` under a salted seed.
pub fn sample_shortcut_batch(params: &ModelParams, n: u64, seed: u64) -> Result<Vec<ExcursionRecord>> {
    (0..n)
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ SHORTCUT_SEED_SALT);
            rng.set_stream(j);
            sample_excursion_shortcut(params, &mut rng)
        })
        .collect()
}
