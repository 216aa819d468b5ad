//! Exact law of `Z_m`, the fitness of the strongest individual of one
//! excursion of the subcritical GMS(m) model.
//!
//! With `z = 4pqt`:
//!
//! ```text
//! CDF   P[Z_m ≤ t] = (q t)^m ₂F₁(m/2, (m+1)/2; m+1; z)
//! PDF   f_m(t)     = m q^m t^{m-1} ₂F₁(m/2, (m+1)/2; m; z)
//! mean  E[Z_m]     = 1 - q^m/(m+1) · ₂F₁(m/2, (m+1)/2; m+2; 4pq)
//! ```
//!
//! At `p = 1/2` the mean reduces to `1 - 2/((m+1)(m+2))`, `Z_1` is Beta(1, 1/2),
//! and `1 - Z_m` follows the hypergeometric-function type I distribution.

use crate::error::{GmsError, Result};
use crate::hypergeom::{hyp2f1, HypParams, SeriesControl};

/// Parameters of the GMS(m) model: birth probability `p` and revival batch size `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    p: f64,
    m: u32,
}

impl ModelParams {
    pub fn new(p: f64, m: u32) -> Result<Self> {
        if !(p > 0.0 && p <= 0.5) {
            return Err(GmsError::domain(format!(
                "birth probability p must satisfy 0 < p <= 0.5, got {p}"
            )));
        }
        if m == 0 {
            return Err(GmsError::domain("revival batch size m must be at least 1"));
        }
        Ok(ModelParams { p, m })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `4pq`, the hypergeometric argument at `t = 1`.
    fn four_pq(&self) -> f64 {
        4.0 * self.p * self.q()
    }
}

/// Probabilities may overshoot [0, 1] by float dust only.
const CLAMP_SLACK: f64 = 1e-9;

fn clamp_probability(x: f64, what: &str) -> Result<f64> {
    if !x.is_finite() || !(-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&x) {
        return Err(GmsError::Internal(format!("{what} evaluated to {x}")));
    }
    Ok(x.clamp(0.0, 1.0))
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(GmsError::domain(format!("t must lie in [0, 1], got {t}")));
    }
    Ok(())
}

/// `P[Z_m ≤ t]` for `0 ≤ t ≤ 1`.
pub fn cdf(params: &ModelParams, t: f64, ctrl: &SeriesControl) -> Result<f64> {
    check_t(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let m = params.m as f64;
    let z = (params.four_pq() * t).min(1.0);
    let f = hyp2f1(&HypParams::new(m / 2.0, (m + 1.0) / 2.0, m + 1.0, z)?, ctrl)?;
    clamp_probability((params.q() * t).powi(params.m as i32) * f, "cdf")
}

/// Closed form for `m = 1`: `(1 - √(1 - 4pqt)) / (2p)`.
///
/// Evaluated as `2qt / (1 + √(1 - 4pqt))`, which avoids the cancellation at small `t`.
pub fn cdf_closed_m1(p: f64, t: f64) -> Result<f64> {
    let params = ModelParams::new(p, 1)?;
    check_t(t)?;
    let q = params.q();
    let root = (1.0 - (params.four_pq() * t).min(1.0)).sqrt();
    clamp_probability(2.0 * q * t / (1.0 + root), "closed-form cdf")
}

/// Density of `Z_m`.
///
/// Defined for `0 ≤ t < 1` (the `t = 0` value is the limit from the right) and
/// also at `t = 1` when `p < 1/2`. At `p = 1/2` the density diverges like
/// `(1-t)^{-1/2}` at the right endpoint.
pub fn pdf(params: &ModelParams, t: f64, ctrl: &SeriesControl) -> Result<f64> {
    check_t(t)?;
    let z = params.four_pq() * t;
    if z >= 1.0 {
        return Err(GmsError::domain(
            "density diverges at t = 1 when p = 1/2".to_string(),
        ));
    }
    let m = params.m;
    if t == 0.0 {
        return Ok(if m == 1 { params.q() } else { 0.0 });
    }
    let mf = m as f64;
    let f = hyp2f1(&HypParams::new(mf / 2.0, (mf + 1.0) / 2.0, mf, z)?, ctrl)?;
    let value = mf * params.q().powi(m as i32) * t.powi(m as i32 - 1) * f;
    if !value.is_finite() || value < 0.0 {
        return Err(GmsError::Internal(format!("pdf evaluated to {value}")));
    }
    Ok(value)
}

/// `E[Z_m] = 1 - q^m/(m+1) · ₂F₁(m/2, (m+1)/2; m+2; 4pq)`.
pub fn mean(params: &ModelParams, ctrl: &SeriesControl) -> Result<f64> {
    let m = params.m as f64;
    let z = params.four_pq().min(1.0);
    let f = hyp2f1(&HypParams::new(m / 2.0, (m + 1.0) / 2.0, m + 2.0, z)?, ctrl)?;
    let tail = params.q().powi(params.m as i32) / (m + 1.0) * f;
    clamp_probability(1.0 - tail, "mean")
}

/// Mean at `p = 1/2`: `1 - 2/((m+1)(m+2))`.
pub fn mean_half(m: u32) -> f64 {
    let m = m as f64;
    1.0 - 2.0 / ((m + 1.0) * (m + 2.0))
}
