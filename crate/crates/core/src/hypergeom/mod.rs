//! Gauss hypergeometric function ₂F₁(a, b; c; z) on the real segment |z| ≤ 1.
//!
//! The power series
//!
//! ```text
//! ₂F₁(a,b;c;z) = Σ_{k≥0} (a)_k (b)_k / (c)_k · z^k / k!
//! ```
//!
//! is summed with the term-ratio recurrence
//! `t_{k+1} = t_k · (a+k)(b+k) z / ((c+k)(k+1))`. Arguments are routed as follows:
//!
//! | region | method |
//! |---|---|
//! | `z = 0` | 1 |
//! | `z = 1` | Gauss summation, [`hyp2f1_at_one`] |
//! | `a` or `b` a nonpositive integer | terminating polynomial |
//! | `-1 ≤ z < -1/2` | Pfaff transform to `z/(z-1) ∈ (1/3, 1/2]` |
//! | `-1/2 ≤ z ≤ boundary_switch` | direct series |
//! | `boundary_switch < z < 1` | `1 - z` connection formula when `c-a-b` is not an integer and the two branches do not cancel; otherwise Euler transform (`c-a-b < 0`) or direct series |
//!
//! The connection formula is what makes arguments like `z = 1 - 1e-12` cheap;
//! both series it needs converge like `(1-z)^k`.

mod gamma;

pub use gamma::{gamma, is_nonpositive_integer, ln_binomial, ln_gamma, reciprocal_gamma};

use crate::error::{GmsError, Result};

/// Truncation policy for the series summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    rel_tol: f64,
    max_terms: usize,
    boundary_switch: f64,
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize, boundary_switch: f64) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1e-6) {
            return Err(GmsError::domain(format!(
                "rel_tol must lie in (0, 1e-6), got {rel_tol}"
            )));
        }
        if max_terms < 1000 {
            return Err(GmsError::domain(format!(
                "max_terms must be at least 1000, got {max_terms}"
            )));
        }
        if !(0.5..1.0).contains(&boundary_switch) {
            return Err(GmsError::domain(format!(
                "boundary_switch must lie in [0.5, 1), got {boundary_switch}"
            )));
        }
        Ok(SeriesControl {
            rel_tol,
            max_terms,
            boundary_switch,
        })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn boundary_switch(&self) -> f64 {
        self.boundary_switch
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            rel_tol: 1e-14,
            max_terms: 2_000_000,
            boundary_switch: 0.75,
        }
    }
}

/// Validated arguments of ₂F₁.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl HypParams {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
            return Err(GmsError::domain("hypergeometric parameters must be finite"));
        }
        if is_nonpositive_integer(c) {
            return Err(GmsError::domain(format!(
                "c must not be zero or a negative integer, got {c}"
            )));
        }
        if z.abs() > 1.0 {
            return Err(GmsError::domain(format!("|z| must be at most 1, got {z}")));
        }
        if z == 1.0 && c - a - b <= 0.0 {
            return Err(GmsError::domain(format!(
                "series diverges at z = 1 unless c - a - b > 0 (got {})",
                c - a - b
            )));
        }
        Ok(HypParams { a, b, c, z })
    }
}

/// Rising factorial `a (a+1) ⋯ (a+k-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (a + i as f64))
}

/// Evaluates ₂F₁(a, b; c; z).
pub fn hyp2f1(params: &HypParams, ctrl: &SeriesControl) -> Result<f64> {
    let HypParams { a, b, c, z } = *params;
    if z == 0.0 {
        return Ok(1.0);
    }
    if z == 1.0 {
        return hyp2f1_at_one(a, b, c);
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return series(a, b, c, z, ctrl);
    }
    if z < -0.5 {
        return hyp2f1_pfaff(a, b, c, z, ctrl);
    }
    if z <= ctrl.boundary_switch {
        return series(a, b, c, z, ctrl);
    }
    near_one(a, b, c, z, ctrl)
}

/// Gauss summation `Γ(c)Γ(c-a-b) / (Γ(c-a)Γ(c-b))`, evaluated in log space.
pub fn hyp2f1_at_one(a: f64, b: f64, c: f64) -> Result<f64> {
    let d = c - a - b;
    if d.is_nan() || d <= 0.0 {
        return Err(GmsError::domain(format!(
            "Gauss summation needs c - a - b > 0, got {d}"
        )));
    }
    if is_nonpositive_integer(c) {
        return Err(GmsError::domain(format!(
            "c must not be zero or a negative integer, got {c}"
        )));
    }
    // 1/Γ(c-a) or 1/Γ(c-b) vanishing makes the whole product zero.
    if is_nonpositive_integer(c - a) || is_nonpositive_integer(c - b) {
        return Ok(0.0);
    }
    let (lc, sc) = ln_gamma(c);
    let (ld, sd) = ln_gamma(d);
    let (lca, sca) = ln_gamma(c - a);
    let (lcb, scb) = ln_gamma(c - b);
    Ok(sc * sd * sca * scb * (lc + ld - lca - lcb).exp())
}

/// Raw power series, no transformations.
pub fn hyp2f1_direct(a: f64, b: f64, c: f64, z: f64, ctrl: &SeriesControl) -> Result<f64> {
    HypParams::new(a, b, c, z)?;
    series(a, b, c, z, ctrl)
}

/// Euler transformation `(1-z)^{c-a-b} ₂F₁(c-a, c-b; c; z)` followed by the
/// raw series.
pub fn hyp2f1_euler(a: f64, b: f64, c: f64, z: f64, ctrl: &SeriesControl) -> Result<f64> {
    HypParams::new(a, b, c, z)?;
    if z == 1.0 {
        return Err(GmsError::domain("Euler transformation is singular at z = 1"));
    }
    euler(a, b, c, z, ctrl)
}

fn euler(a: f64, b: f64, c: f64, z: f64, ctrl: &SeriesControl) -> Result<f64> {
    let inner = series(c - a, c - b, c, z, ctrl)?;
    Ok((1.0 - z).powf(c - a - b) * inner)
}

fn hyp2f1_pfaff(a: f64, b: f64, c: f64, z: f64, ctrl: &SeriesControl) -> Result<f64> {
    let w = z / (z - 1.0);
    let inner = series(a, c - b, c, w, ctrl)?;
    Ok((1.0 - z).powf(-a) * inner)
}

/// Largest tolerated ratio between the larger connection branch and the result.
const MAX_CANCELLATION: f64 = 100.0;

fn near_one(a: f64, b: f64, c: f64, z: f64, ctrl: &SeriesControl) -> Result<f64> {
    let d = c - a - b;
    if (d - d.round()).abs() >= 0.05 {
        if let Some(value) = connection(a, b, c, z, ctrl)? {
            return Ok(value);
        }
    }
    if d < 0.0 {
        euler(a, b, c, z, ctrl)
    } else {
        series(a, b, c, z, ctrl)
    }
}

/// `1 - z` connection formula for non-integer `d = c - a - b`:
///
/// ```text
/// F(a,b;c;z) = Γ(c)Γ(d)/(Γ(c-a)Γ(c-b)) · F(a, b; 1-d; 1-z)
///            + (1-z)^d Γ(c)Γ(-d)/(Γ(a)Γ(b)) · F(c-a, c-b; 1+d; 1-z)
/// ```
///
/// Returns `None` when the two branches cancel by more than [`MAX_CANCELLATION`].
fn connection(a: f64, b: f64, c: f64, z: f64, ctrl: &SeriesControl) -> Result<Option<f64>> {
    let d = c - a - b;
    let w = 1.0 - z;
    let (lc, sc) = ln_gamma(c);

    let first = if is_nonpositive_integer(c - a) || is_nonpositive_integer(c - b) {
        0.0
    } else {
        let (ld, sd) = ln_gamma(d);
        let (lca, sca) = ln_gamma(c - a);
        let (lcb, scb) = ln_gamma(c - b);
        let coef = sc * sd * sca * scb * (lc + ld - lca - lcb).exp();
        coef * series(a, b, 1.0 - d, w, ctrl)?
    };

    let (lnd, snd) = ln_gamma(-d);
    let (la, sa) = ln_gamma(a);
    let (lb, sb) = ln_gamma(b);
    let coef = sc * snd * sa * sb * (lc + lnd - la - lb + d * w.ln()).exp();
    let second = coef * series(c - a, c - b, 1.0 + d, w, ctrl)?;

    let value = first + second;
    let scale = first.abs().max(second.abs());
    if !value.is_finite() || scale > MAX_CANCELLATION * value.abs() {
        return Ok(None);
    }
    Ok(Some(value))
}

/// Term-ratio summation; stops once two consecutive terms fall below
/// `rel_tol · |partial sum|`, or as soon as a term is exactly zero.
///
/// Each term is inflated by the geometric tail bound `1/(1 - |ratio|)` before
/// the comparison, so slowly decaying series near `|z| = 1` are not cut short.
fn series(a: f64, b: f64, c: f64, z: f64, ctrl: &SeriesControl) -> Result<f64> {
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut small_run = 0;
    for k in 0..ctrl.max_terms {
        let kf = k as f64;
        let ratio = (a + kf) * (b + kf) * z / ((c + kf) * (kf + 1.0));
        term *= ratio;
        if term == 0.0 {
            return Ok(sum);
        }
        sum += term;
        if !sum.is_finite() {
            break;
        }
        let tail = if ratio.abs() < 1.0 {
            term.abs() / (1.0 - ratio.abs())
        } else {
            f64::INFINITY
        };
        if tail <= ctrl.rel_tol * sum.abs() {
            small_run += 1;
            if small_run == 2 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(GmsError::NonConvergence {
        a,
        b,
        c,
        z,
        terms: ctrl.max_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn f(a: f64, b: f64, c: f64, z: f64) -> f64 {
        hyp2f1(&HypParams::new(a, b, c, z).unwrap(), &SeriesControl::default()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(7.3, 0), 1.0);
        assert_eq!(pochhammer(3.0, 2), 12.0);
        assert!((pochhammer(0.5, 3) - 0.5 * 1.5 * 2.5).abs() < 1e-15);
        assert!((pochhammer(0.5, 3) - 1.875).abs() < 1e-15);
    }

    #[test]
    fn value_at_zero_is_one() {
        assert_eq!(f(0.5, 1.0, 2.0, 0.0), 1.0);
    }

    #[test]
    fn half_one_two_matches_sqrt_closed_form() {
        let closed = |z: f64| 2.0 * (1.0 - (1.0 - z).sqrt()) / z;
        assert!((f(0.5, 1.0, 2.0, 0.5) - 1.171_572_875_253_81).abs() < 1e-14);
        for z in [-1.0, -0.7, -0.2, 0.1, 0.5, 0.74, 0.76, 0.9, 0.999, 1.0 - 1e-9] {
            assert!(rel(f(0.5, 1.0, 2.0, z), closed(z)) < 1e-13, "z={z}");
        }
        assert!((f(0.5, 1.0, 2.0, 1.0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn log_closed_form_with_integer_excess() {
        // F(1,2;3;z) = 2(-ln(1-z) - z)/z², and c-a-b = 0 forces the series route.
        let closed = |z: f64| 2.0 * (-(-z).ln_1p() - z) / (z * z);
        for z in [0.25, 0.8, 0.95, 0.999] {
            assert!(rel(f(1.0, 2.0, 3.0, z), closed(z)) < 1e-12, "z={z}");
        }
    }

    #[test]
    fn gauss_summation_values() {
        assert!((hyp2f1_at_one(0.5, 1.0, 2.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((hyp2f1_at_one(0.5, 1.0, 3.0).unwrap() - 4.0 / 3.0).abs() < 1e-14);
        assert!((hyp2f1_at_one(0.0, 2.7, 4.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(
            hyp2f1_at_one(1.0, 1.0, 2.0),
            Err(GmsError::Domain(_))
        ));
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(HypParams::new(1.0, 1.0, 0.0, 0.5).is_err());
        assert!(HypParams::new(1.0, 1.0, -3.0, 0.5).is_err());
        assert!(HypParams::new(1.0, 1.0, 3.0, 1.01).is_err());
        assert!(HypParams::new(1.0, 1.0, 2.0, 1.0).is_err());
        assert!(HypParams::new(1.0, 1.0, 2.5, 1.0).is_ok());
        assert!(SeriesControl::new(1e-3, 5000, 0.75).is_err());
        assert!(SeriesControl::new(1e-12, 10, 0.75).is_err());
        assert!(SeriesControl::new(1e-12, 5000, 0.4).is_err());
    }

    #[test]
    fn terminating_polynomial() {
        // F(-2, b; c; z) = 1 - 2bz/c + b(b+1)z²/(c(c+1))
        let (b, c, z) = (1.5, 2.5, 0.9);
        let poly = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
        assert!(rel(f(-2.0, b, c, z), poly) < 1e-15);
    }

    #[test]
    fn non_convergence_is_reported() {
        let ctrl = SeriesControl::new(1e-14, 1000, 0.75).unwrap();
        // c - a - b = 0 blocks the connection formula; 1 - z = 1e-8 needs ~3e9 terms.
        let err = hyp2f1(&HypParams::new(1.0, 2.0, 3.0, 1.0 - 1e-8).unwrap(), &ctrl);
        assert!(matches!(err, Err(GmsError::NonConvergence { .. })));
    }

    #[test]
    fn approaches_gauss_summation_monotonically() {
        for &(a, b, c) in &[(0.5, 1.0, 2.0), (2.0, 2.5, 5.0), (1.5, 0.5, 3.0), (5.0, 5.5, 11.0)] {
            let limit = hyp2f1_at_one(a, b, c).unwrap();
            let mut prev = f64::INFINITY;
            for z in [0.9, 0.99, 0.999, 0.9999] {
                let err = (f(a, b, c, z) - limit).abs();
                assert!(err < prev, "({a},{b},{c}) z={z}: {err} !< {prev}");
                prev = err;
            }
        }
    }

    #[test]
    fn gamma_duplication_formula() {
        // Γ(2z) = Γ(z + 1/2) Γ(z) / (2^{1-2z} √π)
        for i in 1..=20 {
            let z = 0.5 * i as f64;
            let lhs = gamma(2.0 * z);
            let rhs = gamma(z + 0.5) * gamma(z) / (2f64.powf(1.0 - 2.0 * z) * PI.sqrt());
            assert!(rel(lhs, rhs) < 1e-12, "z={z}");
        }
    }

    #[test]
    fn connection_branch_handles_negative_excess() {
        // F(1/2, 1; 1; z) = (1-z)^{-1/2}, c-a-b = -1/2
        for z in [0.8, 0.99, 1.0 - 1e-10] {
            assert!(rel(f(0.5, 1.0, 1.0, z), (1.0 - z).powf(-0.5)) < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn symmetric_in_a_and_b(
            a in 0.1f64..8.0,
            b in 0.1f64..8.0,
            c in 0.3f64..12.0,
            z in -1.0f64..0.999,
        ) {
            let x = f(a, b, c, z);
            let y = f(b, a, c, z);
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }

        #[test]
        fn euler_transform_agrees_below_switch(
            a in 0.1f64..6.0,
            b in 0.1f64..6.0,
            excess in 0.1f64..4.0,
            z in 0.0f64..0.75,
        ) {
            // c > max(a, b) keeps both series free of sign changes.
            let c = a.max(b) + excess;
            let ctrl = SeriesControl::default();
            let direct = hyp2f1_direct(a, b, c, z, &ctrl).unwrap();
            let euler = hyp2f1_euler(a, b, c, z, &ctrl).unwrap();
            prop_assert!((direct - euler).abs() <= 10.0 * ctrl.rel_tol() * direct.abs(),
                "direct={direct} euler={euler}");
        }

        #[test]
        fn one_at_origin(a in -5.0f64..5.0, b in -5.0f64..5.0, c in 0.1f64..5.0) {
            prop_assert_eq!(f(a, b, c, 0.0), 1.0);
        }
    }
}
