//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the hypergeometric or fitness-law code.

#![allow(dead_code)]

/// Adaptive Simpson quadrature on [a, b] to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Counts ±1 paths of length `k` that first reach `-m` at step `k`,
/// grouped by number of up-steps. Exhaustive over all `2^k` paths.
pub fn enumerate_first_passages(m: i64, k: u32) -> Vec<u64> {
    let mut by_ups = vec![0u64; k as usize + 1];
    for mask in 0u64..(1u64 << k) {
        let mut level = 0i64;
        let mut ups = 0usize;
        let mut hit_at = None;
        for step in 0..k {
            if mask >> step & 1 == 1 {
                level += 1;
                ups += 1;
            } else {
                level -= 1;
            }
            if level == -m {
                hit_at = Some(step + 1);
                break;
            }
        }
        if hit_at == Some(k) {
            by_ups[ups] += 1;
        }
    }
    by_ups
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `P[T₋ₘ = k]` as a plain product of factors in linear space, no gamma
/// functions and no logarithms. Factors are interleaved to stay in range, so
/// the relative error grows by about one ulp per factor. Underflows to zero
/// once the true value is below the smallest normal.
pub fn first_passage_prob(p: f64, m: u64, k: u64) -> f64 {
    if k < m || (k + m) % 2 == 1 {
        return 0.0;
    }
    let q = 1.0 - p;
    let ups = (k - m) / 2;
    let downs = (k + m) / 2;
    let mut v = m as f64 / k as f64;
    let (mut i, mut d) = (0, 0);
    while i < ups || d < downs {
        if i < ups && (v < 1.0 || d == downs) {
            v *= (k - i) as f64 / (i + 1) as f64 * p;
            i += 1;
        } else {
            v *= q;
            d += 1;
        }
    }
    v
}

/// `Σ_k P[T₋ₘ = k] t^{(k+m)/2}`, truncated once the remaining mass times
/// `t^{(k+m)/2}` is certainly below `tol`.
pub fn cdf_by_passage_sum(p: f64, m: u64, t: f64, tol: f64) -> f64 {
    let mut total = 0.0;
    let mut mass = 0.0;
    let mut k = m;
    loop {
        let prob = first_passage_prob(p, m, k);
        mass += prob;
        total += prob * t.powf(((k + m) / 2) as f64);
        // remaining terms are bounded by (1 - mass) · t^{(k+m)/2}
        if (1.0 - mass).max(0.0) * t.powf(((k + m) / 2) as f64) < tol && k > m + 2 {
            return total;
        }
        k += 2;
        assert!(k < 50_000_000, "passage sum did not settle");
    }
}

/// Central finite difference.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> f64 {
    (f(t + h) - f(t - h)) / (2.0 * h)
}
