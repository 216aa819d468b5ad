//! Empirical distributions and goodness-of-fit tests.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{GmsError, Result};

/// Sorted sample with ECDF queries.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(GmsError::domain("empirical distribution needs at least one sample"));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(GmsError::domain("samples must be finite"));
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalDistribution { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted_samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples `≤ t`.
    pub fn ecdf(&self, t: f64) -> f64 {
        self.sorted.partition_point(|&x| x <= t) as f64 / self.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.len() as f64
    }

    /// Unbiased sample variance; 0 for a single sample.
    pub fn variance(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let mu = self.mean();
        self.sorted.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (n - 1) as f64
    }

    pub fn standard_error(&self) -> f64 {
        (self.variance() / self.len() as f64).sqrt()
    }

    /// Fraction of samples in `[lo, hi)`.
    pub fn fraction_in(&self, lo: f64, hi: f64) -> f64 {
        let below_hi = self.sorted.partition_point(|&x| x < hi);
        let below_lo = self.sorted.partition_point(|&x| x < lo);
        (below_hi - below_lo) as f64 / self.len() as f64
    }
}

/// Outcome of a Kolmogorov–Smirnov comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsReport {
    pub test: String,
    pub statistic: f64,
    /// Sample size, or `n_a n_b / (n_a + n_b)` for two samples.
    pub n: f64,
    pub p_value_bound: f64,
    pub passed: bool,
}

impl KsReport {
    pub fn named(mut self, test: impl Into<String>) -> Self {
        self.test = test.into();
        self
    }

    fn from_statistic(test: &str, statistic: f64, n: f64, alpha: f64) -> Self {
        let p_value_bound = kolmogorov_survival(n.sqrt() * statistic);
        KsReport {
            test: test.to_string(),
            statistic,
            n,
            p_value_bound,
            passed: p_value_bound > alpha,
        }
    }
}

const KOLMOGOROV_TERMS: usize = 100;

/// `P[K > λ]` for the asymptotic Kolmogorov distribution.
///
/// Uses the theta-function form below λ = 1.18 and the alternating series
/// above it; both are truncated at 100 terms.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    use std::f64::consts::PI;
    if lambda.is_nan() || lambda <= 0.0 {
        return 1.0;
    }
    let q = if lambda < 1.18 {
        let y = -PI * PI / (8.0 * lambda * lambda);
        let cdf: f64 = (1..=KOLMOGOROV_TERMS)
            .map(|j| {
                let odd = (2 * j - 1) as f64;
                (odd * odd * y).exp()
            })
            .sum::<f64>()
            * (2.0 * PI).sqrt()
            / lambda;
        1.0 - cdf
    } else {
        2.0 * (1..=KOLMOGOROV_TERMS)
            .map(|j| {
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                let jf = j as f64;
                sign * (-2.0 * jf * jf * lambda * lambda).exp()
            })
            .sum::<f64>()
    };
    q.clamp(0.0, 1.0)
}

/// One-sample KS test against `cdf`; passes when the p-value exceeds `alpha`.
///
/// The statistic is the exact supremum over order statistics.
pub fn ks_one_sample<F: FnMut(f64) -> f64>(
    dist: &EmpiricalDistribution,
    mut cdf: F,
    alpha: f64,
) -> KsReport {
    let n = dist.len() as f64;
    let statistic = dist
        .sorted_samples()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let upper = (i + 1) as f64 / n - f;
            let lower = f - i as f64 / n;
            upper.abs().max(lower.abs())
        })
        .fold(0.0, f64::max);
    KsReport::from_statistic("one-sample", statistic.min(1.0), n, alpha)
}

/// Two-sample KS test on the sup distance between the two ECDFs.
pub fn ks_two_sample(
    a: &EmpiricalDistribution,
    b: &EmpiricalDistribution,
    alpha: f64,
) -> KsReport {
    let (xa, xb) = (a.sorted_samples(), b.sorted_samples());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut statistic = 0.0_f64;
    while i < xa.len() && j < xb.len() {
        let v = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= v {
            i += 1;
        }
        while j < xb.len() && xb[j] <= v {
            j += 1;
        }
        statistic = statistic.max((i as f64 / na - j as f64 / nb).abs());
    }
    KsReport::from_statistic("two-sample", statistic, na * nb / (na + nb), alpha)
}

/// Equal-width histogram on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    /// Samples below `lo`.
    pub below: u64,
    /// Samples above `hi`.
    pub above: u64,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_edges(&self, i: usize) -> (f64, f64) {
        let width = (self.hi - self.lo) / self.bins() as f64;
        let left = self.lo + width * i as f64;
        let right = if i + 1 == self.bins() {
            self.hi
        } else {
            self.lo + width * (i + 1) as f64
        };
        (left, right)
    }

    pub fn in_range(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Counts normalized by the in-range total.
    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.in_range().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

/// Bins are left-closed; a sample exactly at `hi` lands in the last bin.
pub fn histogram(dist: &EmpiricalDistribution, bins: usize, lo: f64, hi: f64) -> Result<Histogram> {
    if bins == 0 {
        return Err(GmsError::domain("histogram needs at least one bin"));
    }
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(GmsError::domain(format!("histogram range [{lo}, {hi}] is empty")));
    }
    let mut h = Histogram {
        lo,
        hi,
        counts: vec![0; bins],
        below: 0,
        above: 0,
    };
    for &x in dist.sorted_samples() {
        if x < lo {
            h.below += 1;
        } else if x > hi {
            h.above += 1;
        } else {
            let idx = ((x - lo) / (hi - lo) * bins as f64).floor() as usize;
            h.counts[idx.min(bins - 1)] += 1;
        }
    }
    Ok(h)
}

/// Pearson chi-square outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Categories left after pooling.
    pub categories: usize,
}

fn chi_square_p_value(statistic: f64, dof: usize) -> Result<f64> {
    let dist = ChiSquared::new(dof as f64).map_err(|e| GmsError::domain(e.to_string()))?;
    Ok(dist.sf(statistic))
}

/// Minimum expected count per category after pooling.
const MIN_EXPECTED: f64 = 5.0;

/// Goodness of fit of `observed` counts to category probabilities `probs`.
///
/// `probs` should cover the whole support (append a tail category when the
/// law is truncated). Adjacent categories are pooled left to right until each
/// expected count is at least 5; an undersized remainder joins the last pool.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquareReport> {
    if observed.len() != probs.len() || observed.is_empty() {
        return Err(GmsError::domain("observed and probability vectors must align"));
    }
    let n: u64 = observed.iter().sum();
    let n = n as f64;
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probs) {
        obs += o as f64;
        exp += p * n;
        if exp >= MIN_EXPECTED {
            pooled.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => pooled.push((obs, exp)),
        }
    }
    if pooled.len() < 2 {
        return Err(GmsError::domain("too few categories after pooling"));
    }
    let statistic = pooled
        .iter()
        .map(|&(o, e)| (o - e).powi(2) / e)
        .sum::<f64>();
    let dof = pooled.len() - 1;
    Ok(ChiSquareReport {
        statistic,
        dof,
        p_value: chi_square_p_value(statistic, dof)?,
        categories: pooled.len(),
    })
}

/// Chi-square test that two count vectors over the same categories share one law.
///
/// Categories are pooled left to right until both rows expect at least 5.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> Result<ChiSquareReport> {
    if a.len() != b.len() || a.is_empty() {
        return Err(GmsError::domain("count vectors must align"));
    }
    let na = a.iter().sum::<u64>() as f64;
    let nb = b.iter().sum::<u64>() as f64;
    let total = na + nb;
    let (share_a, share_b) = (na / total, nb / total);
    let min_share = share_a.min(share_b);

    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut ca, mut cb) = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        ca += x as f64;
        cb += y as f64;
        if (ca + cb) * min_share >= MIN_EXPECTED {
            pooled.push((ca, cb));
            ca = 0.0;
            cb = 0.0;
        }
    }
    if ca + cb > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += ca;
                last.1 += cb;
            }
            None => pooled.push((ca, cb)),
        }
    }
    if pooled.len() < 2 {
        return Err(GmsError::domain("too few categories after pooling"));
    }
    let statistic = pooled
        .iter()
        .map(|&(x, y)| {
            let col = x + y;
            let (ea, eb) = (col * share_a, col * share_b);
            (x - ea).powi(2) / ea + (y - eb).powi(2) / eb
        })
        .sum::<f64>();
    let dof = pooled.len() - 1;
    Ok(ChiSquareReport {
        statistic,
        dof,
        p_value: chi_square_p_value(statistic, dof)?,
        categories: pooled.len(),
    })
}

/// Aligns two integer samples onto their joint sorted support.
pub fn paired_counts(a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
    let mut table: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    for &x in a {
        table.entry(x).or_default().0 += 1;
    }
    for &y in b {
        table.entry(y).or_default().1 += 1;
    }
    let support = table.keys().copied().collect();
    let (ca, cb) = table.values().copied().unzip();
    (support, ca, cb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dist(v: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn ecdf_examples() {
        let d = dist(&[0.9, 0.2, 0.4]);
        assert!((d.ecdf(0.5) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.ecdf(0.1), 0.0);
        assert_eq!(d.ecdf(0.9), 1.0);
        assert_eq!(d.ecdf(3.0), 1.0);
        // right-continuous at sample points
        assert!((d.ecdf(0.2) - 1.0 / 3.0).abs() < 1e-15);
        assert!(EmpiricalDistribution::new(vec![]).is_err());
        assert!(EmpiricalDistribution::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn ks_one_sample_examples() {
        let uniform = |x: f64| x.clamp(0.0, 1.0);
        let r = ks_one_sample(&dist(&[0.5]), uniform, 0.05);
        assert!((r.statistic - 0.5).abs() < 1e-15);
        let r = ks_one_sample(&dist(&[0.9, 0.9, 0.9]), uniform, 0.05);
        assert!((r.statistic - 0.9).abs() < 1e-15);
    }

    #[test]
    fn ks_one_sample_on_true_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
        let r = ks_one_sample(&dist(&xs), |x| x, 0.001);
        assert!(r.statistic < 1.358 / (1e5f64).sqrt());
        assert!(r.passed);
    }

    #[test]
    fn ks_two_sample_examples() {
        let a = dist(&[0.1, 0.5, 0.7]);
        assert_eq!(ks_two_sample(&a, &a, 0.01).statistic, 0.0);
        let r = ks_two_sample(&dist(&[0.1]), &dist(&[0.9]), 0.01);
        assert_eq!(r.statistic, 1.0);
        assert!((r.n - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_two_sample_same_law_passes() {
        let mut r1 = ChaCha8Rng::seed_from_u64(1);
        let mut r2 = ChaCha8Rng::seed_from_u64(2);
        let a: Vec<f64> = (0..100_000).map(|_| r1.random::<f64>().sqrt()).collect();
        let b: Vec<f64> = (0..100_000).map(|_| r2.random::<f64>().sqrt()).collect();
        assert!(ks_two_sample(&dist(&a), &dist(&b), 0.001).passed);
    }

    #[test]
    fn kolmogorov_survival_values() {
        // Standard critical values of the Kolmogorov distribution.
        assert!((kolmogorov_survival(1.358_1) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_survival(1.627_6) - 0.01).abs() < 1e-4);
        assert!((kolmogorov_survival(1.949_6) - 0.001).abs() < 1e-4);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
        assert!(kolmogorov_survival(0.05) > 0.999_999);
        // The two series agree where they meet.
        let below = kolmogorov_survival(1.18 - 1e-12);
        let above = kolmogorov_survival(1.18);
        assert!((below - above).abs() < 1e-12);
    }

    #[test]
    fn histogram_examples() {
        let h = histogram(&dist(&[0.1, 0.5, 0.9]), 2, 0.0, 1.0).unwrap();
        assert_eq!(h.counts, vec![1, 2]);
        let h = histogram(&dist(&[-0.5, 0.1, 1.0, 1.5, 2.0]), 4, 0.0, 1.0).unwrap();
        assert_eq!(h.counts, vec![1, 0, 0, 1]);
        assert_eq!((h.below, h.above), (1, 2));
        assert_eq!(h.bin_edges(3), (0.75, 1.0));
        assert!(histogram(&dist(&[0.1]), 0, 0.0, 1.0).is_err());
        assert!(histogram(&dist(&[0.1]), 3, 1.0, 1.0).is_err());
    }

    #[test]
    fn chi_square_detects_mismatch() {
        let probs = [0.5, 0.3, 0.2];
        let good = chi_square_gof(&[5020, 2990, 1990], &probs).unwrap();
        assert!(good.p_value > 0.1);
        let bad = chi_square_gof(&[6000, 2500, 1500], &probs).unwrap();
        assert!(bad.p_value < 1e-10);
        let same = chi_square_homogeneity(&[500, 300, 200], &[1000, 600, 400]).unwrap();
        assert!(same.statistic.abs() < 1e-12);
        assert!((same.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pooling_merges_sparse_tail() {
        let r = chi_square_gof(&[50, 30, 15, 3, 1, 1], &[0.5, 0.3, 0.15, 0.03, 0.01, 0.01]).unwrap();
        assert_eq!(r.categories, 4);
    }

    #[test]
    fn paired_counts_align() {
        let (s, a, b) = paired_counts(&[2, 2, 4], &[4, 6]);
        assert_eq!(s, vec![2, 4, 6]);
        assert_eq!(a, vec![2, 1, 0]);
        assert_eq!(b, vec![0, 1, 1]);
    }

    proptest! {
        #[test]
        fn ecdf_is_a_cdf(xs in prop::collection::vec(-10.0f64..10.0, 1..200), t in -12.0f64..12.0, dt in 0.0f64..3.0) {
            let d = EmpiricalDistribution::new(xs).unwrap();
            prop_assert!(d.ecdf(t) <= d.ecdf(t + dt));
            prop_assert_eq!(d.ecdf(d.sorted_samples()[0] - 1e-9), 0.0);
            prop_assert_eq!(d.ecdf(*d.sorted_samples().last().unwrap()), 1.0);
        }

        #[test]
        fn ks_invariant_under_increasing_relabel(xs in prop::collection::vec(0.0f64..1.0, 1..200)) {
            // x ↦ x³ applied to samples and to the CDF argument.
            let plain = ks_one_sample(&EmpiricalDistribution::new(xs.clone()).unwrap(), |x| x, 0.05);
            let cubed: Vec<f64> = xs.iter().map(|x| x.powi(3)).collect();
            let relabeled = ks_one_sample(&EmpiricalDistribution::new(cubed).unwrap(), |y| y.cbrt(), 0.05);
            prop_assert!((plain.statistic - relabeled.statistic).abs() < 1e-12);
        }

        #[test]
        fn histogram_counts_sum_to_in_range(xs in prop::collection::vec(-0.5f64..1.5, 1..300), bins in 1usize..40) {
            let d = EmpiricalDistribution::new(xs.clone()).unwrap();
            let h = histogram(&d, bins, 0.0, 1.0).unwrap();
            let in_range = xs.iter().filter(|x| (0.0..=1.0).contains(*x)).count() as u64;
            prop_assert_eq!(h.in_range(), in_range);
            prop_assert_eq!(h.in_range() + h.below + h.above, xs.len() as u64);
        }
    }
}
