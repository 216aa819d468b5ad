//! Property tests for the exact laws and the samplers.

use gms_core::excursion::{sample_shortcut_batch, tau_pmf};
use gms_core::gms_sim::{excursion_rng, simulate_excursion, Population};
use gms_core::{cdf, mean, pdf, ModelParams, SeriesControl};
use proptest::prelude::*;

fn p_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![0.01f64..0.5, Just(0.5)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_is_a_distribution_function(p in p_strategy(), m in 1u32..60, t in 0.0f64..1.0, s in 0.0f64..1.0) {
        let ctrl = SeriesControl::default();
        let params = ModelParams::new(p, m).unwrap();
        let (lo, hi) = if t <= s { (t, s) } else { (s, t) };
        let a = cdf(&params, lo, &ctrl).unwrap();
        let b = cdf(&params, hi, &ctrl).unwrap();
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        prop_assert!(a <= b + 1e-15);
        prop_assert_eq!(cdf(&params, 0.0, &ctrl).unwrap(), 0.0);
        prop_assert!((cdf(&params, 1.0, &ctrl).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn larger_batches_produce_stronger_winners(p in p_strategy(), m in 1u32..40, t in 0.0f64..1.0) {
        let ctrl = SeriesControl::default();
        let small = cdf(&ModelParams::new(p, m).unwrap(), t, &ctrl).unwrap();
        let large = cdf(&ModelParams::new(p, m + 1).unwrap(), t, &ctrl).unwrap();
        prop_assert!(large <= small + 1e-14, "{large} > {small}");
    }

    #[test]
    fn mean_lies_in_unit_interval_and_grows_with_batch(p in p_strategy(), m in 1u32..40) {
        let ctrl = SeriesControl::default();
        let a = mean(&ModelParams::new(p, m).unwrap(), &ctrl).unwrap();
        let b = mean(&ModelParams::new(p, m + 1).unwrap(), &ctrl).unwrap();
        prop_assert!(0.0 < a && a < 1.0);
        prop_assert!(a <= b + 1e-14);
    }

    #[test]
    fn density_is_nonnegative(p in 0.01f64..0.5, m in 1u32..30, t in 0.0f64..1.0) {
        let ctrl = SeriesControl::default();
        prop_assert!(pdf(&ModelParams::new(p, m).unwrap(), t, &ctrl).unwrap() >= 0.0);
    }

    #[test]
    fn pmf_vanishes_off_parity(p in p_strategy(), m in 1u32..20, j in 0u64..200) {
        let params = ModelParams::new(p, m).unwrap();
        let k = m as u64 + 2 * j + 1;
        prop_assert_eq!(tau_pmf(&params, k).unwrap(), 0.0);
        let v = tau_pmf(&params, k - 1).unwrap();
        prop_assert!(v > 0.0 && v <= 1.0);
    }

    #[test]
    fn shortcut_records_are_consistent(p in p_strategy(), m in 1u32..20, seed in any::<u64>()) {
        let params = ModelParams::new(p, m).unwrap();
        for r in sample_shortcut_batch(&params, 50, seed).unwrap() {
            prop_assert!(r.is_consistent(m));
            prop_assert!(r.length > m as u64 && (r.length - 1 - m as u64).is_multiple_of(2));
            prop_assert!(r.strongest_fitness > 0.0 && r.strongest_fitness < 1.0);
        }
    }

    #[test]
    fn simulated_excursions_balance(p in p_strategy(), m in 1u32..12, seed in any::<u64>(), ff in prop::option::of(8usize..512)) {
        let params = ModelParams::new(p, m).unwrap();
        let mut pop = Population::new();
        for j in 0..20 {
            let trace = simulate_excursion(&params, ff, &mut pop, &mut excursion_rng(seed, j)).unwrap();
            prop_assert!(trace.record.is_consistent(m));
            prop_assert!(pop.is_empty());
            if !trace.fast_forwarded {
                prop_assert_eq!(trace.record.strongest_fitness, trace.max_born);
            }
        }
    }
}
