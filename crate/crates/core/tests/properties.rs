use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use proptest::prelude::*;
use sumprod_core::config::{emit_config, parse_config};
use sumprod_core::distributions::ConvenientDensity;
use sumprod_core::experiments::{read_trial_csv, run_experiment_with_workers, write_trial_csv, ExperimentConfig, Stat};
use sumprod_core::polynomials::{Circuit, DensePoly, ProductTerm, SparsePoly, Support};
use sumprod_core::realroots::{
    descartes_positive_bound, sturm_count, sturm_count_regions, subdivision_count_regions, Endpoint, Interval,
    DEFAULT_SUBDIVISION_TOL,
};

fn support() -> impl Strategy<Value = Support> {
    prop::collection::btree_set(1u32..=8, 0..=3).prop_map(|s: BTreeSet<u32>| {
        let mut e = vec![0];
        e.extend(s);
        Support::new(e).unwrap()
    })
}

fn circuit() -> impl Strategy<Value = Circuit> {
    prop::collection::vec((prop::collection::vec(support(), 1..=3), 0u32..=5), 1..=3)
        .prop_map(|terms| Circuit::new(terms.into_iter().map(|(f, d)| ProductTerm::new(f, d)).collect()).unwrap())
}

/// A circuit with coefficients bounded away from 0.
fn instance() -> impl Strategy<Value = (Circuit, Vec<f64>)> {
    circuit().prop_flat_map(|c| {
        let n = c.num_coeffs();
        let coeff = (0.1f64..3.0, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
        (Just(c), prop::collection::vec(coeff, n))
    })
}

fn positive_axis() -> Interval {
    Interval::new(Endpoint::Open(0.0), Endpoint::PosInf).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eval_matches_expansion((c, u) in instance(), x in -1.5f64..1.5) {
        let p = c.expand(&u, 4096).unwrap();
        let dense: Vec<f64> = p.coeffs().iter().map(|r| r.to_f64().unwrap()).collect();
        let (v, d) = c.eval(&u, x);
        let scale: f64 = dense.iter().enumerate().map(|(i, a)| a.abs() * x.abs().powi(i as i32)).sum::<f64>() + 1.0;
        prop_assert!((v - p.eval_f64(x)).abs() <= 1e-10 * scale);
        let dp: f64 = dense.iter().enumerate().skip(1).map(|(i, a)| i as f64 * a * x.powi(i as i32 - 1)).sum();
        prop_assert!((d - dp).abs() <= 1e-9 * scale * (1.0 + dense.len() as f64));
    }

    #[test]
    fn reciprocal_swaps_unit_and_tail((c, u) in instance()) {
        let r = c.reciprocal_transform();
        let v = r.map_coeffs(&u);
        let f = c.expand(&u, 4096).unwrap();
        let g = r.circuit.expand(&v, 4096).unwrap();
        let fc = sturm_count_regions(&f).unwrap();
        // x -> 1/x maps (0, 1] onto [1, inf) and (1, inf) onto (0, 1)
        let g_unit_open = sturm_count(&g, &Interval::open(0.0, 1.0).unwrap()).unwrap().count;
        let g_tail_closed = sturm_count(&g, &Interval::new(Endpoint::Closed(1.0), Endpoint::PosInf).unwrap()).unwrap().count;
        prop_assert_eq!(fc.unit_pos, g_tail_closed);
        prop_assert_eq!(fc.tail_pos, g_unit_open);
    }

    #[test]
    fn region_counts_are_additive((c, u) in instance()) {
        let p = c.expand(&u, 4096).unwrap();
        let rc = sturm_count_regions(&p).unwrap();
        let all = sturm_count(&p, &Interval::real_line()).unwrap().count;
        let sum = rc.unit_pos + rc.tail_pos + rc.unit_neg + rc.tail_neg + rc.zero_at_origin as usize;
        prop_assert_eq!(all, sum);
        prop_assert_eq!(rc.total, all);
        let half = sturm_count(&p, &Interval::open(0.0, 0.5).unwrap()).unwrap().count
            + sturm_count(&p, &Interval::closed(0.5, 1.0).unwrap()).unwrap().count;
        prop_assert_eq!(half, rc.unit_pos);
    }

    #[test]
    fn subdivision_agrees_with_sturm((c, u) in instance()) {
        let exact = sturm_count_regions(&c.expand(&u, 4096).unwrap()).unwrap();
        let (sub, certified) = subdivision_count_regions(&c, &u, DEFAULT_SUBDIVISION_TOL).unwrap();
        prop_assert!(certified);
        prop_assert_eq!(exact, sub);
    }

    #[test]
    fn sparse_factors_respect_descartes(s in support(), seed in prop::collection::vec(-3.0f64..3.0, 4)) {
        let coeffs: Vec<f64> = seed.iter().take(s.len()).map(|v| if v.abs() < 0.05 { 1.0 } else { *v }).collect();
        let sparse = SparsePoly::new(s.clone(), coeffs.clone()).unwrap();
        let mut dense = vec![0.0; s.max_exponent() as usize + 1];
        for (&e, &v) in s.exponents().iter().zip(&coeffs) {
            dense[e as usize] = v;
        }
        let n = sturm_count(&DensePoly::from_f64(&dense), &positive_axis()).unwrap().count;
        let bound = descartes_positive_bound(&sparse);
        prop_assert!(n <= bound);
        prop_assert!(bound < s.len());
        prop_assert_eq!((n + bound) % 2, 0);
    }

    #[test]
    fn ucl_dominates_mean(values in prop::collection::vec(0u32..20, 1..200)) {
        let s = Stat::from_values(values.iter().map(|&v| v as f64));
        prop_assert!(s.mean >= 0.0);
        prop_assert!(s.ucl >= s.mean);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn config_round_trip(c in circuit(), seed in any::<u64>(), trials in 1usize..100_000, kind in 0usize..3) {
        let mut cfg = ExperimentConfig::new(c, sumprod_core::distributions::registry_densities()[kind]);
        cfg.master_seed = seed;
        cfg.trials = trials;
        let back = parse_config(&emit_config(&cfg)).unwrap();
        prop_assert_eq!(back.config, cfg);
    }

    #[test]
    fn trial_csv_round_trip(c in circuit(), seed in any::<u64>()) {
        let mut cfg = ExperimentConfig::new(c, ConvenientDensity::laplace());
        cfg.trials = 25;
        cfg.master_seed = seed;
        let (records, _) = run_experiment_with_workers(&cfg, 2).unwrap();
        let mut buf = Vec::new();
        write_trial_csv(&records, &mut buf).unwrap();
        prop_assert_eq!(read_trial_csv(&buf[..]).unwrap(), records);
    }
}
