use proptest::prelude::*;

use irs_isac_core::channels::realize;
use irs_isac_core::costmodel::{cnn_cost, input_gen_cost, Architecture};
use irs_isac_core::estimator::{estimate_chain, simulate_all, LsEstimator};
use irs_isac_core::features::{
    augment, build_input, build_target, complex_to_real, input_len, postprocess, priors_before, real_to_complex,
    target_len, StageEstimate,
};
use irs_isac_core::lsbase::LsBaseline;
use irs_isac_core::metrics::nmse;
use irs_isac_core::neuralnet::{build_de_cnn, Samples};
use irs_isac_core::protocol::{build_plan, SystemConfig};
use irs_isac_core::rng::substream;
use irs_isac_core::{Complex64, PairType, Stage};

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=6, 1usize..=12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn real_layout_round_trips(values in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 0..40)) {
        let zs: Vec<Complex64> = values.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let real = complex_to_real(zs.iter().copied());
        prop_assert_eq!(real.len(), 2 * zs.len());
        prop_assert_eq!(real_to_complex(&real).unwrap(), zs);
    }

    #[test]
    fn ls_is_exact_without_noise((m, l) in dims(), seed in any::<u64>()) {
        let cfg = SystemConfig::new(m, l);
        let plan = build_plan(&cfg).unwrap();
        let est = LsEstimator::from_plan(&plan).unwrap();
        let mut rng = substream(seed, 0, 0);
        let ch = realize(&cfg, &mut rng);
        let obs = simulate_all(&cfg, &plan, &ch, 300.0, &mut rng).unwrap();
        let e = estimate_chain(&est, &obs).unwrap();
        for (a, t) in [(&e.b, &ch.b), (&e.f, &ch.f), (&e.gu, &ch.gu), (&e.gt, &ch.gt)] {
            prop_assert!(nmse(a, t).unwrap() < 1e-12);
        }
    }

    #[test]
    fn feature_lengths_match_builders((m, l) in dims(), seed in any::<u64>(), snr in -10.0f64..30.0) {
        let cfg = SystemConfig::new(m, l);
        let plan = build_plan(&cfg).unwrap();
        let ls = LsBaseline::new(&plan).unwrap();
        let est = LsEstimator::from_plan(&plan).unwrap();
        let mut rng = substream(seed, 1, 0);
        let ch = realize(&cfg, &mut rng);
        let obs = simulate_all(&cfg, &plan, &ch, snr, &mut rng).unwrap();
        for stage in Stage::ALL {
            let priors = priors_before(stage, &est, &obs).unwrap();
            for pair in [PairType::Raw, PairType::LsBased] {
                let x = build_input(stage, pair, &obs[stage.index() as usize - 1], &priors, &ls).unwrap();
                prop_assert_eq!(x.len(), input_len(stage, pair, &cfg));
                prop_assert!(x.iter().all(|v| v.is_finite()));
            }
            prop_assert_eq!(build_target(stage, &ch).len(), target_len(stage, &cfg));
        }
    }

    #[test]
    fn postprocess_inverts_target_scaling((m, l) in dims(), seed in any::<u64>(), delta in 1.0f64..1e6) {
        let cfg = SystemConfig::new(m, l);
        let ch = realize(&cfg, &mut substream(seed, 2, 0));
        for stage in Stage::ALL {
            let scaled: Vec<f64> = build_target(stage, &ch).iter().map(|v| v * delta).collect();
            let back = match postprocess(stage, &scaled, delta, m, l).unwrap() {
                StageEstimate::Direct { b, f } => b.max_abs_diff(&ch.b).max(f.max_abs_diff(&ch.f)),
                StageEstimate::ReflectedComm(gu) => gu.max_abs_diff(&ch.gu),
                StageEstimate::ReflectedSens(gt) => gt.max_abs_diff(&ch.gt),
            };
            prop_assert!(back <= 1e-12 * ch.gt.frobenius().max(ch.b.frobenius()).max(1e-30));
        }
    }

    #[test]
    fn augmentation_keeps_original_first(seed in any::<u64>(), u in 1usize..6) {
        let cfg = SystemConfig::new(2, 4);
        let mut rng = substream(seed, 3, 0);
        let ch = realize(&cfg, &mut rng);
        let copies = augment(&ch, u, 30.0, &mut rng).unwrap();
        prop_assert_eq!(copies.len(), u);
        prop_assert_eq!(&copies[0], &ch);
        for c in &copies[1..] {
            prop_assert_eq!(&c.a, &ch.a);
            prop_assert_eq!(&c.h, &ch.h);
        }
    }

    #[test]
    fn costs_grow_with_antennas(m in 1usize..10, l in 1usize..20) {
        for stage in Stage::ALL {
            let span = if stage == Stage::One { 1 } else { l };
            let a = input_gen_cost(stage, PairType::LsBased, m, l, span).unwrap();
            let b = input_gen_cost(stage, PairType::LsBased, m + 1, l, span).unwrap();
            prop_assert!(b.adds >= a.adds && b.mults >= a.mults);
            prop_assert!(a.adds >= 0.0 && a.mults >= 0.0);
        }
        let small = cnn_cost(Architecture::Re, 4 * m, 2 * m * l).unwrap();
        let large = cnn_cost(Architecture::Re, 4 * m + 2, 2 * m * l).unwrap();
        prop_assert!(large.total() > small.total());
    }

    #[test]
    fn split_partitions_samples(n in 2usize..60, frac in 0.05f64..0.95, seed in any::<u64>()) {
        let mut s = Samples::new(1, 1);
        for i in 0..n {
            s.push(&[i as f64], &[0.0]).unwrap();
        }
        let (a, b) = s.split(frac, seed).unwrap();
        prop_assert_eq!(a.len() + b.len(), n);
        prop_assert!(!a.is_empty() && !b.is_empty());
        let mut all: Vec<f64> = a.inputs.iter().chain(&b.inputs).copied().collect();
        all.sort_by(f64::total_cmp);
        prop_assert_eq!(all, (0..n).map(|i| i as f64).collect::<Vec<_>>());
    }
}

#[test]
fn forward_is_deterministic_per_seed() {
    let a = build_de_cnn(16, 16, 9).unwrap();
    let b = build_de_cnn(16, 16, 9).unwrap();
    let c = build_de_cnn(16, 16, 10).unwrap();
    let x: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin()).collect();
    assert_eq!(a.forward(&x).unwrap(), b.forward(&x).unwrap());
    assert_ne!(a.forward(&x).unwrap(), c.forward(&x).unwrap());
}
