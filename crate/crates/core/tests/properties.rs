use haus_core::hausdorff::{multiplier_eval, partial_hausdorff_spectral};
use haus_core::io::{read_signal_csv, write_signal_csv};
use haus_core::signal::{lp_norm, make_atom};
use haus_core::verify::dyadic_grid;
use haus_core::{AtomShape, AtomSpec, GridSpec, OperatorConfig, SampledSignal, ScaleSpec, WeightSpec};
use proptest::prelude::*;

fn weight() -> impl Strategy<Value = WeightSpec> {
    prop_oneof![
        (1.1f64..4.0).prop_map(|p| WeightSpec::power_tail(p).unwrap()),
        (0.0f64..0.45).prop_map(|p| WeightSpec::power_bump(p).unwrap()),
        Just(WeightSpec::adjoint_hardy()),
        (0.1f64..3.0).prop_map(|a| WeightSpec::riemann_liouville(a).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplier_is_even_and_bounded(w in weight(), x in -60.0f64..60.0) {
        let cfg = OperatorConfig::new(w, ScaleSpec::Reciprocal, 1.0).unwrap();
        let k = multiplier_eval(&cfg, x).unwrap();
        prop_assert!(k.abs() <= cfg.l1_phi() + 1e-9);
        prop_assert!((k - multiplier_eval(&cfg, -x).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn multiplier_is_one_at_origin(w in weight()) {
        let cfg = OperatorConfig::new(w, ScaleSpec::Reciprocal, 1.0).unwrap();
        prop_assert!((multiplier_eval(&cfg, 0.0).unwrap() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn signal_csv_round_trip_is_bitwise(
        x0 in -100.0f64..100.0,
        mantissa in 1u32..100_000,
        exponent in 1i32..8,
        values in prop::collection::vec(-1e6f64..1e6, 2..64),
    ) {
        let dx: f64 = format!("{mantissa}e-{exponent}").parse().unwrap();
        let f = SampledSignal::new(x0, dx, values).unwrap();
        let mut buf = Vec::new();
        write_signal_csv(&f, &mut buf).unwrap();
        prop_assert_eq!(read_signal_csv(buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn dyadic_grid_is_strictly_decreasing(k in 1u32..30) {
        let g = dyadic_grid(k);
        prop_assert_eq!(g.len(), k as usize + 1);
        prop_assert!(g.windows(2).all(|w| w[1] < w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn partial_sums_are_linear_and_l2_bounded(
        w in weight(),
        eps in 0.01f64..2.0,
        c1 in -3.0f64..3.0,
        h1 in 3.0f64..6.0,
        h2 in 3.0f64..6.0,
        a in -2.0f64..2.0,
    ) {
        let grid = GridSpec::centered(1.0 / 16.0, 1024).unwrap();
        let f = make_atom(&AtomSpec::new(c1, h1, AtomShape::SmoothOddBump).unwrap(), grid).unwrap();
        let g = make_atom(&AtomSpec::new(-c1, h2, AtomShape::DifferenceOfBumps).unwrap(), grid).unwrap();
        let cfg = OperatorConfig::new(w, ScaleSpec::Reciprocal, eps).unwrap();
        let run = |s: &SampledSignal| partial_hausdorff_spectral(&cfg, s).unwrap().signal;
        let lhs = run(&f.scale(a).add(&g).unwrap());
        let rhs = run(&f).scale(a).add(&run(&g)).unwrap();
        let diff = lp_norm(&lhs.sub(&rhs).unwrap(), 2.0).unwrap();
        prop_assert!(diff <= 1e-10 * (1.0 + lp_norm(&rhs, 2.0).unwrap()));
        let out = run(&f);
        prop_assert!(lp_norm(&out, 2.0).unwrap() <= cfg.l1_phi() * lp_norm(&f, 2.0).unwrap() + 1e-8);
    }
}
