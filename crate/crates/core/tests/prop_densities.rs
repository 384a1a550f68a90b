use proptest::prelude::*;
use thinnable::densities::{
    alpha_density_upper, asymptotic_density, erdos_ulam_ratio, polya_upper, weight_sum_with, CheckpointSchedule,
    DensityEstimate, WeightFunction, DEFAULT_S_GRID,
};
use thinnable::subsets::SubsetWindow;

/// Float rounding of the slack bound itself.
const ROUNDING: f64 = 1e-12;

fn bits_window(h: u64, bits: &[bool]) -> SubsetWindow {
    let members = (1..=h).filter(|&n| bits[(n - 1) as usize]).collect();
    SubsetWindow::new(members, h).unwrap()
}

fn window() -> impl Strategy<Value = SubsetWindow> {
    (100u64..3000, 0.0f64..1.0).prop_flat_map(|(h, p)| {
        prop::collection::vec(prop::bool::weighted(p), h as usize).prop_map(move |bits| bits_window(h, &bits))
    })
}

/// Two disjoint windows with the same horizon.
fn disjoint_pair() -> impl Strategy<Value = (SubsetWindow, SubsetWindow)> {
    (100u64..3000).prop_flat_map(|h| {
        prop::collection::vec(0u8..3, h as usize).prop_map(move |labels| {
            let pick = |l: u8| {
                let m = (1..=h).filter(|&n| labels[(n - 1) as usize] == l).collect();
                SubsetWindow::new(m, h).unwrap()
            };
            (pick(1), pick(2))
        })
    })
}

fn weight() -> impl Strategy<Value = WeightFunction> {
    prop_oneof![
        Just(WeightFunction::OneOverN),
        Just(WeightFunction::OneOverNLog),
        Just(WeightFunction::Alternating01),
        (0.1f64..5.0).prop_map(WeightFunction::Const),
    ]
}

fn alpha() -> impl Strategy<Value = f64> {
    prop_oneof![Just(-1.0), Just(0.0), Just(0.5), Just(1.0), Just(2.0), -1.0f64..4.0]
}

fn sched(a: &SubsetWindow) -> CheckpointSchedule {
    CheckpointSchedule::geometric(a.horizon()).unwrap()
}

fn ratio_estimates(a: &SubsetWindow, alpha: f64, f: WeightFunction) -> Vec<DensityEstimate> {
    let s = sched(a);
    vec![
        asymptotic_density(a, &s).unwrap(),
        alpha_density_upper(a, alpha, &s).unwrap(),
        erdos_ulam_ratio(f, a, &s).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bounds_are_ordered_and_in_unit_interval(a in window(), al in alpha(), f in weight()) {
        let mut all = ratio_estimates(&a, al, f);
        all.push(polya_upper(&a, &DEFAULT_S_GRID, &sched(&a)).unwrap());
        for e in all {
            prop_assert!(e.lower <= e.upper, "{:?}", e.kind);
            // Pólya windows carry integer-boundary slack above 1.
            let cap = if e.per_s.is_empty() { 1.0 } else { 1.0 + 1.0 / ((1.0 - 0.99) * sched(&a).tail_first() as f64) + ROUNDING };
            prop_assert!(e.lower >= 0.0 && e.upper <= cap, "{:?} {} {}", e.kind, e.lower, e.upper);
        }
    }

    #[test]
    fn complement_duality_is_exact(a in window(), al in alpha(), f in weight()) {
        let c = a.complement();
        for (e, ec) in ratio_estimates(&a, al, f).iter().zip(ratio_estimates(&c, al, f)) {
            for (p, q) in e.trace.iter().zip(&ec.trace) {
                let (num, den) = p.exact.unwrap();
                if den == 0 {
                    continue;
                }
                prop_assert_eq!(num + q.exact.unwrap().0, den);
                prop_assert_eq!(p.value + q.value, 1.0, "{:?} at n={}", e.kind, p.n);
            }
        }
    }

    #[test]
    fn disjoint_unions_add_exactly((a, b) in disjoint_pair(), al in alpha(), f in weight()) {
        let u = a.union(&b);
        let (ea, eb, eu) = (ratio_estimates(&a, al, f), ratio_estimates(&b, al, f), ratio_estimates(&u, al, f));
        for ((x, y), z) in ea.iter().zip(&eb).zip(&eu) {
            for ((p, q), r) in x.trace.iter().zip(&y.trace).zip(&z.trace) {
                let ((na, da), (nb, db), (nu, du)) = (p.exact.unwrap(), q.exact.unwrap(), r.exact.unwrap());
                prop_assert_eq!(da, du);
                prop_assert_eq!(db, du);
                prop_assert_eq!(na + nb, nu, "{:?} at n={}", x.kind, p.n);
            }
        }
    }

    #[test]
    fn alpha_zero_is_counting(a in window()) {
        let s = sched(&a);
        prop_assert_eq!(alpha_density_upper(&a, 0.0, &s).unwrap().trace, asymptotic_density(&a, &s).unwrap().trace);
    }

    #[test]
    fn polya_levels_respect_slack(a in window()) {
        let s = sched(&a);
        let full = SubsetWindow::naturals(a.horizon());
        let (ea, en) = (polya_upper(&a, &DEFAULT_S_GRID, &s).unwrap(), polya_upper(&full, &DEFAULT_S_GRID, &s).unwrap());
        for (la, ln) in ea.per_s.iter().zip(&en.per_s) {
            for (p, q) in la.trace.iter().zip(&ln.trace) {
                let slack = 1.0 / ((1.0 - la.s) * p.n as f64) + ROUNDING;
                prop_assert!(p.value >= 0.0 && p.value <= 1.0 + slack, "s={} n={} v={}", la.s, p.n, p.value);
                prop_assert!((q.value - 1.0).abs() <= slack, "s={} n={} v={}", la.s, q.n, q.value);
            }
        }
    }

    #[test]
    fn weight_sums_are_monotone(a in window(), f in weight()) {
        let e = weight_sum_with(f, &a, &sched(&a)).unwrap();
        for w in e.trace.windows(2) {
            prop_assert!(w[0].value <= w[1].value);
        }
    }
}
