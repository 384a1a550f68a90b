use proptest::prelude::*;
use thinnable::densities::CheckpointSchedule;
use thinnable::rng::derive_seed;
use thinnable::sampler::{
    complement_selector, frequency_envelope, index_trace, restrict, sample_selector, SubsequenceSelector,
};
use thinnable::sequences::RealSequence;
use thinnable::subsets::SubsetWindow;

const SEQUENCES: [&str; 7] = [
    "alternating",
    "identity",
    "rational-enum",
    "const0",
    "periodic:[0,1,2]",
    "const:(1,-2)",
    "spike:squares:2:alternating",
];

fn sequence() -> impl Strategy<Value = RealSequence> {
    prop::sample::select(&SEQUENCES[..]).prop_map(|s| s.parse().unwrap())
}

fn selector() -> impl Strategy<Value = SubsequenceSelector> {
    prop_oneof![
        any::<u64>().prop_map(sample_selector),
        prop::collection::vec(any::<bool>(), 1..12)
            .prop_filter("needs a selected index", |p| p.contains(&true))
            .prop_map(SubsequenceSelector::periodic),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn selector_and_complement_partition(s in selector(), h in 1u64..5000) {
        let a = s.selected_up_to(h).unwrap();
        let b = complement_selector(&s).selected_up_to(h).unwrap();
        prop_assert!(a.intersection(&b).is_empty());
        prop_assert_eq!(a.union(&b), SubsetWindow::naturals(h));
    }

    #[test]
    fn scan_agrees_with_bits(s in selector(), h in 1u64..3000) {
        let w = s.selected_up_to(h).unwrap();
        for (i, b) in s.bits().take(h as usize).enumerate() {
            prop_assert_eq!(w.contains(i as u64 + 1), b);
            prop_assert_eq!(s.bit(i as u64 + 1), Some(b));
        }
    }

    #[test]
    fn restricting_to_all_ones_is_identity(x in sequence(), n in 1u64..100_000) {
        let r = restrict(&x, &SubsequenceSelector::all_ones(), n).unwrap();
        prop_assert_eq!(r.evaluate(n).unwrap(), x.evaluate(n).unwrap());
    }

    #[test]
    fn restriction_reads_selected_terms(x in sequence(), s in selector(), k in 1u64..400) {
        let r = restrict(&x, &s, k).unwrap();
        let selected = s.selected_up_to(64 * k).unwrap();
        prop_assume!(selected.len() as u64 >= k);
        let n_k = selected.nth(k).unwrap();
        prop_assert_eq!(r.evaluate(k).unwrap(), x.evaluate(n_k).unwrap());
    }

    #[test]
    fn random_frequency_stays_in_envelope(seed in any::<u64>(), h in 1000u64..1 << 18) {
        let s = sample_selector(seed);
        let sched = CheckpointSchedule::geometric(h).unwrap();
        let trace = s.frequency_trace(&sched).unwrap();
        for p in trace.trace.iter().filter(|p| p.n >= 100) {
            prop_assert!((p.value - 0.5).abs() <= frequency_envelope(p.n), "n = {}: {}", p.n, p.value);
        }
    }

    #[test]
    fn index_trace_of_naturals_is_frequency(s in selector(), h in 64u64..20_000) {
        let sched = CheckpointSchedule::geometric(h).unwrap();
        let via_index = index_trace(&s, &SubsetWindow::naturals(h), &sched).unwrap();
        prop_assert_eq!(via_index, s.frequency_trace(&sched).unwrap());
    }

    #[test]
    fn grammar_round_trips(s in selector(), flip in any::<bool>()) {
        let s = if flip { complement_selector(&s) } else { s };
        prop_assert_eq!(s.to_string().parse::<SubsequenceSelector>().unwrap(), s);
    }
}

#[test]
fn default_trial_seeds_stay_in_envelope() {
    let sched = CheckpointSchedule::geometric(1 << 22).unwrap();
    // The per-trial seeds of the default master seed.
    for seed in (0..8).map(|t| derive_seed(0, t)) {
        let s = sample_selector(seed);
        let trace = s.frequency_trace(&sched).unwrap();
        for p in trace.trace.iter().filter(|p| p.n >= 100) {
            assert!((p.value - 0.5).abs() <= frequency_envelope(p.n), "seed {seed}, n = {}: {}", p.n, p.value);
        }
        let mut ones = 0u64;
        for (i, b) in s.bits().take(1 << 16).enumerate() {
            ones += u64::from(b);
            let n = i as u64 + 1;
            if n >= 100 {
                assert!((ones as f64 / n as f64 - 0.5).abs() <= frequency_envelope(n), "seed {seed}, n = {n}");
            }
        }
    }
}
