mod common;

use liftlab_core::combi::{Perm, SubsetMask};
use liftlab_core::permext::{goemans_build, mk_monotone, random_lift_combination, tilde_roundtrip};
use liftlab_core::protocol::{factorization_to_protocol, Dist};
use liftlab_core::sortnet::{
    apply_mask, apply_network, duality_check, generate, is_sorting_network, telescoped_delta_sum, trace, ComparatorSeq,
    Direction, NetworkKind,
};
use liftlab_core::{RatMatrix, Rational};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_seq(max_n: usize, max_q: usize) -> impl Strategy<Value = ComparatorSeq> {
    (2..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((1..n, 1..n), 0..=max_q).prop_map(move |raw| {
            let pairs = raw.into_iter().map(|(a, b)| (a, a + 1 + (b - 1) % (n - a)));
            ComparatorSeq::new(n, pairs).unwrap()
        })
    })
}

fn arb_perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((1..=n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|w| Perm::new(w).unwrap())
}

fn arb_ratio() -> impl Strategy<Value = Rational> {
    (0i64..12, 1i64..7).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = RatMatrix> {
    prop::collection::vec(prop::collection::vec(arb_ratio(), cols), rows)
        .prop_map(|g| RatMatrix::from_grid(g).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn network_output_is_a_rearrangement(seq in arb_seq(7, 20), values in prop::collection::vec(-50i64..50, 7)) {
        let x = &values[..seq.n()];
        for dir in [Direction::Forward, Direction::Reverse] {
            let mut y = apply_network(&seq, x, dir).unwrap();
            let mut sorted = x.to_vec();
            y.sort();
            sorted.sort();
            prop_assert_eq!(y, sorted);
        }
    }

    #[test]
    fn zero_one_principle(seq in arb_seq(5, 14)) {
        prop_assert_eq!(is_sorting_network(&seq, Direction::Forward), common::sorts_every_permutation(&seq));
    }

    #[test]
    fn forward_and_reverse_are_dual(seq in arb_seq(6, 16)) {
        prop_assert!(duality_check(&seq).unwrap().holds());
    }

    #[test]
    fn reverse_trace_ends_at_the_mask_image(seq in arb_seq(6, 16), bits in 0u32..64) {
        let n = seq.n();
        let set = SubsetMask::new(n, bits & ((1 << n) - 1)).unwrap();
        let t = trace(&seq, set).unwrap();
        prop_assert_eq!(t.sets.last().unwrap().bits(), apply_mask(&seq, set.bits(), Direction::Reverse));
        prop_assert!(t.sets.iter().all(|s| s.len() == set.len()));
    }

    #[test]
    fn telescoping_on_batcher(sigma in arb_perm(7), bits in 0u32..128) {
        let seq = generate(NetworkKind::Batcher, 7).unwrap();
        let set = SubsetMask::new(7, bits).unwrap();
        let got = telescoped_delta_sum(&seq, &sigma, set).unwrap();
        prop_assert_eq!(got, Rational::from(common::perm_slack(&set.to_vec(), sigma.word())));
    }

    #[test]
    fn goemans_combinations_stay_feasible(seed in any::<u64>(), n in 3usize..=5, terms in 1usize..5) {
        let sys = goemans_build(&generate(NetworkKind::OddEvenTransposition, n).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_lift_combination(&sys, &mut rng, terms).unwrap();
        prop_assert!(sys.is_feasible(&w).unwrap());
        prop_assert!(tilde_roundtrip(&sys, &w).unwrap());
        prop_assert!(mk_monotone(&sys, &w).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn factorization_protocol_round_trip(
        (a, b) in (1usize..5, 1usize..4, 1usize..5).prop_flat_map(|(m, r, k)| (arb_matrix(m, r), arb_matrix(r, k)))
    ) {
        let p = factorization_to_protocol(&a, &b).unwrap();
        let prod = common::naive_product(&a, &b);
        for (x, row) in prod.iter().enumerate() {
            for (y, want) in row.iter().enumerate() {
                prop_assert_eq!(&p.exact_expectation(x, y).unwrap(), want);
                prop_assert_eq!(&common::path_sum_expectation(&p, x, y), want);
            }
        }
        let f = p.compile_factorization().unwrap();
        prop_assert!(f.size() <= a.ncols());
        let back = common::naive_product(&f.a, &f.b);
        prop_assert_eq!(back, prod);
    }

    #[test]
    fn total_expectation_over_first_message(
        (a, b) in (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(m, r, k)| (arb_matrix(m, r), arb_matrix(r, k)))
    ) {
        let p = factorization_to_protocol(&a, &b).unwrap();
        for x in 0..a.nrows() {
            for y in 0..b.ncols() {
                let init: &Dist = p.init(x);
                let mut total = Rational::zero();
                for (&u, pr) in init {
                    let c = p.conditional_expectation(x, y, &[u]).unwrap().expect("positive mass");
                    total += &(pr * &c);
                }
                prop_assert_eq!(total, p.exact_expectation(x, y).unwrap());
            }
        }
    }
}
