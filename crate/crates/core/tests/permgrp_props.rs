use chabauty_core::permgrp::{PermGroup, Permutation};
use proptest::prelude::*;

fn arb_group() -> impl Strategy<Value = PermGroup> {
    (1usize..=6).prop_flat_map(|n| {
        prop::collection::vec(Just((0..n as u8).collect::<Vec<u8>>()).prop_shuffle(), 0..=3)
            .prop_map(move |gens| {
                let gens = gens
                    .into_iter()
                    .map(|g| Permutation::from_images(g).unwrap())
                    .collect();
                PermGroup::new(n, gens).unwrap()
            })
    })
}

/// Closure by repeated multiplication, independent of the library's closure.
fn naive_order(g: &PermGroup) -> usize {
    let mut set = vec![Permutation::identity(g.degree())];
    let mut i = 0;
    while i < set.len() {
        for s in g.generators() {
            let p = s.compose(&set[i]);
            if !set.contains(&p) {
                set.push(p);
            }
        }
        i += 1;
    }
    set.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn orbit_stabilizer(g in arb_group()) {
        for p in 1..=g.degree() {
            let stab = g.point_stabilizer(p).unwrap();
            prop_assert_eq!(stab.order().unwrap() * g.orbit(p).len() as u64, g.order().unwrap());
        }
    }

    #[test]
    fn order_matches_naive_closure(g in arb_group()) {
        prop_assert_eq!(g.order().unwrap() as usize, naive_order(&g));
    }

    #[test]
    fn two_transitive_orders_are_divisible(g in arb_group()) {
        let n = g.degree() as u64;
        if g.transitivity_degree().unwrap() == 2 && n >= 2 {
            prop_assert_eq!(g.order().unwrap() % (n * (n - 1)), 0);
        }
    }

    #[test]
    fn alternating_implies_transitive(g in arb_group()) {
        if g.degree() >= 3 && g.contains_alternating().unwrap() {
            let t = g.transitivity_degree().unwrap();
            prop_assert!(t >= 1);
            if g.degree() >= 4 {
                prop_assert_eq!(t, 2);
            }
        }
    }

    #[test]
    fn primes_divide_the_order(g in arb_group()) {
        let order = g.order().unwrap();
        for p in g.primes().unwrap() {
            prop_assert_eq!(order % p, 0);
        }
    }
}

#[test]
fn cycle_notation_round_trip() {
    for text in ["()", "(1 2 3)(4 5)", "(1 5)"] {
        assert_eq!(Permutation::parse(text, 5).unwrap().to_string(), text);
    }
}
