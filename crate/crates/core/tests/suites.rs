use std::collections::BTreeSet;

use chabauty_core::chabauty::*;
use chabauty_core::{eig_isomorphic, Engine, Error, GroupSpec};

fn preset(name: &str) -> GroupSpec {
    GroupSpec::preset(name).unwrap()
}

fn closure(spec: &GroupSpec, k: u32) -> GroupSpec {
    GroupSpec::KClosure { inner: Box::new(spec.clone()), k }
}

fn plus(spec: &GroupSpec, k: u32) -> GroupSpec {
    GroupSpec::PlusK { inner: Box::new(spec.clone()), k }
}

#[test]
fn agreement_radii() {
    let e = Engine::new();
    let sym = preset("t3-sym");
    let alt = preset("t3-alt");
    let same = agreement_radius(&e, &sym, &sym, 0, 3, 1).unwrap();
    assert_eq!(same.r_star, 3);
    assert_eq!(agreement_radius(&e, &alt, &sym, 0, 3, 1).unwrap().r_star, 0);
    let c = agreement_radius(&e, &sym, &closure(&sym, 1), 0, 3, 0).unwrap();
    assert_eq!(c.r_star, 3);
    assert!(c.flags.iter().all(|f| f.1));
    let other = preset("valency1");
    assert!(agreement_radius(&e, &sym, &other, 0, 2, 0).is_err());
}

#[test]
fn quotients_match_fixtures() {
    let e = Engine::new();
    let t3 = t3_fixture();
    for spec in [preset("t3-sym"), preset("t3-alt"), closure(&preset("t3-sym"), 1)] {
        assert!(eig_isomorphic(&quotient_graph(&e, &spec, 4).unwrap(), &t3).unwrap(), "{spec}");
    }
    let q = quotient_graph(&e, &preset("t3-intransitive"), 4).unwrap();
    assert!(eig_isomorphic(&q, &intransitive_fixture()).unwrap());
    let q = quotient_graph(&e, &preset("valency1"), 3).unwrap();
    assert!(eig_isomorphic(&q, &valency_one_fixture()).unwrap());
}

#[test]
fn trivial_local_groups_split_every_edge() {
    let e = Engine::new();
    let q = quotient_graph(&e, &preset("t3-trivial"), 4).unwrap();
    assert_eq!(q.vertex_count(), 2);
    assert_eq!(q.darts().len(), 6);
    assert!(q.darts().iter().all(|d| d.index == 1));
}

#[test]
fn orbit_detection_needs_margin() {
    let e = Engine::new();
    match orbits_near_root(&e, &preset("t3-sym"), 4, 0) {
        Err(Error::Domain(msg)) => assert!(msg.contains("not locally detectable")),
        other => panic!("unexpected {other:?}"),
    }
    assert!(quotient_graph(&e, &preset("t3-sym"), 1).is_err());
    assert!(matches!(quotient_graph(&e, &plus(&preset("t3-sym"), 1), 4), Err(Error::Unsupported(_))));
}

#[test]
fn certificates() {
    let e = Engine::new();
    let sym = preset("t3-sym");
    let cert = sh_certificate(&e, &sym, 4).unwrap();
    assert_eq!(cert.vertex_reps.len(), 2);
    assert_eq!(cert.edge_reps.len(), 1);
    assert!(eig_isomorphic(&cert.quotient, &t3_fixture()).unwrap());

    let alt = preset("t3-alt");
    let cmp = compare_certificates(&e, &alt, &closure(&alt, 1), 4).unwrap();
    assert!(cmp.profiles_equal && cmp.certificates_equal && cmp.holds());
    assert!(matches!(compare_certificates(&e, &sym, &closure(&sym, 1), 4), Err(Error::Capacity(_))));
    let cmp = compare_certificates(&e, &sym, &preset("t3-alt"), 4).unwrap();
    assert!(!cmp.profiles_equal);
    assert!(cmp.holds());
}

#[test]
fn prime_contents() {
    let e = Engine::new();
    let sym = preset("t3-sym");
    let alt = preset("t3-alt");
    let expect: [BTreeSet<u64>; 4] = [[2, 3].into(), [2].into(), [2].into(), [2].into()];
    for (n, want) in expect.iter().enumerate() {
        let got = prime_content(&e, &sym, 0, n as u32).unwrap();
        assert_eq!(&got, want);
        assert!(prime_content(&e, &alt, 0, n as u32).unwrap().is_subset(&got));
    }
}

#[test]
fn pro_pi_transfer() {
    let e = Engine::new();
    let sym = preset("t3-sym");
    let two: BTreeSet<u64> = [2].into();
    let rep = verify_pro_pi_transfer(&e, &sym, &two, 1, 2, 2).unwrap();
    assert!(rep.hypothesis_holds);
    assert_eq!(rep.conclusion_holds(), Some(true));
    assert!(!rep.violated());
    let rep = verify_pro_pi_transfer(&e, &sym, &two, 0, 2, 1).unwrap();
    assert!(!rep.hypothesis_holds);
    assert_eq!(rep.conclusion_holds(), None);
    assert!(matches!(verify_pro_pi_transfer(&e, &sym, &two, 2, 2, 2), Err(Error::Domain(_))));
}

#[test]
fn torsion() {
    let e = Engine::new();
    match torsion_claim_check(&e, &preset("t3-sym"), 0, 2, 1, 2).unwrap() {
        TorsionOutcome::Counterexample { order, .. } => assert_eq!(order, 2),
        other => panic!("expected a counterexample, got {other:?}"),
    }
    assert!(matches!(
        torsion_claim_check(&e, &preset("t3-alt"), 0, 2, 1, 2).unwrap(),
        TorsionOutcome::Holds { .. }
    ));
    assert!(matches!(torsion_claim_check(&e, &preset("t3-sym"), 0, 2, 2, 2), Err(Error::Domain(_))));
}

#[test]
fn local_transitivity() {
    assert!(local_two_transitivity(&preset("t3-sym")).unwrap().all_two_transitive);
    assert!(!local_two_transitivity(&preset("t3-alt")).unwrap().all_two_transitive);
    assert!(!local_two_transitivity(&preset("t3-intransitive")).unwrap().all_two_transitive);
    let sym = preset("t3-sym");
    assert!(matches!(local_two_transitivity(&closure(&sym, 1)), Err(Error::Unsupported(_))));
}

#[test]
fn discreteness() {
    let e = Engine::new();
    let alt = discreteness_check(&e, &preset("t3-alt"), 0, 3).unwrap();
    assert_eq!(alt.sizes, [3, 3, 3]);
    assert!(alt.discrete);
    assert_eq!(alt.equal_from(), Some(1));
    let tri = discreteness_check(&e, &preset("t3-trivial"), 0, 3).unwrap();
    assert_eq!(tri.sizes, [1, 1, 1]);
    assert!(tri.discrete);
    let sym = discreteness_check(&e, &preset("t3-sym"), 0, 3).unwrap();
    assert!(!sym.discrete);
    assert!(discreteness_check(&e, &preset("t3-sym"), 0, 1).is_err());
}

#[test]
fn closure_descent() {
    let e = Engine::new();
    let rep = closure_descent_suite(&e, &preset("t3-sym"), 0, 3, 2).unwrap();
    assert_eq!(rep.own_size, 3072);
    assert!(rep.chain_holds && rep.contains_spec);
    assert_eq!(rep.closed_at, Some(1));

    let alt_plus = plus(&preset("t3-alt"), 1);
    let rep = closure_descent_suite(&e, &alt_plus, 0, 2, 2).unwrap();
    assert_eq!(rep.own_size, 1);
    assert!(rep.chain_holds && rep.contains_spec);

    let sym_plus = plus(&preset("t3-sym"), 1);
    let rep = closure_descent_suite(&e, &sym_plus, 0, 1, 1).unwrap();
    assert!(rep.chain_holds && rep.contains_spec);
}

#[test]
fn valency_one() {
    let rep = valency_one_report(&Engine::new()).unwrap();
    assert!(rep.passed(), "{}", rep.to_report().to_text());
    assert!(rep.five_cycle.is_some());
    assert_eq!(rep.layer0_order % 5, 0);
}
