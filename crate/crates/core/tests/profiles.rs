use std::sync::Arc;

use chabauty_core::cache::ProfileCache;
use chabauty_core::profile::extension_check_profiles;
use chabauty_core::verify::oracle_profile;
use chabauty_core::{profile_contains, Engine, Error, GroupSpec, Membership, Portrait, Profile};

fn preset(name: &str) -> GroupSpec {
    GroupSpec::preset(name).unwrap()
}

#[test]
fn universal_profiles_match_the_oracle() {
    let e = Engine::new();
    for name in ["t3-sym", "t3-alt", "t3-trivial"] {
        let spec = preset(name);
        for root in 0..2 {
            for r in 1..=2 {
                let tree = e.tree(spec.base(), root, r).unwrap();
                let oracle = oracle_profile(&tree, r, spec.universal().local_groups()).unwrap();
                let got = e.stabilizer_profile(&spec, root, r).unwrap();
                assert_eq!(got.entries(), &oracle[..], "{name} root {root} r {r}");
            }
        }
    }
}

#[test]
fn known_sizes() {
    let e = Engine::new();
    let sizes = |name: &str| -> Vec<usize> {
        (1..=3).map(|r| e.stabilizer_profile(&preset(name), 0, r).unwrap().len()).collect()
    };
    assert_eq!(sizes("t3-sym"), [6, 48, 3072]);
    assert_eq!(sizes("t3-alt"), [3, 3, 3]);
    assert_eq!(sizes("t3-trivial"), [1, 1, 1]);
    let sym = preset("t3-sym");
    assert_eq!(e.moving_profile(&sym, 0, 1, 1).unwrap().len(), 6);
    assert_eq!(e.moving_profile(&sym, 0, 1, 2).unwrap().len(), 42);
}

#[test]
fn intransitive_profile_is_the_restricted_oracle() {
    let e = Engine::new();
    let spec = preset("t3-intransitive");
    for root in 0..2 {
        let tree = e.tree(spec.base(), root, 3).unwrap();
        let oracle = oracle_profile(&tree, 3, spec.universal().local_groups()).unwrap();
        let big = Profile::new(&spec, root, 3, 0, oracle).unwrap();
        let restricted = big.restrict(&tree, 1).unwrap();
        let got = e.stabilizer_profile(&spec, root, 1).unwrap();
        assert!(got.same_set(&restricted).unwrap(), "root {root}");
    }
}

#[test]
fn restriction_is_compatible() {
    let e = Engine::new();
    for name in ["t3-sym", "t3-alt", "t3-intransitive"] {
        let spec = preset(name);
        for root in 0..2 {
            for r in 1..=2 {
                let tree = e.tree(spec.base(), root, r + 1).unwrap();
                let lower = e.stabilizer_profile(&spec, root, r).unwrap();
                let restricted = e.stabilizer_profile(&spec, root, r + 1).unwrap().restrict(&tree, r).unwrap();
                assert!(profile_contains(&lower, &restricted).unwrap());
                let ext = e.extension_check(&spec, root, r).unwrap();
                assert_eq!(ext.holds, lower.same_set(&restricted).unwrap());
            }
        }
    }
}

#[test]
fn levels_multiply() {
    let e = Engine::new();
    for name in ["t3-sym", "t3-alt"] {
        let spec = preset(name);
        for root in 0..2 {
            for n in 1..=2 {
                let lower = e.stabilizer_profile(&spec, root, n).unwrap().len();
                let upper = e.stabilizer_profile(&spec, root, n + 1).unwrap().len();
                let layer = e.layer(&spec, root, n).unwrap().len();
                assert_eq!(upper % lower, 0);
                assert_eq!(upper, lower * layer, "{name} root {root} n {n}");
            }
        }
    }
}

#[test]
fn kclosure_chain() {
    let e = Engine::new();
    for name in ["t3-sym", "t3-alt", "t3-intransitive"] {
        let spec = preset(name);
        let own = e.stabilizer_profile(&spec, 0, 3).unwrap();
        let c1 = e.kclosure_profile(&spec, 1, 0, 3).unwrap();
        let c2 = e.kclosure_profile(&spec, 2, 0, 3).unwrap();
        assert!(profile_contains(&c1, &c2).unwrap());
        assert!(profile_contains(&c2, &own).unwrap());
        assert!(c1.same_set(&own).unwrap(), "{name}: universal groups are 1-closed");
    }
}

#[test]
fn plus_k_sizes() {
    let e = Engine::new();
    assert_eq!(e.plus_k_profile(&preset("t3-sym"), 1, 0, 2).unwrap().len(), 48);
    assert_eq!(e.plus_k_profile(&preset("t3-alt"), 1, 0, 2).unwrap().len(), 1);
    assert!(matches!(e.plus_k_profile(&preset("t3-sym"), 3, 0, 2), Err(Error::Domain(_))));
}

#[test]
fn membership() {
    let e = Engine::new();
    let sym = preset("t3-sym");
    let alt = preset("t3-alt");
    let tree = e.tree(sym.base(), 0, 2).unwrap();
    let id = Portrait::identity(tree.clone(), 2);
    assert_eq!(sym.membership(&id).unwrap(), Membership::Yes);
    assert_eq!(alt.membership(&id).unwrap(), Membership::Yes);

    let all = e.stabilizer_profile(&sym, 0, 2).unwrap().portraits(&tree).unwrap();
    let alt_set = e.stabilizer_profile(&alt, 0, 2).unwrap();
    for g in &all {
        assert_eq!(sym.membership(g).unwrap(), Membership::Yes);
        let expected = if alt_set.contains_encoding(&g.encode()) {
            Membership::Yes
        } else {
            Membership::No
        };
        assert_eq!(alt.membership(g).unwrap(), expected);
    }

    let k3 = GroupSpec::KClosure { inner: Box::new(sym.clone()), k: 3 };
    assert_eq!(k3.membership(&id).unwrap(), Membership::Indeterminate);
    let plus = GroupSpec::PlusK { inner: Box::new(sym.clone()), k: 1 };
    assert_eq!(plus.membership(&id).unwrap(), Membership::Indeterminate);

    let v1 = preset("valency1");
    let other = e.tree(v1.base(), 0, 1).unwrap();
    assert!(sym.membership(&Portrait::identity(other, 1)).is_err());
}

#[test]
fn membership_is_monotone_in_the_local_groups() {
    let e = Engine::new();
    let small = e.stabilizer_profile(&preset("t3-alt"), 1, 2).unwrap();
    let big = e.stabilizer_profile(&preset("t3-sym"), 1, 2).unwrap();
    assert!(small.len() < big.len());
    assert!(small.entries().iter().all(|x| big.contains_encoding(x)));
}

#[test]
fn oversized_profile_is_refused() {
    let e = Engine::new();
    match e.stabilizer_profile(&preset("t3-sym"), 0, 9) {
        Err(Error::Capacity(_)) => {}
        other => panic!("expected a capacity error, got {other:?}"),
    }
}

#[test]
fn bad_root_type_is_a_domain_error() {
    let e = Engine::new();
    assert!(matches!(e.stabilizer_profile(&preset("t3-sym"), 5, 1), Err(Error::Domain(_))));
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = preset("t3-sym");
    let first = Engine::new()
        .with_cache(ProfileCache::new(dir.path()))
        .stabilizer_profile(&spec, 0, 3)
        .unwrap();
    assert!(std::fs::read_dir(dir.path()).unwrap().count() > 0);
    let second = Engine::new()
        .with_cache(ProfileCache::new(dir.path()))
        .stabilizer_profile(&spec, 0, 3)
        .unwrap();
    assert_eq!(first, second);

    for entry in std::fs::read_dir(dir.path()).unwrap() {
        std::fs::write(entry.unwrap().path(), b"garbage").unwrap();
    }
    let third = Engine::new()
        .with_cache(ProfileCache::new(dir.path()))
        .stabilizer_profile(&spec, 0, 3)
        .unwrap();
    assert_eq!(first, third);
}

#[test]
fn extension_check_finds_a_witness() {
    let e = Engine::new();
    let sym = preset("t3-sym");
    let tree = e.tree(sym.base(), 0, 3).unwrap();
    let lower = e.stabilizer_profile(&sym, 0, 2).unwrap();
    let good = e.stabilizer_profile(&sym, 0, 3).unwrap();
    assert!(extension_check_profiles(&lower, &good, &tree).unwrap().holds);

    let alt3 = e.stabilizer_profile(&preset("t3-alt"), 0, 3).unwrap();
    let corrupted = Profile::new(&sym, 0, 3, 0, alt3.entries().to_vec()).unwrap();
    let report = extension_check_profiles(&lower, &corrupted, &tree).unwrap();
    assert!(!report.holds);
    assert_eq!(report.checked, 48);
    assert_eq!(report.witnesses.len(), 45);
}

#[test]
fn profiles_do_not_depend_on_thread_count() {
    assert!(chabauty_core::verify::thread_determinism_check().unwrap());
}

#[test]
fn engine_shares_trees() {
    let e = Engine::new();
    let base = Arc::new(chabauty_core::spec::t3_base());
    let a = e.tree(&base, 0, 3).unwrap();
    let b = e.tree(&base, 0, 3).unwrap();
    assert!(Arc::ptr_eq(&a, &b));
}
