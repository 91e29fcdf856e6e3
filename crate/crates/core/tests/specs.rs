use std::sync::Arc;

use chabauty_core::permgrp::{PermGroup, Permutation};
use chabauty_core::spec::{parse_local_group, t3_base, valency_one_base, PRESETS};
use chabauty_core::{make_universal, Error, GroupSpec};

fn parse(text: &str) -> GroupSpec {
    GroupSpec::parse(text, None).unwrap()
}

#[test]
fn parse_forms() {
    let u = parse("universal a=Sym(3) b=Alt(3)");
    assert_eq!(u.to_string(), "universal a=Sym(3) b=Alt(3)");
    assert!(u.is_universal());

    let k = parse("kclosure k=2 of (universal a=Sym(3) b=Sym(3))");
    assert_eq!(k.to_string(), "kclosure k=2 of (universal a=Sym(3) b=Sym(3))");
    assert_eq!(parse(&k.to_string()).hash().unwrap(), k.hash().unwrap());

    let p = parse("plusk k=1 of preset t3-alt");
    assert!(p.contains_plus_k());
    assert_eq!(p.hash().unwrap(), parse("plusk k=1 of (universal a=Alt(3) b=Alt(3))").hash().unwrap());

    let g = parse("universal a=<(1 2),(1 2 3)>");
    assert_eq!(g.universal().local(0).order().unwrap(), 6);
    assert_eq!(g.to_string(), "universal a=<(1 2),(1 2 3)> b=Full");
}

#[test]
fn parse_errors() {
    for bad in [
        "",
        "universal x=Sym(3)",
        "universal a",
        "kclosure of preset t3-sym",
        "kclosure k=1 preset t3-sym",
        "frobnicate",
        "universal a=Sym(4)",
    ] {
        assert!(GroupSpec::parse(bad, None).is_err(), "{bad:?}");
    }
    assert!(matches!(GroupSpec::parse("kclosure k=0 of preset t3-sym", None), Err(Error::Domain(_))));
}

#[test]
fn presets() {
    for name in PRESETS {
        let spec = GroupSpec::preset(name).unwrap();
        assert_eq!(spec.hash().unwrap(), GroupSpec::preset(name).unwrap().hash().unwrap());
    }
    match GroupSpec::preset("t4-sym") {
        Err(Error::Parse(msg)) => assert!(msg.contains("t3-sym")),
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(
        GroupSpec::preset("valency-one").unwrap().hash().unwrap(),
        GroupSpec::preset("valency1").unwrap().hash().unwrap()
    );
}

#[test]
fn hashes_depend_on_the_element_sets() {
    let a = parse("universal a=Sym(3) b=Sym(3)");
    let b = parse("universal a=<(1 2),(2 3)> b=Full");
    assert_eq!(a.hash().unwrap(), b.hash().unwrap());
    let c = parse("universal a=Alt(3) b=Sym(3)");
    assert_ne!(a.hash().unwrap(), c.hash().unwrap());
    let k1 = GroupSpec::KClosure { inner: Box::new(a.clone()), k: 1 };
    assert_ne!(a.hash().unwrap(), k1.hash().unwrap());
}

#[test]
fn required_margins() {
    let sym = GroupSpec::preset("t3-sym").unwrap();
    assert_eq!(sym.required_margin(), 0);
    let k2 = GroupSpec::KClosure { inner: Box::new(sym.clone()), k: 2 };
    assert_eq!(k2.required_margin(), 2);
    let nested = GroupSpec::PlusK { inner: Box::new(k2), k: 1 };
    assert_eq!(nested.required_margin(), 3);
}

#[test]
fn make_universal_validates() {
    let base = Arc::new(t3_base());
    let s3 = PermGroup::symmetric(3).unwrap();
    assert!(make_universal(base.clone(), vec![(0, s3.clone()), (1, s3.clone())]).is_ok());
    let sub = PermGroup::new(3, vec![Permutation::parse("(1 2)", 3).unwrap()]).unwrap();
    assert!(make_universal(base.clone(), vec![(0, sub)]).is_ok());
    match make_universal(base.clone(), vec![(0, PermGroup::symmetric(4).unwrap())]) {
        Err(Error::Domain(msg)) => assert!(msg.contains("degree mismatch")),
        other => panic!("unexpected {other:?}"),
    }
    let v1 = Arc::new(valency_one_base());
    match make_universal(v1, vec![(1, PermGroup::symmetric(8).unwrap())]) {
        Err(Error::Domain(msg)) => assert!(msg.contains("block violation")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn local_group_expressions() {
    let blocks = [0..3, 3..8];
    let g = parse_local_group("Blocks(Sym(3),Alt(5))", 8, &blocks).unwrap();
    assert_eq!(g.order().unwrap(), 6 * 60);
    assert_eq!(parse_local_group("Full", 8, &blocks).unwrap().order().unwrap(), 6 * 120);
    assert_eq!(parse_local_group("Trivial", 8, &blocks).unwrap().order().unwrap(), 1);
    assert!(parse_local_group("Sym(7)", 8, &blocks).is_err());
    assert!(parse_local_group("Blocks(Sym(3),Alt(4))", 8, &blocks).is_err());
    assert!(parse_local_group("Alt(", 3, std::slice::from_ref(&(0..3))).is_err());
}
