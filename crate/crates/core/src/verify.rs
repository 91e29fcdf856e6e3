//! The acceptance suite: eleven checks with exact expected values.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chabauty::{
    compare_certificates, discreteness_check, intransitive_fixture, local_two_transitivity,
    prime_content, quotient_graph, t3_fixture, torsion_claim_check, valency_one_fixture,
    valency_one_report, verify_pro_pi_transfer, TorsionOutcome,
};
use crate::eig::{eig_isomorphic, EdgeIndexedGraph};
use crate::error::Result;
use crate::permgrp::{PermGroup, Permutation};
use crate::portrait::{encode_map, Portrait};
use crate::profile::{profile_contains, Engine};
use crate::spec::{GroupSpec, PRESETS};
use crate::tree::{TreeBall, VertexId};

pub const CRITERIA: [&str; 11] = [
    "stabilizer profile counts on T3",
    "1-closedness of universal specs",
    "discrete closure",
    "+k generation",
    "pro-pi transfer",
    "torsion claim",
    "quotient graphs and certificates",
    "unimodularity",
    "valency-1 experiment",
    "local 2-transitivity",
    "property suites",
];

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

/// All type-preserving automorphisms of `B(root, r)` fixing the root, built
/// from arbitrary bijections between children.
pub fn brute_force_ball_automorphisms(tree: &TreeBall, r: u32) -> Vec<Vec<VertexId>> {
    fn children(t: &TreeBall, v: VertexId) -> Vec<VertexId> {
        (0..t.degree(v))
            .filter_map(|c| t.neighbor(v, c))
            .filter(|&u| t.parent(u) == Some(v))
            .collect()
    }
    fn perms(items: &[VertexId]) -> Vec<Vec<VertexId>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let x = rest.remove(i);
            for mut p in perms(&rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
    fn rec(t: &TreeBall, x: usize, end: usize, map: &mut Vec<VertexId>, out: &mut Vec<Vec<VertexId>>) {
        if x == end {
            out.push(map.clone());
            return;
        }
        let src = children(t, x as VertexId);
        let dst = children(t, map[x]);
        for p in perms(&dst) {
            if src.iter().zip(&p).all(|(&a, &b)| t.vertex_type(a) == t.vertex_type(b)) {
                for (&a, &b) in src.iter().zip(&p) {
                    map[a as usize] = b;
                }
                rec(t, x + 1, end, map, out);
            }
        }
    }
    let mut out = Vec::new();
    let mut map = vec![0; tree.ball_len(r)];
    let end = if r == 0 { 0 } else { tree.ball_len(r - 1) };
    rec(tree, 0, end, &mut map, &mut out);
    out
}

/// Brute-force ball automorphisms whose interior local actions lie in the
/// local groups, as sorted encodings.
pub fn oracle_profile(tree: &Arc<TreeBall>, r: u32, local: &[PermGroup]) -> Result<Vec<Vec<u8>>> {
    let mut out = Vec::new();
    for m in brute_force_ball_automorphisms(tree, r) {
        let g = Portrait::new(tree.clone(), r, m)?;
        let mut ok = true;
        for v in 0..tree.ball_len(r.saturating_sub(1)) as VertexId {
            if r == 0 {
                break;
            }
            if !local[tree.vertex_type(v)].contains(&g.local_action(v)?)? {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(g.encode());
        }
    }
    out.sort();
    Ok(out)
}

fn c1(e: &Engine) -> Result<(bool, String)> {
    let sym = GroupSpec::preset("t3-sym")?;
    let alt = GroupSpec::preset("t3-alt")?;
    let mut sizes = Vec::new();
    for spec in [&sym, &alt] {
        let s: Vec<usize> = (1..=3)
            .map(|r| e.stabilizer_profile(spec, 0, r).map(|p| p.len()))
            .collect::<Result<_>>()?;
        sizes.push(s);
    }
    let mut oracle_ok = true;
    for spec in [&sym, &alt] {
        for q in 0..2 {
            let tree = e.tree(spec.base(), q, 2)?;
            for r in 1..=2 {
                let oracle = oracle_profile(&tree, r, spec.universal().local_groups())?;
                oracle_ok &= oracle == e.stabilizer_profile(spec, q, r)?.entries();
            }
        }
    }
    let ok = sizes[0] == [6, 48, 3072] && sizes[1] == [3, 3, 3] && oracle_ok;
    Ok((ok, format!("Sym {:?}, Alt {:?}, oracle agreement r≤2: {oracle_ok}", sizes[0], sizes[1])))
}

fn c2(e: &Engine) -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();
    for name in ["t3-sym", "t3-alt"] {
        let u = GroupSpec::preset(name)?;
        for r in 1..=3 {
            let own = e.stabilizer_profile(&u, 0, r)?;
            let cl1 = e.kclosure_profile(&u, 1, 0, r)?;
            let cl2 = e.kclosure_profile(&u, 2, 0, r)?;
            let eq = cl1.same_set(&own)?;
            let chain = profile_contains(&cl1, &cl2)? && profile_contains(&cl2, &own)?;
            ok &= eq && chain;
            notes.push(format!("{name} r={r}: cl1=own {eq}, own⊆cl2⊆cl1 {chain}"));
        }
    }
    Ok((ok, notes.join("; ")))
}

fn c3(e: &Engine) -> Result<(bool, String)> {
    let rep = discreteness_check(e, &GroupSpec::preset("t3-alt")?, 0, 3)?;
    let ok = rep.discrete && rep.sizes == [3, 3, 3] && rep.equal_from() == Some(1);
    Ok((ok, format!("sizes {:?}, discrete {}, equal from k={:?}", rep.sizes, rep.discrete, rep.equal_from())))
}

fn c4(e: &Engine) -> Result<(bool, String)> {
    let sym = e.plus_k_profile(&GroupSpec::preset("t3-sym")?, 1, 0, 2)?;
    let alt = e.plus_k_profile(&GroupSpec::preset("t3-alt")?, 1, 0, 2)?;
    let tree = e.tree(GroupSpec::preset("t3-alt")?.base(), 0, 2)?;
    let id = encode_map(2, &(0..tree.ball_len(2) as VertexId).collect::<Vec<_>>());
    let alt_is_identity = alt.entries() == [id];
    Ok((
        sym.len() == 48 && alt_is_identity,
        format!("Sym: {} elements, Alt: {} element(s), identity only: {alt_is_identity}", sym.len(), alt.len()),
    ))
}

fn c5(e: &Engine) -> Result<(bool, String)> {
    let sym = GroupSpec::preset("t3-sym")?;
    let levels: Vec<BTreeSet<u64>> = (0..=3).map(|n| prime_content(e, &sym, 0, n)).collect::<Result<_>>()?;
    let two: BTreeSet<u64> = [2].into();
    let levels_ok = levels[0] == [2, 3].into() && levels[1..].iter().all(|p| *p == two);
    let rep = verify_pro_pi_transfer(e, &sym, &two, 1, 2, 3)?;
    let ok = levels_ok && rep.hypothesis_holds && rep.conclusion_holds() == Some(true);
    Ok((
        ok,
        format!(
            "levels 0..3: {levels:?}; transfer hypothesis {}, conclusion {:?}",
            rep.hypothesis_holds,
            rep.conclusion_holds()
        ),
    ))
}

fn c6(e: &Engine) -> Result<(bool, String)> {
    let sym = torsion_claim_check(e, &GroupSpec::preset("t3-sym")?, 0, 2, 1, 3)?;
    let alt = torsion_claim_check(e, &GroupSpec::preset("t3-alt")?, 0, 2, 1, 3)?;
    let sym_ok = matches!(sym, TorsionOutcome::Counterexample { order: 2, .. });
    let alt_ok = matches!(alt, TorsionOutcome::Holds { .. });
    let describe = |o: &TorsionOutcome| match o {
        TorsionOutcome::Holds { tested } => format!("holds ({tested} tested)"),
        TorsionOutcome::Counterexample { order, .. } => format!("counterexample of order {order}"),
    };
    Ok((sym_ok && alt_ok, format!("Sym: {}; Alt: {}", describe(&sym), describe(&alt))))
}

fn c7(e: &Engine) -> Result<(bool, String)> {
    let cases: [(&str, EdgeIndexedGraph); 3] = [
        ("t3-sym", t3_fixture()),
        ("t3-intransitive", intransitive_fixture()),
        ("valency1", valency_one_fixture()),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, fixture) in &cases {
        let q = quotient_graph(e, &GroupSpec::preset(name)?, 3)?;
        let iso = eig_isomorphic(&q, fixture)?;
        ok &= iso;
        notes.push(format!("{name} quotient matches: {iso}"));
    }
    let names = ["t3-sym", "t3-alt", "t3-intransitive", "valency1"];
    let mut pairs = 0;
    for (i, a) in names.iter().enumerate() {
        for b in &names[i..] {
            let (sa, sb) = (GroupSpec::preset(a)?, GroupSpec::preset(b)?);
            if **sa.base() != **sb.base() {
                continue;
            }
            let cmp = compare_certificates(e, &sa, &sb, 3)?;
            ok &= cmp.holds();
            pairs += 1;
        }
    }
    notes.push(format!("profile determines certificate on {pairs} preset pairs"));
    Ok((ok, notes.join("; ")))
}

fn c8(_e: &Engine) -> Result<(bool, String)> {
    let mut lp = EdgeIndexedGraph::new();
    let v = lp.add_vertex("v", 0);
    lp.add_edge(v, v, 1, 2);
    let edge = t3_fixture().is_unimodular()?;
    let path = valency_one_fixture().is_unimodular()?;
    let looped = lp.is_unimodular()?;
    Ok((
        edge && path && !looped,
        format!("edge (3,3): {edge}, valency-1 path: {path}, loop (1,2): {looped}"),
    ))
}

fn c9(e: &Engine) -> Result<(bool, String)> {
    let rep = valency_one_report(e)?;
    Ok((
        rep.passed(),
        format!(
            "degrees {:?}, |profile| {}, order-5 portrait {}, core primes ok {}, layer-0 order {} (5 | order: {})",
            rep.degrees,
            rep.profile_size,
            rep.five_cycle.is_some(),
            rep.core_primes_ok,
            rep.layer0_order,
            rep.obstruction
        ),
    ))
}

fn c10(_e: &Engine) -> Result<(bool, String)> {
    let sym = local_two_transitivity(&GroupSpec::preset("t3-sym")?)?;
    let alt = local_two_transitivity(&GroupSpec::preset("t3-alt")?)?;
    let v1 = GroupSpec::preset("valency1")?;
    let b = v1.base().vertex_by_name("b").unwrap();
    let local_b = v1.universal().local(b);
    let tb = local_b.transitivity_degree()?;
    let leaves = local_b.restrict_to(&[4, 5, 6, 7, 8])?;
    let contains = PermGroup::symmetric(3)?.contains_alternating()?
        && PermGroup::alternating(3)?.contains_alternating()?
        && leaves.contains_alternating()?;
    let ok = sym.all_two_transitive
        && sym.per_type.iter().all(|x| x.2 == 2)
        && alt.per_type.iter().all(|x| x.2 == 1)
        && tb == 0
        && contains;
    Ok((
        ok,
        format!(
            "Sym {:?}, Alt {:?}, valency-1 b: {tb}, contains Alt: {contains}",
            sym.per_type.iter().map(|x| x.2).collect::<Vec<_>>(),
            alt.per_type.iter().map(|x| x.2).collect::<Vec<_>>()
        ),
    ))
}

/// Cocycle identity on random composable pairs; returns the number of pairs.
pub fn cocycle_check(e: &Engine, pairs: usize, seed: u64) -> Result<(usize, bool)> {
    let sym = GroupSpec::preset("t3-sym")?;
    let tree = e.tree(sym.base(), 0, 3)?;
    let ps = e.stabilizer_profile(&sym, 0, 3)?.portraits(&tree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..pairs {
        let g = &ps[rng.gen_range(0..ps.len())];
        let h = &ps[rng.gen_range(0..ps.len())];
        let gh = g.compose(h)?;
        for v in 0..tree.ball_len(gh.radius() - 1) as VertexId {
            let lhs = gh.local_action(v)?;
            let rhs = g.local_action(h.image(v).unwrap())?.compose(&h.local_action(v)?);
            if lhs != rhs {
                return Ok((pairs, false));
            }
        }
    }
    Ok((pairs, true))
}

/// Orbit–stabilizer identity on random groups of degree at most 6.
pub fn orbit_stabilizer_check(groups: usize, seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..groups {
        let n = rng.gen_range(1..=6usize);
        let gens = (0..rng.gen_range(0..=3))
            .map(|_| {
                let mut img: Vec<u8> = (0..n as u8).collect();
                img.shuffle(&mut rng);
                Permutation::from_images(img)
            })
            .collect::<Result<Vec<_>>>()?;
        let g = PermGroup::new(n, gens)?;
        for p in 1..=n {
            let lhs = g.point_stabilizer(p)?.order()? * g.orbit(p).len() as u64;
            if lhs != g.order()? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Profiles computed under one and four worker threads.
pub fn thread_determinism_check() -> Result<bool> {
    let sym = GroupSpec::preset("t3-sym")?;
    let run = |threads: usize| -> Result<Vec<Vec<Vec<u8>>>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| {
            let e = Engine::new();
            Ok(vec![
                e.stabilizer_profile(&sym, 0, 3)?.entries().to_vec(),
                e.kclosure_profile(&sym, 1, 0, 2)?.entries().to_vec(),
                e.moving_profile(&sym, 0, 2, 2)?.entries().to_vec(),
            ])
        })
    };
    Ok(run(1)? == run(4)?)
}

/// `(preset, root type, radius)` at which the extension check runs.
pub fn extension_cases() -> Vec<(&'static str, usize, u32)> {
    let mut cases = Vec::new();
    for name in PRESETS.iter().filter(|n| n.starts_with("t3-")) {
        for q in 0..2 {
            for r in 1..=3 {
                cases.push((*name, q, r));
            }
        }
    }
    for r in 1..=3 {
        cases.push(("valency1", 2, r));
    }
    cases.extend([("valency1", 1, 1), ("valency1", 1, 2), ("valency1", 0, 1)]);
    cases
}

fn c11(e: &Engine) -> Result<(bool, String)> {
    let (pairs, cocycle) = cocycle_check(e, 1000, 7)?;
    let orbit_stab = orbit_stabilizer_check(100, 11)?;
    let determinism = thread_determinism_check()?;
    let mut ext_ok = true;
    let cases = extension_cases();
    for &(name, q, r) in &cases {
        ext_ok &= e.extension_check(&GroupSpec::preset(name)?, q, r)?.holds;
    }
    Ok((
        cocycle && orbit_stab && determinism && ext_ok,
        format!(
            "cocycle on {pairs} pairs: {cocycle}, orbit-stabilizer on 100 groups: {orbit_stab}, \
             thread determinism: {determinism}, extension on {} cases: {ext_ok}",
            cases.len()
        ),
    ))
}

/// Runs one criterion (1-based); errors count as failures.
pub fn run_criterion(e: &Engine, id: usize) -> CriterionResult {
    let f: fn(&Engine) -> Result<(bool, String)> = match id {
        1 => c1,
        2 => c2,
        3 => c3,
        4 => c4,
        5 => c5,
        6 => c6,
        7 => c7,
        8 => c8,
        9 => c9,
        10 => c10,
        11 => c11,
        _ => panic!("no criterion {id}"),
    };
    let (passed, detail) = match f(e) {
        Ok(x) => x,
        Err(err) => (false, format!("error: {err}")),
    };
    CriterionResult {
        id,
        name: CRITERIA[id - 1],
        passed,
        detail,
    }
}

pub fn run_all(e: &Engine) -> Vec<CriterionResult> {
    (1..=CRITERIA.len()).map(|i| run_criterion(e, i)).collect()
}
