use std::sync::{Arc, OnceLock};

use chabauty_core::{Engine, GroupSpec, Portrait, TreeBall, VertexId};
use proptest::prelude::*;

fn sym_r3() -> &'static (Arc<TreeBall>, Vec<Portrait>) {
    static CELL: OnceLock<(Arc<TreeBall>, Vec<Portrait>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let e = Engine::new();
        let spec = GroupSpec::preset("t3-sym").unwrap();
        let tree = e.tree(spec.base(), 0, 3).unwrap();
        let ps = e.stabilizer_profile(&spec, 0, 3).unwrap().portraits(&tree).unwrap();
        (tree, ps)
    })
}

fn pick(i: prop::sample::Index) -> &'static Portrait {
    let ps = &sym_r3().1;
    &ps[i.index(ps.len())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn local_action_cocycle(a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let (g, h) = (pick(a), pick(b));
        let gh = g.compose(h).unwrap();
        let tree = &sym_r3().0;
        for v in 0..tree.ball_len(2) as VertexId {
            let lhs = gh.local_action(v).unwrap();
            let rhs = g.local_action(h.image(v).unwrap()).unwrap().compose(&h.local_action(v).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn restriction_commutes_with_composition(
        a in any::<prop::sample::Index>(),
        b in any::<prop::sample::Index>(),
        r in 0u32..=3,
    ) {
        let (g, h) = (pick(a), pick(b));
        let lhs = g.compose(h).unwrap().restrict(r).unwrap();
        let rhs = g.restrict(r).unwrap().compose(&h.restrict(r).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn types_are_preserved(a in any::<prop::sample::Index>()) {
        let g = pick(a);
        let tree = &sym_r3().0;
        for (v, &img) in g.map().iter().enumerate() {
            prop_assert_eq!(tree.vertex_type(v as VertexId), tree.vertex_type(img));
            prop_assert_eq!(tree.depth(v as VertexId), tree.depth(img));
        }
    }

    #[test]
    fn encoding_round_trips(a in any::<prop::sample::Index>()) {
        let g = pick(a);
        let back = Portrait::decode(sym_r3().0.clone(), &g.encode()).unwrap();
        prop_assert_eq!(&back, g);
    }

    #[test]
    fn inverse_and_order(a in any::<prop::sample::Index>()) {
        let g = pick(a);
        prop_assert!(g.compose(&g.inverse().unwrap()).unwrap().is_identity());
        let n = g.order().unwrap();
        prop_assert!(g.power(n).unwrap().is_identity());
        prop_assert_eq!(3072 % n, 0);
    }
}

#[test]
fn constructor_rejects_bad_maps() {
    let (tree, _) = sym_r3();
    let mut m: Vec<VertexId> = (0..tree.ball_len(1) as VertexId).collect();
    m[1] = 2;
    assert!(Portrait::new(tree.clone(), 1, m).is_err());
    let short: Vec<VertexId> = vec![0, 1];
    assert!(Portrait::new(tree.clone(), 1, short).is_err());
    let swapped_root: Vec<VertexId> = vec![1, 0, 2, 3];
    assert!(Portrait::new(tree.clone(), 1, swapped_root).is_err());
}

#[test]
fn identity_properties() {
    let (tree, _) = sym_r3();
    let id = Portrait::identity(tree.clone(), 3);
    assert!(id.is_identity());
    assert!(id.fixes_ball(3));
    assert_eq!(id.displacement(), 0);
    assert_eq!(id.order().unwrap(), 1);
}
