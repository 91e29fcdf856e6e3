use chabauty_core::eig::{eig_isomorphic, Dart, EdgeIndexedGraph, Vertex};
use proptest::prelude::*;

/// Random connected graph: a spanning tree plus extra edges and loops.
fn arb_graph() -> impl Strategy<Value = EdgeIndexedGraph> {
    (1usize..=5)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(0u32..3, n),
                prop::collection::vec((any::<prop::sample::Index>(), 1u32..4, 1u32..4), n - 1),
                prop::collection::vec((0..n, 0..n, 1u32..4, 1u32..4), 0..3),
            )
        })
        .prop_map(|(n, colors, tree, extra)| {
            let mut g = EdgeIndexedGraph::new();
            for (i, c) in colors.iter().enumerate() {
                g.add_vertex(format!("v{i}"), *c);
            }
            for (i, (p, a, b)) in tree.into_iter().enumerate() {
                g.add_edge(p.index(i + 1), i + 1, a, b);
            }
            for (u, v, a, b) in extra {
                g.add_edge(u, v, a, b);
            }
            assert_eq!(g.vertex_count(), n);
            g
        })
}

fn relabel(g: &EdgeIndexedGraph, perm: &[usize]) -> EdgeIndexedGraph {
    let mut vertices = vec![
        Vertex {
            name: String::new(),
            color: 0
        };
        g.vertex_count()
    ];
    for (i, v) in g.vertices().iter().enumerate() {
        vertices[perm[i]] = Vertex {
            name: format!("w{}", perm[i]),
            color: v.color,
        };
    }
    let darts = g
        .darts()
        .iter()
        .map(|d| Dart {
            origin: perm[d.origin],
            target: perm[d.target],
            ..*d
        })
        .collect();
    EdgeIndexedGraph::from_raw_parts(vertices, darts)
}

fn arb_graph_and_perm() -> impl Strategy<Value = (EdgeIndexedGraph, Vec<usize>)> {
    arb_graph().prop_flat_map(|g| {
        let n = g.vertex_count();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn isomorphism_is_an_equivalence((g, p) in arb_graph_and_perm()) {
        let h = relabel(&g, &p);
        let inv: Vec<usize> = { let mut v = vec![0; p.len()]; for (i, &x) in p.iter().enumerate() { v[x] = i; } v };
        let k = relabel(&h, &inv);
        prop_assert!(eig_isomorphic(&g, &g).unwrap());
        prop_assert!(eig_isomorphic(&g, &h).unwrap());
        prop_assert!(eig_isomorphic(&h, &g).unwrap());
        prop_assert!(eig_isomorphic(&h, &k).unwrap() && eig_isomorphic(&g, &k).unwrap());
    }

    #[test]
    fn unimodularity_is_invariant((g, p) in arb_graph_and_perm()) {
        let h = relabel(&g, &p);
        prop_assert_eq!(g.is_unimodular().unwrap(), h.is_unimodular().unwrap());
    }

    #[test]
    fn trees_are_unimodular(g in arb_graph()) {
        let n = g.vertex_count();
        let tree = EdgeIndexedGraph::from_raw_parts(g.vertices().to_vec(), g.darts()[..2 * (n - 1)].to_vec());
        prop_assert!(tree.is_unimodular().unwrap());
    }

    #[test]
    fn text_round_trip(g in arb_graph()) {
        let back = EdgeIndexedGraph::parse(&g.to_text()).unwrap();
        prop_assert!(eig_isomorphic(&g, &back).unwrap());
        prop_assert_eq!(back.to_text(), g.to_text());
    }
}

#[test]
fn changed_index_breaks_isomorphism() {
    let a = EdgeIndexedGraph::parse("v a color=0\nv b color=1\ne a b i12=3 i21=3\n").unwrap();
    let b = EdgeIndexedGraph::parse("v a color=0\nv b color=1\ne a b i12=3 i21=4\n").unwrap();
    assert!(!eig_isomorphic(&a, &b).unwrap());
}
