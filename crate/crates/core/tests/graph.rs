#![allow(clippy::needless_range_loop)]

use median_core::testkit::{grid, median_closure, AllPairsOracle};
use median_core::{bfs_distances, compute_theta_classes, gated_bfs, induced_subgraph, Graph, Validation};
use proptest::prelude::*;

fn check_gates(g: &Graph, h: &[usize]) {
    let apd = AllPairsOracle::new(g).unwrap();
    let ga = gated_bfs(g, h).unwrap();
    let mut covered = 0;
    for &x in h {
        assert_eq!((ga.gate_of(x), ga.dist_of(x)), (x, 0));
        covered += ga.fiber(x).len();
    }
    assert_eq!(covered, g.n());
    for v in 0..g.n() {
        let best = h.iter().map(|&x| apd.d(v, x)).min().unwrap();
        assert_eq!(ga.dist_of(v), best);
        assert_eq!(apd.d(v, ga.gate_of(v)), best);
    }
}

#[test]
fn grid_halfspace_is_a_convex_subgrid() {
    let g = grid(&[4, 5]).unwrap();
    let t = compute_theta_classes(&g).unwrap();
    let apd = AllPairsOracle::new(&g).unwrap();
    for i in 0..t.q() {
        let side = t.side_indicator(&g, i);
        let h: Vec<usize> = (0..g.n()).filter(|&v| !side[v]).collect();
        let sub = induced_subgraph(&g, &h).unwrap();
        for a in 0..sub.graph.n() {
            let d = bfs_distances(&sub.graph, a).unwrap();
            for b in 0..sub.graph.n() {
                assert_eq!(d[b], apd.d(sub.parent_of(a), sub.parent_of(b)));
            }
        }
        check_gates(&g, &h);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn bfs_matches_oracle(k in 2usize..9, p in 1usize..16, seed in any::<u64>()) {
        let g = median_closure(k, p, seed).unwrap();
        let apd = AllPairsOracle::new(&g).unwrap();
        for s in 0..g.n() {
            let d = bfs_distances(&g, s).unwrap();
            prop_assert_eq!(d.as_slice(), apd.row(s));
            for (u, v) in g.edges() {
                prop_assert!(d[u].abs_diff(d[v]) <= 1);
            }
        }
    }

    #[test]
    fn halfspace_gates(k in 2usize..9, p in 1usize..16, seed in any::<u64>()) {
        let g = median_closure(k, p, seed).unwrap();
        let t = compute_theta_classes(&g).unwrap();
        for i in 0..t.q() {
            let side = t.side_indicator(&g, i);
            let h: Vec<usize> = (0..g.n()).filter(|&v| side[v]).collect();
            check_gates(&g, &h);
        }
    }

    #[test]
    fn induced_round_trip(k in 2usize..9, p in 1usize..16, seed in any::<u64>()) {
        let g = median_closure(k, p, seed).unwrap();
        let t = compute_theta_classes(&g).unwrap();
        prop_assume!(t.q() > 0);
        let side = t.side_indicator(&g, 0);
        let h: Vec<usize> = (0..g.n()).filter(|&v| side[v]).collect();
        let sub = induced_subgraph(&g, &h).unwrap();
        for (c, &v) in h.iter().enumerate() {
            prop_assert_eq!(sub.to_child(v), Some(c));
            prop_assert_eq!(sub.parent_of(c), v);
        }
        for (e, (a, b)) in sub.graph.edges().enumerate() {
            let pe = sub.edge_to_parent[e] as usize;
            prop_assert_eq!(g.edge(pe), (sub.parent_of(a), sub.parent_of(b)));
        }
        let inside = g.edges().filter(|&(a, b)| side[a] && side[b]).count();
        prop_assert_eq!(inside, sub.graph.m());
    }

    #[test]
    fn text_round_trip(k in 2usize..9, p in 1usize..16, seed in any::<u64>()) {
        let g = median_closure(k, p, seed).unwrap();
        let text = g.to_text();
        prop_assert_eq!(Graph::parse(&text, Validation::Check).unwrap(), g);
    }
}
