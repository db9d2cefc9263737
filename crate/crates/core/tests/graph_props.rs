use proptest::prelude::*;

use trigraph::graph::{self, Graph};
use trigraph::{DegreeSequence, Exec};

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut it = bits.into_iter();
            for u in 0..n {
                for v in u + 1..n {
                    if it.next().unwrap() {
                        edges.push((u, v));
                    }
                }
            }
            Graph::from_edge_list(n, &edges).unwrap()
        })
    })
}

fn arb_graph_with_perm(max_n: usize) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    arb_graph(max_n).prop_flat_map(|g| {
        let perm = Just((0..g.n()).collect::<Vec<_>>()).prop_shuffle();
        (Just(g), perm)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fast_counter_matches_bruteforce(g in arb_graph(24)) {
        let brute = graph::count_triangles_bruteforce(&g).unwrap();
        prop_assert_eq!(graph::count_triangles(&g, Exec::Parallel), brute);
        prop_assert_eq!(graph::count_triangles(&g, Exec::Sequential), brute);
        prop_assert_eq!(graph::list_triangles(&g, Exec::Parallel).len() as u64, brute);
    }

    #[test]
    fn per_vertex_counts_sum_to_three_t(g in arb_graph(24)) {
        let t = graph::count_triangles(&g, Exec::Sequential);
        let per: u64 = graph::vertex_triangles(&g, Exec::Parallel).iter().sum();
        prop_assert_eq!(per, 3 * t);
        // degree-0/1 vertices carry no corners
        prop_assert_eq!(graph::clustering_curve(&g, Exec::Parallel).total_corners(), 3 * t);
    }

    #[test]
    fn relabeling_preserves_counts((g, perm) in arb_graph_with_perm(20)) {
        let h = g.relabel(&perm).unwrap();
        prop_assert_eq!(graph::count_triangles(&g, Exec::Parallel), graph::count_triangles(&h, Exec::Parallel));
        prop_assert_eq!(
            graph::clustering_curve(&g, Exec::Sequential),
            graph::clustering_curve(&h, Exec::Sequential)
        );
        let mut a = g.degrees();
        let mut b = h.degrees();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn clustering_values_are_probabilities(g in arb_graph(20)) {
        for (k, e) in graph::clustering_curve(&g, Exec::Sequential).entries {
            prop_assert!(k >= 2);
            prop_assert!((0.0..=1.0).contains(&e.c_k), "c({}) = {}", k, e.c_k);
        }
    }

    #[test]
    fn edge_list_round_trip(g in arb_graph(16)) {
        let back = Graph::parse_edge_list(&g.to_edge_list()).unwrap();
        prop_assert_eq!(back.canonical_edges(), g.canonical_edges());
        prop_assert_eq!(back.n(), g.n());
    }
}

#[test]
fn complete_graph_clustering_is_one() {
    for n in 3..10 {
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let g = Graph::from_edge_list(n, &edges).unwrap();
        let curve = graph::clustering_curve(&g, Exec::Parallel);
        assert_eq!(curve.c(n as u32 - 1), Some(1.0));
        let n = n as u64;
        assert_eq!(graph::count_triangles(&g, Exec::Parallel), n * (n - 1) * (n - 2) / 6);
    }
}

#[test]
fn degree_sequence_of_sampled_graph() {
    let ds = DegreeSequence::new(vec![3, 3, 2, 2, 2]).unwrap();
    let (g, _) = trigraph::samplers::uniform_sample_mcmc(&ds, 500, 1).unwrap();
    assert_eq!(graph::degree_sequence_of(&g).unwrap(), ds);
}
