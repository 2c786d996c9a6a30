use ehz_core::capacity::{
    capacity_simplex, capacity_upper_bound, hk_objective, next_permutation, order_sum,
    weight_matrix, HeuristicOptions, Ordering, SearchOptions,
};
use ehz_core::digraph::{self, BipartiteTournament};
use ehz_core::generate::random_tournament;
use ehz_core::polytope::{self, HPolytope, MultiplierVector};
use ehz_core::ratlinalg::{RatMatrix, Rational};
use ehz_core::reduction::{self, ReductionBundle, ReductionOptions};
use num::{Signed, Zero};
use proptest::prelude::*;

fn tournament(max_n: usize) -> impl Strategy<Value = BipartiteTournament> {
    (1..=max_n)
        .prop_flat_map(|n| (Just(n), 1..=n, any::<u64>()))
        .prop_map(|(n, m, seed)| random_tournament(n, m, seed).unwrap())
}

/// Random integer simplices in the plane, kept only when the multiplier
/// is strictly positive.
fn planar_simplex() -> impl Strategy<Value = HPolytope> {
    proptest::collection::vec(-4i64..=4, 6).prop_filter_map("not a simplex", |v| {
        let rows = [[v[0], v[1]], [v[2], v[3]], [v[4], v[5]]];
        let p = HPolytope::with_unit_rhs(RatMatrix::from_ints(&rows)).ok()?;
        let cert = polytope::certify_simplex(&p).ok()?;
        cert.beta
            .values()
            .iter()
            .all(Signed::is_positive)
            .then_some(p)
    })
}

fn all_orderings(k: usize) -> Vec<Ordering> {
    let mut p: Vec<usize> = (0..k).collect();
    let mut out = vec![Ordering::new(p.clone()).unwrap()];
    while next_permutation(&mut p) {
        out.push(Ordering::new(p.clone()).unwrap());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weight_matrix_is_skew_with_zero_row_sums(t in tournament(3), eps in 1i64..100) {
        let b = ReductionBundle::new(&t, Rational::new(1.into(), eps.into())).unwrap();
        for w in [&b.w, &b.w_tilde] {
            let k = w.size();
            for i in 0..k {
                for j in 0..k {
                    prop_assert_eq!(w.get(i, j), &-w.get(j, i).clone());
                }
                let row: Rational = (0..k).map(|j| w.get(i, j)).sum();
                prop_assert!(row.is_zero());
            }
        }
        prop_assert!(b.w.matrix().is_integral());
    }

    #[test]
    fn order_sum_is_invariant_under_rotation(t in tournament(3)) {
        let b = ReductionBundle::new(&t, reduction::default_epsilon(t.n())).unwrap();
        for sigma in all_orderings(b.w.size()) {
            let v = order_sum(&b.w, &sigma);
            for r in 1..sigma.len() {
                prop_assert_eq!(&order_sum(&b.w, &sigma.rotated(r)), &v);
            }
        }
    }

    #[test]
    fn pruning_preserves_the_result(t in tournament(3)) {
        let b = ReductionBundle::new(&t, reduction::default_epsilon(t.n())).unwrap();
        let full = capacity_simplex(&b.simplex, &SearchOptions::default()).unwrap();
        let pruned = capacity_simplex(&b.simplex, &SearchOptions { prune_cyclic: true, ..SearchOptions::default() }).unwrap();
        prop_assert_eq!(&pruned, &full);
        let w = weight_matrix(&b.simplex);
        prop_assert_eq!(hk_objective(&w, &full.witness, &full.witness_beta), full.inner_max);
    }

    #[test]
    fn heuristic_bounds_exact_capacity(p in planar_simplex(), seed: u64, budget in 1u64..8) {
        let exact = capacity_simplex(&p, &SearchOptions::default());
        let bound = capacity_upper_bound(&p, &HeuristicOptions { budget, seed, ..HeuristicOptions::default() });
        if let (Ok(e), Ok(b)) = (exact, bound) {
            prop_assert!(b.value >= e.value);
        }
    }

    #[test]
    fn simplex_multiplier_is_the_only_vertex(p in planar_simplex()) {
        let beta = polytope::certify_simplex(&p).unwrap().beta;
        prop_assert!(MultiplierVector::new(&p, beta.values().to_vec()).is_some());
        let vertices = polytope::multiplier_vertices(&p, 16).unwrap();
        prop_assert_eq!(vertices, vec![beta]);
    }

    #[test]
    fn max_acyclic_matches_best_order_sum(t in tournament(3)) {
        let b = ReductionBundle::new(&t, reduction::default_epsilon(t.n())).unwrap();
        let (acyclic, _) = digraph::max_acyclic_value(&b.aux.graph).unwrap();
        let best = all_orderings(b.w.size()).iter().map(|s| order_sum(&b.w, s)).max().unwrap();
        let lhs = Rational::from_integer((2 * acyclic as i64 - b.aux.delta as i64).into());
        prop_assert_eq!(lhs, best);
        prop_assert_eq!(b.aux.delta, b.aux.total_arcs);
        for x in 0..b.aux.graph.vertex_count() {
            prop_assert_eq!(b.aux.graph.in_degree(x), b.aux.graph.out_degree(x));
        }
    }

    #[test]
    fn pipeline_matches_oracle_with_valid_certificate(t in tournament(4)) {
        let sol = reduction::solve_fas_via_capacity(&t, &ReductionOptions::default()).unwrap();
        let d = t.to_digraph();
        let (oracle, _) = digraph::min_fas(&d).unwrap();
        prop_assert_eq!(sol.count, oracle);
        prop_assert_eq!(sol.certificate.len(), sol.count);
        prop_assert!(sol.certificate.is_within(&d));
        let mut rest = d.clone();
        for (a, b, c) in sol.certificate.graph().arc_list() {
            rest.set_arcs(a, b, d.arcs(a, b) - c);
        }
        prop_assert!(digraph::is_acyclic(&rest));
        let (aux_fas, _) = digraph::min_fas(&sol.bundle.aux.graph).unwrap();
        prop_assert_eq!(oracle + sol.bundle.aux.extra_outdeg, aux_fas);
    }
}
