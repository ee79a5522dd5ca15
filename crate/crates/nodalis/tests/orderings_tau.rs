use nodalis::chow::Engine;
use nodalis::config::Limits;
use nodalis::lattice::{enumerate_delta, negative_indices, Multiplicity};
use nodalis::oracle::multiplicity_vectors;
use nodalis::orderings::{succ, OrderingContext, TieBreak};
use nodalis::tau::{
    afsw_star, node_count, node_count_with, rank_formula, tau_of, AfswContext, TauError,
};
use nodalis::{rat, AdmissibleGraph, Rational, UniversalPoly};
use proptest::prelude::*;

fn g(n: usize, e: &[(usize, usize)]) -> AdmissibleGraph {
    AdmissibleGraph::new(n, e.to_vec()).unwrap()
}

fn shown(ctx: &OrderingContext, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| ctx.delta[i].to_string()).collect()
}

/// Classical plane-curve values `(d, δ, count)`.
const PLANE: [(i64, usize, i64); 6] = [
    (3, 1, 12),
    (4, 1, 27),
    (4, 2, 225),
    (5, 2, 882),
    (5, 3, 7915),
    (6, 3, 41310),
];

fn plane(d: i64) -> [Rational; 4] {
    [rat(d * d), rat(-3 * d), rat(9), rat(3)]
}

#[test]
fn blowup_order_for_four_double_points() {
    let ctx = OrderingContext::new(&Multiplicity::constant(4, 2)).unwrap();
    let order: Vec<String> = ctx.models_graphs().iter().map(|x| x.to_string()).collect();
    assert_eq!(order.first().unwrap(), "{1→2, 1→3, 1→4}");
    assert_eq!(order.last().unwrap(), "γ4");
    assert_eq!(order.len(), 8);
}

#[test]
fn small_orders() {
    let ctx = OrderingContext::new(&Multiplicity::constant(3, 2)).unwrap();
    assert_eq!(shown(&ctx, &ctx.models), ["{1→2, 1→3}", "γ3"]);
    let ctx = OrderingContext::new(&Multiplicity::new(vec![1, 2]).unwrap()).unwrap();
    assert_eq!(shown(&ctx, &ctx.models), ["{1→2}", "γ2"]);
}

#[test]
fn order_extends_strict_containment() {
    for n in 1..=4 {
        for m in multiplicity_vectors(n, 3) {
            for tie in [TieBreak::Ascending, TieBreak::Descending] {
                let ctx = OrderingContext::with_tie_break(&m, tie).unwrap();
                for a in 0..ctx.delta.len() {
                    for b in 0..ctx.delta.len() {
                        if ctx.succ(a, b) && !ctx.succ(b, a) {
                            assert!(
                                ctx.position(b) < ctx.position(a),
                                "m={m}: {} vs {}",
                                ctx.delta[a],
                                ctx.delta[b]
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn index_sets_for_the_trivial_graph() {
    let ctx = OrderingContext::new(&Multiplicity::constant(4, 2)).unwrap();
    let top = ctx.index_of(&AdmissibleGraph::empty(4)).unwrap();
    let s = ctx.index_sets(top);
    assert_eq!(s.already.len(), 7);
    // Everything left after removing strata swallowed by a ≫ step persists.
    assert_eq!(s.reduced, s.reduced_gg);
    assert_eq!(
        shown(&ctx, &s.reduced),
        [
            "{1→2, 1→3, 1→4}",
            "{1→2, 1→3}",
            "{1→2, 1→4}",
            "{1→3, 1→4}",
            "{2→3, 2→4}"
        ]
    );
    // Persisting strata come last under ⊢, each group in blowup order.
    let vd = ctx.vdash_order(top);
    let pos: Vec<usize> = vd.iter().map(|&i| ctx.position(i)).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn vdash_puts_broken_strata_first() {
    let ctx = OrderingContext::new(&Multiplicity::constant(4, 2)).unwrap();
    let i = ctx.index_of(&g(4, &[(1, 2), (1, 4)])).unwrap();
    let s = ctx.index_sets(i);
    let vd = ctx.vdash_order(i);
    let first_persisting = vd.iter().position(|b| s.reduced_gg.contains(b)).unwrap();
    assert!(vd[..first_persisting]
        .iter()
        .all(|b| !s.reduced_gg.contains(b)));
    assert!(vd[first_persisting..]
        .iter()
        .all(|b| s.reduced_gg.contains(b)));
}

#[test]
fn tau_of_small_examples() {
    let m3 = Multiplicity::constant(3, 2);
    assert!(
        tau_of::<Rational>(&g(3, &[(1, 2), (1, 3)]), &m3)
            .unwrap()
            .zero_flag
    );
    let t = tau_of::<Rational>(
        &g(4, &[(1, 2), (1, 3), (1, 4)]),
        &Multiplicity::constant(4, 2),
    )
    .unwrap();
    assert_eq!((t.zero_flag, t.rank), (false, 0));
    assert!(matches!(
        tau_of::<Rational>(&g(2, &[(1, 2)]), &Multiplicity::constant(3, 2)),
        Err(TauError::LengthMismatch { .. })
    ));
}

#[test]
fn rank_formula_matches_tau() {
    for n in 1..=4 {
        for m in multiplicity_vectors(n, 3) {
            for gr in enumerate_delta(&m).unwrap() {
                let t = tau_of::<Rational>(&gr, &m).unwrap();
                let classes: Vec<_> = negative_indices(&gr, &m)
                    .iter()
                    .map(|&k| gr.type_one_class(k))
                    .collect();
                assert_eq!(t.rank, rank_formula(&classes, &m));
                if !t.zero_flag {
                    assert!(t.total_chern.max_grade().unwrap_or(0) <= t.rank.max(0) as u32);
                }
            }
        }
    }
}

#[test]
fn modified_invariant_of_vanishing_strata_is_zero_for_three_nodes() {
    let m = Multiplicity::constant(3, 2);
    let fan = g(3, &[(1, 2), (1, 3)]);
    let v = afsw_star::<Rational>(&fan, &m).unwrap();
    assert!(v.value.is_zero() && !v.is_parametric());
    let ctx = AfswContext::<Rational>::new(&m, TieBreak::Ascending).unwrap();
    let top = ctx.order.index_of(&AdmissibleGraph::empty(3)).unwrap();
    assert_eq!(
        ctx.corrections(top),
        vec![ctx.order.index_of(&fan).unwrap()]
    );
}

#[test]
fn classical_plane_counts() {
    for (d, delta, want) in PLANE {
        let nc = node_count::<Rational>(delta).unwrap();
        assert!(!nc.count.is_parametric());
        assert_eq!(
            nc.count.value.eval(&plane(d)),
            rat(want),
            "d={d}, δ={delta}"
        );
    }
}

#[test]
fn two_nodes_is_tie_break_free_and_ordered_value_is_integral() {
    let limits = Limits::default();
    let a =
        node_count_with::<Rational>(2, &limits, TieBreak::Ascending, Engine::default()).unwrap();
    let b =
        node_count_with::<Rational>(2, &limits, TieBreak::Descending, Engine::default()).unwrap();
    assert_eq!(a.count, b.count);
    assert!(a.ordered.value.terms().values().all(|c| c.is_integer()));
    // Top-degree part is the square of the one-node count over 2!.
    let one = node_count::<Rational>(1).unwrap().count.value;
    let top: UniversalPoly = (&one * &one).scale(&(rat(1) / rat(2)));
    assert_eq!(a.count.value.homogeneous_part(2), top);
}

#[test]
fn delta_out_of_range() {
    assert!(matches!(
        node_count::<Rational>(0),
        Err(TauError::DeltaOutOfRange { .. })
    ));
    let tight = Limits {
        max_n: 2,
        max_delta: 2,
    };
    let r = node_count_with::<Rational>(3, &tight, TieBreak::Ascending, Engine::default());
    assert!(matches!(
        r,
        Err(TauError::DeltaOutOfRange { delta: 3, max: 2 })
    ));
}

fn arb_mult() -> impl Strategy<Value = Multiplicity> {
    prop::collection::vec(1i64..5, 1..=4).prop_map(|mut v| {
        v.sort();
        Multiplicity::new(v).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn persistence_refines_containment(m in arb_mult()) {
        let ctx = OrderingContext::new(&m).unwrap();
        for a in 0..ctx.delta.len() {
            for b in 0..ctx.delta.len() {
                if ctx.gg(a, b) {
                    prop_assert!(succ(&ctx.delta[a], &ctx.delta[b]));
                    prop_assert!(!ctx.sq(a, b));
                    prop_assert!(ctx.position(b) < ctx.position(a) || a == b);
                }
            }
        }
    }

    #[test]
    fn trivial_graph_is_last(m in arb_mult()) {
        let ctx = OrderingContext::new(&m).unwrap();
        let top = ctx.index_of(&AdmissibleGraph::empty(m.len())).unwrap();
        prop_assert_eq!(ctx.position(top), ctx.delta.len() - 1);
    }
}
