use nodalis::chow::{
    class_of_stratum, fiber_euler_check, fiber_euler_check_with, BlowdownRules, Engine, Expr,
};
use nodalis::config::Limits;
use nodalis::lattice::Multiplicity;
use nodalis::oracle::{alt_pushforward, random_top_class, run_suite_with, Level};
use nodalis::orderings::TieBreak;
use nodalis::poly::UPoly;
use nodalis::tau::node_count_with;
use nodalis::{rat, AdmissibleGraph, ChowExpr, Rational, UniversalPoly};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn euler(n: i64) -> UniversalPoly {
    UPoly::from_terms([([0, 0, 0, 1], rat(1)), ([0, 0, 0, 0], rat(n))])
}

#[test]
fn euler_numbers_of_blowups() {
    for n in 0..=3 {
        assert_eq!(fiber_euler_check::<Rational>(n), euler(n as i64));
    }
}

#[test]
fn stratum_square_on_m2() {
    let y = class_of_stratum::<Rational>(&AdmissibleGraph::new(2, vec![(1, 2)]).unwrap());
    let e = &(&y * &y) * &(&ChowExpr::h(2, 1) * &ChowExpr::h(2, 2));
    let engine = Engine::default().pushforward_to_point(&e).unwrap();
    assert_eq!(engine, alt_pushforward(&e));
    assert_eq!(engine.to_string(), "-L2");
}

#[test]
fn obstruction_integrals_agree() {
    for m in [
        vec![2],
        vec![2, 2],
        vec![1, 3],
        vec![2, 2, 2],
        vec![1, 2, 3],
    ] {
        let m = Multiplicity::new(m).unwrap();
        let c = nodalis::chow::obstruction_total_chern::<Rational>(&m);
        assert_eq!(
            Engine::default().pushforward_to_point(&c).unwrap(),
            alt_pushforward(&c),
            "m={m}"
        );
    }
}

#[test]
fn random_classes_agree_with_stagewise_evaluator() {
    let mut rng = StdRng::seed_from_u64(7);
    for n in 2..=3 {
        for _ in 0..100 {
            let e = random_top_class(n, &mut rng);
            assert_eq!(
                Engine::default().pushforward_to_point(&e).unwrap(),
                alt_pushforward(&e),
                "{e}"
            );
        }
    }
}

fn perturbed(f: impl Fn(&mut BlowdownRules)) -> Engine {
    let mut rules = BlowdownRules::default();
    f(&mut rules);
    Engine::new(rules)
}

fn failing_checks(engine: &Engine) -> Vec<String> {
    run_suite_with(Level::Quick, engine)
        .into_iter()
        .filter(|r| !r.passed())
        .map(|r| r.check)
        .collect()
}

#[test]
fn flipped_square_breaks_euler_and_two_nodes() {
    let engine = perturbed(|r| r.square = 1);
    assert_ne!(fiber_euler_check_with::<Rational>(1, &engine), euler(1));
    let limits = Limits::default();
    // M_1 = M carries no exceptional divisor, so one node cannot see the rule.
    let one = node_count_with::<Rational>(1, &limits, TieBreak::Ascending, engine).unwrap();
    assert_eq!(one.count.value.to_string(), "3*L2 + 2*LK + c2");
    let two = node_count_with::<Rational>(2, &limits, TieBreak::Ascending, engine).unwrap();
    let good =
        node_count_with::<Rational>(2, &limits, TieBreak::Ascending, Engine::default()).unwrap();
    assert_ne!(two.count.value, good.count.value);
    let failed = failing_checks(&engine);
    assert!(failed.contains(&"relative-tangent-euler".to_string()));
    assert!(failed.contains(&"obstruction-two-strategy".to_string()));
}

#[test]
fn each_rule_constant_is_pinned() {
    type Mutation = (&'static str, fn(&mut BlowdownRules));
    let mutations: [Mutation; 4] = [
        ("square", |r| r.square = 1),
        ("alternation", |r| r.alternation = 1),
        ("normal_c1_twist", |r| r.normal_c1_twist = 1),
        ("normal_c2_twist", |r| r.normal_c2_twist = 1),
    ];
    for (name, f) in mutations {
        let failed = failing_checks(&perturbed(f));
        assert!(!failed.is_empty(), "perturbing {name} went unnoticed");
        assert!(
            failed.contains(&"blowdown-rules-vs-stagewise".to_string()) || name == "square",
            "{name}: {failed:?}"
        );
    }
}

/// Small combinations of products of one or two generators on `M_3`.
fn arb_low_class() -> impl Strategy<Value = ChowExpr> {
    let n = 3;
    let gens = move |i: usize| -> ChowExpr {
        match i {
            0..=2 => ChowExpr::h(n, i + 1),
            3..=5 => ChowExpr::k(n, i - 2),
            6 => ChowExpr::p(n, 1),
            7 => ChowExpr::c2(n, 2),
            8 => ChowExpr::x(n, 1, 2),
            9 => ChowExpr::x(n, 1, 3),
            _ => ChowExpr::x(n, 2, 3),
        }
    };
    prop::collection::vec((0usize..11, 0usize..12, -3i64..4), 1..4).prop_map(move |parts| {
        let mut out = ChowExpr::zero(n);
        for (i, j, c) in parts {
            let t = if j == 11 {
                gens(i)
            } else {
                &gens(i) * &gens(j)
            };
            out = &out + &t.scale(&rat(c));
        }
        out
    })
}

fn arb_top_class() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 1usize..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn engine_matches_oracle((seed, n) in arb_top_class()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let e = random_top_class(n, &mut rng);
        prop_assert_eq!(Engine::default().pushforward_to_point(&e).unwrap(), alt_pushforward(&e));
    }

    #[test]
    fn numeric_factors_pull_out((seed, n) in arb_top_class(), a in -3i64..4, b in 0u32..3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let e = random_top_class(n, &mut rng);
        let mut exp = [0u32; 4];
        exp[(seed % 4) as usize] = b;
        let f = UPoly::from_terms([(exp, rat(a))]);
        let lhs = Engine::default().pushforward_to_point(&(&e * &Expr::numeric(n, &f))).unwrap();
        let rhs = &Engine::default().pushforward_to_point(&e).unwrap() * &f;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiplication_is_commutative_and_associative(a in arb_low_class(), b in arb_low_class(), c in arb_low_class()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn lower_grades_integrate_to_zero((seed, n) in arb_top_class()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let e = random_top_class(n, &mut rng).truncate(2 * n as u32 - 1);
        prop_assert!(Engine::default().pushforward_to_point(&e).unwrap().is_zero());
    }
}
