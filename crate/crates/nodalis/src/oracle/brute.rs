//! Exhaustive and closed-form oracles.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chow::Expr;
use crate::graph::{check_axioms, AdmissibleGraph, ExcClass};
use crate::poly::UPoly;
use crate::{rat, Rational};

/// Every edge subset on `n` vertices that passes the axiom check, with no
/// pruning, in canonical order.
pub fn brute_force_adm(n: usize) -> Vec<AdmissibleGraph> {
    let pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|a| (a + 1..=n).map(move |b| (a, b)))
        .collect();
    assert!(pairs.len() < 32, "n too large for exhaustive search");
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if check_axioms(n, &edges)
            .expect("well-formed edges")
            .is_empty()
        {
            out.push(AdmissibleGraph::new(n, edges).expect("passed the axiom check"));
        }
    }
    out.sort();
    out
}

fn search(target: &[i64], gens: &[ExcClass], bound: i64, idx: usize, acc: &mut Vec<i64>) -> bool {
    if idx == gens.len() {
        return acc.iter().zip(target).all(|(a, t)| a == t);
    }
    for c in 0..=bound {
        for (a, g) in acc.iter_mut().zip(&gens[idx].coeffs) {
            *a += c * g;
        }
        let found = search(target, gens, bound, idx + 1, acc);
        for (a, g) in acc.iter_mut().zip(&gens[idx].coeffs) {
            *a -= c * g;
        }
        if found {
            return true;
        }
    }
    false
}

/// `small < big` by searching non-negative integer combinations with
/// coefficients up to `bound`.
pub fn degenerates_by_search(small: &AdmissibleGraph, big: &AdmissibleGraph, bound: i64) -> bool {
    let gens = small.type_one_classes();
    big.type_one_classes()
        .iter()
        .all(|e| search(&e.coeffs, &gens, bound, 0, &mut vec![0; small.n()]))
}

/// Second Chern class of `L ⊕ (L ⊗ T*M)`, the bundle of first-order jets
/// of sections of `L`, integrated over `M`.
pub fn jet_discriminant_delta1() -> UPoly<Rational> {
    // Classes on M as polynomials in (λ, K, c₂) with λ = c₁(L).
    type P = Vec<([u32; 3], i64)>;
    let mul = |a: &P, b: &P| -> P {
        let mut out: P = Vec::new();
        for (ea, ca) in a {
            for (eb, cb) in b {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                match out.iter_mut().find(|(x, _)| *x == e) {
                    Some(slot) => slot.1 += ca * cb,
                    None => out.push((e, ca * cb)),
                }
            }
        }
        out
    };
    let c_line: P = vec![([0, 0, 0], 1), ([1, 0, 0], 1)];
    // T*M has c₁ = K, c₂ = c₂; twisting a rank-two bundle by L gives
    // c₁ + 2λ and c₂ + λc₁ + λ².
    let c_twisted: P = vec![
        ([0, 0, 0], 1),
        ([1, 0, 0], 2),
        ([0, 1, 0], 1),
        ([2, 0, 0], 1),
        ([1, 1, 0], 1),
        ([0, 0, 1], 1),
    ];
    let total = mul(&c_line, &c_twisted);
    let mut out = UPoly::zero();
    for (e, c) in total {
        let var = match e {
            [2, 0, 0] => [1, 0, 0, 0],
            [1, 1, 0] => [0, 1, 0, 0],
            [0, 2, 0] => [0, 0, 1, 0],
            [0, 0, 1] => [0, 0, 0, 1],
            _ => continue,
        };
        out.add_term(var, rat(c));
    }
    out
}

/// A random combination of up to three grade-`2n` monomials on `M_n` with
/// small integer coefficients.
pub fn random_top_class<R: Rng>(n: usize, rng: &mut R) -> Expr<Rational> {
    let mut gens: Vec<(Expr<Rational>, u32)> = Vec::new();
    for i in 1..=n {
        gens.push((Expr::h(n, i), 1));
        gens.push((Expr::k(n, i), 1));
        gens.push((Expr::p(n, i), 2));
        gens.push((Expr::c2(n, i), 2));
    }
    for b in 2..=n {
        for a in 1..b {
            // Weight the exceptional divisors up: they exercise the rules.
            for _ in 0..3 {
                gens.push((Expr::x(n, a, b), 1));
            }
        }
    }
    let mut out = Expr::zero(n);
    for _ in 0..rng.gen_range(1..=3) {
        let mut mono = Expr::one(n);
        let mut grade = 0;
        while grade < 2 * n as u32 {
            let (g, d) = gens.choose(rng).expect("non-empty");
            if grade + d > 2 * n as u32 {
                continue;
            }
            mono = &mono * g;
            grade += d;
        }
        let c = rng.gen_range(-3i64..=3);
        out = &out + &mono.scale(&rat(if c == 0 { 1 } else { c }));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{degenerates, enumerate_adm};

    #[test]
    fn small_counts() {
        assert_eq!(brute_force_adm(1).len(), 1);
        assert_eq!(brute_force_adm(2).len(), 2);
        assert_eq!(brute_force_adm(3).len(), 7);
        assert_eq!(brute_force_adm(4), enumerate_adm(4).unwrap());
    }

    #[test]
    fn search_agrees_with_solve() {
        let adm = enumerate_adm(3).unwrap();
        for a in &adm {
            for b in &adm {
                assert_eq!(degenerates_by_search(a, b, 3), degenerates(a, b), "{a} {b}");
            }
        }
    }

    #[test]
    fn jet_bundle() {
        let p = jet_discriminant_delta1();
        assert_eq!(p.to_string(), "3*L2 + 2*LK + c2");
        assert_eq!(p.eval(&[rat(4), rat(-6), rat(9), rat(3)]), rat(3));
        assert_eq!(p.eval(&[rat(9), rat(-9), rat(9), rat(3)]), rat(12));
    }
}
