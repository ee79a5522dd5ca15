//! Stratum classes and the obstruction bundle.

use std::collections::BTreeMap;

use super::Expr;
use crate::graph::AdmissibleGraph;
use crate::lattice::Multiplicity;
use crate::scalar::Scalar;

/// `(c₁, c₂)` of the relative tangent bundle of `M_l → M_{l-1}` pulled back
/// to `M_n` (`l <= n`): `c₁ = -k_l - Σ_{a<l} x_{a;l}`,
/// `c₂ = c₂(M)_l - Σ_{a<l} x_{a;l}²`.
pub fn relative_tangent<S: Scalar>(n: usize, l: usize) -> (Expr<S>, Expr<S>) {
    let mut c1 = -&Expr::k(n, l);
    let mut c2 = Expr::c2(n, l);
    for a in 1..l {
        let x = Expr::x(n, a, l);
        c1 = &c1 - &x;
        c2 = &c2 - &(&x * &x);
    }
    (c1, c2)
}

/// `h_l - Σ_{a<l} m_a x_{a;l}`.
pub fn line_class<S: Scalar>(n: usize, l: usize, m: &Multiplicity) -> Expr<S> {
    let mut e = Expr::h(n, l);
    for a in 1..l {
        e = &e - &Expr::x(n, a, l).scale(&S::from_int(m.get(a)));
    }
    e
}

/// `[Y(Γ)]`: for each vertex `k` with descendants `j¹ < j² < ...`, the
/// product over `s` of `x_{k;j^s} - Σ_{r<s} x_{j^r;j^s}`.
pub fn class_of_stratum<S: Scalar>(g: &AdmissibleGraph) -> Expr<S> {
    let n = g.n();
    let mut out = Expr::one(n);
    for k in 1..=n {
        let js = g.descendants(k);
        for (s, &js_s) in js.iter().enumerate() {
            let mut f = Expr::x(n, k, js_s);
            for &jr in &js[..s] {
                f = &f - &Expr::x(n, jr, js_s);
            }
            out = &out * &f;
        }
    }
    out
}

type Poly3<S> = BTreeMap<[u32; 3], S>;

fn add3<S: Scalar>(p: &mut Poly3<S>, e: [u32; 3], c: S) {
    if c.is_zero() {
        return;
    }
    let slot = p.entry(e).or_insert_with(S::zero);
    *slot = slot.clone() + c;
    if slot.is_zero() {
        p.remove(&e);
    }
}

fn mul3<S: Scalar>(a: &Poly3<S>, b: &Poly3<S>) -> Poly3<S> {
    let mut out = Poly3::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            add3(
                &mut out,
                [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]],
                ca.clone() * cb.clone(),
            );
        }
    }
    out
}

/// `c(L ⊗ S^{m-1}(1 ⊕ Ω))` as a polynomial in `(λ, e₁, e₂)` where `λ = c₁(L)`
/// and `e_i = c_i(Ω)`.
///
/// The roots are `λ + iα + (d-i)β` for `0 <= i <= d < m`; the symmetric part
/// in the Chern roots `α, β` of `Ω` is rewritten in `e₁ = α+β`, `e₂ = αβ`.
pub fn symmetric_power_chern<S: Scalar>(m: i64) -> Poly3<S> {
    // Polynomial in (λ, α, β).
    let mut prod: Poly3<S> = Poly3::new();
    add3(&mut prod, [0, 0, 0], S::one());
    for d in 0..m {
        for i in 0..=d {
            let mut root = Poly3::new();
            add3(&mut root, [0, 0, 0], S::one());
            add3(&mut root, [1, 0, 0], S::one());
            add3(&mut root, [0, 1, 0], S::from_int(i));
            add3(&mut root, [0, 0, 1], S::from_int(d - i));
            prod = mul3(&prod, &root);
        }
    }
    // Rewrite in (λ, e1, e2) by peeling off leading symmetric monomials.
    let mut out = Poly3::new();
    let mut rest = prod;
    while let Some((&lead, c)) = rest.iter().max_by_key(|(e, _)| (e[1] + e[2], e[1], e[0])) {
        let c = c.clone();
        let (l, i, j) = (lead[0], lead[1], lead[2]);
        assert!(i >= j, "leading monomial of a symmetric polynomial");
        add3(&mut out, [l, i - j, j], c.clone());
        // Subtract c λ^l (α+β)^{i-j} (αβ)^j.
        let mut sub: Poly3<S> = Poly3::new();
        add3(&mut sub, [l, j, j], S::one());
        let mut e1 = Poly3::new();
        add3(&mut e1, [0, 1, 0], S::one());
        add3(&mut e1, [0, 0, 1], S::one());
        for _ in 0..(i - j) {
            sub = mul3(&sub, &e1);
        }
        for (e, v) in sub {
            add3(&mut rest, e, -(v * c.clone()));
        }
    }
    out
}

/// Total Chern class of the relative obstruction bundle
/// `⊕_l L_l ⊗ S^{m_l-1}(1 ⊕ Ω_l)` on `M_n`, truncated at grade `2n`.
///
/// `c₁(L_l) = h_l - Σ_{a<l} m_a x_{a;l}` and `Ω_l` is the relative cotangent
/// bundle at the `l`-th point.
pub fn obstruction_total_chern<S: Scalar>(m: &Multiplicity) -> Expr<S> {
    let n = m.len();
    let top = 2 * n as u32;
    let mut total = Expr::one(n);
    let mut cache: BTreeMap<i64, Poly3<S>> = BTreeMap::new();
    for l in 1..=n {
        let lam = line_class::<S>(n, l, m);
        let (t1, t2) = relative_tangent::<S>(n, l);
        let e1 = -&t1;
        let e2 = t2;
        let table = cache
            .entry(m.get(l))
            .or_insert_with(|| symmetric_power_chern(m.get(l)));
        let mut factor = Expr::zero(n);
        for (exp, c) in table.iter() {
            if exp[0] + exp[1] + 2 * exp[2] > top {
                continue;
            }
            let t = lam
                .pow_trunc(exp[0], top)
                .mul_trunc(&e1.pow_trunc(exp[1], top), top)
                .mul_trunc(&e2.pow_trunc(exp[2], top), top);
            factor = &factor + &t.scale(c);
        }
        total = total.mul_trunc(&factor, top);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::Engine;
    use crate::{rat, ChowExpr, Rational};

    #[test]
    fn stratum_examples() {
        let g = |n, e: &[(usize, usize)]| AdmissibleGraph::new(n, e.to_vec()).unwrap();
        assert_eq!(
            class_of_stratum::<Rational>(&AdmissibleGraph::empty(3)),
            ChowExpr::one(3)
        );
        assert_eq!(
            class_of_stratum::<Rational>(&g(2, &[(1, 2)])),
            ChowExpr::x(2, 1, 2)
        );
        let fan = class_of_stratum::<Rational>(&g(3, &[(1, 2), (1, 3)]));
        let expect = &ChowExpr::x(3, 1, 2) * &(&ChowExpr::x(3, 1, 3) - &ChowExpr::x(3, 2, 3));
        assert_eq!(fan, expect);
    }

    #[test]
    fn symmetric_power_small_cases() {
        // m = 1: 1 + λ.
        let t = symmetric_power_chern::<Rational>(1);
        assert_eq!(t.len(), 2);
        assert_eq!(t[&[1, 0, 0]], rat(1));
        // m = 2: (1+λ)(1 + 2λ + e1 + λ² + λe1 + e2).
        let t = symmetric_power_chern::<Rational>(2);
        let expect: &[([u32; 3], i64)] = &[
            ([0, 0, 0], 1),
            ([1, 0, 0], 3),
            ([0, 1, 0], 1),
            ([2, 0, 0], 3),
            ([1, 1, 0], 2),
            ([0, 0, 1], 1),
            ([3, 0, 0], 1),
            ([2, 1, 0], 1),
            ([1, 0, 1], 1),
        ];
        assert_eq!(t.len(), expect.len());
        for (e, c) in expect {
            assert_eq!(t[e], rat(*c), "{e:?}");
        }
    }

    #[test]
    fn obstruction_rank_one_point() {
        let one = obstruction_total_chern::<Rational>(&Multiplicity::constant(1, 1));
        assert_eq!(one, &ChowExpr::one(1) + &ChowExpr::h(1, 1));
        let two = obstruction_total_chern::<Rational>(&Multiplicity::constant(1, 2));
        let p = Engine::default().pushforward_to_point(&two).unwrap();
        assert_eq!(p.to_string(), "3*L2 + 2*LK + c2");
    }
}
