//! Second integration strategy over `M_n`, written independently of the
//! rule-based engine.
//!
//! Classes are kept with raw exponents of `h_i, k_i, p_i` per surface
//! factor (no eager reduction). A power `x^k` of the last exceptional divisor
//! is `j_*((-ζ)^{k-1})` on `E = P(N)`; the tautological class satisfies
//! `ζ² + c₁(N)ζ + c₂(N) = 0` and the fibre integral picks the coefficient of
//! `ζ`. The normal bundle of a strict transform is obtained by one
//! elementary modification per earlier blowup: along `D = x_{b;a}`,
//! `c(N') = c(N) / c(O_D ⊗ Q)` with `c₁(Q) = c₁(N)|_D - D`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::chow::{Expr, Factor};
use crate::poly::UPoly;
use crate::Rational;

/// Monomial with raw exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Term {
    /// `(h, k, p)` exponents per surface factor.
    fac: Vec<[u32; 3]>,
    /// Exponents of `x_{a;b}`.
    x: BTreeMap<(usize, usize), u32>,
    num: [u32; 4],
}

impl Term {
    fn unit(n: usize) -> Term {
        Term {
            fac: vec![[0; 3]; n],
            x: BTreeMap::new(),
            num: [0; 4],
        }
    }

    /// Grade inside one surface factor; anything above 2 is zero.
    fn fac_grade(f: &[u32; 3]) -> u32 {
        f[0] + f[1] + 2 * f[2]
    }

    fn times(&self, o: &Term) -> Option<Term> {
        let mut t = self.clone();
        for (a, b) in t.fac.iter_mut().zip(&o.fac) {
            for s in 0..3 {
                a[s] += b[s];
            }
            if Term::fac_grade(a) > 2 {
                return None;
            }
        }
        for (k, e) in &o.x {
            *t.x.entry(*k).or_insert(0) += e;
        }
        for s in 0..4 {
            t.num[s] += o.num[s];
        }
        Some(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Class {
    n: usize,
    terms: BTreeMap<Term, Rational>,
}

impl Class {
    fn zero(n: usize) -> Class {
        Class {
            n,
            terms: BTreeMap::new(),
        }
    }

    fn single(n: usize, t: Term, c: Rational) -> Class {
        let mut out = Class::zero(n);
        out.push(t, c);
        out
    }

    fn one(n: usize) -> Class {
        Class::single(n, Term::unit(n), Rational::one())
    }

    fn gen(n: usize, i: usize, slot: usize) -> Class {
        let mut t = Term::unit(n);
        t.fac[i - 1][slot] = 1;
        Class::single(n, t, Rational::one())
    }

    fn c2(n: usize, i: usize) -> Class {
        let mut t = Term::unit(n);
        t.fac[i - 1][2] = 1;
        t.num[3] = 1;
        Class::single(n, t, Rational::one())
    }

    fn xdiv(n: usize, a: usize, b: usize) -> Class {
        let mut t = Term::unit(n);
        t.x.insert((a, b), 1);
        Class::single(n, t, Rational::one())
    }

    fn push(&mut self, t: Term, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(t.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&t);
        }
    }

    fn plus(&self, o: &Class) -> Class {
        let mut out = self.clone();
        for (t, c) in &o.terms {
            out.push(t.clone(), c.clone());
        }
        out
    }

    fn scaled(&self, s: &Rational) -> Class {
        let mut out = Class::zero(self.n);
        for (t, c) in &self.terms {
            out.push(t.clone(), c * s);
        }
        out
    }

    fn minus(&self, o: &Class) -> Class {
        self.plus(&o.scaled(&-Rational::one()))
    }

    fn times(&self, o: &Class) -> Class {
        let mut out = Class::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                if let Some(t) = a.times(b) {
                    out.push(t, ca * cb);
                }
            }
        }
        out
    }
}

fn from_expr(e: &Expr<Rational>) -> Class {
    let n = e.n();
    let mut out = Class::zero(n);
    for (m, c) in e.terms() {
        assert!(!m.has_parameters(n), "parameters cannot be integrated");
        let mut t = Term::unit(n);
        for i in 1..=n {
            match m.factor(i) {
                Factor::One => {}
                Factor::H => t.fac[i - 1][0] = 1,
                Factor::K => t.fac[i - 1][1] = 1,
                Factor::P => t.fac[i - 1][2] = 1,
            }
        }
        for b in 2..=n {
            for a in 1..b {
                let k = m.x(n, a, b);
                if k > 0 {
                    t.x.insert((a, b), k as u32);
                }
            }
        }
        t.num = m.numeric();
        out.push(t, c.clone());
    }
    out
}

/// `(c₁, c₂)` of the normal bundle of the strict transform of the `a`-th
/// section on `M_{l-1}` (`base` factors).
fn normal_bundle(base: usize, a: usize) -> (Class, Class) {
    let mut c1 = Class::gen(base, a, 1).scaled(&-Rational::one());
    let mut c2 = Class::c2(base, a);
    for b in 1..a {
        let d = Class::xdiv(base, b, a);
        // c(O_D ⊗ Q) = 1 + D + D² - D·c₁(Q), c₁(Q) = c₁ - D.
        let q = c1.minus(&d);
        let u1 = d.clone();
        let u2 = d.times(&d).minus(&d.times(&q));
        // Inverse up to degree two: 1 - u1 + (u1² - u2).
        let inv1 = u1.scaled(&-Rational::one());
        let inv2 = u1.times(&u1).minus(&u2);
        let new_c1 = c1.plus(&inv1);
        let new_c2 = c2.plus(&c1.times(&inv1)).plus(&inv2);
        c1 = new_c1;
        c2 = new_c2;
    }
    (c1, c2)
}

/// Coefficient of `ζ` in `(-ζ)^{k-1}` modulo `ζ² + c₁ζ + c₂`.
fn zeta_coefficient(k: u32, c1: &Class, c2: &Class) -> Class {
    let n = c1.n;
    // a ζ + b
    let mut a = Class::zero(n);
    let mut b = Class::one(n);
    for _ in 1..k {
        // (aζ + b)(-ζ) = (a c₁ - b) ζ + a c₂
        let na = a.times(c1).minus(&b);
        let nb = a.times(c2);
        a = na;
        b = nb;
    }
    a
}

/// Move factor `l` onto factor `a` and rename `x_{b;l}` to `x_{b;a}`;
/// the result lives on `l - 1` factors.
fn restrict(t: &Term, l: usize, a: usize) -> Class {
    let base = l - 1;
    let mut out = Term::unit(base);
    out.fac.copy_from_slice(&t.fac[..base]);
    out.num = t.num;
    let moved = Term {
        fac: (1..=base)
            .map(|i| if i == a { t.fac[l - 1] } else { [0; 3] })
            .collect(),
        x: BTreeMap::new(),
        num: [0; 4],
    };
    let mut rest = Term::unit(base);
    for (&(p, q), &e) in &t.x {
        if q == l {
            assert!(p < a, "x_{{{p};{l}}} survives past its stage");
            *rest.x.entry((p, a)).or_insert(0) += e;
        } else {
            out.x.insert((p, q), e);
        }
    }
    match out.times(&moved).and_then(|t| t.times(&rest)) {
        Some(t) => Class::single(base, t, Rational::one()),
        None => Class::zero(base),
    }
}

fn push_down(c: &Class) -> Class {
    let l = c.n;
    let base = l - 1;
    let mut work = c.clone();
    let mut out = Class::zero(base);
    for a in (1..l).rev() {
        let (n1, n2) = normal_bundle(base, a);
        let mut keep = Class::zero(l);
        for (t, coeff) in &work.terms {
            let k = t.x.get(&(a, l)).copied().unwrap_or(0);
            if k == 0 {
                keep.push(t.clone(), coeff.clone());
                continue;
            }
            if k == 1 {
                continue;
            }
            let mut rest = t.clone();
            rest.x.remove(&(a, l));
            let r = restrict(&rest, l, a);
            let z = zeta_coefficient(k, &n1, &n2);
            out = out.plus(&r.times(&z).scaled(coeff));
        }
        work = keep;
    }
    // Integrate the last surface factor.
    for (t, coeff) in &work.terms {
        let f = t.fac[l - 1];
        if Term::fac_grade(&f) != 2 {
            continue;
        }
        let mut r = Term::unit(base);
        r.fac.copy_from_slice(&t.fac[..base]);
        r.x = t.x.clone();
        r.num = t.num;
        match f {
            [2, 0, 0] => r.num[0] += 1,
            [1, 1, 0] => r.num[1] += 1,
            [0, 2, 0] => r.num[2] += 1,
            [0, 0, 1] => {}
            _ => unreachable!(),
        }
        out.push(r, coeff.clone());
    }
    out
}

/// Integrate the top-grade part of `e` over `M_n`.
pub fn alt_pushforward(e: &Expr<Rational>) -> UPoly<Rational> {
    let n = e.n();
    let mut c = from_expr(e);
    c.terms.retain(|t, _| {
        let g: u32 = t.fac.iter().map(Term::fac_grade).sum::<u32>() + t.x.values().sum::<u32>();
        g == 2 * n as u32
    });
    for _ in 0..n {
        c = push_down(&c);
    }
    let mut p = UPoly::zero();
    for (t, coeff) in c.terms {
        p.add_term(t.num, coeff);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::{class_of_stratum, Engine};
    use crate::{rat, AdmissibleGraph, ChowExpr};

    #[test]
    fn matches_engine_on_small_classes() {
        let y = class_of_stratum::<Rational>(&AdmissibleGraph::new(2, vec![(1, 2)]).unwrap());
        let sq = &y * &y;
        let e = &(&sq * &ChowExpr::h(2, 1)) * &ChowExpr::k(2, 2);
        assert_eq!(
            alt_pushforward(&e),
            Engine::default().pushforward_to_point(&e).unwrap()
        );
        let x4 = y.pow_trunc(4, 4);
        assert_eq!(alt_pushforward(&x4).to_string(), "-K2 + c2");
        assert!(alt_pushforward(&ChowExpr::one(2)).is_zero());
    }

    #[test]
    fn single_factor() {
        let e = &(&ChowExpr::h(1, 1) * &ChowExpr::h(1, 1)).scale(&rat(3)) + &ChowExpr::c2(1, 1);
        assert_eq!(alt_pushforward(&e).to_string(), "3*L2 + c2");
    }
}
