//! Graded expressions on the universal space `M_n`.
//!
//! Generators, with their codimension:
//!
//! | symbol      | meaning                              | grade |
//! |-------------|--------------------------------------|-------|
//! | `h_i`       | `π_i^* C`                            | 1     |
//! | `k_i`       | `π_i^* K_M`                          | 1     |
//! | `p_i`       | `π_i^* [pt]`                         | 2     |
//! | `x_{a;b}`   | exceptional divisor `E_{a;b}`, a < b | 1     |
//! | `q_i`       | unresolved line-bundle parameter     | 1     |
//!
//! Coefficients may also carry the Chern numbers `L², L·K, K², c₂` of the
//! surface as grade-zero symbols. Products inside one surface factor are
//! reduced on the spot (`h_i² = L²·p_i`, `h_i k_i = L·K·p_i`,
//! `k_i² = K²·p_i`, `π_i^* c₂(M) = c₂·p_i`, anything times `p_i` beyond that
//! vanishes). This is the numerical ring: top-degree integrals do not see
//! numerically trivial classes, and those form an ideal stable under
//! pullback, pushforward and restriction to sections.

mod bundles;
mod pushforward;

pub use bundles::{class_of_stratum, line_class, obstruction_total_chern, relative_tangent};
pub use pushforward::{
    fiber_euler_check, fiber_euler_check_with, BlowdownRules, ChowError, Engine,
};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::poly::{UPoly, VAR_NAMES};
use crate::scalar::Scalar;

/// State of one surface factor after reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Factor {
    One = 0,
    H = 1,
    K = 2,
    P = 3,
}

impl Factor {
    pub fn grade(self) -> u32 {
        match self {
            Factor::One => 0,
            Factor::H | Factor::K => 1,
            Factor::P => 2,
        }
    }

    fn from_u8(v: u8) -> Factor {
        match v {
            0 => Factor::One,
            1 => Factor::H,
            2 => Factor::K,
            _ => Factor::P,
        }
    }

    /// Product inside one factor: the resulting state and the numeric
    /// variable it produced, or `None` when it vanishes.
    fn mul(self, other: Factor) -> Option<(Factor, Option<usize>)> {
        use Factor::*;
        match (self, other) {
            (One, f) | (f, One) => Some((f, None)),
            (H, H) => Some((P, Some(0))),
            (H, K) | (K, H) => Some((P, Some(1))),
            (K, K) => Some((P, Some(2))),
            _ => None,
        }
    }
}

/// Number of exceptional divisors on `M_n`.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Slot of `x_{a;b}` (one-based, `a < b`), ordered by `b` then `a`.
pub fn pair_index(a: usize, b: usize) -> usize {
    debug_assert!(1 <= a && a < b);
    (b - 1) * (b - 2) / 2 + (a - 1)
}

/// Exponent vector of a monomial on `M_n`:
/// `n` factor states, `n` parameter exponents, the `x` exponents, and the
/// four numeric exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(Vec<u8>);

impl Mono {
    pub fn unit(n: usize) -> Mono {
        Mono(vec![0; 2 * n + pair_count(n) + 4])
    }

    fn n(&self) -> usize {
        // len = 2n + n(n-1)/2 + 4
        let mut n = 0;
        while 2 * n + pair_count(n) + 4 < self.0.len() {
            n += 1;
        }
        n
    }

    pub fn factor(&self, i: usize) -> Factor {
        Factor::from_u8(self.0[i - 1])
    }

    pub fn set_factor(&mut self, i: usize, f: Factor) {
        self.0[i - 1] = f as u8;
    }

    pub fn q(&self, n: usize, i: usize) -> u8 {
        self.0[n + i - 1]
    }

    pub fn set_q(&mut self, n: usize, i: usize, e: u8) {
        self.0[n + i - 1] = e;
    }

    pub fn x(&self, n: usize, a: usize, b: usize) -> u8 {
        self.0[2 * n + pair_index(a, b)]
    }

    pub fn set_x(&mut self, n: usize, a: usize, b: usize, e: u8) {
        self.0[2 * n + pair_index(a, b)] = e;
    }

    pub fn numeric(&self) -> [u32; 4] {
        let l = self.0.len();
        [
            self.0[l - 4] as u32,
            self.0[l - 3] as u32,
            self.0[l - 2] as u32,
            self.0[l - 1] as u32,
        ]
    }

    pub fn set_numeric(&mut self, e: [u32; 4]) {
        let l = self.0.len();
        for (k, v) in e.iter().enumerate() {
            self.0[l - 4 + k] = u8::try_from(*v).expect("numeric exponent overflow");
        }
    }

    pub fn has_parameters(&self, n: usize) -> bool {
        self.0[n..2 * n].iter().any(|&e| e > 0)
    }

    pub fn grade(&self, n: usize) -> u32 {
        let f: u32 = self.0[..n]
            .iter()
            .map(|&s| Factor::from_u8(s).grade())
            .sum();
        let rest: u32 = self.0[n..self.0.len() - 4].iter().map(|&e| e as u32).sum();
        f + rest
    }

    /// Product, or `None` if it vanishes.
    pub fn mul(&self, other: &Mono, n: usize) -> Option<Mono> {
        let mut out = self.0.clone();
        let l = out.len();
        for i in 0..n {
            let (f, num) = Factor::from_u8(self.0[i]).mul(Factor::from_u8(other.0[i]))?;
            out[i] = f as u8;
            if let Some(v) = num {
                out[l - 4 + v] += 1;
            }
        }
        for (o, e) in out[n..].iter_mut().zip(&other.0[n..]) {
            *o += e;
        }
        Some(Mono(out))
    }

    fn fmt_with(&self, n: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let pw = |s: String, e: u8| if e == 1 { s } else { format!("{s}^{e}") };
        for (k, name) in VAR_NAMES.iter().enumerate() {
            let e = self.numeric()[k];
            if e > 0 {
                parts.push(pw(name.to_string(), e as u8));
            }
        }
        for i in 1..=n {
            match self.factor(i) {
                Factor::One => {}
                Factor::H => parts.push(format!("h{i}")),
                Factor::K => parts.push(format!("k{i}")),
                Factor::P => parts.push(format!("p{i}")),
            }
        }
        for i in 1..=n {
            let e = self.q(n, i);
            if e > 0 {
                parts.push(pw(format!("q{i}"), e));
            }
        }
        for b in 2..=n {
            for a in 1..b {
                let e = self.x(n, a, b);
                if e > 0 {
                    parts.push(pw(format!("x{a}{b}"), e));
                }
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Formal `ℚ`-combination of monomials on `M_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr<S> {
    n: usize,
    terms: BTreeMap<Mono, S>,
}

impl<S: Scalar> Expr<S> {
    pub fn zero(n: usize) -> Self {
        Expr {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: S) -> Self {
        let mut e = Self::zero(n);
        e.add_term(Mono::unit(n), c);
        e
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, S::one())
    }

    /// Embed a polynomial in the Chern numbers as a grade-zero class.
    pub fn numeric(n: usize, p: &UPoly<S>) -> Self {
        let mut e = Self::zero(n);
        for (exp, c) in p.terms() {
            let mut m = Mono::unit(n);
            m.set_numeric(*exp);
            e.add_term(m, c.clone());
        }
        e
    }

    fn factor_gen(n: usize, i: usize, f: Factor) -> Self {
        assert!(1 <= i && i <= n, "factor index {i} out of range for n={n}");
        let mut m = Mono::unit(n);
        m.set_factor(i, f);
        let mut e = Self::zero(n);
        e.add_term(m, S::one());
        e
    }

    /// `π_i^* C`.
    pub fn h(n: usize, i: usize) -> Self {
        Self::factor_gen(n, i, Factor::H)
    }

    /// `π_i^* K_M`.
    pub fn k(n: usize, i: usize) -> Self {
        Self::factor_gen(n, i, Factor::K)
    }

    /// `π_i^* [pt]`.
    pub fn p(n: usize, i: usize) -> Self {
        Self::factor_gen(n, i, Factor::P)
    }

    /// `π_i^* c₂(M)`, i.e. `c₂ · p_i`.
    pub fn c2(n: usize, i: usize) -> Self {
        let mut m = Mono::unit(n);
        m.set_factor(i, Factor::P);
        m.set_numeric([0, 0, 0, 1]);
        let mut e = Self::zero(n);
        e.add_term(m, S::one());
        e
    }

    /// `E_{a;b}`.
    pub fn x(n: usize, a: usize, b: usize) -> Self {
        assert!(1 <= a && a < b && b <= n, "bad pair ({a},{b}) for n={n}");
        let mut m = Mono::unit(n);
        m.set_x(n, a, b, 1);
        let mut e = Self::zero(n);
        e.add_term(m, S::one());
        e
    }

    /// Symbolic parameter `q_i`.
    pub fn q(n: usize, i: usize) -> Self {
        let mut m = Mono::unit(n);
        m.set_q(n, i, 1);
        let mut e = Self::zero(n);
        e.add_term(m, S::one());
        e
    }

    pub fn from_mono(n: usize, m: Mono, c: S) -> Self {
        debug_assert_eq!(m.n(), n);
        let mut e = Self::zero(n);
        e.add_term(m, c);
        e
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Mono, S> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                *slot = slot.clone() + c;
                if slot.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.n);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn max_grade(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.grade(self.n)).max()
    }

    /// Homogeneous component of grade `g`.
    pub fn grade_part(&self, g: u32) -> Self {
        let mut out = Self::zero(self.n);
        for (m, v) in &self.terms {
            if m.grade(self.n) == g {
                out.add_term(m.clone(), v.clone());
            }
        }
        out
    }

    /// Drop every component above grade `g`.
    pub fn truncate(&self, g: u32) -> Self {
        let mut out = Self::zero(self.n);
        for (m, v) in &self.terms {
            if m.grade(self.n) <= g {
                out.add_term(m.clone(), v.clone());
            }
        }
        out
    }

    pub fn has_parameters(&self) -> bool {
        self.terms.keys().any(|m| m.has_parameters(self.n))
    }

    /// Product keeping only grades `<= max_grade`.
    pub fn mul_trunc(&self, other: &Self, max_grade: u32) -> Self {
        assert_eq!(self.n, other.n, "expressions live on different spaces");
        let n = self.n;
        let rhs: Vec<(&Mono, &S, u32)> = other
            .terms
            .iter()
            .map(|(m, c)| (m, c, m.grade(n)))
            .collect();
        let mut out = Self::zero(n);
        for (a, ca) in &self.terms {
            let ga = a.grade(n);
            if ga > max_grade {
                continue;
            }
            for (b, cb, gb) in &rhs {
                if ga + gb > max_grade {
                    continue;
                }
                if let Some(m) = a.mul(b, n) {
                    out.add_term(m, ca.clone() * (*cb).clone());
                }
            }
        }
        out
    }

    pub fn pow_trunc(&self, k: u32, max_grade: u32) -> Self {
        let mut acc = Self::one(self.n);
        for _ in 0..k {
            acc = acc.mul_trunc(self, max_grade);
        }
        acc
    }

    /// The grade-zero part as a polynomial in the Chern numbers, if the
    /// expression has nothing else.
    pub fn as_numeric(&self) -> Option<UPoly<S>> {
        let mut p = UPoly::zero();
        for (m, c) in &self.terms {
            if m.grade(self.n) != 0 || m.has_parameters(self.n) {
                return None;
            }
            p.add_term(m.numeric(), c.clone());
        }
        Some(p)
    }
}

impl<S: Scalar> Add for &Expr<S> {
    type Output = Expr<S>;
    fn add(self, rhs: &Expr<S>) -> Expr<S> {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<S: Scalar> Sub for &Expr<S> {
    type Output = Expr<S>;
    fn sub(self, rhs: &Expr<S>) -> Expr<S> {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<S: Scalar> Neg for &Expr<S> {
    type Output = Expr<S>;
    fn neg(self) -> Expr<S> {
        self.scale(&-S::one())
    }
}

impl<S: Scalar> Mul for &Expr<S> {
    type Output = Expr<S>;
    fn mul(self, rhs: &Expr<S>) -> Expr<S> {
        self.mul_trunc(rhs, u32::MAX)
    }
}

impl<S: Scalar> fmt::Display for Expr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mag = c.abs();
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            m.fmt_with(self.n, f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, ChowExpr};

    #[test]
    fn factor_reduction() {
        let h = ChowExpr::h(1, 1);
        let k = ChowExpr::k(1, 1);
        let sq = &h * &h;
        assert_eq!(sq.to_string(), "L2*p1");
        assert_eq!((&h * &k).to_string(), "LK*p1");
        assert!((&sq * &h).is_zero());
        assert_eq!(ChowExpr::c2(1, 1).to_string(), "c2*p1");
    }

    #[test]
    fn ring_laws_on_samples() {
        let n = 3;
        let a = &ChowExpr::h(n, 1) + &ChowExpr::x(n, 1, 2);
        let b = &ChowExpr::k(n, 2) - &ChowExpr::x(n, 2, 3).scale(&rat(2));
        let c = &ChowExpr::p(n, 3) + &ChowExpr::one(n);
        assert_eq!(&a * &b, &b * &a);
        assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        assert_eq!(&ChowExpr::one(n) * &a, a);
        assert_eq!((&a * &b).max_grade(), Some(2));
    }

    #[test]
    fn pair_slots() {
        assert_eq!(pair_index(1, 2), 0);
        assert_eq!(pair_index(1, 3), 1);
        assert_eq!(pair_index(2, 3), 2);
        assert_eq!(pair_index(1, 4), 3);
        assert_eq!(Mono::unit(4).n(), 4);
    }
}
