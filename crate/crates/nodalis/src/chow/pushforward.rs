//! Integration over `M_n` by successive blowdowns.
//!
//! `M_l → M_{l-1}` factors as `M_{l-1} × M` blown up along the sections
//! `Z_1, ..., Z_{l-1}` (strict transforms of the diagonals `(a, l)`), in
//! that order; `x_{a;l}` is the exceptional divisor of the `a`-th blowup.
//! Pushing a class down one blowup uses
//!
//! * `p_*(x · f^*α) = 0`,
//! * `p_*(x^j · f^*α) = (-1)^{j-1} σ_a^*(α) · s_{j-2}(N_a)` for `j >= 2`,
//!
//! where `σ_a^*` restricts to `Z_a ≅ M_{l-1}` (so `h_l, k_l, p_l ↦ h_a, k_a,
//! p_a` and `x_{b;l} ↦ x_{b;a}`), and `N_a` is the normal bundle of `Z_a`:
//! `c₁ = -k_a - Σ_{b<a} x_{b;a}`, `c₂ = c₂(M)_a - Σ_{b<a} x_{b;a}²`.
//! After all blowdowns the remaining factor `M` is integrated out.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Expr, Factor, Mono};
use crate::poly::UPoly;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChowError {
    #[error("monomial {0} carries an unresolved parameter and cannot be integrated")]
    Parameter(String),
    #[error("expression lives on M_{got}, expected M_{expected}")]
    Space { expected: usize, got: usize },
}

/// Constants of the blowdown rules. The defaults are the geometric values;
/// the fields exist so that tests can perturb them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlowdownRules {
    /// Coefficient of `[Z]` in `p_*(x²)`.
    pub square: i64,
    /// Ratio between consecutive `p_*(x^j)` beyond the square.
    pub alternation: i64,
    /// Coefficient of each `x_{b;a}` in `c₁(N_a)`.
    pub normal_c1_twist: i64,
    /// Coefficient of each `x_{b;a}²` in `c₂(N_a)`.
    pub normal_c2_twist: i64,
}

impl Default for BlowdownRules {
    fn default() -> Self {
        BlowdownRules {
            square: -1,
            alternation: -1,
            normal_c1_twist: -1,
            normal_c2_twist: -1,
        }
    }
}

/// Rule-based integrator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Engine {
    pub rules: BlowdownRules,
}

/// A monomial on `M_l` split into the base `M_{l-1}` part, the state of the
/// last factor, and the exponents of `x_{1;l}, ..., x_{l-1;l}`.
type Split = (Mono, Factor, Vec<u8>);

fn split_last(m: &Mono, l: usize) -> Result<Split, ()> {
    if m.q(l, l) > 0 {
        return Err(());
    }
    let mut base = Mono::unit(l - 1);
    for i in 1..l {
        base.set_factor(i, m.factor(i));
        base.set_q(l - 1, i, m.q(l, i));
    }
    for b in 2..l {
        for a in 1..b {
            base.set_x(l - 1, a, b, m.x(l, a, b));
        }
    }
    base.set_numeric(m.numeric());
    let xs = (1..l).map(|a| m.x(l, a, l)).collect();
    Ok((base, m.factor(l), xs))
}

impl Engine {
    pub fn new(rules: BlowdownRules) -> Self {
        Engine { rules }
    }

    /// Chern classes `(c₁, c₂)` of the normal bundle of `Z_a` on `M_{l-1}`.
    fn normal_bundle<S: Scalar>(&self, base_n: usize, a: usize) -> (Expr<S>, Expr<S>) {
        let mut c1 = -&Expr::k(base_n, a);
        let mut c2 = Expr::c2(base_n, a);
        for b in 1..a {
            let x = Expr::x(base_n, b, a);
            c1 = &c1 + &x.scale(&S::from_int(self.rules.normal_c1_twist));
            c2 = &c2 + &(&x * &x).scale(&S::from_int(self.rules.normal_c2_twist));
        }
        (c1, c2)
    }

    /// Segre classes `s_0, ..., s_top` of a rank-two bundle.
    fn segre<S: Scalar>(c1: &Expr<S>, c2: &Expr<S>, top: u32) -> Vec<Expr<S>> {
        let n = c1.n();
        let mut s: Vec<Expr<S>> = vec![Expr::one(n)];
        for j in 1..=top as usize {
            // s_j = -c1 s_{j-1} - c2 s_{j-2}
            let mut next = -&(c1 * &s[j - 1]);
            if j >= 2 {
                next = &next - &(c2 * &s[j - 2]);
            }
            s.push(next);
        }
        s
    }

    /// Coefficient in `p_*(x^j) = coeff · s_{j-2}(N)`.
    fn power_coefficient(&self, j: u32) -> i64 {
        debug_assert!(j >= 2);
        self.rules.square * self.rules.alternation.pow(j - 2)
    }

    /// Push a class on `M_l` down to `M_{l-1}`.
    pub fn push_level<S: Scalar>(&self, e: &Expr<S>) -> Result<Expr<S>, ChowError> {
        let l = e.n();
        assert!(l >= 1, "nothing to push from M_0");
        let base_n = l - 1;
        let mut out = Expr::zero(base_n);
        let mut work: BTreeMap<Split, S> = BTreeMap::new();
        for (m, c) in e.terms() {
            let sp = split_last(m, l).map_err(|_| {
                ChowError::Parameter(Expr::from_mono(l, m.clone(), S::one()).to_string())
            })?;
            let slot = work.entry(sp).or_insert_with(S::zero);
            *slot = slot.clone() + c.clone();
        }
        for a in (1..l).rev() {
            let mut keep: BTreeMap<Split, S> = BTreeMap::new();
            let mut segre: Option<Vec<Expr<S>>> = None;
            for ((base, fac, xs), c) in work {
                let j = xs[a - 1];
                match j {
                    0 => {
                        let slot = keep.entry((base, fac, xs)).or_insert_with(S::zero);
                        *slot = slot.clone() + c;
                    }
                    1 => {}
                    _ => {
                        let s = segre.get_or_insert_with(|| {
                            let (c1, c2) = self.normal_bundle::<S>(base_n, a);
                            Self::segre(&c1, &c2, 2 * base_n as u32)
                        });
                        let idx = (j - 2) as usize;
                        if idx >= s.len() {
                            continue;
                        }
                        let restricted = restrict_to_section(&base, fac, &xs, a, base_n);
                        let coeff = S::from_int(self.power_coefficient(j as u32)) * c;
                        let term = &restricted * &s[idx];
                        out = &out + &term.scale(&coeff);
                    }
                }
            }
            work = keep;
        }
        for ((base, fac, xs), c) in work {
            debug_assert!(xs.iter().all(|&e| e == 0));
            if fac == Factor::P {
                out.add_term(base, c);
            }
        }
        Ok(out)
    }

    /// Integrate the grade-`2n` part of `e` over `M_n`.
    pub fn pushforward_to_point<S: Scalar>(&self, e: &Expr<S>) -> Result<UPoly<S>, ChowError> {
        let n = e.n();
        let mut cur = e.grade_part(2 * n as u32);
        for _ in 0..n {
            cur = self.push_level(&cur)?;
        }
        Ok(cur.as_numeric().expect("a point class is numeric"))
    }
}

/// `σ_a^*` of `base · (last factor state) · Π_b x_{b;l}^{xs[b]}` with the
/// `x_{a;l}` exponent ignored.
fn restrict_to_section<S: Scalar>(
    base: &Mono,
    fac: Factor,
    xs: &[u8],
    a: usize,
    base_n: usize,
) -> Expr<S> {
    let mut e = Expr::from_mono(base_n, base.clone(), S::one());
    let gen = match fac {
        Factor::One => None,
        Factor::H => Some(Expr::h(base_n, a)),
        Factor::K => Some(Expr::k(base_n, a)),
        Factor::P => Some(Expr::p(base_n, a)),
    };
    if let Some(g) = gen {
        e = &e * &g;
    }
    for b in 1..a {
        let k = xs[b - 1];
        if k > 0 {
            e = &e * &Expr::x(base_n, b, a).pow_trunc(k as u32, u32::MAX);
        }
    }
    debug_assert!(xs[a..].iter().all(|&v| v == 0));
    e
}

/// Fibre integral of `c₂` of the relative tangent bundle of
/// `M_{n+1} → M_n`; the Euler number of `M` blown up at `n` points.
pub fn fiber_euler_check<S: Scalar>(n: usize) -> UPoly<S> {
    fiber_euler_check_with(n, &Engine::default())
}

pub fn fiber_euler_check_with<S: Scalar>(n: usize, engine: &Engine) -> UPoly<S> {
    let (_, c2) = super::relative_tangent::<S>(n + 1, n + 1);
    let pushed = engine.push_level(&c2).expect("no parameters");
    pushed.as_numeric().expect("grade zero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, ChowExpr, UniversalPoly};

    fn w_plus(n: i64) -> UniversalPoly {
        UPoly::from_terms([([0, 0, 0, 1], rat(1)), ([0, 0, 0, 0], rat(n))])
    }

    #[test]
    fn euler_numbers() {
        for n in 0..=3 {
            assert_eq!(
                fiber_euler_check::<crate::Rational>(n),
                w_plus(n as i64),
                "n={n}"
            );
        }
    }

    #[test]
    fn single_factor() {
        let e = &(&(&ChowExpr::h(1, 1) * &ChowExpr::h(1, 1)).scale(&rat(3))
            + &(&ChowExpr::h(1, 1) * &ChowExpr::k(1, 1)).scale(&rat(2)))
            + &ChowExpr::c2(1, 1);
        let p = Engine::default().pushforward_to_point(&e).unwrap();
        assert_eq!(p.to_string(), "3*L2 + 2*LK + c2");
        assert!(Engine::default()
            .pushforward_to_point(&ChowExpr::one(2))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn square_of_exceptional_on_m2() {
        // x² pushes to minus the diagonal; against h1 h2 this is -L².
        let n = 2;
        let x = ChowExpr::x(n, 1, 2);
        let e = &(&x * &x) * &(&ChowExpr::h(n, 1) * &ChowExpr::h(n, 2));
        let p = Engine::default().pushforward_to_point(&e).unwrap();
        assert_eq!(p.to_string(), "-L2");
        // x⁴ pushes to -s_2(T_M) = -(K² - c₂).
        let x4 = x.pow_trunc(4, 4);
        let p = Engine::default().pushforward_to_point(&x4).unwrap();
        assert_eq!(p.to_string(), "-K2 + c2");
    }

    #[test]
    fn parameters_are_rejected() {
        let e = &ChowExpr::q(1, 1) * &ChowExpr::h(1, 1);
        assert!(matches!(
            Engine::default().pushforward_to_point(&e),
            Err(ChowError::Parameter(_))
        ));
    }
}
