//! Polynomials in the four Chern numbers of a surface.
//!
//! Variables, in order: `x = L²`, `y = L·K`, `z = K²`, `w = c₂`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde_json::{json, Value};

use crate::scalar::Scalar;

pub const VAR_NAMES: [&str; 4] = ["L2", "LK", "K2", "c2"];

pub type Exponent = [u32; 4];

#[derive(Debug, Clone, PartialEq)]
pub struct UPoly<S> {
    terms: BTreeMap<Exponent, S>,
}

impl<S: Scalar> Default for UPoly<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> UPoly<S> {
    pub fn zero() -> Self {
        UPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: S) -> Self {
        let mut p = Self::zero();
        p.add_term([0; 4], c);
        p
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    /// Variable `i` (0 = x, 1 = y, 2 = z, 3 = w).
    pub fn var(i: usize) -> Self {
        let mut e = [0; 4];
        e[i] = 1;
        let mut p = Self::zero();
        p.add_term(e, S::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, S)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: Exponent, c: S) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(S::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, S> {
        &self.terms
    }

    pub fn coeff(&self, e: &Exponent) -> S {
        self.terms.get(e).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, v)| (*e, v.clone() * c.clone())))
    }

    /// Total degrees occurring, ascending.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(|e| e.iter().sum()).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// True when every term has total degree `d` (the zero polynomial counts).
    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == d)
    }

    /// Part of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (*e, c.clone())),
        )
    }

    pub fn eval(&self, at: &[S; 4]) -> S {
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in at.iter().zip(e) {
                for _ in 0..k {
                    t = t * v.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// `{"vars": [...], "terms": {"(a,b,c,d)": "p/q"}}` with sorted keys.
    pub fn to_json(&self) -> Value {
        let terms: serde_json::Map<String, Value> = self
            .terms
            .iter()
            .map(|(e, c)| {
                (
                    format!("({},{},{},{})", e[0], e[1], e[2], e[3]),
                    Value::String(c.to_string()),
                )
            })
            .collect();
        json!({ "vars": VAR_NAMES, "terms": terms })
    }
}

impl<S: Scalar> Add for &UPoly<S> {
    type Output = UPoly<S>;
    fn add(self, rhs: &UPoly<S>) -> UPoly<S> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<S: Scalar> Sub for &UPoly<S> {
    type Output = UPoly<S>;
    fn sub(self, rhs: &UPoly<S>) -> UPoly<S> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl<S: Scalar> Neg for &UPoly<S> {
    type Output = UPoly<S>;
    fn neg(self) -> UPoly<S> {
        UPoly::from_terms(self.terms.iter().map(|(e, c)| (*e, -c.clone())))
    }
}

impl<S: Scalar> Mul for &UPoly<S> {
    type Output = UPoly<S>;
    fn mul(self, rhs: &UPoly<S>) -> UPoly<S> {
        let mut out = UPoly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let e = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<S: Scalar> fmt::Display for UPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest total degree first, then lexicographically.
        let mut keys: Vec<&Exponent> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let (da, db) = (a.iter().sum::<u32>(), b.iter().sum::<u32>());
            db.cmp(&da).then(b.cmp(a))
        });
        for (idx, e) in keys.into_iter().enumerate() {
            let c = &self.terms[e];
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let vars: Vec<String> = e
                .iter()
                .zip(VAR_NAMES)
                .filter(|(k, _)| **k > 0)
                .map(|(k, name)| {
                    if *k == 1 {
                        name.to_string()
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}
