//! Pairings against `C - M(E)E`, exceptional cones and `Δ(n)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::config::Limits;
use crate::graph::{enumerate_adm_with, graph_from_classes, AdmissibleGraph, ExcClass, GraphError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("multiplicities must be positive and non-decreasing, got {0:?}")]
    BadMultiplicity(Vec<i64>),
    #[error("graph on {graph} vertices, multiplicity vector of length {mult}")]
    LengthMismatch { graph: usize, mult: usize },
    #[error("graph {0} does not satisfy the special condition")]
    NotInDelta(String),
    #[error("class {0} does not pair negatively with C - M(E)E")]
    NotNegative(String),
    #[error("two classes are attached to vertex {0}")]
    DuplicateVertex(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `m_1 <= m_2 <= ... <= m_n`, all positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Multiplicity(Vec<i64>);

impl Multiplicity {
    pub fn new(m: Vec<i64>) -> Result<Self, LatticeError> {
        if m.is_empty() || m.iter().any(|&v| v <= 0) || m.windows(2).any(|w| w[0] > w[1]) {
            return Err(LatticeError::BadMultiplicity(m));
        }
        Ok(Multiplicity(m))
    }

    /// `(k, k, ..., k)` of length `n`.
    pub fn constant(n: usize, k: i64) -> Self {
        Multiplicity::new(vec![k; n]).expect("positive constant")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    /// `m_i`, one-based.
    pub fn get(&self, i: usize) -> i64 {
        self.0[i - 1]
    }

    /// `M(E)E = Σ m_i E_i` as a lattice vector.
    pub fn as_class(&self) -> ExcClass {
        ExcClass::from_coeffs(self.0.clone())
    }
}

impl FromStr for Multiplicity {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, LatticeError> {
        let vals: Result<Vec<i64>, _> = s.split(',').map(|t| t.trim().parse::<i64>()).collect();
        match vals {
            Ok(v) => Multiplicity::new(v),
            Err(_) => Err(LatticeError::BadMultiplicity(Vec::new())),
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `e · (C - M(E)E)` for a pure exceptional class; equals `m_i - Σ_{j∈J} m_j`
/// on `E_i - Σ_{j∈J} E_j`.
pub fn pairing_with_target(e: &ExcClass, m: &Multiplicity) -> i64 {
    debug_assert_eq!(e.c_coeff, 0);
    e.coeffs.iter().zip(m.values()).map(|(c, mi)| c * mi).sum()
}

fn check_len(g: &AdmissibleGraph, m: &Multiplicity) -> Result<(), LatticeError> {
    if g.n() != m.len() {
        return Err(LatticeError::LengthMismatch {
            graph: g.n(),
            mult: m.len(),
        });
    }
    Ok(())
}

/// Every type-I class pairs negatively with `C - M(E)E` or is a `-1` class.
pub fn special_condition(g: &AdmissibleGraph, m: &Multiplicity) -> bool {
    assert_eq!(g.n(), m.len(), "length mismatch");
    g.type_one_classes()
        .iter()
        .all(|e| pairing_with_target(e, m) < 0 || e.square() == -1)
}

/// Indices (one-based) of the classes of `g` pairing negatively.
pub fn negative_indices(g: &AdmissibleGraph, m: &Multiplicity) -> Vec<usize> {
    (1..=g.n())
        .filter(|&i| pairing_with_target(&g.type_one_class(i), m) < 0)
        .collect()
}

/// `Δ(n)` for the given multiplicities, in canonical order.
pub fn enumerate_delta(m: &Multiplicity) -> Result<Vec<AdmissibleGraph>, LatticeError> {
    enumerate_delta_with(m, &Limits::default())
}

pub fn enumerate_delta_with(
    m: &Multiplicity,
    limits: &Limits,
) -> Result<Vec<AdmissibleGraph>, LatticeError> {
    Ok(enumerate_adm_with(m.len(), limits)?
        .into_iter()
        .filter(|g| special_condition(g, m))
        .collect())
}

/// Simplicial cone spanned by lattice vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cone {
    pub n: usize,
    #[serde(serialize_with = "ser_generators")]
    pub generators: Vec<ExcClass>,
}

fn ser_generators<Se: serde::Serializer>(g: &[ExcClass], s: Se) -> Result<Se::Ok, Se::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(g.len()))?;
    for c in g {
        seq.serialize_element(&c.coeffs)?;
    }
    seq.end()
}

impl Cone {
    pub fn new(n: usize, generators: Vec<ExcClass>) -> Self {
        Cone { n, generators }
    }

    /// Cone spanned by all `n` type-I classes of `g`, without the `Δ(n)` check.
    pub fn of_graph(g: &AdmissibleGraph) -> Self {
        Cone {
            n: g.n(),
            generators: g.type_one_classes(),
        }
    }
}

/// Exceptional cone of `g`: all of its type-I classes, the `-1` classes
/// included.
pub fn cone_of(g: &AdmissibleGraph, m: &Multiplicity) -> Result<Cone, LatticeError> {
    check_len(g, m)?;
    if !special_condition(g, m) {
        return Err(LatticeError::NotInDelta(g.to_string()));
    }
    Ok(Cone::of_graph(g))
}

/// Result of expressing a vector in the generators of a cone.
#[derive(Debug, Clone, PartialEq)]
pub enum Membership<S> {
    Member(Vec<S>),
    NotMember,
}

impl<S> Membership<S> {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

/// Unique coefficients of `v` in the span of `gens`, if `v` lies in it.
///
/// Gaussian elimination over `S`; pivots are the first non-zero entry in
/// column order, so the computation is deterministic. Generators are assumed
/// linearly independent.
pub fn solve_in_span<S: Scalar>(v: &ExcClass, gens: &[ExcClass]) -> Option<Vec<S>> {
    let rows = v.n();
    let cols = gens.len();
    let mut a: Vec<Vec<S>> = (0..rows)
        .map(|r| {
            let mut row: Vec<S> = gens.iter().map(|g| S::from_int(g.coeffs[r])).collect();
            row.push(S::from_int(v.coeffs[r]));
            row
        })
        .collect();
    let mut pivots = Vec::with_capacity(cols);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = S::one() / a[r][c].clone();
        for x in a[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[r].clone();
                for (x, p) in a[i].iter_mut().zip(pivot_row) {
                    *x = x.clone() - p * f.clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if a[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut sol = vec![S::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = a[i][cols].clone();
    }
    Some(sol)
}

/// Coefficients of `v` in the cone generators, when all are non-negative.
pub fn decompose_in_cone<S: Scalar>(v: &ExcClass, cone: &Cone) -> Membership<S> {
    match solve_in_span::<S>(v, &cone.generators) {
        Some(c) if c.iter().all(|x| !x.is_negative()) => Membership::Member(c),
        _ => Membership::NotMember,
    }
}

/// `c1 ⊆ c2`.
pub fn cone_contains<S: Scalar>(c1: &Cone, c2: &Cone) -> bool {
    assert_eq!(c1.n, c2.n);
    c1.generators
        .iter()
        .all(|g| decompose_in_cone::<S>(g, c2).is_member())
}

/// The graph `Γ₀` whose non-`(-1)` classes are exactly `neg`, all other
/// vertices being free.
pub fn stratum_assignment(
    neg: &[ExcClass],
    m: &Multiplicity,
) -> Result<AdmissibleGraph, LatticeError> {
    let n = m.len();
    let mut classes: Vec<ExcClass> = (1..=n).map(|i| ExcClass::basis(n, i)).collect();
    let mut used = vec![false; n];
    for e in neg {
        if e.n() != n {
            return Err(GraphError::SizeMismatch {
                expected: n,
                got: e.n(),
            }
            .into());
        }
        if pairing_with_target(e, m) >= 0 {
            return Err(LatticeError::NotNegative(e.to_string()));
        }
        let Some(pos) = e.coeffs.iter().position(|&c| c != 0) else {
            return Err(LatticeError::NotNegative(e.to_string()));
        };
        if used[pos] {
            return Err(LatticeError::DuplicateVertex(pos + 1));
        }
        used[pos] = true;
        classes[pos] = e.clone();
    }
    let g = graph_from_classes(&classes)?;
    debug_assert!(special_condition(&g, m));
    Ok(g)
}
