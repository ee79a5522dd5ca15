//! Admissible graphs and their type-I exceptional classes.
//!
//! An admissible graph on vertices `1..=n` has arrows `a -> b` only for
//! `a < b` and satisfies five axioms:
//!
//! 1. vertices are marked by `1..=n`;
//! 2. arrows point from the smaller to the larger marking;
//! 3. the only chordless loops are triangles;
//! 4. a vertex has at most two direct ascendants, and two ascendants must be
//!    joined by an edge;
//! 5. when two triangles share an edge `u -> v`, exactly one of the two
//!    remaining vertices is a direct descendant of `v`.
//!
//! Vertex `i` carries the class `e_i = E_i - Σ_{j ∈ J_i} E_j` where `J_i` is
//! its set of direct descendants.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Limits;

/// One failed axiom together with the vertices witnessing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: u8,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("malformed edge ({a},{b}) for n={n}: need 1 <= a < b <= n")]
    MalformedEdge { a: usize, b: usize, n: usize },
    #[error("duplicate edge ({a},{b})")]
    DuplicateEdge { a: usize, b: usize },
    #[error("graph violates the admissibility axioms: {0:?}")]
    Axioms(Vec<Violation>),
    #[error("n={n} exceeds the configured bound {max}")]
    TooLarge { n: usize, max: usize },
    #[error("class {index} is not of the form E_i - sum E_j with j > i: {reason}")]
    MalformedClass { index: usize, reason: String },
    #[error("classes {a} and {b} pair negatively ({value})")]
    NegativePairing { a: usize, b: usize, value: i64 },
    #[error("expected {expected} entries, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("vertex subset must be non-empty and inside 1..={n}")]
    BadSubset { n: usize },
}

/// Integer class `Σ coeffs[i] E_{i+1} + c_coeff C` in the exceptional lattice.
///
/// `E_i · E_j = -δ_ij` and `E_i · C = 0`. The self-pairing of `C` is not a
/// lattice datum, so [`ExcClass::dot`] only covers the exceptional part.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExcClass {
    pub coeffs: Vec<i64>,
    #[serde(default)]
    pub c_coeff: i64,
}

impl ExcClass {
    pub fn zero(n: usize) -> Self {
        ExcClass {
            coeffs: vec![0; n],
            c_coeff: 0,
        }
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        ExcClass { coeffs, c_coeff: 0 }
    }

    /// `E_i`, with `i` one-based.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut c = Self::zero(n);
        c.coeffs[i - 1] = 1;
        c
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    /// Exceptional part of the intersection pairing.
    pub fn dot(&self, other: &ExcClass) -> i64 {
        debug_assert_eq!(self.n(), other.n());
        -self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum::<i64>()
    }

    pub fn square(&self) -> i64 {
        self.dot(self)
    }

    /// Pairing with the relative canonical class `K_rel = Σ E_a`.
    pub fn dot_krel(&self) -> i64 {
        -self.coeffs.iter().sum::<i64>()
    }

    /// Expected dimension `(e² - K_rel·e) / 2`.
    pub fn d_gt(&self) -> i64 {
        let twice = self.square() - self.dot_krel();
        debug_assert!(twice % 2 == 0);
        twice / 2
    }

    pub fn add(&self, other: &ExcClass) -> ExcClass {
        ExcClass {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            c_coeff: self.c_coeff + other.c_coeff,
        }
    }

    pub fn sub(&self, other: &ExcClass) -> ExcClass {
        ExcClass {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            c_coeff: self.c_coeff - other.c_coeff,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c_coeff == 0 && self.coeffs.iter().all(|&c| c == 0)
    }

    /// If the class is `E_i - Σ_{j∈J} E_j` with every `j > i`, return `J`.
    pub fn type_one_descendants(&self, i: usize) -> Result<Vec<usize>, String> {
        if self.c_coeff != 0 {
            return Err("has a C component".into());
        }
        let mut out = Vec::new();
        for (pos, &c) in self.coeffs.iter().enumerate() {
            let v = pos + 1;
            match (v.cmp(&i), c) {
                (std::cmp::Ordering::Equal, 1) => {}
                (std::cmp::Ordering::Equal, _) => {
                    return Err(format!("coefficient of E_{v} is {c}"))
                }
                (std::cmp::Ordering::Less, 0) => {}
                (std::cmp::Ordering::Less, _) => {
                    return Err(format!("E_{v} with v < {i} has coefficient {c}"))
                }
                (std::cmp::Ordering::Greater, 0) => {}
                (std::cmp::Ordering::Greater, -1) => out.push(v),
                (std::cmp::Ordering::Greater, _) => {
                    return Err(format!("coefficient of E_{v} is {c}"))
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for ExcClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if self.c_coeff != 0 {
            write!(f, "{}C", self.c_coeff)?;
            first = false;
        }
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}E{}", i + 1)?;
            } else {
                write!(f, "{sign}{mag}E{}", i + 1)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Validated admissible graph. Edges are kept sorted, so the derived
/// ordering is the lexicographic order of the canonical encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AdmissibleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl<'de> Deserialize<'de> for AdmissibleGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            edges: Vec<(usize, usize)>,
        }
        let raw = Raw::deserialize(d)?;
        AdmissibleGraph::new(raw.n, raw.edges).map_err(serde::de::Error::custom)
    }
}

/// Undirected adjacency as bitmasks over zero-based vertices.
fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<u64> {
    let mut adj = vec![0u64; n];
    for &(a, b) in edges {
        adj[a - 1] |= 1 << (b - 1);
        adj[b - 1] |= 1 << (a - 1);
    }
    adj
}

fn sanitize(n: usize, edges: &[(usize, usize)]) -> Result<Vec<(usize, usize)>, GraphError> {
    if n == 0 {
        return Err(GraphError::Empty);
    }
    if n > 63 {
        return Err(GraphError::TooLarge { n, max: 63 });
    }
    let mut set = BTreeSet::new();
    for &(a, b) in edges {
        if a == 0 || a >= b || b > n {
            return Err(GraphError::MalformedEdge { a, b, n });
        }
        if !set.insert((a, b)) {
            return Err(GraphError::DuplicateEdge { a, b });
        }
    }
    Ok(set.into_iter().collect())
}

/// Validate a raw graph against axioms 1-5.
///
/// Malformed input (zero vertices, an edge that is not `1 <= a < b <= n`, a
/// repeated edge) is an `Err`; otherwise the returned list is empty exactly
/// when the graph is admissible.
pub fn check_axioms(n: usize, edges: &[(usize, usize)]) -> Result<Vec<Violation>, GraphError> {
    let edges = sanitize(n, edges)?;
    Ok(violations(n, &edges))
}

fn violations(n: usize, edges: &[(usize, usize)]) -> Vec<Violation> {
    let adj = adjacency(n, edges);
    let has = |a: usize, b: usize| adj[a - 1] >> (b - 1) & 1 == 1;
    let mut out = Vec::new();

    // Axiom 3: every induced cycle is a triangle.
    for mask in 1u64..(1u64 << n) {
        if mask.count_ones() < 4 {
            continue;
        }
        if is_induced_cycle(&adj, mask) {
            out.push(Violation {
                axiom: 3,
                vertices: bits(mask),
            });
        }
    }

    // Axiom 4.
    for v in 1..=n {
        let asc: Vec<usize> = (1..v).filter(|&u| has(u, v)).collect();
        if asc.len() > 2 || (asc.len() == 2 && !has(asc[0], asc[1])) {
            let mut vs = asc.clone();
            vs.push(v);
            out.push(Violation {
                axiom: 4,
                vertices: vs,
            });
        }
    }

    // Axiom 5, read literally: for triangles {u,v,w1} and {u,v,w2} sharing
    // the edge u -> v, exactly one of w1, w2 is a direct descendant of v.
    for &(u, v) in edges {
        let common: Vec<usize> = (1..=n)
            .filter(|&w| w != u && w != v && has(u, w) && has(v, w))
            .collect();
        for (x, &w1) in common.iter().enumerate() {
            for &w2 in &common[x + 1..] {
                let desc = [w1, w2].iter().filter(|&&w| w > v).count();
                if desc != 1 {
                    let mut vs = vec![u, v, w1, w2];
                    vs.sort_unstable();
                    out.push(Violation {
                        axiom: 5,
                        vertices: vs,
                    });
                }
            }
        }
    }
    out
}

fn bits(mask: u64) -> Vec<usize> {
    (0..64)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| i + 1)
        .collect()
}

fn is_induced_cycle(adj: &[u64], mask: u64) -> bool {
    let verts = bits(mask);
    if verts.iter().any(|&v| (adj[v - 1] & mask).count_ones() != 2) {
        return false;
    }
    // Two-regular: it is a single cycle iff connected.
    let start = verts[0] - 1;
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0u64;
        for v in bits(frontier) {
            next |= adj[v - 1] & mask;
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen == mask
}

impl AdmissibleGraph {
    /// Build and validate.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let edges = sanitize(n, &edges)?;
        let v = violations(n, &edges);
        if !v.is_empty() {
            return Err(GraphError::Axioms(v));
        }
        Ok(AdmissibleGraph { n, edges })
    }

    /// The edgeless graph `γ_n`.
    pub fn empty(n: usize) -> Self {
        assert!(n >= 1);
        AdmissibleGraph {
            n,
            edges: Vec::new(),
        }
    }

    pub(crate) fn from_sorted_unchecked(n: usize, edges: Vec<(usize, usize)>) -> Self {
        AdmissibleGraph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_empty_graph(&self) -> bool {
        self.edges.is_empty()
    }

    /// Direct descendants `J_i` (one-based `i`).
    pub fn descendants(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|e| e.0 == i)
            .map(|e| e.1)
            .collect()
    }

    /// Direct ascendants of `i`.
    pub fn ascendants(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|e| e.1 == i)
            .map(|e| e.0)
            .collect()
    }

    /// Number of one-edges.
    pub fn codim(&self) -> usize {
        self.edges.len()
    }

    pub fn type_one_class(&self, i: usize) -> ExcClass {
        let mut c = ExcClass::basis(self.n, i);
        for j in self.descendants(i) {
            c.coeffs[j - 1] = -1;
        }
        c
    }

    pub fn type_one_classes(&self) -> Vec<ExcClass> {
        (1..=self.n).map(|i| self.type_one_class(i)).collect()
    }

    /// Keep only the edges leaving `i`.
    pub fn fan_subgraph(&self, i: usize) -> AdmissibleGraph {
        let edges = self.edges.iter().copied().filter(|e| e.0 == i).collect();
        AdmissibleGraph { n: self.n, edges }
    }

    /// Every vertex has at most one direct descendant.
    pub fn is_chain_like(&self) -> bool {
        (1..=self.n).all(|i| self.descendants(i).len() <= 1)
    }

    /// Relabel `k` order-preservingly to `1..=|k|` and send `E_a` to zero for
    /// `a ∉ k`.
    pub fn restrict(&self, k: &[usize]) -> Result<AdmissibleGraph, GraphError> {
        let keep: BTreeSet<usize> = k.iter().copied().collect();
        if keep.is_empty() || keep.iter().any(|&a| a == 0 || a > self.n) {
            return Err(GraphError::BadSubset { n: self.n });
        }
        let keep: Vec<usize> = keep.into_iter().collect();
        let m = keep.len();
        let classes: Vec<ExcClass> = keep
            .iter()
            .map(|&i| {
                let e = self.type_one_class(i);
                ExcClass::from_coeffs(keep.iter().map(|&a| e.coeffs[a - 1]).collect())
            })
            .collect();
        debug_assert_eq!(classes.len(), m);
        graph_from_classes(&classes)
    }

    /// Coefficients of `v` in the basis of type-I classes of `self`.
    ///
    /// The basis is unitriangular, so the solution is unique and integral.
    pub fn coordinates(&self, v: &ExcClass) -> Vec<i64> {
        assert_eq!(v.n(), self.n);
        let mut c = vec![0i64; self.n];
        for t in 1..=self.n {
            let mut val = v.coeffs[t - 1];
            for &a in &self.ascendants(t) {
                val += c[a - 1];
            }
            c[t - 1] = val;
        }
        c
    }

    /// Canonical encoding used for deterministic tie-breaks.
    pub fn encoding(&self) -> String {
        let parts: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}>{b}")).collect();
        format!("{}:[{}]", self.n, parts.join(","))
    }
}

impl fmt::Display for AdmissibleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.edges.is_empty() {
            return write!(f, "γ{}", self.n);
        }
        let parts: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}→{b}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Rebuild the graph whose type-I classes are `classes`.
///
/// Each entry must be `E_i - Σ_{j∈J_i} E_j` with `min J_i > i`, and distinct
/// entries must pair non-negatively.
pub fn graph_from_classes(classes: &[ExcClass]) -> Result<AdmissibleGraph, GraphError> {
    let n = classes.len();
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut edges = Vec::new();
    for (idx, c) in classes.iter().enumerate() {
        if c.n() != n {
            return Err(GraphError::SizeMismatch {
                expected: n,
                got: c.n(),
            });
        }
        let i = idx + 1;
        let js = c
            .type_one_descendants(i)
            .map_err(|reason| GraphError::MalformedClass { index: i, reason })?;
        edges.extend(js.into_iter().map(|j| (i, j)));
    }
    for a in 0..n {
        for b in a + 1..n {
            let v = classes[a].dot(&classes[b]);
            if v < 0 {
                return Err(GraphError::NegativePairing {
                    a: a + 1,
                    b: b + 1,
                    value: v,
                });
            }
        }
    }
    AdmissibleGraph::new(n, edges)
}

/// `Γ_small < Γ_big`: every type-I class of `big` is a non-negative integer
/// combination of the type-I classes of `small`.
pub fn degenerates(small: &AdmissibleGraph, big: &AdmissibleGraph) -> bool {
    assert_eq!(small.n, big.n);
    big.type_one_classes()
        .iter()
        .all(|e| small.coordinates(e).iter().all(|&c| c >= 0))
}

/// All admissible graphs on `n` vertices in canonical order.
pub fn enumerate_adm(n: usize) -> Result<Vec<AdmissibleGraph>, GraphError> {
    enumerate_adm_with(n, &Limits::default())
}

pub fn enumerate_adm_with(n: usize, limits: &Limits) -> Result<Vec<AdmissibleGraph>, GraphError> {
    if n == 0 {
        return Err(GraphError::Empty);
    }
    if n > limits.max_n {
        return Err(GraphError::TooLarge {
            n,
            max: limits.max_n,
        });
    }
    // Vertices are added in increasing order; every axiom is hereditary for
    // the induced subgraph on 1..=v, so prefixes can be pruned.
    let mut partial: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for v in 2..=n {
        let mut next = Vec::new();
        for edges in &partial {
            let adj = adjacency(v, edges);
            for asc in ascendant_choices(v) {
                if asc.len() == 2 && adj[asc[0] - 1] >> (asc[1] - 1) & 1 == 0 {
                    continue;
                }
                let mut e = edges.clone();
                e.extend(asc.iter().map(|&u| (u, v)));
                e.sort_unstable();
                if violations(v, &e).is_empty() {
                    next.push(e);
                }
            }
        }
        partial = next;
    }
    let mut out: Vec<AdmissibleGraph> = partial
        .into_iter()
        .map(|e| AdmissibleGraph::from_sorted_unchecked(n, e))
        .collect();
    out.sort();
    Ok(out)
}

fn ascendant_choices(v: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for a in 1..v {
        out.push(vec![a]);
        for b in a + 1..v {
            out.push(vec![a, b]);
        }
    }
    out
}
