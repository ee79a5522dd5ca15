//! Tau classes, mixed invariants over strata, the modified recursion and
//! node counts.
//!
//! For `Γ ∈ Δ(n)` with negative classes `e_{k_1}, ..., e_{k_p}` (`k_1 < ... <
//! k_p`) the tau class vanishes when some `e² < e·(C - M(E)E)`. Otherwise it
//! is represented by a bundle of rank
//! `Σ_l e_{k_l}·(e_{k_l} + M(E)E + Σ_{j<l} e_{k_j})`, assembled from line
//! bundles:
//!
//! * `e_{k_l}² - e_{k_l}·(C - M(E)E)` copies of a line with
//!   `c₁ = λ_{k_l} + q_{k_l}`, where `λ_l = h_l - Σ_{a<l} m_a x_{a;l}` and
//!   `q_{k_l}` is the symbolic first Chern class of the auxiliary sheaf
//!   attached to `k_l`;
//! * `e_{k_l}·e_{k_j}` copies (`j < l`) of a line with
//!   `c₁ = λ_{k_l} + q_{k_l} + x_{min;max}` on the pair `(k_j, k_l)`;
//!   a negative count divides by the line instead.
//!
//! The `q` symbols never integrate; terms carrying them are reported
//! separately as unresolved.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};
use thiserror::Error;

use crate::chow::{class_of_stratum, line_class, obstruction_total_chern, ChowError, Engine, Expr};
use crate::config::Limits;
use crate::graph::{AdmissibleGraph, ExcClass};
use crate::lattice::{
    negative_indices, pairing_with_target, special_condition, LatticeError, Multiplicity,
};
use crate::orderings::{OrderingContext, TieBreak};
use crate::poly::UPoly;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum TauError {
    #[error("{graph} is not in Δ({n}) for m = {m}")]
    NotInDelta { graph: String, n: usize, m: String },
    #[error("length mismatch: graph on {graph} vertices, {mult} multiplicities")]
    LengthMismatch { graph: usize, mult: usize },
    #[error("δ = {delta} outside 1..={max}")]
    DeltaOutOfRange { delta: usize, max: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Chow(#[from] ChowError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauClass<S> {
    pub graph: AdmissibleGraph,
    pub m: Multiplicity,
    /// Negative vertices `k_1 < ... < k_p`.
    pub negative: Vec<usize>,
    pub zero_flag: bool,
    /// Virtual rank; meaningful only when `zero_flag` is false.
    pub rank: i64,
    pub total_chern: Expr<S>,
}

/// `e·M(E)E`.
fn dot_target(e: &ExcClass, m: &Multiplicity) -> i64 {
    e.dot(&m.as_class())
}

/// `Σ_l e_{k_l}·(e_{k_l} + M(E)E + Σ_{j<l} e_{k_j})`.
pub fn rank_formula(classes: &[ExcClass], m: &Multiplicity) -> i64 {
    let mut total = 0;
    for (l, e) in classes.iter().enumerate() {
        total += e.square() + dot_target(e, m);
        total += classes[..l].iter().map(|f| e.dot(f)).sum::<i64>();
    }
    total
}

/// The expected-dimension discrepancy between the stratum count and the
/// count with the negative classes split off:
/// `Σ d_GT(e) + Σ e·M(E)E + ((Σe)² + K·Σe)/2`.
pub fn dimension_discrepancy(classes: &[ExcClass], m: &Multiplicity) -> i64 {
    let n = m.len();
    let sum = classes.iter().fold(ExcClass::zero(n), |acc, e| acc.add(e));
    let gt: i64 = classes.iter().map(ExcClass::d_gt).sum();
    let target: i64 = classes.iter().map(|e| dot_target(e, m)).sum();
    let twice = sum.square() + sum.dot_krel();
    debug_assert_eq!(twice.rem_euclid(2), 0);
    gt + target + twice / 2
}

/// `(1 + c)^k` truncated at `top`; `k < 0` uses the inverse series.
fn line_power<S: Scalar>(c: &Expr<S>, k: i64, top: u32) -> Expr<S> {
    let n = c.n();
    let one = Expr::one(n);
    if k >= 0 {
        return (&one + c).pow_trunc(k as u32, top);
    }
    let mut inv = Expr::one(n);
    let mut p = Expr::one(n);
    for _ in 0..top {
        p = p.mul_trunc(&-c, top);
        if p.is_zero() {
            break;
        }
        inv = &inv + &p;
    }
    inv.pow_trunc((-k) as u32, top)
}

pub fn tau_of<S: Scalar>(g: &AdmissibleGraph, m: &Multiplicity) -> Result<TauClass<S>, TauError> {
    let n = g.n();
    if n != m.len() {
        return Err(TauError::LengthMismatch {
            graph: n,
            mult: m.len(),
        });
    }
    if !special_condition(g, m) {
        return Err(TauError::NotInDelta {
            graph: g.to_string(),
            n,
            m: m.to_string(),
        });
    }
    let negative = negative_indices(g, m);
    let classes: Vec<ExcClass> = negative.iter().map(|&k| g.type_one_class(k)).collect();
    let zero_flag = classes
        .iter()
        .any(|e| e.square() < pairing_with_target(e, m));
    let rank = rank_formula(&classes, m);
    let total_chern = if zero_flag || negative.is_empty() {
        Expr::one(n)
    } else {
        let top = 2 * n as u32;
        let mut total = Expr::one(n);
        for (l, &k) in negative.iter().enumerate() {
            let base = &line_class::<S>(n, k, m) + &Expr::q(n, k);
            let own = classes[l].square() - pairing_with_target(&classes[l], m);
            total = total.mul_trunc(&line_power(&base, own, top), top);
            for (t, &kt) in negative[..l].iter().enumerate() {
                let d = classes[l].dot(&classes[t]);
                if d != 0 {
                    let c = &base + &Expr::x(n, kt.min(k), kt.max(k));
                    total = total.mul_trunc(&line_power(&c, d, top), top);
                }
            }
        }
        total
    };
    Ok(TauClass {
        graph: g.clone(),
        m: m.clone(),
        negative,
        zero_flag,
        rank,
        total_chern,
    })
}

/// An integral whose parameter-free part is a polynomial; terms of the top
/// grade that still carry `q` symbols are kept unintegrated.
#[derive(Debug, Clone, PartialEq)]
pub struct Invariant<S> {
    pub value: UPoly<S>,
    pub unresolved: Expr<S>,
}

impl<S: Scalar> Invariant<S> {
    pub fn zero(n: usize) -> Self {
        Invariant {
            value: UPoly::zero(),
            unresolved: Expr::zero(n),
        }
    }

    pub fn is_parametric(&self) -> bool {
        !self.unresolved.is_zero()
    }

    /// Names of the `q` symbols occurring in unresolved terms.
    pub fn parameters(&self) -> Vec<String> {
        let n = self.unresolved.n();
        let mut out = BTreeSet::new();
        for m in self.unresolved.terms().keys() {
            for i in 1..=n {
                if m.q(n, i) > 0 {
                    out.insert(i);
                }
            }
        }
        out.into_iter().map(|i| format!("q{i}")).collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        Invariant {
            value: &self.value - &other.value,
            unresolved: &self.unresolved - &other.unresolved,
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        Invariant {
            value: self.value.scale(c),
            unresolved: self.unresolved.scale(c),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.value.to_json();
        v["parametric"] = json!(self.is_parametric());
        if self.is_parametric() {
            v["parameters"] = json!(self.parameters());
            v["unresolved"] = json!(self.unresolved.to_string());
        }
        v
    }
}

fn integrate<S: Scalar>(e: &Expr<S>, engine: &Engine) -> Result<Invariant<S>, TauError> {
    let n = e.n();
    let top = e.grade_part(2 * n as u32);
    let mut plain = Expr::zero(n);
    let mut param = Expr::zero(n);
    for (m, c) in top.terms() {
        if m.has_parameters(n) {
            param.add_term(m.clone(), c.clone());
        } else {
            plain.add_term(m.clone(), c.clone());
        }
    }
    Ok(Invariant {
        value: engine.pushforward_to_point(&plain)?,
        unresolved: param,
    })
}

/// `∫_{M_n} c(τ_Γ) · c(U) · [Y(Γ)]`, zero when the tau class is flagged.
pub fn mixed_invariant<S: Scalar>(
    g: &AdmissibleGraph,
    m: &Multiplicity,
) -> Result<Invariant<S>, TauError> {
    let obstruction = obstruction_total_chern::<S>(m);
    mixed_invariant_with(g, m, &obstruction, &Engine::default())
}

fn mixed_invariant_with<S: Scalar>(
    g: &AdmissibleGraph,
    m: &Multiplicity,
    obstruction: &Expr<S>,
    engine: &Engine,
) -> Result<Invariant<S>, TauError> {
    let tau = tau_of::<S>(g, m)?;
    let n = g.n();
    if tau.zero_flag {
        return Ok(Invariant::zero(n));
    }
    let top = 2 * n as u32;
    let y = class_of_stratum::<S>(g);
    let integrand = tau
        .total_chern
        .mul_trunc(&y, top)
        .mul_trunc(obstruction, top);
    integrate(&integrand, engine)
}

/// Memoized evaluation of the modified invariants over one `Δ(n)`.
pub struct AfswContext<S> {
    pub order: OrderingContext,
    engine: Engine,
    obstruction: Expr<S>,
    memo: RefCell<BTreeMap<usize, Invariant<S>>>,
    active: RefCell<BTreeSet<usize>>,
}

impl<S: Scalar> AfswContext<S> {
    pub fn new(m: &Multiplicity, tie: TieBreak) -> Result<Self, TauError> {
        Self::with_engine(m, tie, Engine::default())
    }

    pub fn with_engine(m: &Multiplicity, tie: TieBreak, engine: Engine) -> Result<Self, TauError> {
        Ok(AfswContext {
            order: OrderingContext::with_tie_break(m, tie)?,
            engine,
            obstruction: obstruction_total_chern::<S>(m),
            memo: RefCell::new(BTreeMap::new()),
            active: RefCell::new(BTreeSet::new()),
        })
    }

    pub fn mixed(&self, i: usize) -> Result<Invariant<S>, TauError> {
        mixed_invariant_with(
            &self.order.delta[i],
            &self.order.m,
            &self.obstruction,
            &self.engine,
        )
    }

    /// Indices `j` subtracted in the recursion for `delta[i]`.
    pub fn corrections(&self, i: usize) -> Vec<usize> {
        let k = self.order.delta.len();
        if self.order.delta[i].is_empty_graph() {
            (0..k).filter(|&j| j != i).collect()
        } else {
            (0..k).filter(|&j| j != i && self.order.gg(i, j)).collect()
        }
    }

    /// `AFSW*(Γ) = mixed(Γ) - Σ_{Γ ≫ Γ'} AFSW*(Γ')`.
    pub fn afsw_star(&self, i: usize) -> Result<Invariant<S>, TauError> {
        if let Some(v) = self.memo.borrow().get(&i) {
            return Ok(v.clone());
        }
        assert!(
            self.active.borrow_mut().insert(i),
            "cycle in ≫ through {}",
            self.order.delta[i]
        );
        let mut v = self.mixed(i)?;
        for j in self.corrections(i) {
            v = v.sub(&self.afsw_star(j)?);
        }
        self.active.borrow_mut().remove(&i);
        self.memo.borrow_mut().insert(i, v.clone());
        Ok(v)
    }
}

pub fn afsw_star<S: Scalar>(
    g: &AdmissibleGraph,
    m: &Multiplicity,
) -> Result<Invariant<S>, TauError> {
    let ctx = AfswContext::<S>::new(m, TieBreak::Ascending)?;
    let i = ctx.order.index_of(g).ok_or_else(|| TauError::NotInDelta {
        graph: g.to_string(),
        n: m.len(),
        m: m.to_string(),
    })?;
    ctx.afsw_star(i)
}

/// How one stratum of `Δ(δ)` entered the node count.
#[derive(Debug, Clone, PartialEq)]
pub struct Contribution<S> {
    pub graph: AdmissibleGraph,
    pub zero_flag: bool,
    pub rank: i64,
    pub afsw_star: Invariant<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeCount<S> {
    pub delta: usize,
    /// `AFSW*(γ_δ)`, before dividing by `δ!`.
    pub ordered: Invariant<S>,
    /// `AFSW*(γ_δ) / δ!`.
    pub count: Invariant<S>,
    pub contributions: Vec<Contribution<S>>,
}

impl<S: Scalar> NodeCount<S> {
    pub fn to_json(&self) -> Value {
        let mut v = self.count.to_json();
        v["delta"] = json!(self.delta);
        v["ordered"] = self.ordered.to_json();
        v["provenance"] = Value::Array(
            self.contributions
                .iter()
                .map(|c| {
                    json!({
                        "graph": c.graph.to_string(),
                        "vanished": c.zero_flag,
                        "rank": c.rank,
                        "afsw_star": c.afsw_star.to_json(),
                    })
                })
                .collect(),
        );
        v
    }
}

pub fn node_count<S: Scalar>(delta: usize) -> Result<NodeCount<S>, TauError> {
    node_count_with(
        delta,
        &Limits::default(),
        TieBreak::Ascending,
        Engine::default(),
    )
}

pub fn node_count_with<S: Scalar>(
    delta: usize,
    limits: &Limits,
    tie: TieBreak,
    engine: Engine,
) -> Result<NodeCount<S>, TauError> {
    if delta == 0 || delta > limits.max_delta {
        return Err(TauError::DeltaOutOfRange {
            delta,
            max: limits.max_delta,
        });
    }
    let m = Multiplicity::constant(delta, 2);
    let ctx = AfswContext::<S>::with_engine(&m, tie, engine)?;
    let top = ctx
        .order
        .index_of(&AdmissibleGraph::empty(delta))
        .expect("γ_δ is in Δ(δ)");
    let ordered = ctx.afsw_star(top)?;
    let factorial = (1..=delta as i64).product::<i64>();
    let count = ordered.scale(&(S::one() / S::from_int(factorial)));
    let mut contributions = Vec::new();
    for &i in &ctx.order.models {
        let tau = tau_of::<S>(&ctx.order.delta[i], &m)?;
        contributions.push(Contribution {
            graph: ctx.order.delta[i].clone(),
            zero_flag: tau.zero_flag,
            rank: tau.rank,
            afsw_star: ctx.afsw_star(i)?,
        });
    }
    Ok(NodeCount {
        delta,
        ordered,
        count,
        contributions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, Rational};

    fn g(n: usize, e: &[(usize, usize)]) -> AdmissibleGraph {
        AdmissibleGraph::new(n, e.to_vec()).unwrap()
    }

    #[test]
    fn empty_graph_has_trivial_tau() {
        let t =
            tau_of::<Rational>(&AdmissibleGraph::empty(3), &Multiplicity::constant(3, 2)).unwrap();
        assert!(!t.zero_flag);
        assert_eq!(t.rank, 0);
        assert_eq!(t.total_chern, Expr::one(3));
    }

    #[test]
    fn fan_examples() {
        let t =
            tau_of::<Rational>(&g(3, &[(1, 2), (1, 3)]), &Multiplicity::constant(3, 2)).unwrap();
        assert!(t.zero_flag);
        let t = tau_of::<Rational>(
            &g(4, &[(1, 2), (1, 3), (1, 4)]),
            &Multiplicity::constant(4, 2),
        )
        .unwrap();
        assert!(!t.zero_flag);
        assert_eq!(t.rank, 0);
        assert_eq!(t.total_chern, Expr::one(4));
    }

    #[test]
    fn outside_delta_is_rejected() {
        let r = tau_of::<Rational>(&g(2, &[(1, 2)]), &Multiplicity::constant(2, 2));
        assert!(matches!(r, Err(TauError::NotInDelta { .. })));
    }

    #[test]
    fn rank_one_line_is_parametric() {
        let m = Multiplicity::new(vec![1, 4]).unwrap();
        let gr = g(2, &[(1, 2)]);
        let t = tau_of::<Rational>(&gr, &m).unwrap();
        assert_eq!(t.rank, 1);
        assert_eq!(t.total_chern.max_grade(), Some(1));
        let inv = mixed_invariant::<Rational>(&gr, &m).unwrap();
        assert!(inv.is_parametric());
        assert_eq!(inv.parameters(), vec!["q1".to_string()]);
    }

    #[test]
    fn delta_one() {
        let nc = node_count::<Rational>(1).unwrap();
        assert_eq!(nc.count.value.to_string(), "3*L2 + 2*LK + c2");
        assert!(!nc.count.is_parametric());
        assert_eq!(nc.contributions.len(), 1);
        assert_eq!(
            nc.count.value.eval(&[rat(4), rat(-6), rat(9), rat(3)]),
            rat(3)
        );
    }

    #[test]
    fn minimal_elements_are_not_corrected() {
        let m = Multiplicity::constant(3, 2);
        let ctx = AfswContext::<Rational>::new(&m, TieBreak::Ascending).unwrap();
        let fan = ctx.order.index_of(&g(3, &[(1, 2), (1, 3)])).unwrap();
        assert!(ctx.corrections(fan).is_empty());
        assert_eq!(ctx.afsw_star(fan).unwrap(), ctx.mixed(fan).unwrap());
        assert!(ctx.afsw_star(fan).unwrap().value.is_zero());
    }
}
