//! Orderings on `Δ(n)` that drive the correction recursion.
//!
//! * `Γ₁ ≻ Γ₂`: the cone of `Γ₁` lies inside the cone of `Γ₂`.
//! * `Γ ≫ Γ'`: every negative class of `Γ` persists in `Γ'`, and `Γ'` has a
//!   new negative class.
//! * `Γ ⊐ Γ'`: the two strata meet and the difference of the sums of negative
//!   classes is semi-effective there.
//! * `⊨`: the linear order obtained by repeatedly extracting a `≻`-minimal
//!   element.
//! * `⊢`: the reordering of a reduced index set by accumulations.
//!
//! The geometric conditions "the strata meet" and "semi-effective over the
//! intersection" are modelled combinatorially: two strata meet when they
//! share a degeneration in `adm(n)`, and semi-effectivity is a non-negative
//! decomposition in the cone of the chosen common degeneration.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::graph::{degenerates, enumerate_adm, graph_from_classes, AdmissibleGraph, ExcClass};
use crate::lattice::{
    cone_contains, decompose_in_cone, enumerate_delta, negative_indices, pairing_with_target,
    solve_in_span, Cone, LatticeError, Multiplicity,
};
use crate::Rational;

/// Which canonical encoding wins among simultaneously minimal elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Lexicographically least encoding first.
    #[default]
    Ascending,
    /// Lexicographically greatest encoding first.
    Descending,
}

/// `Γ₁ ≻ Γ₂`.
pub fn succ(g1: &AdmissibleGraph, g2: &AdmissibleGraph) -> bool {
    cone_contains::<Rational>(&Cone::of_graph(g1), &Cone::of_graph(g2))
}

/// `Γ ≫ Γ'`.
pub fn gg(g: &AdmissibleGraph, g2: &AdmissibleGraph, m: &Multiplicity) -> bool {
    let neg = negative_indices(g, m);
    if !neg
        .iter()
        .all(|&i| g.type_one_class(i) == g2.type_one_class(i))
    {
        return false;
    }
    negative_indices(g2, m).iter().any(|j| !neg.contains(j))
}

fn neg_sum(g: &AdmissibleGraph, m: &Multiplicity) -> ExcClass {
    negative_indices(g, m)
        .iter()
        .fold(ExcClass::zero(g.n()), |acc, &i| {
            acc.add(&g.type_one_class(i))
        })
}

/// Order `items` by repeated extraction of minimal elements, where
/// `below(a, b)` means `a` must come before `b`.
pub fn linearize<F>(items: &[AdmissibleGraph], below: F, tie: TieBreak) -> Vec<usize>
where
    F: Fn(usize, usize) -> bool,
{
    let mut rest: BTreeSet<usize> = (0..items.len()).collect();
    let mut out = Vec::with_capacity(items.len());
    while !rest.is_empty() {
        let minimal = rest
            .iter()
            .copied()
            .filter(|&a| !rest.iter().any(|&b| b != a && below(b, a)));
        let pick = match tie {
            TieBreak::Ascending => minimal.min_by(|&a, &b| items[a].cmp(&items[b])),
            TieBreak::Descending => minimal.max_by(|&a, &b| items[a].cmp(&items[b])),
        }
        .expect("a finite partial order has a minimal element");
        rest.remove(&pick);
        out.push(pick);
    }
    out
}

/// `Δ(n)` with all relations and the linear order `⊨`.
#[derive(Debug, Clone)]
pub struct OrderingContext {
    pub n: usize,
    pub m: Multiplicity,
    pub tie: TieBreak,
    /// `Δ(n)` in canonical order; relations below are indexed into it.
    pub delta: Vec<AdmissibleGraph>,
    /// `⊨` as indices into `delta`, smallest first.
    pub models: Vec<usize>,
    pos: Vec<usize>,
    adm: Vec<AdmissibleGraph>,
    succ: Vec<Vec<bool>>,
    gg: Vec<Vec<bool>>,
    common: Vec<Vec<Option<usize>>>,
    sq: Vec<Vec<bool>>,
}

/// `(I_Γ, Ī_Γ, Ī_Γ^≫)` as indices into `delta`, each in `⊨` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSets {
    pub already: Vec<usize>,
    pub reduced: Vec<usize>,
    pub reduced_gg: Vec<usize>,
}

impl OrderingContext {
    pub fn new(m: &Multiplicity) -> Result<Self, LatticeError> {
        Self::with_tie_break(m, TieBreak::Ascending)
    }

    pub fn with_tie_break(m: &Multiplicity, tie: TieBreak) -> Result<Self, LatticeError> {
        let n = m.len();
        let delta = enumerate_delta(m)?;
        let adm = enumerate_adm(n)?;
        let k = delta.len();
        let cones: Vec<Cone> = delta.iter().map(Cone::of_graph).collect();
        let succ: Vec<Vec<bool>> = (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| cone_contains::<Rational>(&cones[a], &cones[b]))
                    .collect()
            })
            .collect();
        let strict = |a: usize, b: usize| a != b && succ[a][b] && !succ[b][a];
        // b comes before a when a ≻ b strictly.
        let models = linearize(&delta, |b, a| strict(a, b), tie);
        let mut pos = vec![0; k];
        for (p, &i) in models.iter().enumerate() {
            pos[i] = p;
        }
        let gg_m: Vec<Vec<bool>> = (0..k)
            .map(|a| (0..k).map(|b| gg(&delta[a], &delta[b], m)).collect())
            .collect();

        let mut ctx = OrderingContext {
            n,
            m: m.clone(),
            tie,
            delta,
            models,
            pos,
            adm,
            succ,
            gg: gg_m,
            common: Vec::new(),
            sq: Vec::new(),
        };
        ctx.common = (0..k)
            .map(|a| (0..k).map(|b| ctx.pick_common_degeneration(a, b)).collect())
            .collect();
        ctx.sq = (0..k)
            .map(|a| (0..k).map(|b| ctx.compute_sq(a, b)).collect())
            .collect();
        Ok(ctx)
    }

    pub fn index_of(&self, g: &AdmissibleGraph) -> Option<usize> {
        self.delta.binary_search(g).ok()
    }

    /// Position of `delta[i]` in `⊨`.
    pub fn position(&self, i: usize) -> usize {
        self.pos[i]
    }

    pub fn models_graphs(&self) -> Vec<&AdmissibleGraph> {
        self.models.iter().map(|&i| &self.delta[i]).collect()
    }

    pub fn succ(&self, a: usize, b: usize) -> bool {
        self.succ[a][b]
    }

    pub fn gg(&self, a: usize, b: usize) -> bool {
        self.gg[a][b]
    }

    pub fn sq(&self, a: usize, b: usize) -> bool {
        self.sq[a][b]
    }

    /// Whether `delta[a]` and `delta[b]` share a degeneration in `adm(n)`.
    pub fn meets(&self, a: usize, b: usize) -> bool {
        self.common[a][b].is_some()
    }

    /// The chosen common degeneration of `delta[a]` and `delta[b]`.
    pub fn common_degeneration(&self, a: usize, b: usize) -> Option<&AdmissibleGraph> {
        self.common[a][b].map(|w| &self.adm[w])
    }

    /// The `⊨`-least common degeneration. Witnesses inside `Δ(n)` are
    /// compared by `⊨`; otherwise the first element of the same
    /// minimal-extraction rule applied to the witnesses is taken.
    fn pick_common_degeneration(&self, a: usize, b: usize) -> Option<usize> {
        let (ga, gb) = (&self.delta[a], &self.delta[b]);
        let witnesses: Vec<usize> = (0..self.adm.len())
            .filter(|&w| degenerates(&self.adm[w], ga) && degenerates(&self.adm[w], gb))
            .collect();
        if witnesses.is_empty() {
            return None;
        }
        let in_delta = witnesses
            .iter()
            .filter_map(|&w| self.index_of(&self.adm[w]).map(|d| (self.pos[d], w)))
            .min();
        if let Some((_, w)) = in_delta {
            return Some(w);
        }
        let graphs: Vec<AdmissibleGraph> = witnesses.iter().map(|&w| self.adm[w].clone()).collect();
        let below = |x: usize, y: usize| {
            x != y && succ(&graphs[y], &graphs[x]) && !succ(&graphs[x], &graphs[y])
        };
        let order = linearize(&graphs, below, self.tie);
        Some(witnesses[order[0]])
    }

    fn compute_sq(&self, a: usize, b: usize) -> bool {
        let Some(w) = self.common[a][b] else {
            return false;
        };
        let diff = neg_sum(&self.delta[a], &self.m).sub(&neg_sum(&self.delta[b], &self.m));
        diff.is_zero()
            || decompose_in_cone::<Rational>(&diff, &Cone::of_graph(&self.adm[w])).is_member()
    }

    /// `(I_Γ, Ī_Γ, Ī_Γ^≫)` for `Γ = delta[g]`.
    pub fn index_sets(&self, g: usize) -> IndexSets {
        let already: Vec<usize> = self.models[..self.pos[g]].to_vec();
        let reduced: Vec<usize> = already
            .iter()
            .copied()
            .filter(|&b| self.meets(g, b))
            .filter(|&b| !already.iter().any(|&c| self.gg[c][b]))
            .collect();
        let reduced_gg = reduced.iter().copied().filter(|&b| self.gg[g][b]).collect();
        IndexSets {
            already,
            reduced,
            reduced_gg,
        }
    }

    /// `Ī_Γ` sorted by `⊢`, smallest first.
    pub fn vdash_order(&self, g: usize) -> Vec<usize> {
        let sets = self.index_sets(g);
        let mut keyed: Vec<(bool, usize, usize, usize)> = sets
            .reduced
            .iter()
            .map(|&b| {
                let persists = sets.reduced_gg.contains(&b);
                let acc_min = if persists {
                    self.pos[b]
                } else {
                    sets.already
                        .iter()
                        .filter(|&&c| self.gg[b][c])
                        .map(|&c| self.pos[c])
                        .min()
                        .unwrap_or(self.pos[b])
                };
                (persists, acc_min, self.pos[b], b)
            })
            .collect();
        keyed.sort();
        keyed.into_iter().map(|t| t.3).collect()
    }

    /// The intermediate graph `Γ''` with `Γ ⊐ Γ''` and `Γ'' ≫ Γ'`, built from
    /// the classes of `Γ'` used to decompose the negative classes of `Γ` that
    /// do not survive in `Γ'`. `None` when `Γ ≫ Γ'` or when no such
    /// decomposition exists.
    pub fn intermediate_graph(
        &self,
        g: &AdmissibleGraph,
        g2: &AdmissibleGraph,
    ) -> Option<AdmissibleGraph> {
        intermediate_graph(g, g2, &self.m)
    }

    /// Pairs `(Γ, Γ̄)` with `Γ̄ ∈ Ī_Γ^≫` where `Ī_{Γ̄}` differs from
    /// `{Γ' ∈ Ī_Γ : Γ' meets Γ̄, Γ' ⊨-below Γ̄}`.
    pub fn restriction_mismatches(&self) -> Vec<RestrictionMismatch> {
        let mut out = Vec::new();
        for g in 0..self.delta.len() {
            let sets = self.index_sets(g);
            for &bar in &sets.reduced_gg {
                let mut expected: Vec<usize> = sets
                    .reduced
                    .iter()
                    .copied()
                    .filter(|&b| self.meets(bar, b) && self.pos[b] < self.pos[bar])
                    .collect();
                let mut actual = self.index_sets(bar).reduced;
                expected.sort();
                actual.sort();
                if expected != actual {
                    out.push(RestrictionMismatch {
                        gamma: g,
                        gamma_bar: bar,
                        expected,
                        actual,
                    });
                }
            }
        }
        out
    }

    /// Relation dump for the command-line front end.
    pub fn to_json(&self) -> Value {
        let k = self.delta.len();
        let mat = |f: &dyn Fn(usize, usize) -> bool| -> Value {
            Value::Array(
                (0..k)
                    .map(|a| Value::Array((0..k).map(|b| json!(f(a, b) as u8)).collect()))
                    .collect(),
            )
        };
        let reduced: Vec<Value> = (0..k)
            .map(|g| {
                let s = self.index_sets(g);
                json!({
                    "graph": self.delta[g],
                    "I": s.already.iter().map(|&i| &self.delta[i]).collect::<Vec<_>>(),
                    "I_bar": s.reduced.iter().map(|&i| &self.delta[i]).collect::<Vec<_>>(),
                    "I_bar_gg": s.reduced_gg.iter().map(|&i| &self.delta[i]).collect::<Vec<_>>(),
                    "vdash": self.vdash_order(g).iter().map(|&i| &self.delta[i]).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "n": self.n,
            "mult": self.m.values(),
            "delta": self.delta,
            "models": self.models_graphs(),
            "succ": mat(&|a, b| self.succ[a][b]),
            "gg": mat(&|a, b| self.gg[a][b]),
            "sq": mat(&|a, b| self.sq[a][b]),
            "index_sets": reduced,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionMismatch {
    pub gamma: usize,
    pub gamma_bar: usize,
    pub expected: Vec<usize>,
    pub actual: Vec<usize>,
}

/// Free-standing form of [`OrderingContext::intermediate_graph`].
pub fn intermediate_graph(
    g: &AdmissibleGraph,
    g2: &AdmissibleGraph,
    m: &Multiplicity,
) -> Option<AdmissibleGraph> {
    if gg(g, g2, m) {
        return None;
    }
    let n = g.n();
    let targets = g2.type_one_classes();
    let broken: Vec<ExcClass> = negative_indices(g, m)
        .into_iter()
        .map(|i| g.type_one_class(i))
        .filter(|e| !targets.contains(e))
        .collect();
    if broken.is_empty() {
        return None;
    }
    let mut used = BTreeSet::new();
    for e in &broken {
        let coeffs = solve_in_span::<Rational>(e, &targets)?;
        if coeffs.iter().any(Signed::is_negative) {
            return None;
        }
        used.extend(
            coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, _)| j),
        );
    }
    let classes: Vec<ExcClass> = (0..n)
        .map(|j| {
            if used.contains(&j) && pairing_with_target(&targets[j], m) < 0 {
                targets[j].clone()
            } else {
                ExcClass::basis(n, j + 1)
            }
        })
        .collect();
    graph_from_classes(&classes).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, e: &[(usize, usize)]) -> AdmissibleGraph {
        AdmissibleGraph::new(n, e.to_vec()).unwrap()
    }

    #[test]
    fn models_examples() {
        let ctx = OrderingContext::new(&Multiplicity::constant(2, 2)).unwrap();
        assert_eq!(ctx.models_graphs(), vec![&AdmissibleGraph::empty(2)]);
        let ctx = OrderingContext::new(&Multiplicity::constant(3, 2)).unwrap();
        assert_eq!(
            ctx.models_graphs(),
            vec![&g(3, &[(1, 2), (1, 3)]), &AdmissibleGraph::empty(3)]
        );
        let ctx = OrderingContext::new(&Multiplicity::new(vec![1, 2]).unwrap()).unwrap();
        assert_eq!(
            ctx.models_graphs(),
            vec![&g(2, &[(1, 2)]), &AdmissibleGraph::empty(2)]
        );
    }

    #[test]
    fn gg_examples() {
        let m = Multiplicity::constant(3, 2);
        let fan = g(3, &[(1, 2), (1, 3)]);
        let g3 = AdmissibleGraph::empty(3);
        assert!(gg(&g3, &fan, &m));
        assert!(!gg(&fan, &g3, &m));
        assert!(!gg(&fan, &fan, &m));
    }

    #[test]
    fn figure_five_pair() {
        // Fan at 1 persists while a new fan appears at 2.
        let m = Multiplicity::constant(5, 2);
        let a = g(5, &[(1, 2), (1, 3)]);
        let b = g(5, &[(1, 2), (1, 3), (2, 4), (2, 5)]);
        assert!(gg(&a, &b, &m));
        assert!(succ(&a, &b));
    }

    #[test]
    fn index_sets_of_gamma3() {
        let ctx = OrderingContext::new(&Multiplicity::constant(3, 2)).unwrap();
        let top = ctx.index_of(&AdmissibleGraph::empty(3)).unwrap();
        let fan = ctx.index_of(&g(3, &[(1, 2), (1, 3)])).unwrap();
        let s = ctx.index_sets(top);
        assert_eq!(s.already, vec![fan]);
        assert_eq!(s.reduced, vec![fan]);
        assert_eq!(s.reduced_gg, vec![fan]);
        let s = ctx.index_sets(fan);
        assert!(s.already.is_empty() && s.reduced.is_empty() && s.reduced_gg.is_empty());
        assert!(ctx.sq(fan, fan));
        assert!(!ctx.sq(top, fan));
    }

    #[test]
    fn intermediate_none_when_persisting() {
        let m = Multiplicity::constant(4, 2);
        let fan = g(4, &[(1, 2), (1, 3), (1, 4)]);
        assert_eq!(
            intermediate_graph(&AdmissibleGraph::empty(4), &fan, &m),
            None
        );
        assert_eq!(intermediate_graph(&fan, &fan, &m), None);
    }

    #[test]
    fn figure_seven_intermediate() {
        let m = Multiplicity::constant(7, 2);
        let a = g(7, &[(1, 2), (1, 3), (1, 7)]);
        let b = g(7, &[(1, 2), (1, 3), (1, 4), (1, 7), (2, 5), (2, 6)]);
        assert!(succ(&a, &b));
        let mid = intermediate_graph(&a, &b, &m).unwrap();
        assert_eq!(mid, g(7, &[(1, 2), (1, 3), (1, 4), (1, 7)]));
        assert!(gg(&mid, &b, &m));
    }
}
