//! Independent oracles and the self-check suite.
//!
//! Each check in [`run_suite`] compares a primary computation against a
//! second derivation that shares only the domain types with it. Check names
//! name the rule they pin down.

mod alt;
mod brute;

pub use alt::alt_pushforward;
pub use brute::{
    brute_force_adm, degenerates_by_search, jet_discriminant_delta1, random_top_class,
};

use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;

use crate::chow::{fiber_euler_check_with, obstruction_total_chern, Engine};
use crate::config::Limits;
use crate::graph::{degenerates, enumerate_adm, graph_from_classes, AdmissibleGraph};
use crate::lattice::{enumerate_delta, negative_indices, Multiplicity};
use crate::orderings::{OrderingContext, TieBreak};
use crate::poly::UPoly;
use crate::tau::{dimension_discrepancy, node_count_with, tau_of, AfswContext};
use crate::{rat, Rational};

/// Default seed for the randomized checks.
pub const SEED: u64 = 0x006e_6f64_616c_6973;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    fn max_n(self) -> usize {
        match self {
            Level::Quick => 3,
            Level::Full => 4,
        }
    }
}

impl FromStr for Level {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(format!("unknown level `{other}` (expected quick or full)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub check: String,
    pub inputs: String,
    pub expected: String,
    pub actual: String,
    pub verdict: Verdict,
}

impl OracleReport {
    fn new(
        check: &str,
        inputs: impl Into<String>,
        expected: impl fmt::Display,
        actual: impl fmt::Display,
    ) -> Self {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        let verdict = if expected == actual {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        OracleReport {
            check: check.to_string(),
            inputs: inputs.into(),
            expected,
            actual,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "pass" } else { "FAIL" };
        write!(f, "{tag} {} [{}]", self.check, self.inputs)?;
        if !self.passed() {
            write!(f, ": expected {}, got {}", self.expected, self.actual)?;
        }
        Ok(())
    }
}

fn list(gs: &[AdmissibleGraph]) -> String {
    gs.iter()
        .map(|g| g.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Non-decreasing multiplicity vectors of length `n` with entries in
/// `1..=top`.
pub fn multiplicity_vectors(n: usize, top: i64) -> Vec<Multiplicity> {
    fn go(n: usize, lo: i64, top: i64, cur: &mut Vec<i64>, out: &mut Vec<Multiplicity>) {
        if cur.len() == n {
            out.push(Multiplicity::new(cur.clone()).expect("non-decreasing, positive"));
            return;
        }
        for v in lo..=top {
            cur.push(v);
            go(n, v, top, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, 1, top, &mut Vec::new(), &mut out);
    out
}

/// Edge sets whose would-be type-I classes pair non-negatively and whose
/// admissibility disagrees with that.
pub fn pairing_axiom_disagreements(n: usize) -> Vec<(Vec<(usize, usize)>, bool)> {
    use crate::graph::{check_axioms, ExcClass};
    let pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|a| (a + 1..=n).map(move |b| (a, b)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let classes: Vec<ExcClass> = (1..=n)
            .map(|i| {
                let mut c = ExcClass::basis(n, i);
                for &(a, b) in &edges {
                    if a == i {
                        c = c.sub(&ExcClass::basis(n, b));
                    }
                }
                c
            })
            .collect();
        let pairs_ok = (0..n).all(|a| (a + 1..n).all(|b| classes[a].dot(&classes[b]) >= 0));
        let admissible = check_axioms(n, &edges).expect("well-formed").is_empty();
        if pairs_ok != admissible {
            out.push((edges, admissible));
        }
    }
    out
}

/// Run every check with the default engine.
pub fn run_suite(level: Level) -> Vec<OracleReport> {
    run_suite_with(level, &Engine::default())
}

/// Run every check; integrals go through `engine`, oracles do not.
pub fn run_suite_with(level: Level, engine: &Engine) -> Vec<OracleReport> {
    let top = level.max_n();
    let mut out = Vec::new();

    // Graph enumeration.
    for n in 1..=top {
        let pruned = enumerate_adm(n).expect("within bounds");
        let brute = brute_force_adm(n);
        out.push(OracleReport::new(
            "pruned-enumeration",
            format!("n={n}"),
            list(&brute),
            list(&pruned),
        ));
    }
    for n in 1..=top {
        let adm = enumerate_adm(n).expect("within bounds");
        let bad: Vec<String> = adm
            .iter()
            .flat_map(|g| {
                (1..=n).filter_map(move |i| {
                    let e = g.type_one_class(i);
                    let codim = g.fan_subgraph(i).codim() as i64;
                    (codim != -e.d_gt()).then(|| format!("{g}@{i}"))
                })
            })
            .collect();
        out.push(OracleReport::new(
            "krel-codimension",
            format!("n={n}"),
            "",
            bad.join(" "),
        ));
        let bad: Vec<String> = adm
            .iter()
            .filter(|g| graph_from_classes(&g.type_one_classes()).as_ref() != Ok(*g))
            .map(|g| g.to_string())
            .collect();
        out.push(OracleReport::new(
            "class-round-trip",
            format!("n={n}"),
            "",
            bad.join(" "),
        ));
        let mut bad = Vec::new();
        for a in &adm {
            for b in &adm {
                if degenerates(a, b) != degenerates_by_search(a, b, n as i64) {
                    bad.push(format!("{a}<{b}"));
                }
            }
        }
        out.push(OracleReport::new(
            "degeneration-unique-solve",
            format!("n={n}"),
            "",
            bad.join(" "),
        ));
        let bad: Vec<String> = pairing_axiom_disagreements(n)
            .into_iter()
            .map(|(e, adm)| format!("{e:?}:{adm}"))
            .collect();
        out.push(OracleReport::new(
            "pairing-axiom-consistency",
            format!("n={n}"),
            "",
            bad.join(" "),
        ));
    }

    // Orderings on Δ(n), m ≡ 2.
    for n in 2..=top {
        let ctx = OrderingContext::new(&Multiplicity::constant(n, 2)).expect("within bounds");
        let k = ctx.delta.len();
        let mut gg_not_succ = Vec::new();
        let mut gg_and_sq = Vec::new();
        for a in 0..k {
            for b in 0..k {
                if ctx.gg(a, b) && !ctx.succ(a, b) {
                    gg_not_succ.push(format!("{}≫{}", ctx.delta[a], ctx.delta[b]));
                }
                if ctx.gg(a, b) && ctx.sq(a, b) {
                    gg_and_sq.push(format!("{}≫⊐{}", ctx.delta[a], ctx.delta[b]));
                }
            }
        }
        out.push(OracleReport::new(
            "persistence-implies-containment",
            format!("n={n}"),
            "",
            gg_not_succ.join(" "),
        ));
        out.push(OracleReport::new(
            "persistence-excludes-breaking",
            format!("n={n}"),
            "",
            gg_and_sq.join(" "),
        ));
        let bad: Vec<String> = ctx
            .restriction_mismatches()
            .iter()
            .map(|r| format!("{}/{}", ctx.delta[r.gamma], ctx.delta[r.gamma_bar]))
            .collect();
        out.push(OracleReport::new(
            "index-set-restriction",
            format!("n={n}"),
            "",
            bad.join(" "),
        ));
    }

    // Chow engine.
    for n in 0..top {
        let expected = UPoly::from_terms([([0, 0, 0, 1], rat(1)), ([0, 0, 0, 0], rat(n as i64))]);
        let actual: UPoly<Rational> = fiber_euler_check_with(n, engine);
        out.push(OracleReport::new(
            "relative-tangent-euler",
            format!("n={n}"),
            expected,
            actual,
        ));
    }
    let mut rng = StdRng::seed_from_u64(SEED);
    for n in 2..=3 {
        let mut bad = 0;
        let mut first = String::new();
        for _ in 0..100 {
            let e = random_top_class(n, &mut rng);
            let a = engine.pushforward_to_point(&e).expect("no parameters");
            let b = alt_pushforward(&e);
            if a != b {
                if bad == 0 {
                    first = format!(" first: {e} -> {a} vs {b}");
                }
                bad += 1;
            }
        }
        out.push(OracleReport::new(
            "blowdown-rules-vs-stagewise",
            format!("n={n}, 100 random classes, seed {SEED:#x}"),
            "0 disagreements",
            format!("{bad} disagreements{first}"),
        ));
    }
    for n in 1..=top.min(3) {
        let c = obstruction_total_chern::<Rational>(&Multiplicity::constant(n, 2));
        let a = engine.pushforward_to_point(&c).expect("no parameters");
        out.push(OracleReport::new(
            "obstruction-two-strategy",
            format!("m=2^{n}"),
            alt_pushforward(&c),
            a,
        ));
    }

    // Node counts.
    let limits = Limits::default();
    let nc1 = node_count_with::<Rational>(1, &limits, TieBreak::Ascending, *engine).expect("δ=1");
    out.push(OracleReport::new(
        "delta1-jet-bundle",
        "δ=1",
        jet_discriminant_delta1(),
        &nc1.count.value,
    ));
    for d in 2..=top.min(3) {
        let asc = node_count_with::<Rational>(d, &limits, TieBreak::Ascending, *engine)
            .expect("within bounds");
        let desc = node_count_with::<Rational>(d, &limits, TieBreak::Descending, *engine)
            .expect("within bounds");
        out.push(OracleReport::new(
            "tie-break-independence",
            format!("δ={d}"),
            &asc.count.value,
            &desc.count.value,
        ));
        let lead = nc1.count.value.clone();
        let mut power = UPoly::one();
        for _ in 0..d {
            power = &power * &lead;
        }
        let fact: i64 = (1..=d as i64).product();
        out.push(OracleReport::new(
            "leading-term-power",
            format!("δ={d}"),
            power.scale(&(rat(1) / rat(fact))),
            asc.count.value.homogeneous_part(d as u32),
        ));
    }

    // Vanishing ledger and rank compensation.
    for d in 1..=3 {
        let m = Multiplicity::constant(d, 2);
        let delta = enumerate_delta(&m).expect("within bounds");
        let bad: Vec<String> = delta
            .iter()
            .filter(|g| !g.is_empty_graph())
            .filter(|g| !tau_of::<Rational>(g, &m).expect("in Δ").zero_flag)
            .map(|g| g.to_string())
            .collect();
        out.push(OracleReport::new(
            "corrections-vanish",
            format!("δ={d}"),
            "",
            bad.join(" "),
        ));
        let ctx = AfswContext::<Rational>::new(&m, TieBreak::Ascending).expect("within bounds");
        let i = ctx
            .order
            .index_of(&AdmissibleGraph::empty(d))
            .expect("γ in Δ");
        out.push(OracleReport::new(
            "modified-equals-plain",
            format!("δ={d}"),
            ctx.mixed(i).expect("integrable").value,
            ctx.afsw_star(i).expect("integrable").value,
        ));
    }
    for n in 1..=top {
        let mut bad = Vec::new();
        let mut seen = 0;
        for m in multiplicity_vectors(n, 3) {
            for g in enumerate_delta(&m).expect("within bounds") {
                let t = tau_of::<Rational>(&g, &m).expect("in Δ");
                if t.zero_flag {
                    continue;
                }
                seen += 1;
                let classes: Vec<_> = negative_indices(&g, &m)
                    .iter()
                    .map(|&k| g.type_one_class(k))
                    .collect();
                let d = dimension_discrepancy(&classes, &m);
                if d != t.rank {
                    bad.push(format!("{g}@{m}: {d} vs {}", t.rank));
                }
            }
        }
        out.push(OracleReport::new(
            "rank-compensation",
            format!("n={n}, {seen} nonzero tau classes, m ≤ 3"),
            "",
            bad.join(" "),
        ));
    }
    out.sort_by(|a, b| (&a.check, &a.inputs).cmp(&(&b.check, &b.inputs)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let reports = run_suite(Level::Quick);
        let failed: Vec<String> = reports
            .iter()
            .filter(|r| !r.passed())
            .map(|r| r.to_string())
            .collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }
}
