use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use nodalis::config::Limits;
use nodalis::graph::enumerate_adm_with;
use nodalis::lattice::{enumerate_delta_with, Multiplicity};
use nodalis::oracle::{run_suite, Level, Verdict};
use nodalis::orderings::{OrderingContext, TieBreak};
use nodalis::tau::{mixed_invariant, node_count_with, tau_of, AfswContext};
use nodalis::{AdmissibleGraph, Rational};

#[derive(Parser)]
#[command(
    name = "nodalis",
    version,
    about = "Node-count polynomials from admissible graphs"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List admissible graphs on n vertices.
    Graphs {
        #[arg(long)]
        n: usize,
    },
    /// Print Δ(n), the blowup order and the relations between strata.
    Order {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        mult: MultArg,
        /// Break ties by descending encoding.
        #[arg(long)]
        descending: bool,
    },
    /// Tau class data of one stratum.
    Tau(StratumArgs),
    /// Mixed and modified invariants of one stratum.
    Invariant(StratumArgs),
    /// Node-count polynomial for δ nodes.
    Count {
        #[arg(long)]
        delta: usize,
        /// Evaluate at L2=..,LK=..,K2=..,c2=..
        #[arg(long)]
        eval: Option<String>,
        #[arg(long)]
        descending: bool,
    },
    /// Run the oracle suite.
    Verify {
        #[arg(long, default_value = "quick")]
        level: Level,
    },
}

#[derive(Args)]
struct MultArg {
    /// Comma-separated non-decreasing multiplicities; defaults to all 2.
    #[arg(long)]
    mult: Option<String>,
}

#[derive(Args)]
struct StratumArgs {
    #[command(flatten)]
    mult: MultArg,
    /// Vertex count; inferred from --mult when omitted.
    #[arg(long)]
    n: Option<usize>,
    /// Edges as `a-b` pairs, comma separated; empty for the trivial graph.
    #[arg(long, default_value = "")]
    edges: String,
}

/// An error caused by the caller's input, reported with exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<E: std::fmt::Display>(e: E) -> anyhow::Error {
    anyhow::Error::new(UsageError(e.to_string()))
}

fn parse_mult(arg: &MultArg, n: usize) -> Result<Multiplicity> {
    let values = match &arg.mult {
        None => return Ok(Multiplicity::constant(n, 2)),
        Some(s) => s
            .split(',')
            .map(|v| v.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| usage(anyhow!("bad --mult `{s}`: {e}")))?,
    };
    if values.len() != n {
        return Err(usage(anyhow!(
            "--mult has {} entries, expected {n}",
            values.len()
        )));
    }
    Multiplicity::new(values).map_err(usage)
}

fn parse_edges(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (a, b) = p
                .split_once('-')
                .ok_or_else(|| usage(anyhow!("edge `{p}` is not `a-b`")))?;
            let a = a
                .trim()
                .parse()
                .map_err(|e| usage(anyhow!("edge `{p}`: {e}")))?;
            let b = b
                .trim()
                .parse()
                .map_err(|e| usage(anyhow!("edge `{p}`: {e}")))?;
            Ok((a, b))
        })
        .collect()
}

fn parse_eval(s: &str) -> Result<[Rational; 4]> {
    const NAMES: [&str; 4] = ["L2", "LK", "K2", "c2"];
    let mut out: [Option<Rational>; 4] = Default::default();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| usage(anyhow!("`{part}` is not NAME=VALUE")))?;
        let idx = NAMES.iter().position(|n| *n == k.trim()).ok_or_else(|| {
            usage(anyhow!(
                "unknown variable `{k}` (expected one of {NAMES:?})"
            ))
        })?;
        out[idx] = Some(
            v.trim()
                .parse()
                .map_err(|e| usage(anyhow!("`{part}`: {e}")))?,
        );
    }
    let mut res: [Rational; 4] = Default::default();
    for (i, v) in out.into_iter().enumerate() {
        res[i] = v.ok_or_else(|| usage(anyhow!("--eval is missing {}", NAMES[i])))?;
    }
    Ok(res)
}

fn stratum(args: &StratumArgs) -> Result<(AdmissibleGraph, Multiplicity)> {
    let n = match (args.n, &args.mult.mult) {
        (Some(n), _) => n,
        (None, Some(s)) => s.split(',').count(),
        (None, None) => bail!(UsageError("give --n or --mult".into())),
    };
    check_n(n)?;
    let m = parse_mult(&args.mult, n)?;
    let g = AdmissibleGraph::new(n, parse_edges(&args.edges)?).map_err(usage)?;
    Ok((g, m))
}

fn check_n(n: usize) -> Result<()> {
    let max = Limits::from_env().max_n;
    if n == 0 || n > max {
        return Err(usage(anyhow!("n = {n} outside 1..={max}")));
    }
    Ok(())
}

fn tie(descending: bool) -> TieBreak {
    if descending {
        TieBreak::Descending
    } else {
        TieBreak::Ascending
    }
}

fn graph_json(g: &AdmissibleGraph) -> Value {
    json!({ "name": g.to_string(), "n": g.n(), "edges": g.edges() })
}

/// Output of one command: JSON plus a text rendering.
struct Report {
    json: Value,
    text: String,
}

fn cmd_graphs(n: usize) -> Result<Report> {
    check_n(n)?;
    let adm = enumerate_adm_with(n, &Limits::from_env()).map_err(usage)?;
    let mut text = String::new();
    let records: Vec<Value> = adm
        .iter()
        .map(|g| {
            let classes: Vec<String> = g.type_one_classes().iter().map(|e| e.to_string()).collect();
            text.push_str(&format!(
                "{g}  codim {}  adm2 {}  classes [{}]\n",
                g.codim(),
                g.is_chain_like(),
                classes.join(", ")
            ));
            let mut v = graph_json(g);
            v["codim"] = json!(g.codim());
            v["adm2"] = json!(g.is_chain_like());
            v["classes"] = json!(g
                .type_one_classes()
                .iter()
                .map(|e| e.coeffs.clone())
                .collect::<Vec<_>>());
            v
        })
        .collect();
    text.push_str(&format!("{} graphs\n", records.len()));
    Ok(Report {
        json: json!({ "n": n, "count": records.len(), "graphs": records }),
        text,
    })
}

fn cmd_order(n: usize, mult: &MultArg, descending: bool) -> Result<Report> {
    check_n(n)?;
    let m = parse_mult(mult, n)?;
    enumerate_delta_with(&m, &Limits::from_env()).map_err(usage)?;
    let ctx = OrderingContext::with_tie_break(&m, tie(descending))?;
    let mut text = format!("Δ({n}) for m = {m}: {} strata\norder:", ctx.delta.len());
    for g in ctx.models_graphs() {
        text.push_str(&format!(" {g}"));
    }
    text.push('\n');
    for &g in &ctx.models {
        let names = |v: &[usize]| {
            v.iter()
                .map(|&i| ctx.delta[i].to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let s = ctx.index_sets(g);
        text.push_str(&format!(
            "{}: I = [{}], reduced = [{}], persisting = [{}]\n",
            ctx.delta[g],
            names(&s.already),
            names(&s.reduced),
            names(&s.reduced_gg)
        ));
    }
    Ok(Report {
        json: ctx.to_json(),
        text,
    })
}

fn cmd_tau(args: &StratumArgs) -> Result<Report> {
    let (g, m) = stratum(args)?;
    let t = tau_of::<Rational>(&g, &m).map_err(usage)?;
    let text = if t.zero_flag {
        format!(
            "{g} at m = {m}: tau vanishes (negative vertices {:?})\n",
            t.negative
        )
    } else {
        format!(
            "{g} at m = {m}: rank {}, c(tau) = {}\n",
            t.rank, t.total_chern
        )
    };
    let json = json!({
        "graph": graph_json(&g),
        "mult": m.values(),
        "negative": t.negative,
        "zero_flag": t.zero_flag,
        "rank": t.rank,
        "total_chern": t.total_chern.to_string(),
    });
    Ok(Report { json, text })
}

fn cmd_invariant(args: &StratumArgs) -> Result<Report> {
    let (g, m) = stratum(args)?;
    let mixed = mixed_invariant::<Rational>(&g, &m).map_err(usage)?;
    let ctx = AfswContext::<Rational>::new(&m, TieBreak::Ascending)?;
    let i = ctx.order.index_of(&g).context("stratum vanished from Δ")?;
    let modified = ctx.afsw_star(i)?;
    let text = format!(
        "{g} at m = {m}\nmixed:    {}\nmodified: {}\n",
        show(&mixed),
        show(&modified)
    );
    let json = json!({
        "graph": graph_json(&g),
        "mult": m.values(),
        "mixed": mixed.to_json(),
        "modified": modified.to_json(),
    });
    Ok(Report { json, text })
}

fn show(inv: &nodalis::tau::Invariant<Rational>) -> String {
    if inv.is_parametric() {
        format!("{} + [{}]", inv.value, inv.unresolved)
    } else {
        inv.value.to_string()
    }
}

fn cmd_count(delta: usize, eval: Option<&str>, descending: bool) -> Result<Report> {
    let limits = Limits::from_env();
    if delta == 0 || delta > limits.max_delta {
        return Err(usage(anyhow!(
            "δ = {delta} outside 1..={}",
            limits.max_delta
        )));
    }
    let point = eval.map(parse_eval).transpose()?;
    let nc = node_count_with::<Rational>(delta, &limits, tie(descending), Default::default())?;
    let mut json = nc.to_json();
    let mut text = format!("δ = {delta}: {}\n", show(&nc.count));
    for c in &nc.contributions {
        let status = if c.zero_flag {
            "vanished".to_string()
        } else {
            format!("rank {}", c.rank)
        };
        text.push_str(&format!(
            "  {}: {status}, modified {}\n",
            c.graph,
            show(&c.afsw_star)
        ));
    }
    if let Some(p) = point {
        let v = nc.count.value.eval(&p);
        text.push_str(&format!("value: {v}\n"));
        json["value"] = json!(v.to_string());
    }
    Ok(Report { json, text })
}

fn cmd_verify(level: Level) -> Result<(Report, bool)> {
    let reports = run_suite(level);
    let ok = reports.iter().all(|r| r.verdict == Verdict::Pass);
    let text: String = reports.iter().map(|r| format!("{r}\n")).collect();
    let json =
        json!({ "level": format!("{level:?}").to_lowercase(), "passed": ok, "checks": reports });
    Ok((Report { json, text }, ok))
}

fn run(cli: &Cli) -> Result<bool> {
    let (report, ok) = match &cli.cmd {
        Command::Graphs { n } => (cmd_graphs(*n)?, true),
        Command::Order {
            n,
            mult,
            descending,
        } => (cmd_order(*n, mult, *descending)?, true),
        Command::Tau(a) => (cmd_tau(a)?, true),
        Command::Invariant(a) => (cmd_invariant(a)?, true),
        Command::Count {
            delta,
            eval,
            descending,
        } => (cmd_count(*delta, eval.as_deref(), *descending)?, true),
        Command::Verify { level } => cmd_verify(*level)?,
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report.json)?);
    } else {
        print!("{}", report.text);
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let is_usage = e.chain().any(|c| c.is::<UsageError>());
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage { 2 } else { 1 })
        }
    }
}
