use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kmatch_core::complex::{
    bounded_degree_complex_with, independence_complex_with, matching_complex_with, Budget,
    DegreeBound, SimplicialComplex,
};
use kmatch_core::graph::families::{self, parse_builder};
use kmatch_core::graph::{find_claw_units, ClawedBuildScript, Graph};
use kmatch_core::homology::{betti, profile_matches};
use kmatch_core::morse::{
    claw_induced_matching, euler_consistent, morse_vector, toggle_labels, verify_acyclic,
    wheel_m2_matching, Certificate, MorseMatching,
};
use kmatch_core::mta::{post_cancel, run_mta, wheel_cancel_pair, wheel_policy, DefaultPolicy, PivotPolicy};
use kmatch_core::predictions::{
    attaching_site_analysis, caterpillar_tables, check_site_dichotomy, compare_closed_forms,
    bd_m2_towers, family_complex, k_matching_sequence, leaf_edge_toggles, maximize_sites, predict,
    predict_graph, progression_script, Prediction, FAMILIES,
};
use kmatch_core::suite;

#[derive(Parser)]
#[command(name = "kmatch", version, about = "Matching complexes of graphs: homology, Morse matchings, closed forms")]
struct Cli {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Include wall-clock time in the report (makes it non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = suite::DEFAULT_SEED)]
    seed: u64,
    /// Face enumeration budget (overrides KMATCH_BUDGET).
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph and a complex on it.
    Build(ComplexArgs),
    /// Reduced integral homology of a complex.
    Homology(HomologyArgs),
    /// Apply a Morse matching and report critical cells.
    Morse(MorseArgs),
    /// Run the matching tree algorithm on an independence complex.
    Mta(MtaArgs),
    /// Closed-form prediction for a family or a graph.
    Predict(PredictArgs),
    /// Prediction, construction, homology and comparison.
    Verify(FamilyArgs),
    /// Caterpillar recurrence tables and closed-form comparison.
    CaterpillarTables(CaterpillarArgs),
    /// Attaching-site analysis.
    Sites(SitesArgs),
    /// Homology of M_1, M_2, ... until the complex becomes a cone.
    Sequence(GraphArg),
    /// Run every acceptance check.
    PaperSuite,
}

#[derive(Args)]
struct GraphArg {
    /// Builder string (`wheel:5`, `:edgeless:3`) or a graph JSON file.
    #[arg(long)]
    graph: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComplexKind {
    Matching,
    Independence,
    Bounded,
}

#[derive(Args)]
struct ComplexArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[arg(long, value_enum, default_value_t = ComplexKind::Matching)]
    complex: ComplexKind,
    /// Degree cap for matching and bounded complexes.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Per-vertex cap overrides for bounded complexes, `vertex=cap`.
    #[arg(long = "cap", value_name = "VERTEX=CAP")]
    caps: Vec<String>,
}

#[derive(Args)]
struct HomologyArgs {
    #[arg(long, conflicts_with = "complex_json")]
    graph: Option<String>,
    /// A complex JSON file ({"vertices": [...], "facets": [[...], ...]}).
    #[arg(long)]
    complex_json: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ComplexKind::Matching)]
    complex: ComplexKind,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long = "cap", value_name = "VERTEX=CAP")]
    caps: Vec<String>,
}

#[derive(Args)]
struct MorseArgs {
    #[arg(long)]
    graph: Option<String>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Edge label to toggle; repeat for a sequence, applied in order.
    #[arg(long = "toggle", value_name = "EDGE")]
    toggles: Vec<String>,
    /// Claw-induced matching with leaf-edge toggles (k = 2).
    #[arg(long)]
    claw: bool,
    /// Strata matching on M_2 of the wheel W_n.
    #[arg(long)]
    wheel_m2: Option<usize>,
}

#[derive(Args)]
struct MtaArgs {
    /// Graph whose independence complex is matched; defaults to L(W_n) for the wheel policy.
    #[arg(long)]
    graph: Option<String>,
    /// `default` or `wheel:N`.
    #[arg(long, default_value = "default")]
    policy: String,
    /// Print the full matching tree.
    #[arg(long)]
    tree: bool,
}

#[derive(Args)]
struct FamilyArgs {
    /// One of the named families (see `predict --list`).
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long, conflicts_with = "graph")]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Apply the structural rules to an arbitrary graph.
    #[arg(long)]
    graph: Option<String>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// List supported families.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct CaterpillarArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 4)]
    depth: usize,
}

#[derive(Args)]
struct SitesArgs {
    /// Build script JSON ({"n": 3, "steps": [{"v1": .., "v2": .., "claws": ..}]}).
    #[arg(long)]
    script: Option<PathBuf>,
    /// `five-claw`, `seven-claw` or `progression`.
    #[arg(long)]
    figure: Option<String>,
    /// A clawed graph, analysed with leaf-edge toggles.
    #[arg(long)]
    graph: Option<String>,
    /// Also attach a leaf at every degree-2 vertex and re-check homology.
    #[arg(long)]
    dichotomy: bool,
}

#[derive(Debug)]
enum Outcome {
    Match,
    Mismatch,
}

struct Ctx {
    budget: Budget,
    seed: u64,
}

fn load_graph(src: &str) -> Result<Graph> {
    let path = Path::new(src);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {src}"))?;
        return Ok(Graph::from_json_str(&text)?);
    }
    Ok(parse_builder(src)?)
}

fn parse_caps(g: &Graph, k: usize, caps: &[String]) -> Result<DegreeBound> {
    let mut b = DegreeBound::uniform(g, k);
    for c in caps {
        let (v, cap) = c.split_once('=').ok_or_else(|| anyhow!("cap `{c}` is not VERTEX=CAP"))?;
        g.require_vertex(v)?;
        b = b.with(v, cap.parse().with_context(|| format!("cap `{c}`"))?);
    }
    Ok(b)
}

fn build_complex(ctx: &Ctx, g: &Graph, kind: ComplexKind, k: usize, caps: &[String]) -> Result<SimplicialComplex> {
    Ok(match kind {
        ComplexKind::Matching => matching_complex_with(g, k, ctx.budget)?,
        ComplexKind::Independence => independence_complex_with(g, ctx.budget)?,
        ComplexKind::Bounded => bounded_degree_complex_with(g, &parse_caps(g, k, caps)?, ctx.budget)?,
    })
}

fn kind_name(kind: ComplexKind) -> &'static str {
    match kind {
        ComplexKind::Matching => "matching",
        ComplexKind::Independence => "independence",
        ComplexKind::Bounded => "bounded",
    }
}

fn complex_summary(cx: &SimplicialComplex) -> Value {
    json!({
        "vertices": cx.vertex_count(),
        "faces": cx.face_count(),
        "dim": cx.dim(),
        "f_vector": cx.f_vector(),
        "reduced_euler": cx.reduced_euler(),
    })
}

fn cmd_build(ctx: &Ctx, a: &ComplexArgs) -> Result<(Value, Outcome)> {
    let g = load_graph(&a.graph.graph)?;
    let cx = build_complex(ctx, &g, a.complex, a.k, &a.caps)?;
    Ok((
        json!({
            "input": { "graph": a.graph.graph, "complex": kind_name(a.complex), "k": a.k },
            "graph": g.to_json(),
            "complex": cx.to_json(),
            "summary": complex_summary(&cx),
        }),
        Outcome::Match,
    ))
}

fn cmd_homology(ctx: &Ctx, a: &HomologyArgs) -> Result<(Value, Outcome)> {
    let (input, cx) = match (&a.graph, &a.complex_json) {
        (Some(src), None) => {
            let g = load_graph(src)?;
            let cx = build_complex(ctx, &g, a.complex, a.k, &a.caps)?;
            (json!({ "graph": src, "complex": kind_name(a.complex), "k": a.k }), cx)
        }
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            (json!({ "complex_json": p.display().to_string() }), SimplicialComplex::from_json_str(&text)?)
        }
        _ => bail!("give --graph or --complex-json"),
    };
    let p = betti(&cx)?;
    let kind = if cx.is_void() { "void complex" } else { "complex" };
    Ok((
        json!({
            "input": input,
            "kind": kind,
            "summary": complex_summary(&cx),
            "profile": p.to_json(),
            "acyclic": p.is_acyclic(),
            "lowest_nonzero": p.lowest_nonzero(),
        }),
        Outcome::Match,
    ))
}

fn matching_report(cx: &SimplicialComplex, m: &MorseMatching) -> Result<(Value, bool)> {
    let cert = verify_acyclic(cx, m)?;
    let v = morse_vector(cx, m)?;
    let p = betti(cx)?;
    let witness = match &cert {
        Certificate::Acyclic { .. } => Value::Null,
        Certificate::Cycle { witness } => json!(witness
            .iter()
            .map(|(a, b)| [cx.face_labels(*a), cx.face_labels(*b)])
            .collect::<Vec<_>>()),
    };
    let ok = cert.is_acyclic() && v.dominates(&p) && euler_consistent(cx, m, &v);
    Ok((
        json!({
            "acyclic": cert.is_acyclic(),
            "cycle_witness": witness,
            "vector": v,
            "vector_text": v.describe(),
            "critical": m.critical(cx).iter().map(|&f| cx.face_labels(f)).collect::<Vec<_>>(),
            "pairs": m.pair_count(),
            "profile": p.to_json(),
            "dominates": v.dominates(&p),
            "perfect": v.total() == p.total() && p.is_torsion_free(),
        }),
        ok,
    ))
}

fn cmd_morse(ctx: &Ctx, a: &MorseArgs) -> Result<(Value, Outcome)> {
    let (input, cx, m) = if let Some(n) = a.wheel_m2 {
        let run = wheel_m2_matching(n)?;
        let input = json!({ "wheel_m2": n, "variant": run.variant, "strata_sizes": run.strata_sizes,
                            "lower_strata_perfect": run.lower_strata_perfect });
        (input, run.complex, run.matching)
    } else {
        let src = a.graph.as_deref().ok_or_else(|| anyhow!("give --graph or --wheel-m2"))?;
        let g = load_graph(src)?;
        let cx = matching_complex_with(&g, a.k, ctx.budget)?;
        if a.claw {
            let t = leaf_edge_toggles(&g);
            let cm = claw_induced_matching(&g, &cx, &t)?;
            (json!({ "graph": src, "k": a.k, "claw_toggles": t, "complete": cm.complete }), cx, cm.matching)
        } else {
            let refs: Vec<&str> = a.toggles.iter().map(String::as_str).collect();
            let m = toggle_labels(&cx, &refs)?;
            (json!({ "graph": src, "k": a.k, "toggles": a.toggles }), cx, m)
        }
    };
    let (mut report, ok) = matching_report(&cx, &m)?;
    report["input"] = input;
    Ok((report, if ok { Outcome::Match } else { Outcome::Mismatch }))
}

fn cmd_mta(ctx: &Ctx, a: &MtaArgs) -> Result<(Value, Outcome)> {
    let (policy, wheel_n): (Box<dyn PivotPolicy>, Option<usize>) = match a.policy.as_str() {
        "default" => (Box::new(DefaultPolicy), None),
        p => {
            let n: usize = p
                .strip_prefix("wheel:")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| anyhow!("policy must be `default` or `wheel:N`, got `{p}`"))?;
            (Box::new(wheel_policy(n)?), Some(n))
        }
    };
    let (src, g) = match (&a.graph, wheel_n) {
        (Some(s), _) => (s.clone(), load_graph(s)?),
        (None, Some(n)) => (format!("line graph of wheel:{n}"), families::wheel(n)?.line_graph()),
        (None, None) => bail!("give --graph"),
    };
    let cx = independence_complex_with(&g, ctx.budget)?;
    let tree = run_mta(&g, policy.as_ref())?;
    let m = tree.verify(&g, &cx)?;
    let (mut report, ok) = matching_report(&cx, &m)?;
    let (crit, empty) = tree.leaf_counts();
    report["input"] = json!({ "graph": src, "policy": a.policy });
    report["tree_leaves"] = json!({ "critical": crit, "empty": empty });
    if a.tree {
        report["tree"] = tree.to_json(&g);
    }
    let mut ok = ok;
    if let Some(n) = wheel_n {
        let pairs: Vec<(u64, u64)> = wheel_cancel_pair(&g, &tree, n).into_iter().collect();
        let c = post_cancel(&g, &tree, &pairs)?;
        let p = betti(&cx)?;
        report["cancellation"] = json!({
            "pairs": pairs.iter().map(|&(x, y)| [kmatch_core::mta::mask_names(&g, x), kmatch_core::mta::mask_names(&g, y)]).collect::<Vec<_>>(),
            "before": c.before.describe(),
            "after": c.after.describe(),
            "perfect": c.after.total() == p.total(),
        });
        ok &= c.after.dominates(&p);
    }
    Ok((report, if ok { Outcome::Match } else { Outcome::Mismatch }))
}

fn family_params(n: Option<usize>, m: Option<usize>) -> Vec<usize> {
    n.into_iter().chain(m).collect()
}

fn cmd_predict(a: &PredictArgs) -> Result<(Value, Outcome)> {
    if a.list {
        let list: Vec<Value> = FAMILIES.iter().map(|(f, p)| json!({ "family": f, "params": p })).collect();
        return Ok((json!({ "families": list }), Outcome::Match));
    }
    let (input, pred) = match (&a.family, &a.graph) {
        (Some(f), None) => {
            let params = family_params(a.n, a.m);
            (json!({ "family": f, "params": params }), predict(f, &params))
        }
        (None, Some(src)) => {
            let g = load_graph(src)?;
            (json!({ "graph": src, "k": a.k }), predict_graph(&g, a.k))
        }
        _ => bail!("give --family or --graph"),
    };
    let known = pred != Prediction::Unknown;
    Ok((
        json!({
            "input": input,
            "predicted": pred,
            "predicted_text": pred.describe(),
            "profile": pred.profile().map(|p| p.to_json()),
        }),
        if known { Outcome::Match } else { Outcome::Mismatch },
    ))
}

fn cmd_verify(a: &FamilyArgs) -> Result<(Value, Outcome)> {
    let params = family_params(a.n, a.m);
    let pred = predict(&a.family, &params);
    let (_, cx) = family_complex(&a.family, &params)?;
    let p = betti(&cx)?;
    let (verdict, detail) = match &pred {
        Prediction::Wedge(w) => {
            let r = profile_matches(&p, w);
            (r.matches, json!(r.mismatches))
        }
        Prediction::Contractible => (p.is_acyclic(), Value::Null),
        Prediction::Unknown => (false, json!("no prediction for these parameters")),
    };
    Ok((
        json!({
            "input": { "family": a.family, "params": params },
            "predicted": pred,
            "predicted_text": pred.describe(),
            "summary": complex_summary(&cx),
            "computed": p.to_json(),
            "mismatches": detail,
        }),
        if verdict { Outcome::Match } else { Outcome::Mismatch },
    ))
}

fn cmd_caterpillar(a: &CaterpillarArgs) -> Result<(Value, Outcome)> {
    if a.m < 2 || a.depth < 1 {
        bail!("need m >= 2 and depth >= 1");
    }
    let t = caterpillar_tables(a.m, a.depth);
    let report = compare_closed_forms(&t);
    let mut towers_ok = true;
    for n in 1..=a.depth {
        let (bd, m2) = bd_m2_towers(a.m, n);
        let row = |r: &Vec<i128>| -> Vec<(i32, u64)> {
            r.iter().enumerate().filter(|(_, &c)| c != 0).map(|(j, &c)| (j as i32, c as u64)).collect()
        };
        towers_ok &= bd == kmatch_core::BettiProfile::from_betti(&row(&t.alpha[n - 1]))
            && m2 == kmatch_core::BettiProfile::from_betti(&row(&t.beta[n - 1]));
    }
    let show = |v: &[i128]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    Ok((
        json!({
            "input": { "m": a.m, "depth": a.depth },
            "x": t.x.to_string(),
            "y": t.y.to_string(),
            "A": show(&t.a_total),
            "B": show(&t.b_total),
            "alpha": t.alpha.iter().map(|r| show(r)).collect::<Vec<_>>(),
            "beta": t.beta.iter().map(|r| show(r)).collect::<Vec<_>>(),
            "towers_agree": towers_ok,
            "closed_forms": {
                "a_minus_sign_agrees": report.a_minus_sign_agrees,
                "a_plus_sign_agrees": report.a_plus_sign_agrees,
                "b_equals_a_form_agrees": report.b_equals_a_form_agrees,
                "b_derived_form_agrees": report.b_derived_form_agrees,
                "bivariate_dimension_j_agrees": report.bivariate_dimension_j_agrees,
                "bivariate_dimension_i_plus_j_agrees": report.bivariate_dimension_i_plus_j_agrees,
                "bivariate_matches_bd_table": report.bivariate_matches_bd_table,
                "unit_specialization_agrees": report.unit_specialization_agrees,
                "mismatches": report.mismatches.iter().map(|m| json!({
                    "series": m.series, "index": m.index,
                    "recurrence": m.recurrence.to_string(), "closed_form": m.closed_form.to_string(),
                })).collect::<Vec<_>>(),
            },
        }),
        if towers_ok { Outcome::Match } else { Outcome::Mismatch },
    ))
}

fn cmd_sites(a: &SitesArgs) -> Result<(Value, Outcome)> {
    let script = match (&a.script, a.figure.as_deref()) {
        (Some(p), None) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Some(serde_json::from_str::<ClawedBuildScript>(&text).context("parsing build script")?)
        }
        (None, Some("progression")) => Some(progression_script()),
        _ => None,
    };
    let (input, g, toggles, extra) = if let Some(s) = script {
        let r = maximize_sites(&s)?;
        let g = kmatch_core::graph::build_clawed_nonseparable(&s)?.graph;
        let extra = json!({ "step_sites": r.step_sites, "paired": r.paired });
        (json!({ "script": s }), g, r.toggles, extra)
    } else if let Some(fig) = a.figure.as_deref() {
        let (g, drawn) = match fig {
            "five-claw" => (families::five_claw_graph(), families::five_claw_toggles()),
            "seven-claw" => (families::seven_claw_graph(), families::seven_claw_toggles()),
            other => bail!("unknown figure `{other}` (five-claw, seven-claw, progression)"),
        };
        let t = suite::figure_toggles(&g, &drawn);
        (json!({ "figure": fig }), g, t, Value::Null)
    } else if let Some(src) = &a.graph {
        let g = load_graph(src)?;
        if find_claw_units(&g).is_empty() {
            bail!("graph has no claw units");
        }
        let t = leaf_edge_toggles(&g);
        (json!({ "graph": src }), g, t, Value::Null)
    } else {
        bail!("give --script, --figure or --graph");
    };
    let an = attaching_site_analysis(&g, &toggles)?;
    let mut ok = an.site_count <= an.claws;
    let mut report = json!({
        "input": input,
        "toggles": toggles,
        "analysis": an,
        "bound": an.claws,
    });
    if !extra.is_null() {
        report["algorithm"] = extra;
    }
    if a.dichotomy {
        let failures = check_site_dichotomy(&g, &an)?;
        ok &= failures.is_empty();
        report["dichotomy_failures"] = json!(failures);
    }
    Ok((report, if ok { Outcome::Match } else { Outcome::Mismatch }))
}

fn cmd_sequence(a: &GraphArg) -> Result<(Value, Outcome)> {
    let g = load_graph(&a.graph)?;
    let s = k_matching_sequence(&g)?;
    let ok = s.last_acyclic && (s.entries.is_empty() || s.cone_edge.is_some());
    Ok((
        json!({
            "input": { "graph": a.graph },
            "sequence": s.entries.iter().map(|e| json!({
                "k": e.k, "faces": e.faces, "profile": e.profile.to_json(),
            })).collect::<Vec<_>>(),
            "cone_edge": s.cone_edge,
            "last_acyclic": s.last_acyclic,
        }),
        if ok { Outcome::Match } else { Outcome::Mismatch },
    ))
}

fn cmd_suite(ctx: &Ctx, timing: bool) -> (Value, Outcome) {
    let results = suite::run_all(ctx.seed);
    for r in &results {
        eprintln!("{}", r.line());
    }
    let report = suite::report(ctx.seed, &results, timing);
    let all = results.iter().all(|r| r.pass);
    (report, if all { Outcome::Match } else { Outcome::Mismatch })
}

fn is_budget_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| c.to_string().contains("budget exceeded"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = cli.budget.map(Budget::new).unwrap_or_else(Budget::from_env);
    if budget.limit == 0 {
        eprintln!("error: budget must be positive");
        return ExitCode::from(2);
    }
    if let Some(b) = cli.budget {
        // library entry points that take no explicit budget read the environment
        std::env::set_var(kmatch_core::complex::BUDGET_ENV, b.to_string());
    }
    let ctx = Ctx { budget, seed: cli.seed };
    let start = Instant::now();
    let result = match &cli.command {
        Command::Build(a) => cmd_build(&ctx, a),
        Command::Homology(a) => cmd_homology(&ctx, a),
        Command::Morse(a) => cmd_morse(&ctx, a),
        Command::Mta(a) => cmd_mta(&ctx, a),
        Command::Predict(a) => cmd_predict(a),
        Command::Verify(a) => cmd_verify(a),
        Command::CaterpillarTables(a) => cmd_caterpillar(a),
        Command::Sites(a) => cmd_sites(a),
        Command::Sequence(a) => cmd_sequence(a),
        Command::PaperSuite => Ok(cmd_suite(&ctx, cli.timing)),
    };
    let (mut report, outcome) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(if is_budget_error(&e) { 2 } else { 1 });
        }
    };
    let matched = matches!(outcome, Outcome::Match);
    report["match"] = json!(matched);
    report["seed"] = json!(ctx.seed);
    if cli.timing {
        report["seconds"] = json!(start.elapsed().as_secs_f64());
    }
    let text = serde_json::to_string_pretty(&report).expect("json") + "\n";
    match &cli.output {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("error: writing {}: {e}", p.display());
                return ExitCode::from(1);
            }
            println!("match: {matched}");
        }
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
        }
    }
    if matched {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
