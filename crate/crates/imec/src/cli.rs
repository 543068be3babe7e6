//! Command-line front end. `run` parses arguments, executes one command and
//! returns the process exit code: 0 when the query was answered, 1 for usage,
//! parse and input errors, 2 for violated preconditions, 3 for internal
//! inconsistencies and failed reproductions.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::admg_factor::{
    ancestrally_closed_sets, canonical_dag, head_partition, latent_projection,
};
use crate::distribution::{
    controlled_imarkov_check, factorization_check, imarkov_property_check,
    in_mi_district_factorization, in_mi_factorization, markov_report,
    sample_interventional_setting, CheckReport, InterventionalSetting, JointTable, SamplingOptions,
    DEFAULT_TOL,
};
use crate::equivalence::{
    colliders_with_order, controlled_i_markov_equivalent, i_colliders_with_order,
    i_markov_equivalent, markov_equivalent, EquivalenceVerdict, Method, OrderedCollider,
};
use crate::error::{Error, Result};
use crate::graph_core::{classify, find_ribbons, Mark, MixedGraph};
use crate::intervention::{
    interventional_graph, perfect_intervention, symmetric_difference_targets, TargetMultiset,
};
use crate::maximality::{anterior_graph, maximal_completion};
use crate::resources;
use crate::separation::{
    independence_model_bounded, m_connecting_paths, m_separated, DEFAULT_BOUND,
};
use crate::vset::VSet;

pub const JSON_SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "imec",
    version,
    about = "Interventional Markov equivalence for loopless mixed graphs"
)]
#[command(
    after_help = "Graph and target arguments accept a file path or `@name` for an embedded figure (e.g. @fig2-g, @fig2)."
)]
pub struct Cli {
    /// Emit JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Comparison tolerance for numeric checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = MethodArg::Both)]
    method: MethodArg,
    /// Vertex bound for exhaustive independence models.
    #[arg(long, global = true, default_value_t = DEFAULT_BOUND)]
    bound: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Brute,
    Graphical,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Brute => Method::Brute,
            MethodArg::Graphical => Method::Graphical,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Graph classes and ribbons.
    Classify { graph: String },
    /// m-separation of A and B given C (comma-separated labels).
    Sep {
        graph: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value = "")]
        c: String,
    },
    /// Elementary independence model J(G).
    Model { graph: String },
    /// Markov equivalence.
    Mec { g: String, h: String },
    /// I-Markov equivalence.
    Imec {
        g: String,
        h: String,
        #[arg(long)]
        targets: String,
    },
    /// Controlled I-Markov equivalence of ADMGs.
    ControlledImec {
        g: String,
        h: String,
        #[arg(long)]
        targets: String,
    },
    /// Colliders with order, and I-colliders with order when targets are given.
    Colliders {
        graph: String,
        #[arg(long)]
        targets: Option<String>,
    },
    /// Interventional graph G^I.
    Intervene {
        graph: String,
        #[arg(long)]
        targets: String,
    },
    /// Perfect intervention on a set of vertices.
    PerfectIntervene {
        graph: String,
        #[arg(long)]
        target: String,
    },
    /// Symmetric-difference targets I△I.
    SymDiff {
        graph: String,
        #[arg(long)]
        targets: String,
    },
    /// Maximal completion.
    Maximalize { graph: String },
    /// Anterior graph.
    Anterior { graph: String },
    /// Heads and tails of ancestrally closed sets.
    Heads {
        graph: String,
        /// One ancestrally closed set; all of them when omitted.
        #[arg(long)]
        set: Option<String>,
    },
    /// Latent projection of a DAG onto observed vertices.
    Project {
        graph: String,
        #[arg(long)]
        observed: String,
    },
    /// Canonical DAG of an ADMG.
    CanonicalDag { graph: String },
    /// Markov property of a joint table.
    CheckMarkov { graph: String, table: PathBuf },
    /// Head/tail factorization of a joint table.
    CheckFactorization { graph: String, table: PathBuf },
    /// Membership of an interventional setting directory.
    CheckSetting { graph: String, dir: PathBuf },
    /// Sample an interventional setting into a directory.
    SampleSetting {
        graph: String,
        #[arg(long)]
        targets: String,
        #[arg(long)]
        out: PathBuf,
        /// Reuse one intervened mechanism per vertex across targets.
        #[arg(long)]
        shared: bool,
    },
    /// Reproduce a figure (or `all`) and compare with the embedded golden output.
    Repro { figure: String },
}

struct Output {
    text: String,
    json: Value,
    code: i32,
}

impl Output {
    fn new(text: String, json: Value) -> Output {
        Output {
            text,
            json,
            code: 0,
        }
    }
}

fn load_graph(spec: &str) -> Result<MixedGraph> {
    match spec.strip_prefix('@') {
        Some(name) => resources::graph(name),
        None => MixedGraph::parse(&fs::read_to_string(spec)?),
    }
}

fn load_targets(spec: &str, g: &MixedGraph) -> Result<TargetMultiset> {
    match spec.strip_prefix('@') {
        Some(name) => resources::targets(name, g),
        None => TargetMultiset::parse(&fs::read_to_string(spec)?, g),
    }
}

fn parse_set(g: &MixedGraph, text: &str) -> Result<VSet> {
    let text = text.trim().trim_start_matches('{').trim_end_matches('}');
    text.split([',', ' '])
        .filter(|s| !s.is_empty())
        .map(|l| g.find_or_err(l))
        .collect()
}

fn verdict_output(v: &EquivalenceVerdict) -> Result<Output> {
    let mut text = format!(
        "{}\nmethod: {}\n",
        if v.equivalent {
            "equivalent"
        } else {
            "not equivalent"
        },
        v.method
    );
    if let Some(w) = &v.witness {
        text.push_str(&format!(
            "witness: {}\n",
            serde_json::to_string(w).map_err(|e| Error::Invariant(e.to_string()))?
        ));
    }
    if let Some(n) = &v.note {
        text.push_str(&format!("note: {n}\n"));
    }
    let json = serde_json::to_value(v).map_err(|e| Error::Invariant(e.to_string()))?;
    Ok(Output::new(text, json))
}

fn graph_output(g: &MixedGraph) -> Output {
    let edges: Vec<String> = g.edges().iter().map(|e| g.render_edge(e)).collect();
    let nodes: Vec<&str> = g.vertices().iter().map(|v| v.label.as_str()).collect();
    Output::new(g.to_text(), json!({ "nodes": nodes, "edges": edges }))
}

fn colliders_json(g: &MixedGraph, cs: &[OrderedCollider]) -> Value {
    cs.iter()
        .map(|c| {
            let (i, j, k) = c.triple;
            json!({
                "triple": [g.label(i), g.label(j), g.label(k)],
                "order": c.order,
                "witness": c.witness.as_ref().map(|w| w.iter().map(|&v| g.label(v)).collect::<Vec<_>>()),
            })
        })
        .collect()
}

fn report_text(name: &str, r: &CheckReport) -> String {
    let mut s = format!(
        "{name}: {} (max deviation {:.3e})\n",
        if r.passed { "pass" } else { "fail" },
        r.worst
    );
    if let Some(w) = &r.witness {
        s.push_str(&format!("  {w}\n"));
    }
    s
}

fn report_json(r: &CheckReport) -> Value {
    json!({ "passed": r.passed, "worst": r.worst, "witness": r.witness })
}

fn execute(cli: &Cli) -> Result<Output> {
    let method: Method = cli.method.into();
    Ok(match &cli.command {
        Command::Classify { graph } => {
            let g = load_graph(graph)?;
            let classes: Vec<String> = classify(&g).iter().map(|c| c.to_string()).collect();
            let ribbons: Vec<String> = find_ribbons(&g)
                .iter()
                .map(|r| {
                    let (i, j, k) = r.triple;
                    let m = |x: Mark| if x == Mark::Arrow { "<" } else { "-" };
                    let kind = if r.via_cycle { "cyclic" } else { "selection" };
                    format!(
                        "<{},{},{}> ({kind}, ends {}{})",
                        g.label(i),
                        g.label(j),
                        g.label(k),
                        m(r.end_marks.0),
                        m(r.end_marks.1)
                    )
                })
                .collect();
            let mut text = format!("classes: {}\n", classes.join(" "));
            for r in &ribbons {
                text.push_str(&format!("ribbon: {r}\n"));
            }
            Output::new(text, json!({ "classes": classes, "ribbons": ribbons }))
        }
        Command::Sep { graph, a, b, c } => {
            let g = load_graph(graph)?;
            let (a, b, c) = (parse_set(&g, a)?, parse_set(&g, b)?, parse_set(&g, c)?);
            let sep = m_separated(&g, a, b, c)?;
            let mut text = format!("{}\n", if sep { "separated" } else { "connected" });
            let mut path = None;
            if !sep {
                'outer: for i in a.iter() {
                    for j in b.iter() {
                        if let Some(p) = m_connecting_paths(&g, i, j, c)?.into_iter().next() {
                            path = Some(p.render(&g));
                            break 'outer;
                        }
                    }
                }
                if let Some(p) = &path {
                    text.push_str(&format!("path: {p}\n"));
                }
            }
            Output::new(text, json!({ "separated": sep, "path": path }))
        }
        Command::Model { graph } => {
            let g = load_graph(graph)?;
            let m = independence_model_bounded(&g, None, cli.bound)?;
            let triples: Vec<String> = m.triples().iter().map(|t| m.render(t)).collect();
            Output::new(
                m.to_text(),
                json!({ "size": triples.len(), "triples": triples }),
            )
        }
        Command::Mec { g, h } => verdict_output(&markov_equivalent(
            &load_graph(g)?,
            &load_graph(h)?,
            method,
        )?)?,
        Command::Imec { g, h, targets } => {
            let (g, h) = (load_graph(g)?, load_graph(h)?);
            let t = load_targets(targets, &g)?;
            verdict_output(&i_markov_equivalent(&g, &h, &t, method)?)?
        }
        Command::ControlledImec { g, h, targets } => {
            let (g, h) = (load_graph(g)?, load_graph(h)?);
            let t = load_targets(targets, &g)?;
            verdict_output(&controlled_i_markov_equivalent(&g, &h, &t)?)?
        }
        Command::Colliders { graph, targets } => {
            let g = load_graph(graph)?;
            let cs = colliders_with_order(&g);
            let mut text: String = cs
                .iter()
                .map(|c| format!("collider: {}\n", c.render(&g)))
                .collect();
            let mut json = json!({ "colliders": colliders_json(&g, &cs) });
            if let Some(t) = targets {
                let t = load_targets(t, &g)?;
                let gi = interventional_graph(&g, &t)?;
                let ic = i_colliders_with_order(&g, &t)?;
                text.extend(
                    ic.iter()
                        .map(|c| format!("i-collider: {}\n", c.render(&gi))),
                );
                json["i_colliders"] = colliders_json(&gi, &ic);
            }
            Output::new(text, json)
        }
        Command::Intervene { graph, targets } => {
            let g = load_graph(graph)?;
            let t = load_targets(targets, &g)?;
            graph_output(&interventional_graph(&g, &t)?)
        }
        Command::PerfectIntervene { graph, target } => {
            let g = load_graph(graph)?;
            let t = parse_set(&g, target)?;
            graph_output(&perfect_intervention(&g, t)?)
        }
        Command::SymDiff { graph, targets } => {
            let g = load_graph(graph)?;
            let k = symmetric_difference_targets(&load_targets(targets, &g)?);
            let sets: Vec<String> = k.targets().iter().map(|&t| g.fmt_set(t)).collect();
            Output::new(k.to_text(&g), json!({ "targets": sets }))
        }
        Command::Maximalize { graph } => graph_output(&maximal_completion(&load_graph(graph)?)?),
        Command::Anterior { graph } => graph_output(&anterior_graph(&load_graph(graph)?)),
        Command::Heads { graph, set } => {
            let g = load_graph(graph)?;
            let sets = match set {
                Some(s) => vec![parse_set(&g, s)?],
                None => ancestrally_closed_sets(&g)?,
            };
            let mut text = String::new();
            let mut rows = Vec::new();
            for a in sets {
                let hp = head_partition(&g, a)?;
                for line in hp.render(&g) {
                    text.push_str(&line);
                    text.push('\n');
                }
                let heads: Vec<Value> = hp
                    .heads
                    .iter()
                    .map(|&(h, t)| json!({ "head": g.fmt_set(h), "tail": g.fmt_set(t) }))
                    .collect();
                rows.push(json!({ "set": g.fmt_set(a), "heads": heads }));
            }
            Output::new(text, json!({ "partitions": rows }))
        }
        Command::Project { graph, observed } => {
            let g = load_graph(graph)?;
            let o = parse_set(&g, observed)?;
            graph_output(&latent_projection(&g, o)?)
        }
        Command::CanonicalDag { graph } => {
            let (d, l) = canonical_dag(&load_graph(graph)?)?;
            let mut out = graph_output(&d);
            out.json["latents"] = json!(l.iter().map(|v| d.label(v)).collect::<Vec<_>>());
            out
        }
        Command::CheckMarkov { graph, table } => {
            let g = load_graph(graph)?;
            let t = JointTable::parse(&fs::read_to_string(table)?, &g)?;
            let r = markov_report(&t, &g, cli.tol)?;
            Output::new(report_text("markov", &r), report_json(&r))
        }
        Command::CheckFactorization { graph, table } => {
            let g = load_graph(graph)?;
            let t = JointTable::parse(&fs::read_to_string(table)?, &g)?;
            let r = factorization_check(&t, &g, cli.tol)?;
            Output::new(report_text("factorization", &r), report_json(&r))
        }
        Command::CheckSetting { graph, dir } => {
            let g = load_graph(graph)?;
            let s = InterventionalSetting::load(dir, &g)?;
            let fact = in_mi_factorization(&s, &g, cli.tol)?;
            let mut text = report_text("in-MI-factorization", &fact);
            let dist = in_mi_district_factorization(&s, &g, cli.tol)?;
            text.push_str(&report_text(
                "in-MI-factorization (district-restricted)",
                &dist,
            ));
            let mut json = json!({
                "in_mi_factorization": report_json(&fact),
                "in_mi_district_factorization": report_json(&dist),
            });
            if s.targets.contains_empty() {
                let im = imarkov_property_check(&s, &g, cli.tol)?;
                text.push_str(&report_text("I-Markov property", &im));
                json["imarkov"] = report_json(&im);
            } else {
                text.push_str("I-Markov property: skipped (no empty target)\n");
                json["imarkov"] = Value::Null;
            }
            let ctl = controlled_imarkov_check(&s, &g, cli.tol)?;
            text.push_str(&report_text("controlled I-Markov property", &ctl));
            json["controlled_imarkov"] = report_json(&ctl);
            Output::new(text, json)
        }
        Command::SampleSetting {
            graph,
            targets,
            out,
            shared,
        } => {
            let g = load_graph(graph)?;
            let t = load_targets(targets, &g)?;
            let s = sample_interventional_setting(
                &g,
                &t,
                cli.seed,
                SamplingOptions {
                    shared: *shared,
                    extra: None,
                },
            )?;
            s.save(out, &g)?;
            let text = format!("wrote {} tables to {}\n", s.tables.len(), out.display());
            Output::new(
                text,
                json!({ "tables": s.tables.len(), "dir": out.display().to_string() }),
            )
        }
        Command::Repro { figure } => {
            let figs: Vec<&str> = if figure == "all" {
                resources::FIGURES.to_vec()
            } else {
                vec![figure.as_str()]
            };
            let mut text = String::new();
            let mut rows = Vec::new();
            let mut code = 0;
            for f in figs {
                let r = resources::reproduce(f)?;
                let rendered = r.to_text();
                let golden_ok = rendered == resources::golden(f)?;
                if !r.passed() || !golden_ok {
                    code = 3;
                }
                text.push_str(&rendered);
                if !golden_ok {
                    text.push_str("  [FAIL] output differs from the embedded golden file\n");
                }
                rows.push(json!({ "figure": f, "claims": r.claims, "golden_match": golden_ok }));
            }
            Output {
                text,
                json: json!({ "figures": rows }),
                code,
            }
        }
    })
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Classify { .. } => "classify",
        Command::Sep { .. } => "sep",
        Command::Model { .. } => "model",
        Command::Mec { .. } => "mec",
        Command::Imec { .. } => "imec",
        Command::ControlledImec { .. } => "controlled-imec",
        Command::Colliders { .. } => "colliders",
        Command::Intervene { .. } => "intervene",
        Command::PerfectIntervene { .. } => "perfect-intervene",
        Command::SymDiff { .. } => "sym-diff",
        Command::Maximalize { .. } => "maximalize",
        Command::Anterior { .. } => "anterior",
        Command::Heads { .. } => "heads",
        Command::Project { .. } => "project",
        Command::CanonicalDag { .. } => "canonical-dag",
        Command::CheckMarkov { .. } => "check-markov",
        Command::CheckFactorization { .. } => "check-factorization",
        Command::CheckSetting { .. } => "check-setting",
        Command::SampleSetting { .. } => "sample-setting",
        Command::Repro { .. } => "repro",
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Precondition(_) | Error::TooLarge(..) => 2,
        Error::Invariant(_) => 3,
        _ => 1,
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            let written = if cli.json {
                let mut doc =
                    json!({ "schema": JSON_SCHEMA, "command": command_name(&cli.command) });
                if let (Value::Object(d), Value::Object(body)) = (&mut doc, o.json) {
                    d.extend(body);
                }
                serde_json::to_string_pretty(&doc)
                    .map(|s| writeln!(out, "{s}"))
                    .is_ok()
            } else {
                write!(out, "{}", o.text).is_ok()
            };
            if written {
                o.code
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
