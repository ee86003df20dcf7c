//! Command-line front end: graph expressions, subcommands and JSON/CSV output.

pub mod expr;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use freegraph::crosscheck::decomposition_pipelines;
use freegraph::graph::{moments, GraphJson, VertexState};
use freegraph::independence::{
    check_freeness, check_orthogonality, check_sfreeness, check_sfreeness_unit, free_components, UnitCondition,
};
use freegraph::jacobi::{jacobi_to_moments, moments_to_jacobi, JacobiJson};
use freegraph::measures::{grid_to_csv, EpsSchedule, SpectralMeasure};
use freegraph::qdecomp::{
    builtin_vacuum_set, detect_tail, distance_partition, generating_check, generic_vacuum_set, quantum_components,
    report_json, spectrum, BuiltinFamily, TailOptions,
};
use freegraph::rational::parse_q;
use freegraph::report::CheckReport;
use freegraph::transforms::{
    boolean_conv, check_prop31, free_conv, mfree_conv, monotone_conv, orth_conv, sfree_conv, Distribution,
};
use freegraph::{JacobiParams, MomentSeq, RootedGraph, Tail, Vertex};

pub use expr::{parse, Expr, ParseError};

impl std::error::Error for ParseError {}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Domain(#[from] freegraph::Error),
    #[error("{0}")]
    Io(String),
    #[error("{failed} of {total} check entries failed")]
    CheckFailed { failed: usize, total: usize },
}

impl CliError {
    /// 1 for domain failures, 2 for usage and parse errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::Usage(m) => json!({"error": "usage", "message": m}),
            CliError::Parse(p) => match p {
                ParseError::Syntax {
                    line,
                    col,
                    expected,
                    found,
                } => json!({"error": "parse", "message": p.to_string(), "line": line, "col": col,
                            "expected": expected, "found": found}),
                ParseError::Arity { line, col, operator, .. } => {
                    json!({"error": "parse", "message": p.to_string(), "line": line, "col": col, "operator": operator})
                }
            },
            CliError::Domain(e) => {
                let debug = format!("{e:?}");
                let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("").to_string();
                json!({"error": "domain", "kind": kind, "message": e.to_string()})
            }
            CliError::Io(m) => json!({"error": "io", "message": m}),
            CliError::CheckFailed { failed, total } => {
                json!({"error": "check_failed", "message": self.to_string(), "failed": failed, "total": total})
            }
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "freegraph", version, about = "Graph products, spectral moments and quantum decompositions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact walk moments of a rooted graph expression.
    Moments {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        order: usize,
        /// Base vertex as a word, e.g. "2:1,1:2" (default: the root).
        #[arg(long)]
        base: Option<String>,
        /// Depth of infinite atoms without an explicit depth.
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Jacobi parameters of the root distribution.
    Jacobi {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Density on a grid, as CSV.
    Density {
        #[command(flatten)]
        source: MeasureSource,
        /// a:b:steps
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// "boundary" or a comma list of ε values (default 1e-3,1e-4,1e-5).
        #[arg(long)]
        eps: Option<String>,
        /// Write the CSV here and print the measure JSON instead.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Atoms and continuous support of a measure, as JSON.
    Atoms {
        #[command(flatten)]
        source: MeasureSource,
    },
    /// Spectrum of a built-in family from its explicit vacuum set.
    Spectrum {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Comma list: n for Tn/Hn, n,m for KnKm/KnFm.
        #[arg(long)]
        params: String,
        #[arg(long)]
        depth: usize,
    },
    /// Quantum decomposition of a graph expression with respect to a vertex set.
    Qdecomp {
        #[command(flatten)]
        source: GraphSource,
        /// "root", "word:W1;W2;...", "level0[:factor]" or "level0:KnKm|KnFm".
        #[arg(long, default_value = "root")]
        v0: String,
        /// Levels to audit; also the depth of infinite atoms.
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Graph JSON of an expression.
    Graph {
        #[arg(long)]
        expr: String,
        /// Depth of infinite atoms without an explicit depth.
        #[arg(long, default_value_t = 4)]
        depth: u32,
    },
    /// Independence and decomposition checks.
    Check {
        #[command(subcommand)]
        which: CheckCommand,
    },
    /// Convolution of two distributions given as moment or Jacobi JSON.
    Convolve {
        #[arg(long, value_enum)]
        op: ConvOp,
        /// File path or inline JSON.
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        order: usize,
        /// Truncation level for the m-free convolution.
        #[arg(long)]
        m: Option<usize>,
    },
}

/// A graph given as an expression or as a graph JSON file.
#[derive(clap::Args, Debug)]
pub struct GraphSource {
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    pub expr: Option<String>,
    /// Graph JSON file (or inline JSON).
    #[arg(long)]
    pub graph: Option<String>,
}

#[derive(clap::Args, Debug)]
pub struct MeasureSource {
    /// Jacobi JSON file (or inline JSON).
    #[arg(long, conflicts_with_all = ["expr", "graph"], required_unless_present_any = ["expr", "graph"])]
    pub jacobi: Option<String>,
    #[arg(long, conflicts_with = "graph")]
    pub expr: Option<String>,
    /// Graph JSON file (or inline JSON).
    #[arg(long)]
    pub graph: Option<String>,
    /// Moment order used with --expr.
    #[arg(long, default_value_t = 16)]
    pub order: usize,
    #[arg(long)]
    pub depth: Option<u32>,
}

#[derive(Subcommand, Debug)]
pub enum CheckCommand {
    /// Freeness of the factor components of a free product.
    Freeness {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Orthogonality conditions for orth(A,B).
    Orthogonality {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Freeness with subordination on branch(A,B,j,m).
    Sfreeness {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Test the unit condition with φ(w2)φ(w2) in place of φ(w1)φ(w2).
        #[arg(long)]
        printed: bool,
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Transform identities relating the convolutions.
    Prop31 {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        order: usize,
    },
    /// Walk moments of mfree(A,B,m) against the convolution pipelines.
    Decomp {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        depth: Option<u32>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FamilyArg {
    #[value(name = "KnKm")]
    KnKm,
    #[value(name = "KnFm")]
    KnFm,
    #[value(name = "Tn")]
    Tn,
    #[value(name = "Hn")]
    Hn,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ConvOp {
    Boolean,
    Monotone,
    Orth,
    Sfree,
    Free,
    Mfree,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses the arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    Outcome {
                        code: 0,
                        stdout: e.to_string(),
                        stderr: String::new(),
                    }
                }
                _ => {
                    let err = CliError::Usage(e.to_string().trim().to_string());
                    failure(&err, String::new())
                }
            };
        }
    };
    let mut stdout = String::new();
    match execute(cli.command, &mut stdout) {
        Ok(()) => Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => failure(&e, stdout),
    }
}

fn failure(e: &CliError, stdout: String) -> Outcome {
    Outcome {
        code: e.exit_code(),
        stdout,
        stderr: format!("{}\n", e.to_json()),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("serializable"))
}

fn graph_of(text: &str, default_depth: u32) -> CliResult<(Expr, RootedGraph)> {
    let e = parse(text)?;
    let g = e.build(default_depth)?;
    Ok((e, g))
}

fn load_graph(expr: Option<&str>, graph: Option<&str>, default_depth: u32) -> CliResult<RootedGraph> {
    match (expr, graph) {
        (Some(text), _) => Ok(graph_of(text, default_depth)?.1),
        (None, Some(file)) => {
            let v = read_source(file)?;
            let json: GraphJson =
                serde_json::from_value(v).map_err(|e| CliError::Usage(format!("invalid graph JSON: {e}")))?;
            Ok(RootedGraph::from_json(&json)?)
        }
        (None, None) => Err(CliError::Usage("give --expr or --graph".into())),
    }
}

fn read_source(arg: &str) -> CliResult<Value> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Io(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{arg}: invalid JSON: {e}")))
}

fn parse_jacobi(v: Value) -> CliResult<JacobiParams> {
    let j: JacobiJson = serde_json::from_value(v).map_err(|e| CliError::Usage(format!("invalid Jacobi JSON: {e}")))?;
    Ok(JacobiParams::from_json(&j)?)
}

/// A distribution from `{"moments": [...]}` or from Jacobi JSON.
fn read_distribution(arg: &str, order: usize) -> CliResult<Distribution> {
    let v = read_source(arg)?;
    if let Some(ms) = v.get("moments") {
        let items = ms.as_array().ok_or_else(|| CliError::Usage("\"moments\" must be an array".into()))?;
        let coeffs = items
            .iter()
            .map(|x| {
                let s = match x {
                    Value::String(s) => s.clone(),
                    Value::Number(n) if n.is_i64() => n.to_string(),
                    _ => return Err(CliError::Usage(format!("moment {x} is not an exact number"))),
                };
                parse_q(&s).ok_or_else(|| CliError::Usage(format!("cannot parse moment \"{s}\"")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let d = Distribution::new(MomentSeq::new(coeffs)?);
        if d.order() < order {
            return Err(freegraph::Error::OrderTooHigh {
                requested: order,
                available: d.order(),
            }
            .into());
        }
        Ok(d.truncated(order)?)
    } else {
        let j = parse_jacobi(v)?;
        Ok(Distribution::new(jacobi_to_moments(&j, order)?))
    }
}

fn moments_json(m: &MomentSeq) -> Value {
    json!({ "moments": m.to_strings() })
}

fn default_depth(order: usize) -> u32 {
    order.div_ceil(2).max(1) as u32
}

/// Jacobi data of the source; expressions get a detected periodic tail when
/// one is visible. Returns whether the tail was detected (or not needed).
fn measure_jacobi(src: &MeasureSource) -> CliResult<(JacobiParams, bool)> {
    if let Some(path) = &src.jacobi {
        let j = parse_jacobi(read_source(path)?)?;
        let ok = j.tail() != Tail::Truncated;
        return Ok((j, ok));
    }
    let g = load_graph(
        src.expr.as_deref(),
        src.graph.as_deref(),
        src.depth.unwrap_or(default_depth(src.order)),
    )?;
    let d = Distribution::new(moments(VertexState::root(&g), src.order)?);
    let j = moments_to_jacobi(&d)?;
    if j.tail() == Tail::Finite {
        return Ok((j, true));
    }
    match detect_tail(j.alpha(), j.omega(), TailOptions::default()) {
        Some((pre, per)) => Ok((JacobiParams::periodic(j.alpha().to_vec(), j.omega().to_vec(), pre, per)?, true)),
        None => Ok((j, false)),
    }
}

fn parse_grid(spec: &str) -> CliResult<(f64, f64, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Usage(format!("grid must be a:b:steps, got \"{spec}\""));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if steps == 0 || b < a {
        return Err(bad());
    }
    Ok((a, b, steps))
}

fn parse_eps(spec: Option<&str>) -> CliResult<EpsSchedule> {
    match spec {
        None => Ok(EpsSchedule::default()),
        Some("boundary") => Ok(EpsSchedule::BoundaryValue),
        Some(list) => {
            let eps = list
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::Usage(format!("bad epsilon list \"{list}\"")))?;
            if eps.is_empty() || eps.iter().any(|e| *e <= 0.0) {
                return Err(CliError::Usage("epsilon values must be positive".into()));
            }
            Ok(EpsSchedule::Richardson(eps))
        }
    }
}

fn parse_params(spec: &str, count: usize) -> CliResult<Vec<u32>> {
    let v = spec
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Usage(format!("bad parameter list \"{spec}\"")))?;
    if v.len() != count || v.contains(&0) {
        return Err(CliError::Usage(format!("expected {count} positive parameter(s), got \"{spec}\"")));
    }
    Ok(v)
}

fn parse_v0(g: &RootedGraph, spec: &str) -> CliResult<Vec<usize>> {
    let unknown = |w: &str| CliError::Domain(freegraph::Error::UnknownWord(w.to_string()));
    if spec == "root" {
        return Ok(vec![g.root()]);
    }
    if let Some(words) = spec.strip_prefix("word:") {
        return words
            .split(';')
            .map(|w| {
                let v = Vertex::parse(w).ok_or_else(|| CliError::Usage(format!("bad word \"{w}\"")))?;
                g.index_of(&v).ok_or_else(|| unknown(w))
            })
            .collect();
    }
    if let Some(rest) = spec.strip_prefix("level0") {
        // The builtin families put the K_n copy through the root in factor 1.
        let factor: u16 = match rest.strip_prefix(':') {
            Some("KnKm" | "KnFm") => 1,
            Some(f) => f.parse().map_err(|_| CliError::Usage(format!("bad factor in \"{spec}\"")))?,
            None if rest.is_empty() => 1,
            None => return Err(CliError::Usage(format!("bad vertex-set spec \"{spec}\""))),
        };
        let mut v = vec![g.root()];
        v.extend((0..g.num_vertices()).filter(|&i| {
            let w = g.vertex(i);
            w.len() == 1 && w.word[0].factor == factor
        }));
        return Ok(v);
    }
    Err(CliError::Usage(format!("bad vertex-set spec \"{spec}\"")))
}

fn report_out(out: &mut String, report: &CheckReport) -> CliResult<()> {
    let failed = report.violations().count();
    let v = json!({
        "all_pass": failed == 0,
        "violations": failed,
        "entries": report.entries,
    });
    out.push_str(&to_json(&v));
    if failed > 0 {
        return Err(CliError::CheckFailed {
            failed,
            total: report.entries.len(),
        });
    }
    Ok(())
}

fn execute(cmd: Command, out: &mut String) -> CliResult<()> {
    match cmd {
        Command::Moments {
            source,
            order,
            base,
            depth,
        } => {
            let g = load_graph(
                source.expr.as_deref(),
                source.graph.as_deref(),
                depth.unwrap_or(default_depth(order)),
            )?;
            let state = match base {
                None => VertexState::root(&g),
                Some(w) => {
                    let v = Vertex::parse(&w).ok_or_else(|| CliError::Usage(format!("bad word \"{w}\"")))?;
                    let i = g.index_of(&v).ok_or(freegraph::Error::UnknownWord(w.clone()))?;
                    VertexState::at(&g, i)?
                }
            };
            out.push_str(&to_json(&moments_json(&moments(state, order)?)));
        }
        Command::Jacobi { source, order, depth } => {
            let g = load_graph(
                source.expr.as_deref(),
                source.graph.as_deref(),
                depth.unwrap_or(default_depth(order)),
            )?;
            let d = Distribution::new(moments(VertexState::root(&g), order)?);
            out.push_str(&to_json(&moments_to_jacobi(&d)?.to_json()));
        }
        Command::Density {
            source,
            grid,
            eps,
            out: path,
        } => {
            let (j, detected) = measure_jacobi(&source)?;
            let schedule = parse_eps(eps.as_deref())?;
            let (a, b, steps) = parse_grid(&grid)?;
            let rows = (0..=steps)
                .map(|i| {
                    let x = a + (b - a) * i as f64 / steps as f64;
                    Ok((x, freegraph::measures::density(&j, x, &schedule)?))
                })
                .collect::<CliResult<Vec<_>>>()?;
            let csv = grid_to_csv(&rows);
            match path {
                None => out.push_str(&csv),
                Some(p) => {
                    std::fs::write(&p, csv).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                    let m = SpectralMeasure::from_jacobi(&j)?;
                    let mut v = serde_json::to_value(m.to_json(Some(file_name(&p)))).expect("serializable");
                    v["tail_detected"] = json!(detected);
                    out.push_str(&to_json(&v));
                }
            }
        }
        Command::Atoms { source } => {
            let (j, detected) = measure_jacobi(&source)?;
            let m = SpectralMeasure::from_jacobi(&j)?;
            let mut v = serde_json::to_value(m.to_json(None)).expect("serializable");
            v["tail_detected"] = json!(detected);
            out.push_str(&to_json(&v));
        }
        Command::Spectrum { family, params, depth } => {
            let fam = match family {
                FamilyArg::Tn => BuiltinFamily::Tn { n: parse_params(&params, 1)?[0] },
                FamilyArg::Hn => BuiltinFamily::Hn { n: parse_params(&params, 1)?[0] },
                FamilyArg::KnKm => {
                    let p = parse_params(&params, 2)?;
                    BuiltinFamily::KnKm { n: p[0], m: p[1] }
                }
                FamilyArg::KnFm => {
                    let p = parse_params(&params, 2)?;
                    BuiltinFamily::KnFm { n: p[0], m: p[1] }
                }
            };
            let dec = builtin_vacuum_set(fam, depth)?;
            let spec = spectrum(&dec.vacua, TailOptions::default())?;
            let mut report = report_json(&dec.qc, &spec);
            report.generating = Some(generating_check(&dec.qc, &dec.vacua, depth + 1)?);
            out.push_str(&to_json(&report));
        }
        Command::Qdecomp { source, v0, depth } => {
            let g = load_graph(
                source.expr.as_deref(),
                source.graph.as_deref(),
                u32::try_from(depth + 2).unwrap_or(u32::MAX),
            )?;
            let sources = parse_v0(&g, &v0)?;
            let qc = quantum_components(&g, distance_partition(&g, &sources)?);
            let interior = qc.interior_depth().ok_or(freegraph::Error::DepthExceeded {
                requested: depth,
                available: 0,
            })?;
            let (vs, rejected) = generic_vacuum_set(&qc);
            let spec = spectrum(&vs, TailOptions::default())?;
            let mut report = report_json(&qc, &spec);
            report.generating = Some(generating_check(&qc, &vs, depth.min(interior))?);
            report.rejected = rejected;
            out.push_str(&to_json(&report));
        }
        Command::Graph { expr, depth } => {
            let (_, g) = graph_of(&expr, depth)?;
            out.push_str(&to_json(&g.to_json()));
        }
        Command::Check { which } => run_check(which, out)?,
        Command::Convolve { op, a, b, order, m } => {
            let da = read_distribution(&a, order)?;
            let db = read_distribution(&b, order)?;
            let r = match op {
                ConvOp::Boolean => boolean_conv(&da, &db, order)?,
                ConvOp::Monotone => monotone_conv(&da, &db, order)?,
                ConvOp::Orth => orth_conv(&da, &db, order)?,
                ConvOp::Sfree => sfree_conv(&da, &db, order)?,
                ConvOp::Free => free_conv(&da, &db, order)?,
                ConvOp::Mfree => {
                    let m = m.ok_or_else(|| CliError::Usage("--m is required for the m-free convolution".into()))?;
                    if m == 0 {
                        return Err(CliError::Usage("--m must be at least 1".into()));
                    }
                    mfree_conv(&da, &db, m, order)?
                }
            };
            let j = moments_to_jacobi(&r)?;
            let v = json!({"moments": r.moments().to_strings(), "jacobi": j.to_json()});
            out.push_str(&to_json(&v));
        }
    }
    Ok(())
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn run_check(which: CheckCommand, out: &mut String) -> CliResult<()> {
    let report = match which {
        CheckCommand::Freeness { expr, max_len, depth } => {
            let (_, g) = graph_of(&expr, depth.unwrap_or(default_depth(max_len)))?;
            let comps = free_components(&g)?;
            check_freeness(&g, &comps, max_len)?
        }
        CheckCommand::Orthogonality { expr, max_len, depth } => {
            let e = parse(&expr)?;
            let Expr::Orth(x, y) = e else {
                return Err(CliError::Usage("orthogonality check needs an expression orth(A,B)".into()));
            };
            let d = depth.unwrap_or(default_depth(max_len) + 1);
            check_orthogonality(&x.build(d)?, &y.build(d)?, max_len)?
        }
        CheckCommand::Sfreeness {
            expr,
            max_len,
            printed,
            depth,
        } => {
            let e = parse(&expr)?;
            let Expr::Branch(_, _, j, _) = &e else {
                return Err(CliError::Usage("s-freeness check needs an expression branch(A,B,j,m)".into()));
            };
            let j = *j as u16;
            let b = e.build(depth.unwrap_or(default_depth(max_len) + 1))?;
            if printed {
                check_sfreeness_unit(&b, j, max_len, UnitCondition::AsPrinted)?
            } else {
                check_sfreeness(&b, j, max_len)?
            }
        }
        CheckCommand::Prop31 { a, b, order } => {
            let da = read_distribution(&a, order)?;
            let db = read_distribution(&b, order)?;
            check_prop31(&da, &db, order)?
        }
        CheckCommand::Decomp { expr, depth } => {
            let e = parse(&expr)?;
            let Expr::MFree(gs, m) = &e else {
                return Err(CliError::Usage("decomposition check needs an expression mfree(A,B,m)".into()));
            };
            if gs.len() != 2 {
                return Err(CliError::Usage("decomposition check needs exactly two factors".into()));
            }
            let d = depth.unwrap_or(*m + 1);
            decomposition_pipelines(&gs[0].build(d)?, &gs[1].build(d)?, *m as usize)?.report
        }
    };
    report_out(out, &report)
}
