//! Command-line front end for `gridstab`.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gridstab::abelian::{AbelianGroup, GroupElement};
use gridstab::aut::{AutError, EngineConfig};
use gridstab::census::{
    self, CensusError, ReportFormat, SweepJob, SweepOptions, SweepReport,
};
use gridstab::cayley::{cayley_graph, grid_to_cayley, ConnectionSet, GridKind, GridParams};
use gridstab::exec::Execution;
use gridstab::graph::Graph;
use gridstab::stability::{
    classify_grid, classify_val4, classify_val6, iso_shift_witness_with, stability_verdict,
    val4_witness, StabilityError, Subject, Val4Clause, VerdictRecord,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DISAGREEMENT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ENGINE_LIMIT: i32 = 3;

/// What a finished invocation printed and how it exits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome { code, stdout: String::new(), stderr }
    }
}

#[derive(Parser, Debug)]
#[command(name = "gridstab", version, about = "Stability of toroidal grids and abelian Cayley graphs")]
struct Cli {
    /// Search-node budget per engine call; overrides GRIDSTAB_NODE_BUDGET.
    #[arg(long, global = true)]
    node_budget: Option<u64>,
    /// Largest graph the engine accepts.
    #[arg(long, global = true)]
    max_vertices: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form classification; never runs the automorphism engine.
    Classify(Target),
    /// Brute-force verdict from |Aut X| and |Aut BX|.
    Check(CheckArgs),
    /// An explicit isomorphism Cay(G; S) -> Cay(G; S + z).
    Witness(Target),
    /// Classifier against brute force over a parameter range.
    Sweep(SweepArgs),
    /// Write a graph (or its double cover) as graph6.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Qd,
    Tr,
    /// Cay(G; ±a, ±b)
    Val4,
    /// Cay(G; ±a, ±b, ±(a+b))
    Val6,
}

#[derive(Args, Debug)]
struct Target {
    family: Family,
    /// m n r for qd and tr.
    #[arg(allow_negative_numbers = true, num_args = 0..=3)]
    params: Vec<i64>,
    /// Cyclic factors of G, e.g. 8,2 (val4 and val6).
    #[arg(long, value_delimiter = ',')]
    moduli: Vec<u64>,
    /// Coordinates of a, e.g. 1,0.
    #[arg(short = 'a', long = "a", value_delimiter = ',', allow_negative_numbers = true)]
    a: Vec<i64>,
    /// Coordinates of b.
    #[arg(short = 'b', long = "b", value_delimiter = ',', allow_negative_numbers = true)]
    b: Vec<i64>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    target: Option<Target>,
    /// Read the graph from a graph6 file instead.
    #[arg(long, conflicts_with = "family")]
    graph6: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepFamily {
    Qd,
    Tr,
    Val4,
    Val6,
    /// Cay(Z_n x Z_k; ±(1,0), ±(0,1), ±(1,1)), 2 <= n <= 12, k in {2,3}.
    Znxzk,
}

#[derive(Args, Debug)]
struct SweepArgs {
    family: SweepFamily,
    #[arg(long)]
    max_m: Option<usize>,
    #[arg(long)]
    max_n: Option<usize>,
    /// Largest m*n included; defaults to max_m*max_n.
    #[arg(long)]
    cap: Option<usize>,
    /// Largest group order for val4 and val6.
    #[arg(long)]
    max_order: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Keep the complete rows of an existing CSV report and continue.
    #[arg(long)]
    resume: bool,
    /// Evaluate rows on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    target: Target,
    /// Export the canonical double cover instead.
    #[arg(long)]
    cover: bool,
    #[arg(long)]
    out: PathBuf,
}

/// A failure with its exit code.
struct Failure(i32, String);

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure(EXIT_USAGE, msg.into())
    }
}

impl From<StabilityError> for Failure {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::Engine(e) => e.into(),
            other => Failure(EXIT_USAGE, other.to_string()),
        }
    }
}

impl From<AutError> for Failure {
    fn from(e: AutError) -> Self {
        Failure(EXIT_ENGINE_LIMIT, e.to_string())
    }
}

impl From<CensusError> for Failure {
    fn from(e: CensusError) -> Self {
        match e {
            CensusError::Io(e) => Failure(EXIT_USAGE, format!("report i/o: {e}")),
            other => Failure(EXIT_USAGE, other.to_string()),
        }
    }
}

/// A parsed graph subject.
enum Subj {
    Grid(GridParams),
    Val4(AbelianGroup, GroupElement, GroupElement),
    Val6(AbelianGroup, GroupElement, GroupElement),
}

impl Subj {
    fn graph(&self) -> Result<Graph, Failure> {
        Ok(match self {
            Subj::Grid(p) => p.graph(),
            Subj::Val4(g, a, b) => cayley_graph(&connection_set(g, &[a.clone(), b.clone()])?),
            Subj::Val6(g, a, b) => {
                cayley_graph(&connection_set(g, &[a.clone(), b.clone(), g.add(a, b)])?)
            }
        })
    }

    fn subject(&self) -> Subject {
        match self {
            Subj::Grid(p) => Subject::grid(p),
            Subj::Val4(g, a, b) => Subject::group(g, &[a.clone(), b.clone()]),
            Subj::Val6(g, a, b) => Subject::group(g, &[a.clone(), b.clone(), g.negate(&g.add(a, b))]),
        }
    }
}

fn connection_set(g: &AbelianGroup, gens: &[GroupElement]) -> Result<ConnectionSet, Failure> {
    ConnectionSet::symmetric(g.clone(), gens).map_err(|e| Failure::usage(e.to_string()))
}

fn parse_target(t: &Target) -> Result<Subj, Failure> {
    match t.family {
        Family::Qd | Family::Tr => {
            if !t.moduli.is_empty() || !t.a.is_empty() || !t.b.is_empty() {
                return Err(Failure::usage("--moduli, -a and -b apply to val4 and val6 only"));
            }
            let [m, n, r] = t.params[..] else {
                return Err(Failure::usage(format!(
                    "expected three integers m n r, got {}",
                    t.params.len()
                )));
            };
            let kind = if t.family == Family::Qd { GridKind::Qd } else { GridKind::Tr };
            GridParams::new(kind, m, n, r)
                .map(Subj::Grid)
                .map_err(|e| Failure::usage(e.to_string()))
        }
        Family::Val4 | Family::Val6 => {
            if !t.params.is_empty() {
                return Err(Failure::usage("val4 and val6 take --moduli, -a and -b, not m n r"));
            }
            if t.moduli.is_empty() {
                return Err(Failure::usage("--moduli is required for val4 and val6"));
            }
            if let Some(d) = t.moduli.iter().find(|&&d| d < 1) {
                return Err(Failure::usage(format!("every modulus must be at least 1, got {d}")));
            }
            let g = AbelianGroup::direct_product(&t.moduli).map_err(|e| Failure::usage(e.to_string()))?;
            let el = |name: &str, coords: &[i64]| -> Result<GroupElement, Failure> {
                if coords.len() != t.moduli.len() {
                    return Err(Failure::usage(format!(
                        "-{name} needs {} coordinates, got {}",
                        t.moduli.len(),
                        coords.len()
                    )));
                }
                // coordinates are in the given factors, not invariant-factor form
                let mut acc = g.zero();
                for (i, &c) in coords.iter().enumerate() {
                    let e = &g.named_generators()[i].1;
                    acc = g.add(&acc, &g.scalar_multiply(c, e));
                }
                Ok(acc)
            };
            let (a, b) = (el("a", &t.a)?, el("b", &t.b)?);
            Ok(if t.family == Family::Val4 { Subj::Val4(g, a, b) } else { Subj::Val6(g, a, b) })
        }
    }
}

fn engine_config(cli: &Cli) -> Result<EngineConfig, Failure> {
    let mut cfg = EngineConfig::from_env();
    if let Some(b) = cli.node_budget {
        if b < 1 {
            return Err(Failure::usage("--node-budget must be at least 1"));
        }
        cfg.node_budget = b;
    }
    if let Some(v) = cli.max_vertices {
        if v < 1 {
            return Err(Failure::usage("--max-vertices must be at least 1"));
        }
        cfg.max_vertices = v;
    }
    Ok(cfg)
}

fn classify(t: &Target, cfg: &EngineConfig) -> Result<String, Failure> {
    let subj = parse_target(t)?;
    let c = match &subj {
        Subj::Grid(p) => classify_grid(p),
        Subj::Val4(g, a, b) => classify_val4(g, a, b, cfg)?,
        Subj::Val6(g, a, b) => classify_val6(g, a, b)?,
    };
    Ok(VerdictRecord::from_classification(subj.subject(), &c).to_json())
}

fn check(args: &CheckArgs, cfg: &EngineConfig) -> Result<String, Failure> {
    let (subject, x) = match (&args.graph6, &args.target) {
        (Some(path), _) => {
            let bytes = fs::read(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            let line = bytes.split(|&c| c == b'\n').next().unwrap_or_default();
            let x = gridstab::graph6::decode(line).map_err(|e| Failure::usage(e.to_string()))?;
            (Subject::graph(&x), x)
        }
        (None, Some(t)) => {
            let subj = parse_target(t)?;
            let x = subj.graph()?;
            (subj.subject(), x)
        }
        (None, None) => return Err(Failure::usage("check needs a graph: qd|tr m n r, val4|val6, or --graph6 FILE")),
    };
    let v = stability_verdict(&x, cfg)?;
    Ok(VerdictRecord::from_stability(subject, &v).to_json())
}

fn witness(t: &Target, cfg: &EngineConfig) -> Result<Outcome, Failure> {
    let subj = parse_target(t)?;
    let (s, val4_pair) = match &subj {
        Subj::Grid(p) => {
            let s = grid_to_cayley(p).map_err(|e| Failure::usage(e.to_string()))?;
            let pair = (p.kind == GridKind::Qd).then(|| {
                let g = s.group();
                (g.clone(), g.generator("a").unwrap().clone(), g.generator("b").unwrap().clone())
            });
            (s, pair)
        }
        Subj::Val4(g, a, b) => (connection_set(g, &[a.clone(), b.clone()])?, Some((g.clone(), a.clone(), b.clone()))),
        Subj::Val6(g, a, b) => (connection_set(g, &[a.clone(), b.clone(), g.add(a, b)])?, None),
    };
    if let Some((g, a, b)) = val4_pair {
        if s.valency() == 4 && g.generates(&[a.clone(), b.clone()]) {
            let c = classify_val4(&g, &a, &b, cfg)?;
            let clause = match c.matched_clause.as_deref() {
                Some("Thm3.1(1)") => Some(Val4Clause::One),
                Some("Thm3.1(2)") => Some(Val4Clause::Two),
                _ => None,
            };
            if let Some(clause) = clause {
                let w = val4_witness(&g, &a, &b, clause)?;
                let clause = c.matched_clause.as_deref().unwrap();
                return Ok(Outcome::ok(witness_json(&subj, &s, clause, &w)));
            }
        }
    }
    match iso_shift_witness_with(&s, cfg)? {
        Some(w) => Ok(Outcome::ok(witness_json(&subj, &s, "shift-isomorphism", &w))),
        None => Ok(Outcome {
            code: EXIT_OK,
            stdout: "null\n".into(),
            stderr: "gridstab: no implemented construction gives a witness for this graph\n".into(),
        }),
    }
}

fn witness_json(
    subj: &Subj,
    s: &ConnectionSet,
    construction: &str,
    w: &gridstab::stability::InstabilityWitness,
) -> String {
    let g = s.group();
    let subject = serde_json::to_value(subj.subject()).expect("subjects serialize");
    let out = json!({
        "subject": subject,
        "group": gridstab::stability::group_name(g),
        "connection_set": s.elements().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "construction": construction,
        "shift": w.shift.to_string(),
        "group_automorphism": w.group_automorphism.as_ref().map(|m| {
            m.iter().map(|(k, v)| (k.clone(), v.to_string())).collect::<std::collections::BTreeMap<_, _>>()
        }),
        "epsilon": w.epsilon,
        "elements": g.elements().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "vertex_map": w.vertex_map,
        "verified": w.verified,
    });
    serde_json::to_string_pretty(&out).expect("json") + "\n"
}

fn sweep(args: &SweepArgs, cfg: &EngineConfig) -> Result<(String, SweepReport), Failure> {
    let jobs: Vec<SweepJob> = match args.family {
        SweepFamily::Qd | SweepFamily::Tr => {
            let kind = if args.family == SweepFamily::Qd { GridKind::Qd } else { GridKind::Tr };
            let (Some(max_m), Some(max_n)) = (args.max_m, args.max_n) else {
                return Err(Failure::usage("qd and tr sweeps need --max-m and --max-n"));
            };
            if max_m < 2 {
                return Err(Failure::usage(format!("--max-m must be at least 2, got {max_m}")));
            }
            if max_n < 2 {
                return Err(Failure::usage(format!("--max-n must be at least 2, got {max_n}")));
            }
            let cap = args.cap.unwrap_or(max_m * max_n);
            if cap < 4 {
                return Err(Failure::usage(format!("--cap must be at least 4, got {cap}")));
            }
            census::grid_jobs(kind, max_m, max_n, cap)?
        }
        SweepFamily::Val4 | SweepFamily::Val6 => {
            let Some(max_order) = args.max_order else {
                return Err(Failure::usage("val4 and val6 sweeps need --max-order"));
            };
            if !(3..=256).contains(&max_order) {
                return Err(Failure::usage(format!(
                    "--max-order must be between 3 and 256, got {max_order}"
                )));
            }
            if args.family == SweepFamily::Val4 {
                census::val4_jobs(max_order)
            } else {
                census::val6_jobs(max_order)
            }
        }
        SweepFamily::Znxzk => census::val6_znxzk_jobs(),
    };
    let opts = SweepOptions {
        execution: if args.sequential { Execution::Sequential } else { Execution::Parallel },
        engine: cfg.clone(),
        ..SweepOptions::default()
    };
    let report = match args.format {
        FormatArg::Csv => census::sweep_to_csv(&jobs, &opts, &args.out, args.resume)?,
        FormatArg::Json => {
            if args.resume {
                return Err(Failure::usage("--resume works with --format csv only"));
            }
            let r = census::run_jobs(&jobs, &opts, |_| Ok(()))?;
            fs::write(&args.out, census::emit_report(&r, ReportFormat::Json))
                .map_err(|e| Failure::usage(format!("cannot write {}: {e}", args.out.display())))?;
            r
        }
    };
    let summary = serde_json::to_string_pretty(&report.summary).expect("json");
    Ok((summary, report))
}

fn export(args: &ExportArgs) -> Result<String, Failure> {
    let subj = parse_target(&args.target)?;
    let mut x = subj.graph()?;
    if args.cover {
        x = x.double_cover();
    }
    let mut bytes = gridstab::graph6::encode(&x);
    bytes.push(b'\n');
    fs::write(&args.out, &bytes)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", args.out.display())))?;
    Ok(String::new())
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    let cfg = engine_config(cli)?;
    let with_newline = |mut s: String| {
        if !s.is_empty() && !s.ends_with('\n') {
            s.push('\n');
        }
        Outcome::ok(s)
    };
    match &cli.command {
        Command::Classify(t) => classify(t, &cfg).map(with_newline),
        Command::Check(args) => check(args, &cfg).map(with_newline),
        Command::Witness(t) => witness(t, &cfg),
        Command::Export(args) => export(args).map(with_newline),
        Command::Sweep(args) => {
            let (summary, report) = sweep(args, &cfg)?;
            let mut out = with_newline(summary);
            if report.summary.engine_errors > 0 {
                out.code = EXIT_ENGINE_LIMIT;
                out.stderr = format!(
                    "{} rows hit the engine limit\n",
                    report.summary.engine_errors
                );
            } else if report.summary.disagreements > 0 {
                out.code = EXIT_DISAGREEMENT;
                let first = report.rows.iter().find(|r| !r.agrees).expect("counted");
                out.stderr = format!(
                    "{} disagreements, first at {}\n",
                    report.summary.disagreements, first.subject
                );
            }
            Ok(out)
        }
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome::ok(text)
                }
                _ => Outcome::fail(EXIT_USAGE, text),
            };
        }
    };
    match dispatch(&cli) {
        Ok(out) => out,
        Err(Failure(code, msg)) => Outcome::fail(code, format!("gridstab: {msg}")),
    }
}
