use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use quemit::graph::{builtin_target_graph, WeightedGraph};
use quemit::protocol::{builtin, builtin_info, parse_protocol, run, OutcomeMode, Protocol, BUILTINS};
use quemit::state::RegisterState;
use quemit::verify::{compare_graph, is_ame, kl_check_with, overlap, qecc312};
use serde::Serialize;

const EXIT_PARSE: u8 = 2;
const EXIT_EXEC: u8 = 3;
const EXIT_VERDICT: u8 = 4;

#[derive(Parser)]
#[command(name = "quemit", version, about = "Run and verify qudit emitter protocols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a protocol and write the photonic state and a run record
    Run(RunArgs),
    /// Check a state or code and write a JSON report; exit 4 if the check fails
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Print the builtin protocol table
    List,
    /// Print a builtin protocol as protocol text
    Show(BuiltinArgs),
    /// Write the target graph of a builtin as JSON
    Target {
        #[command(flatten)]
        builtin: BuiltinArgs,
        #[arg(long, default_value = "graph.json")]
        out: PathBuf,
    },
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["builtin", "file"])))]
#[command(group(clap::ArgGroup::new("outcomes").required(true).args(["seed", "force"])))]
struct RunArgs {
    /// Builtin protocol name (see `quemit list`)
    #[arg(long)]
    builtin: Option<String>,
    /// Protocol text file
    #[arg(long)]
    file: Option<PathBuf>,
    /// Chain length for linear-cz / linear-cz2
    #[arg(long)]
    n: Option<usize>,
    /// Local dimension; defaults to the smallest the builtin allows
    #[arg(long)]
    dim: Option<u32>,
    /// Sample measurement outcomes from this seed
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated outcomes, one per measurement in program order
    #[arg(long, value_delimiter = ',')]
    force: Option<Vec<u32>>,
    #[arg(long, default_value = "state.json")]
    out: PathBuf,
    #[arg(long, default_value = "run.json")]
    report: PathBuf,
}

#[derive(Args)]
struct BuiltinArgs {
    name: String,
    #[arg(long)]
    dim: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct VerifyOpts {
    #[arg(long, default_value_t = quemit::STATE_TOL, value_parser = positive)]
    tol: f64,
    #[arg(long, default_value = "report.json")]
    report: PathBuf,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Every marginal on at most half the sites is maximally mixed
    Ame {
        state: PathBuf,
        #[command(flatten)]
        opts: VerifyOpts,
    },
    /// The state equals the graph state of a graph file up to global phase
    Graph {
        state: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        opts: VerifyOpts,
    },
    /// Two states are equal up to global phase
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        opts: VerifyOpts,
    },
    /// Knill-Laflamme conditions for a named code
    Kl {
        #[arg(long)]
        code: String,
        /// Check error products up to weight d instead of d - 1
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        opts: VerifyOpts,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

/// An error together with the exit code it maps to.
struct Failure(u8, anyhow::Error);

trait Code<T> {
    fn code(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Code<T> for Result<T, E> {
    fn code(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure(code, e.into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Verify { check } => cmd_verify(check),
        Command::List => {
            cmd_list();
            Ok(true)
        }
        Command::Show(args) => cmd_show(args),
        Command::Target { builtin, out } => cmd_target(builtin, &out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERDICT),
        Err(Failure(code, err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}

fn resolve_builtin(name: &str, dim: Option<u32>, n: Option<usize>) -> anyhow::Result<Protocol> {
    let info = builtin_info(name)?;
    let q = dim.unwrap_or(info.dims.smallest());
    Ok(builtin(name, q, n)?)
}

fn load_protocol(args: &RunArgs) -> anyhow::Result<Protocol> {
    if let Some(name) = &args.builtin {
        return resolve_builtin(name, args.dim, args.n);
    }
    let path = args.file.as_ref().expect("clap enforces a source");
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path
        .file_stem()
        .map_or("protocol".into(), |s| s.to_string_lossy().into_owned());
    let protocol = parse_protocol(&name, &text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(q) = args.dim {
        if q != protocol.q {
            bail!("--dim {q} conflicts with `dim {}` in {}", protocol.q, path.display());
        }
    }
    Ok(protocol)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn cmd_run(args: RunArgs) -> Result<bool, Failure> {
    let protocol = load_protocol(&args).code(EXIT_PARSE)?;
    let mode = match (&args.seed, &args.force) {
        (Some(seed), _) => OutcomeMode::Sample(*seed),
        (None, Some(list)) => OutcomeMode::Forced(list.clone()),
        (None, None) => unreachable!("clap enforces an outcome mode"),
    };
    let record = run(&protocol, &mode).code(EXIT_EXEC)?;
    fs::write(&args.out, record.state.to_json() + "\n")
        .with_context(|| format!("writing {}", args.out.display()))
        .code(EXIT_EXEC)?;
    write_json(&args.report, &record.to_file()).code(EXIT_EXEC)?;
    println!(
        "{}: q={} photons={} outcomes={:?} branch probability {:.6}",
        record.protocol,
        protocol.q,
        record.state.num_sites(),
        record.outcomes(),
        record.branch_probability
    );
    Ok(true)
}

fn read_state(path: &Path) -> Result<RegisterState, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .code(EXIT_PARSE)?;
    RegisterState::from_json(&text)
        .with_context(|| format!("loading state from {}", path.display()))
        .code(EXIT_PARSE)
}

#[derive(Serialize)]
struct EquivReport {
    overlap: f64,
    tol: f64,
    verdict: bool,
}

fn cmd_verify(check: VerifyCommand) -> Result<bool, Failure> {
    match check {
        VerifyCommand::Ame { state, opts } => {
            let s = read_state(&state)?;
            let r = is_ame(&s, opts.tol);
            match &r.worst {
                Some(w) => println!(
                    "AME({}, {}): {} (worst subset {:?}, purity {:.12})",
                    r.n, r.q, verdict(r.verdict), w.subset, w.purity
                ),
                None => println!("AME({}, {}): {} (no subsets to check)", r.n, r.q, verdict(r.verdict)),
            }
            write_json(&opts.report, &r).code(EXIT_EXEC)?;
            Ok(r.verdict)
        }
        VerifyCommand::Graph { state, graph, opts } => {
            let s = read_state(&state)?;
            let text = fs::read_to_string(&graph)
                .with_context(|| format!("reading {}", graph.display()))
                .code(EXIT_PARSE)?;
            let g = WeightedGraph::from_json(&text)
                .with_context(|| format!("loading graph from {}", graph.display()))
                .code(EXIT_PARSE)?;
            let r = compare_graph(&s, &g, opts.tol).code(EXIT_PARSE)?;
            println!("graph: {} (|overlap| = {:.12})", verdict(r.verdict), r.overlap);
            write_json(&opts.report, &r).code(EXIT_EXEC)?;
            Ok(r.verdict)
        }
        VerifyCommand::Equiv { a, b, opts } => {
            let (sa, sb) = (read_state(&a)?, read_state(&b)?);
            let ov = overlap(&sa, &sb).code(EXIT_PARSE)?;
            let r = EquivReport {
                overlap: ov,
                tol: opts.tol,
                verdict: ov >= 1.0 - opts.tol,
            };
            println!("equiv: {} (|overlap| = {:.12})", verdict(r.verdict), r.overlap);
            write_json(&opts.report, &r).code(EXIT_EXEC)?;
            Ok(r.verdict)
        }
        VerifyCommand::Kl { code, strict, opts } => {
            let spec = match code.as_str() {
                "qecc312" => qecc312(),
                other => return Err(Failure(EXIT_PARSE, anyhow!("unknown code `{other}`"))),
            };
            let r = kl_check_with(&spec, strict, opts.tol).code(EXIT_EXEC)?;
            let worst = r.worst.as_ref().map_or(0.0, |w| w.deviation);
            println!(
                "KL [[{}, {}, {}]]_{} up to weight {}: {} ({} operators, worst deviation {worst:.3e})",
                r.n,
                r.k,
                r.d,
                r.q,
                r.max_weight,
                verdict(r.verdict),
                r.records.len()
            );
            write_json(&opts.report, &r).code(EXIT_EXEC)?;
            Ok(r.verdict)
        }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_list() {
    println!("{:<18} {:>8}  {:<7} {:>8}  interference", "protocol", "photons", "q", "emitters");
    for b in &BUILTINS {
        println!(
            "{:<18} {:>8}  {:<7} {:>8}  {}",
            b.name,
            b.photons_label(),
            b.dims.to_string(),
            b.emitters,
            if b.interference { "yes" } else { "no" }
        );
    }
}

fn cmd_show(args: BuiltinArgs) -> Result<bool, Failure> {
    let p = resolve_builtin(&args.name, args.dim, args.n).code(EXIT_PARSE)?;
    print!("{}", p.to_text());
    Ok(true)
}

fn cmd_target(args: BuiltinArgs, out: &Path) -> Result<bool, Failure> {
    let info = builtin_info(&args.name).code(EXIT_PARSE)?;
    let q = args.dim.unwrap_or(info.dims.smallest());
    let graph_name = match info.verification {
        quemit::protocol::Verification::Graph(g) | quemit::protocol::Verification::AmeGraph(g) => g,
        quemit::protocol::Verification::Codeword(_) => {
            return Err(Failure(
                EXIT_PARSE,
                anyhow!("`{}` targets a codeword, not a graph", info.name),
            ))
        }
    };
    let g = builtin_target_graph(graph_name, q, args.n).code(EXIT_PARSE)?;
    write_json(out, &g.to_file()).code(EXIT_EXEC)?;
    println!("wrote {} ({} vertices, {} edges)", out.display(), g.n(), g.edges().len());
    Ok(true)
}
