use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hgt_cli::formats::{
    format_hypergraph, format_matrix, format_transcript, parse_hypergraph, parse_matrix,
    FormatError, LoadedHypergraph,
};
use hgt_cli::generator::{generate, GenSpec};
use hgt_cli::sweep::{parse_config, run_sweep, Source};
use hgt_cli::Protocol;
use hgt_core::{
    build, eval_selector_bound, is_p_selector, is_selector, is_separable, required_chi_pool,
    run_non_adaptive, run_three_stage, run_two_stage, BuilderConfig, BuilderMode, Hypergraph,
    ProtocolTranscript, SelectorVerdict, TestOracle,
};

#[derive(Parser)]
#[command(
    name = "hgt",
    version,
    about = "Group testing strategies for hypergraphs of candidate defective sets"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the structural parameters of an instance
    Params(ParamsArgs),
    /// Generate a seeded random instance
    Gen(GenArgs),
    /// Build a selector matrix and report its size against the bound
    Build(BuildArgs),
    /// Check a matrix against an instance (selector or separable code)
    Verify(VerifyArgs),
    /// Run an identification protocol and print transcripts
    Simulate(SimulateArgs),
    /// Run a parameter sweep from a config file
    Sweep(SweepArgs),
}

#[derive(clap::Args)]
struct ParamsArgs {
    /// Hypergraph file
    #[arg(long)]
    input: PathBuf,
    /// Number of non-distinguished edges in the chi parameter
    #[arg(long, default_value_t = 1)]
    q: usize,
    /// Write a compacted copy (uncovered vertices removed, ids renumbered)
    #[arg(long)]
    compact_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct GenArgs {
    /// Vertex count
    #[arg(long)]
    n: usize,
    /// Maximum edge size
    #[arg(long)]
    d: usize,
    /// Edge count
    #[arg(long)]
    edges: usize,
    /// Truncate a random subset of edges below size d
    #[arg(long)]
    non_uniform: bool,
    /// Required minimum pairwise difference (compute_p lower bound)
    #[arg(long, default_value_t = 1)]
    min_diff: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rejection-sampling attempt cap
    #[arg(long, default_value_t = 10_000)]
    attempts: u32,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Builder {
    Auto,
    Greedy,
    Randomized,
}

impl Builder {
    fn mode(self) -> BuilderMode {
        match self {
            Builder::Auto => BuilderMode::Auto,
            Builder::Greedy => BuilderMode::Greedy,
            Builder::Randomized => BuilderMode::Randomized,
        }
    }
}

#[derive(clap::Args)]
struct BuilderFlags {
    #[arg(long, value_enum, default_value_t = Builder::Auto)]
    builder: Builder,
    /// Candidate budget for the exact greedy enumeration
    #[arg(long)]
    budget: Option<u128>,
    /// Candidates per step for the sampled greedy
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl BuilderFlags {
    fn config(&self) -> BuilderConfig {
        let defaults = BuilderConfig::default();
        BuilderConfig {
            mode: self.builder.mode(),
            work_budget: self.budget.unwrap_or(defaults.work_budget),
            sample_pool: self.samples.unwrap_or(defaults.sample_pool),
            seed: self.seed,
            ..defaults
        }
    }
}

#[derive(clap::Args)]
struct BuildArgs {
    /// Hypergraph file
    #[arg(long)]
    input: PathBuf,
    /// Number of non-distinguished edges per S-set
    #[arg(long)]
    q: usize,
    /// Required identity rows per S-set submatrix
    #[arg(long)]
    m: usize,
    /// S-set complement size
    #[arg(long)]
    chi: usize,
    #[command(flatten)]
    builder: BuilderFlags,
    /// Matrix output file; with it the report goes to stdout, without it
    /// the matrix goes to stdout and the report to stderr
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Hypergraph file
    #[arg(long)]
    input: PathBuf,
    /// Matrix file
    #[arg(long)]
    matrix: PathBuf,
    /// Check the separable-code property instead of a selector
    #[arg(long)]
    separable: bool,
    /// Pairwise difference parameter (shorthand for --q 1 --chi p)
    #[arg(long, conflicts_with_all = ["q", "chi", "separable"])]
    p: Option<usize>,
    #[arg(long, requires = "m", conflicts_with = "separable")]
    q: Option<usize>,
    #[arg(long, conflicts_with = "separable")]
    m: Option<usize>,
    #[arg(long, requires = "q", conflicts_with = "separable")]
    chi: Option<usize>,
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// Hypergraph file
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    protocol: Protocol,
    /// Protocol parameter: p (non-adaptive), q (two-stage), b (three-stage)
    #[arg(long)]
    param: usize,
    /// `all` or a 1-based edge id
    #[arg(long, default_value = "all")]
    defective: String,
    /// Allow an arbitrary defective set given as comma-separated vertex
    /// ids; voids all guarantees
    #[arg(long, conflicts_with = "defective")]
    permissive_set: Option<String>,
    #[command(flatten)]
    builder: BuilderFlags,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SweepArgs {
    /// Sweep config file (key=value lines, comma-separated sweep lists)
    #[arg(long)]
    config: PathBuf,
    /// Table output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's worker cap
    #[arg(long)]
    workers: Option<usize>,
}

/// Command failure with its exit category: 1 usage/config, 2 validation,
/// 3 guarantee violation.
#[derive(Debug, thiserror::Error)]
enum CmdError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Guarantee(String),
}

impl CmdError {
    fn code(&self) -> u8 {
        match self {
            CmdError::Usage(_) => 1,
            CmdError::Validation(_) => 2,
            CmdError::Guarantee(_) => 3,
        }
    }
}

impl From<FormatError> for CmdError {
    fn from(e: FormatError) -> CmdError {
        CmdError::Validation(e.to_string())
    }
}

impl From<hgt_core::Error> for CmdError {
    fn from(e: hgt_core::Error) -> CmdError {
        CmdError::Validation(e.to_string())
    }
}

fn read_file(path: &PathBuf) -> Result<String, CmdError> {
    std::fs::read_to_string(path)
        .map_err(|e| CmdError::Usage(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&PathBuf>, content: &str) -> Result<(), CmdError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CmdError::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_instance(path: &PathBuf) -> Result<LoadedHypergraph, CmdError> {
    let loaded = parse_hypergraph(&read_file(path)?)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.exit_code() == 0 { 0 } else { 1 });
        }
    };
    let result = match cli.cmd {
        Cmd::Params(args) => cmd_params(args),
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Build(args) => cmd_build(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Simulate(args) => cmd_simulate(args),
        Cmd::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn cmd_params(args: ParamsArgs) -> Result<(), CmdError> {
    let loaded = load_instance(&args.input)?;
    let h = &loaded.hypergraph;
    let mut out = String::new();
    let _ = writeln!(out, "n={}", h.n());
    let _ = writeln!(out, "edges={}", h.edge_count());
    let _ = writeln!(out, "d={}", h.d());
    let _ = writeln!(out, "uniform={}", h.is_uniform());
    if h.edge_count() < 2 {
        let _ = writeln!(out, "p=undefined");
        let _ = writeln!(out, "chi=undefined");
        let _ = writeln!(out, "note=p and chi need at least 2 edges");
    } else {
        let _ = writeln!(out, "p={}", h.compute_p()?);
        let _ = writeln!(out, "q={}", args.q);
        let _ = writeln!(out, "chi={}", h.compute_chi(args.q)?);
    }
    print!("{out}");
    if let Some(path) = args.compact_out {
        let (compacted, _) = h.compact();
        write_output(Some(&path), &format_hypergraph(&compacted))?;
    } else if !loaded.warnings.is_empty() {
        eprintln!("hint: rerun with --compact-out FILE to drop uncovered vertices");
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), CmdError> {
    let spec = GenSpec {
        n: args.n,
        d: args.d,
        edges: args.edges,
        uniform: !args.non_uniform,
        min_diff: args.min_diff,
        seed: args.seed,
        attempts: args.attempts,
    };
    let h = generate(&spec).map_err(|e| CmdError::Usage(e.to_string()))?;
    write_output(args.out.as_ref(), &format_hypergraph(&h))
}

fn cmd_build(args: BuildArgs) -> Result<(), CmdError> {
    let loaded = load_instance(&args.input)?;
    let h = &loaded.hypergraph;
    if h.edge_count() < 2 {
        return Err(CmdError::Validation(format!(
            "at least 2 edges required to build a selector, got {}",
            h.edge_count()
        )));
    }
    let pool = required_chi_pool(h, args.q, args.chi)?;
    let ah = h.augment(pool);
    let matrix = build(&ah, args.q, args.m, args.chi, &args.builder.config())?;
    let mut report = format!("t={}\n", matrix.t());
    if args.m >= 1 {
        let bound = eval_selector_bound(ah.width(), ah.d(), args.q, args.m, args.chi, h.edge_count())?;
        let _ = writeln!(report, "{bound}");
    }
    let text = format_matrix(&matrix);
    match &args.out {
        Some(path) => {
            write_output(Some(path), &text)?;
            print!("{report}");
        }
        None => {
            print!("{text}");
            eprint!("{report}");
        }
    }
    Ok(())
}

fn print_verdict(kind: &str, verdict: &SelectorVerdict) -> Result<(), CmdError> {
    let mut out = String::new();
    let _ = writeln!(out, "property={kind}");
    let _ = writeln!(out, "verdict={}", if verdict.holds { "holds" } else { "fails" });
    if let Some(w) = &verdict.witness {
        let ids: Vec<String> = w.edges.iter().map(|e| (e + 1).to_string()).collect();
        let _ = writeln!(out, "witness_edges={}", ids.join(" "));
        let _ = writeln!(out, "witness_found={}", w.found);
        let _ = writeln!(out, "witness_required={}", w.required);
    }
    print!("{out}");
    if verdict.holds {
        Ok(())
    } else {
        Err(CmdError::Guarantee(format!("{kind} property does not hold")))
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CmdError> {
    let loaded = load_instance(&args.input)?;
    let h = &loaded.hypergraph;
    let matrix = parse_matrix(&read_file(&args.matrix)?)?;
    if args.separable {
        let verdict = is_separable(&matrix, h)?;
        return print_verdict("separable", &verdict);
    }
    if let Some(p) = args.p {
        let m = args
            .m
            .ok_or_else(|| CmdError::Usage("--p needs --m (identity rows required)".into()))?;
        let pool = required_chi_pool(h, 1, p)?;
        let verdict = is_p_selector(&matrix, &h.augment(pool), p, m)?;
        return print_verdict(&format!("p-selector p={p} m={m}"), &verdict);
    }
    match (args.q, args.m, args.chi) {
        (Some(q), Some(m), Some(chi)) => {
            let pool = required_chi_pool(h, q, chi)?;
            let verdict = is_selector(&matrix, &h.augment(pool), q, m, chi)?;
            print_verdict(&format!("selector q={q} m={m} chi={chi}"), &verdict)
        }
        _ => Err(CmdError::Usage(
            "choose a property: --separable, --p P --m M, or --q Q --m M --chi CHI".into(),
        )),
    }
}

fn run_protocol(
    h: &Hypergraph,
    protocol: Protocol,
    param: usize,
    oracle: &mut TestOracle,
    cfg: &BuilderConfig,
) -> Result<ProtocolTranscript, CmdError> {
    let tr = match protocol {
        Protocol::NonAdaptive => run_non_adaptive(h, oracle, param, cfg)?,
        Protocol::TwoStage => run_two_stage(h, oracle, param, cfg)?,
        Protocol::ThreeStage => run_three_stage(h, oracle, param, cfg)?,
    };
    Ok(tr)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CmdError> {
    let loaded = load_instance(&args.input)?;
    let h = &loaded.hypergraph;
    let cfg = args.builder.config();
    let mut runs: Vec<(String, ProtocolTranscript)> = Vec::new();
    if let Some(set) = &args.permissive_set {
        let verts: Vec<usize> = set
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| CmdError::Usage(format!("bad vertex id `{s}`"))))
            .collect::<Result<_, _>>()?;
        let mut oracle = TestOracle::permissive(h.n(), &verts)?;
        let tr = run_protocol(h, args.protocol, args.param, &mut oracle, &cfg)?;
        runs.push((format!("# defective set={set}"), tr));
    } else if args.defective == "all" {
        for defective in 0..h.edge_count() {
            let mut oracle = TestOracle::for_edge(h, defective)?;
            let tr = run_protocol(h, args.protocol, args.param, &mut oracle, &cfg)?;
            runs.push((format!("# defective={}", defective + 1), tr));
        }
    } else {
        let id: usize = args
            .defective
            .parse()
            .map_err(|_| CmdError::Usage(format!("--defective takes `all` or an edge id, got `{}`", args.defective)))?;
        if id == 0 || id > h.edge_count() {
            return Err(CmdError::Validation(format!(
                "edge id {id} outside [1, {}]",
                h.edge_count()
            )));
        }
        let mut oracle = TestOracle::for_edge(h, id - 1)?;
        let tr = run_protocol(h, args.protocol, args.param, &mut oracle, &cfg)?;
        runs.push((format!("# defective={id}"), tr));
    }
    let mut out = String::new();
    let mut broken = 0usize;
    for (header, tr) in &runs {
        let _ = writeln!(out, "{header}");
        out.push_str(&format_transcript(tr));
        out.push('\n');
        if !tr.violations.is_empty() {
            broken += 1;
        }
    }
    write_output(args.out.as_ref(), &out)?;
    if broken > 0 {
        return Err(CmdError::Guarantee(format!("{broken} of {} runs violated a guarantee", runs.len())));
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CmdError> {
    let text = read_file(&args.config)?;
    let mut cfg = parse_config(&text).map_err(CmdError::Usage)?;
    if let Some(w) = args.workers {
        if w == 0 {
            return Err(CmdError::Usage("workers: must be at least 1".into()));
        }
        cfg.workers = w;
    }
    let shared = match &cfg.source {
        Source::File(path) => Some(load_instance(&PathBuf::from(path))?.hypergraph),
        Source::Gen { .. } => None,
    };
    let report = run_sweep(&cfg, shared.as_ref());
    write_output(args.out.as_ref(), &report.table)?;
    eprintln!("{}", report.summary);
    if report.all_success {
        Ok(())
    } else {
        Err(CmdError::Guarantee("one or more sweep rows failed".into()))
    }
}
