//! Batch experiments: a Cartesian sweep over instance and protocol
//! parameters, reporting achieved test counts against the bounds.
//!
//! The config is flat `key=value` text; numeric values may be
//! comma-separated sweep lists. Rows run independently (optionally on a
//! small worker pool) and the table is assembled in row order, so output
//! is byte-identical across runs for fixed seeds. Wall-clock time is
//! reported only in the stderr summary, never in the table.

use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use hgt_core::{
    eval_selector_bound, eval_two_stage_bound, required_chi_pool, run_non_adaptive,
    run_three_stage, run_two_stage, BuilderConfig, BuilderMode, Hypergraph, ProtocolTranscript,
    TestOracle,
};

use crate::generator::{generate, GenSpec};
use crate::Protocol;

#[derive(Debug, Clone)]
pub enum Source {
    File(String),
    Gen { ns: Vec<usize>, ds: Vec<usize>, edge_counts: Vec<usize>, uniform: bool, min_diffs: Vec<usize>, seeds: Vec<u64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefectiveSpec {
    All,
    /// 1-based edge id.
    Edge(usize),
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub source: Source,
    pub protocol: Protocol,
    pub params: Vec<usize>,
    pub defective: DefectiveSpec,
    pub builder: BuilderMode,
    pub budget: u128,
    pub samples: usize,
    pub builder_seeds: Vec<u64>,
    pub workers: usize,
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, String> {
    let items: Vec<&str> = value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(format!("{key}: empty sweep list"));
    }
    items
        .into_iter()
        .map(|s| s.parse().map_err(|_| format!("{key}: bad value `{s}`")))
        .collect()
}

fn parse_single<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.trim().parse().map_err(|_| format!("{key}: bad value `{value}`"))
}

pub fn parse_config(text: &str) -> Result<SweepConfig, String> {
    let mut file: Option<String> = None;
    let mut ns = None;
    let mut ds = None;
    let mut edge_counts = None;
    let mut uniform = true;
    let mut min_diffs = vec![1usize];
    let mut seeds = vec![0u64];
    let mut protocol = None;
    let mut params = None;
    let mut defective = DefectiveSpec::All;
    let mut builder = BuilderMode::Auto;
    let mut budget = BuilderConfig::default().work_budget;
    let mut samples = BuilderConfig::default().sample_pool;
    let mut builder_seeds = vec![0u64];
    let mut workers = 1usize;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("line {}: expected key=value, got `{line}`", lineno + 1));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "file" => file = Some(value.to_string()),
            "gen.n" => ns = Some(parse_list(key, value)?),
            "gen.d" => ds = Some(parse_list(key, value)?),
            "gen.edges" => edge_counts = Some(parse_list(key, value)?),
            "gen.uniform" => uniform = parse_single(key, value)?,
            "gen.min_diff" => min_diffs = parse_list(key, value)?,
            "gen.seed" => seeds = parse_list(key, value)?,
            "protocol" => {
                protocol = Some(match value {
                    "non-adaptive" => Protocol::NonAdaptive,
                    "two-stage" => Protocol::TwoStage,
                    "three-stage" => Protocol::ThreeStage,
                    other => return Err(format!("protocol: unknown value `{other}`")),
                })
            }
            "param" => params = Some(parse_list(key, value)?),
            "defective" => {
                defective = if value == "all" {
                    DefectiveSpec::All
                } else {
                    DefectiveSpec::Edge(parse_single(key, value)?)
                }
            }
            "builder" => {
                builder = match value {
                    "auto" => BuilderMode::Auto,
                    "greedy" => BuilderMode::Greedy,
                    "randomized" => BuilderMode::Randomized,
                    other => return Err(format!("builder: unknown value `{other}`")),
                }
            }
            "budget" => budget = parse_single(key, value)?,
            "samples" => samples = parse_single(key, value)?,
            "builder.seed" => builder_seeds = parse_list(key, value)?,
            "workers" => workers = parse_single(key, value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
    }

    let gen_keys = [ns.is_some(), ds.is_some(), edge_counts.is_some()];
    let source = match (file, gen_keys.iter().any(|&k| k)) {
        (Some(_), true) => return Err("config mixes file= with gen.* keys".into()),
        (Some(path), false) => Source::File(path),
        (None, true) => {
            let (Some(ns), Some(ds), Some(edge_counts)) = (ns, ds, edge_counts) else {
                return Err("generator needs gen.n, gen.d, and gen.edges".into());
            };
            Source::Gen { ns, ds, edge_counts, uniform, min_diffs, seeds }
        }
        (None, false) => return Err("config needs an instance source: file= or gen.*".into()),
    };
    let protocol = protocol.ok_or("config needs protocol=")?;
    let params = params.ok_or("config needs param=")?;
    if workers == 0 {
        return Err("workers: must be at least 1".into());
    }
    Ok(SweepConfig {
        source,
        protocol,
        params,
        defective,
        builder,
        budget,
        samples,
        builder_seeds,
        workers,
    })
}

#[derive(Debug, Clone)]
struct RowSpec {
    gen: Option<GenSpec>,
    param: usize,
    builder_seed: u64,
}

fn expand_rows(cfg: &SweepConfig) -> Vec<RowSpec> {
    let mut rows = Vec::new();
    match &cfg.source {
        Source::File(_) => {
            for &param in &cfg.params {
                for &builder_seed in &cfg.builder_seeds {
                    rows.push(RowSpec { gen: None, param, builder_seed });
                }
            }
        }
        Source::Gen { ns, ds, edge_counts, uniform, min_diffs, seeds } => {
            for &n in ns {
                for &d in ds {
                    for &edges in edge_counts {
                        for &min_diff in min_diffs {
                            for &seed in seeds {
                                for &param in &cfg.params {
                                    for &builder_seed in &cfg.builder_seeds {
                                        rows.push(RowSpec {
                                            gen: Some(GenSpec {
                                                n,
                                                d,
                                                edges,
                                                uniform: *uniform,
                                                min_diff,
                                                seed,
                                                attempts: 10_000,
                                            }),
                                            param,
                                            builder_seed,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    rows
}

struct RowOutcome {
    line: String,
    success: bool,
    worst_total: Option<usize>,
}

pub struct SweepReport {
    /// Deterministic tab-separated table, header included.
    pub table: String,
    /// Human summary with wall time; not part of the table.
    pub summary: String,
    pub all_success: bool,
}

pub const TABLE_HEADER: &str =
    "row\tsource\tseed\tn\td\tedges\tprotocol\tparam\tbuilder_seed\tt_stage1\tbound_ceil\tworst_total\tsuccess\tnote";

fn protocol_name(p: Protocol) -> &'static str {
    match p {
        Protocol::NonAdaptive => "non-adaptive",
        Protocol::TwoStage => "two-stage",
        Protocol::ThreeStage => "three-stage",
    }
}

/// Bound to report next to the achieved counts: the full two-stage bound
/// for the two-stage protocol, the stage-1 selector bound otherwise.
fn bound_ceil_for(h: &Hypergraph, protocol: Protocol, param: usize) -> Option<usize> {
    match protocol {
        Protocol::NonAdaptive | Protocol::ThreeStage => {
            let pool = required_chi_pool(h, 1, param).ok()?;
            let width = h.n() + pool.max(h.d().saturating_sub(1));
            eval_selector_bound(width, h.d(), 1, h.d() + 1, param, h.edge_count())
                .ok()
                .map(|b| b.ceil())
        }
        Protocol::TwoStage => {
            let chi = h.compute_chi(param).ok()?;
            if chi == 0 {
                return None;
            }
            eval_two_stage_bound(h.n(), h.d(), param, chi, h.edge_count()).ok().map(|b| b.ceil())
        }
    }
}

fn run_one(
    h: &Hypergraph,
    protocol: Protocol,
    param: usize,
    defective: usize,
    builder: &BuilderConfig,
) -> Result<ProtocolTranscript, hgt_core::Error> {
    let mut oracle = TestOracle::for_edge(h, defective)?;
    match protocol {
        Protocol::NonAdaptive => run_non_adaptive(h, &mut oracle, param, builder),
        Protocol::TwoStage => run_two_stage(h, &mut oracle, param, builder),
        Protocol::ThreeStage => run_three_stage(h, &mut oracle, param, builder),
    }
}

fn run_row(cfg: &SweepConfig, shared: Option<&Hypergraph>, index: usize, row: &RowSpec) -> RowOutcome {
    let (source_label, seed_label, loaded);
    match (&row.gen, shared) {
        (Some(spec), _) => {
            source_label = "gen".to_string();
            seed_label = spec.seed.to_string();
            loaded = match generate(spec) {
                Ok(h) => h,
                Err(e) => {
                    return failed_row(index, "gen", &spec.seed.to_string(), row, &e.to_string())
                }
            };
        }
        (None, Some(h)) => {
            source_label = "file".to_string();
            seed_label = "-".to_string();
            loaded = h.clone();
        }
        (None, None) => unreachable!("file rows carry a shared instance"),
    }
    let h = &loaded;
    let builder = BuilderConfig {
        mode: cfg.builder,
        work_budget: cfg.budget,
        sample_pool: cfg.samples,
        seed: row.builder_seed,
        ..BuilderConfig::default()
    };
    let defectives: Vec<usize> = match cfg.defective {
        DefectiveSpec::All => (0..h.edge_count()).collect(),
        DefectiveSpec::Edge(id) => {
            if id == 0 || id > h.edge_count() {
                return failed_row(index, &source_label, &seed_label, row, "defective id out of range");
            }
            vec![id - 1]
        }
    };
    let mut t_stage1 = None;
    let mut worst_total = 0usize;
    let mut success = true;
    let mut note = String::new();
    for &defective in &defectives {
        match run_one(h, cfg.protocol, row.param, defective, &builder) {
            Ok(tr) => {
                t_stage1 = Some(tr.stages.first().map_or(0, |s| s.pools.len()));
                worst_total = worst_total.max(tr.total_tests);
                let answered = tr.answer == vec![defective];
                let ok = tr.violations.is_empty() && (tr.partial || answered);
                if !ok && note.is_empty() {
                    note = if let Some(v) = tr.violations.first() {
                        format!("defective {}: {v}", defective + 1)
                    } else {
                        format!("defective {}: wrong answer", defective + 1)
                    };
                }
                success &= ok;
            }
            Err(e) => {
                success = false;
                if note.is_empty() {
                    note = e.to_string();
                }
            }
        }
    }
    let bound = bound_ceil_for(h, cfg.protocol, row.param);
    let line = [
        index.to_string(),
        source_label,
        seed_label,
        h.n().to_string(),
        h.d().to_string(),
        h.edge_count().to_string(),
        protocol_name(cfg.protocol).to_string(),
        row.param.to_string(),
        row.builder_seed.to_string(),
        t_stage1.map_or("-".into(), |t| t.to_string()),
        bound.map_or("-".into(), |b| b.to_string()),
        worst_total.to_string(),
        if success { "yes".into() } else { "no".into() },
        if note.is_empty() { "-".to_string() } else { note },
    ]
    .join("\t");
    RowOutcome { line, success, worst_total: Some(worst_total) }
}

fn failed_row(index: usize, source: &str, seed: &str, row: &RowSpec, note: &str) -> RowOutcome {
    let line = [
        index.to_string(),
        source.to_string(),
        seed.to_string(),
        "-".into(),
        "-".into(),
        "-".into(),
        "-".into(),
        row.param.to_string(),
        row.builder_seed.to_string(),
        "-".into(),
        "-".into(),
        "-".into(),
        "no".into(),
        note.to_string(),
    ]
    .join("\t");
    RowOutcome { line, success: false, worst_total: None }
}

pub fn run_sweep(cfg: &SweepConfig, shared: Option<&Hypergraph>) -> SweepReport {
    let started = std::time::Instant::now();
    let rows = expand_rows(cfg);
    let results: Mutex<Vec<Option<RowOutcome>>> =
        Mutex::new((0..rows.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = cfg.workers.min(rows.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= rows.len() {
                    break;
                }
                let outcome = run_row(cfg, shared, i, &rows[i]);
                results.lock().unwrap()[i] = Some(outcome);
            });
        }
    });
    let outcomes: Vec<RowOutcome> =
        results.into_inner().unwrap().into_iter().map(|o| o.expect("row ran")).collect();
    let mut table = String::from(TABLE_HEADER);
    table.push('\n');
    let mut all_success = true;
    let mut totals: Vec<usize> = Vec::new();
    for o in &outcomes {
        table.push_str(&o.line);
        table.push('\n');
        all_success &= o.success;
        if let Some(t) = o.worst_total {
            totals.push(t);
        }
    }
    let succeeded = outcomes.iter().filter(|o| o.success).count();
    let mean = if totals.is_empty() {
        0.0
    } else {
        totals.iter().sum::<usize>() as f64 / totals.len() as f64
    };
    let summary = format!(
        "rows={} success={}/{} mean_worst_total={:.2} max_worst_total={} wall_ms={}",
        outcomes.len(),
        succeeded,
        outcomes.len(),
        mean,
        totals.iter().max().copied().unwrap_or(0),
        started.elapsed().as_millis()
    );
    SweepReport { table, summary, all_success }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_generator_config() {
        let cfg = parse_config(
            "gen.n=10\ngen.d=3\ngen.edges=5\ngen.seed=1,2\nprotocol=non-adaptive\nparam=1,2\n",
        )
        .unwrap();
        match &cfg.source {
            Source::Gen { seeds, .. } => assert_eq!(seeds, &[1, 2]),
            other => panic!("unexpected source {other:?}"),
        }
        assert_eq!(cfg.params, vec![1, 2]);
        assert_eq!(expand_rows(&cfg).len(), 4);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(parse_config("protocol=non-adaptive\nparam=1\n").is_err());
        assert!(parse_config("file=x\ngen.n=3\nprotocol=non-adaptive\nparam=1\n").is_err());
        assert!(parse_config("file=x\nprotocol=non-adaptive\nparam=\n").is_err());
        assert!(parse_config("file=x\nprotocol=warp\nparam=1\n").is_err());
        assert!(parse_config("file=x\nprotocol=non-adaptive\nparam=1\nwhat=1\n").is_err());
    }

    #[test]
    fn sweep_runs_and_reports() {
        let cfg = parse_config(
            "gen.n=8\ngen.d=2\ngen.edges=4\ngen.min_diff=1\ngen.seed=3\nprotocol=two-stage\nparam=1\n",
        )
        .unwrap();
        let report = run_sweep(&cfg, None);
        assert!(report.all_success, "table:\n{}", report.table);
        assert_eq!(report.table.lines().count(), 2);
        let row = report.table.lines().nth(1).unwrap();
        assert!(row.contains("two-stage"));
        assert!(row.ends_with("yes\t-"));
    }

    #[test]
    fn sweep_is_deterministic_with_workers() {
        let text = "gen.n=9\ngen.d=3\ngen.edges=4\ngen.seed=1,2,3\nprotocol=non-adaptive\nparam=1,2\nworkers=4\n";
        let cfg = parse_config(text).unwrap();
        let a = run_sweep(&cfg, None);
        let b = run_sweep(&cfg, None);
        assert_eq!(a.table, b.table);
    }
}
