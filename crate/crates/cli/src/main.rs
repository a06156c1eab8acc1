//! `rupm`: generate instances, solve, evaluate, benchmark and report.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error.

mod bench;
mod report;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rupm::detsolve::DetMode;
use rupm::ere::{EreConfig, EreMode, RegretEvaluator};
use rupm::model::generate_instance;
use rupm::{GeneratorConfig, Instance, Schedule};
use serde::Serialize;

use bench::{Cell, BenchRow};
use run::{Algo, RunSettings};

#[derive(Parser)]
#[command(name = "rupm", version, about = "Min-max regret scheduling on unrelated parallel machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write random instances and a manifest.
    Generate(GenerateArgs),
    /// Solve one instance.
    Solve(SolveArgs),
    /// Evaluate the maximum regret of a schedule.
    Evaluate(EvaluateArgs),
    /// Run instances × algorithms and write a CSV.
    Bench(BenchArgs),
    /// Summarise a bench CSV.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Seed of the first instance; later ones count up from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=63))]
    jobs: u8,
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    machines: u16,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Inner {
    Exact,
    Heuristic,
}

fn parse_mode(s: &str) -> Result<EreMode, String> {
    s.parse().map_err(|e: rupm::Error| e.to_string())
}

fn parse_secs(s: &str) -> Result<Duration, String> {
    let secs: f64 = s.parse().map_err(|_| format!("`{s}` is not a number of seconds"))?;
    Duration::try_from_secs_f64(secs).map_err(|e| e.to_string())
}

/// Regret evaluator switches layered over a mode preset.
#[derive(Args, Clone)]
struct EreFlags {
    /// Inner solver for scenario optima; defaults to the mode's.
    #[arg(long, value_enum)]
    inner: Option<Inner>,
    /// Time limit per inner solve, in seconds.
    #[arg(long, value_parser = parse_secs)]
    inner_time_limit: Option<Duration>,
    #[arg(long)]
    no_neighbor_lb: bool,
    #[arg(long)]
    no_dominance: bool,
    #[arg(long)]
    no_scenario_lb: bool,
    #[arg(long)]
    no_cache: bool,
    /// Solve extreme scenarios on several threads.
    #[arg(long)]
    parallel_ere: bool,
}

impl EreFlags {
    fn apply(&self, mode: EreMode) -> EreConfig {
        let mut cfg = EreConfig::from_mode(mode);
        match self.inner {
            Some(Inner::Exact) => cfg = cfg.with_inner_mode(DetMode::Exact),
            Some(Inner::Heuristic) => cfg = cfg.with_inner_mode(DetMode::Heuristic),
            None => {}
        }
        if let Some(t) = self.inner_time_limit {
            cfg = cfg.with_time_limit(t);
        }
        cfg.enable_neighbor_lb &= !self.no_neighbor_lb;
        cfg.enable_dominance &= !self.no_dominance;
        cfg.enable_scenario_lb &= !self.no_scenario_lb;
        cfg.enable_cache &= !self.no_cache;
        cfg.parallel |= self.parallel_ere;
        cfg
    }

    fn is_default(&self) -> bool {
        self.inner.is_none()
            && self.inner_time_limit.is_none()
            && !(self.no_neighbor_lb || self.no_dominance || self.no_scenario_lb || self.no_cache || self.parallel_ere)
    }
}

#[derive(Args, Clone)]
struct SolverFlags {
    /// Overall time limit in seconds.
    #[arg(long, value_parser = parse_secs)]
    time_limit: Option<Duration>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Evaluator preset; defaults to M23 for ir and M123 otherwise.
    #[arg(long, value_parser = parse_mode)]
    ere_mode: Option<EreMode>,
    /// Number of starts for mdh.
    #[arg(long, value_parser = clap::value_parser!(usize))]
    init_count: Option<usize>,
    #[command(flatten)]
    ere: EreFlags,
}

impl SolverFlags {
    fn settings(&self, algo: Option<Algo>) -> RunSettings {
        let ere = match self.ere_mode {
            Some(mode) => Some(self.ere.apply(mode)),
            None if self.ere.is_default() => None,
            None => {
                let mode = if algo == Some(Algo::Ir) { EreMode::M23 } else { EreMode::M123 };
                Some(self.ere.apply(mode))
            }
        };
        RunSettings { seed: self.seed, time_limit: self.time_limit, ere, init_count: self.init_count }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long, value_parser = parse_mode, default_value = "M123")]
    mode: EreMode,
    /// Incumbent schedule for the neighbour bound.
    #[arg(long)]
    incumbent: Option<PathBuf>,
    /// Maximum regret of the incumbent; evaluated when omitted.
    #[arg(long, requires = "incumbent")]
    incumbent_r_max: Option<i64>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    ere: EreFlags,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files or directories of `.inst.json` files. Without any,
    /// a matrix is generated from --jobs, --machines and --per-cell.
    #[arg(long, num_args = 1..)]
    instances: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "5,7,9")]
    jobs: Vec<u8>,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    machines: Vec<u16>,
    #[arg(long, default_value_t = 5)]
    per_cell: usize,
    /// Seed of the first generated instance.
    #[arg(long, default_value_t = 0)]
    instance_seed: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "mid,mdh,ir,sa")]
    algos: Vec<Algo>,
    /// Concurrent cells; defaults to $RUPM_PARALLELISM or the core count.
    #[arg(long)]
    jobs_parallel: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    input: PathBuf,
    /// Write the summary as JSON here as well.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Directory for pairwise scatter plots.
    #[arg(long)]
    svg_dir: Option<PathBuf>,
}

/// Errors in flag combinations clap cannot express; exit code 1.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Instance::from_json(&text).with_context(|| format!("loading {}", path.display()))
}

fn read_schedule(path: &Path) -> Result<Schedule> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Schedule::from_json(&text).with_context(|| format!("loading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// File name without `.inst.json` (or the last extension).
fn stem(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    match name.strip_suffix(".inst.json") {
        Some(s) => s.to_string(),
        None => path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or(name),
    }
}

#[derive(Serialize)]
struct Manifest {
    jobs: usize,
    machines: usize,
    seeds: Vec<u64>,
    files: Vec<String>,
}

fn generate(a: &GenerateArgs) -> Result<()> {
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let (n, m) = (a.jobs as usize, a.machines as usize);
    let mut manifest = Manifest { jobs: n, machines: m, seeds: Vec::new(), files: Vec::new() };
    for k in 0..a.count {
        let seed = a.seed.wrapping_add(k as u64);
        let inst = generate_instance(&GeneratorConfig::new(seed, n, m));
        let name = format!("n{n}-m{m}-s{seed}.inst.json");
        write(&a.out_dir.join(&name), &inst.to_json())?;
        manifest.seeds.push(seed);
        manifest.files.push(name);
    }
    write(&a.out_dir.join("manifest.json"), &pretty(&manifest))
}

#[derive(Serialize)]
struct SolveReport<'a> {
    algo: Algo,
    instance: String,
    r_max: i64,
    /// Robust optimality proven (exact method only).
    optimal: bool,
    truncated: bool,
    elapsed: f64,
    config: &'a serde_json::Value,
    report: &'a rupm::ere::RegretReport,
    stats: rupm::ere::EreStats,
    details: &'a serde_json::Value,
}

fn solve(a: &SolveArgs) -> Result<()> {
    let inst = read_instance(&a.instance)?;
    let out = run::run(&inst, a.algo, &a.solver.settings(Some(a.algo)))?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let base = format!("{}.{}", stem(&a.instance), a.algo.name());
    write(&a.out_dir.join(format!("{base}.sched.json")), &out.schedule.to_json())?;
    let report = SolveReport {
        algo: a.algo,
        instance: a.instance.display().to_string(),
        r_max: out.report.r_max,
        optimal: out.optimal,
        truncated: out.truncated,
        elapsed: out.elapsed.as_secs_f64(),
        config: &out.config,
        report: &out.report,
        stats: out.stats,
        details: &out.details,
    };
    write(&a.out_dir.join(format!("{base}.report.json")), &pretty(&report))?;
    if let Some(t) = &out.trace {
        write(&a.out_dir.join(format!("{base}.trace.jsonl")), t)?;
    }
    if let Some(h) = &out.history {
        write(&a.out_dir.join(format!("{base}.history.csv")), h)?;
    }
    println!(
        "{} {}: r_max {}{}{}",
        a.algo.name(),
        stem(&a.instance),
        out.report.r_max,
        if out.optimal { " (optimal)" } else { "" },
        if out.truncated { " (time limit)" } else { "" }
    );
    Ok(())
}

#[derive(Serialize)]
struct EvaluateReport<'a> {
    mode: EreMode,
    config: &'a EreConfig,
    incumbent_r_max: Option<i64>,
    report: &'a rupm::ere::RegretReport,
    stats: rupm::ere::EreStats,
}

fn evaluate(a: &EvaluateArgs) -> Result<()> {
    let inst = read_instance(&a.instance)?;
    let sched = read_schedule(&a.schedule)?;
    sched.check(&inst)?;
    let cfg = a.ere.apply(a.mode);
    let incumbent = match &a.incumbent {
        Some(p) => {
            let inc = read_schedule(p)?;
            inc.check(&inst)?;
            let r = match a.incumbent_r_max {
                Some(r) => r,
                None => rupm::ere::evaluate_regret(&inst, &inc, None, &cfg)?.r_max,
            };
            Some((inc, r))
        }
        None => None,
    };
    let mut ev = RegretEvaluator::new(&inst, cfg.clone());
    let report = ev.evaluate(&sched, incumbent.as_ref().map(|(s, r)| (s, *r)));
    let out = pretty(&EvaluateReport {
        mode: a.mode,
        config: &cfg,
        incumbent_r_max: incumbent.as_ref().map(|(_, r)| *r),
        report: &report,
        stats: ev.stats(),
    });
    match &a.out {
        Some(p) => write(p, &out),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

fn collect_instances(paths: &[PathBuf]) -> Result<Vec<(String, Instance)>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.to_string_lossy().ends_with(".inst.json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    let mut out: Vec<(String, Instance)> = Vec::new();
    for f in files {
        let id = stem(&f);
        if out.iter().any(|(other, _)| *other == id) {
            bail!("two instance files share the id `{id}`");
        }
        out.push((id, read_instance(&f)?));
    }
    Ok(out)
}

fn bench(a: &BenchArgs) -> Result<()> {
    if a.algos.is_empty() {
        return Err(usage("--algos is empty"));
    }
    if a.jobs_parallel == Some(0) {
        return Err(usage("--jobs-parallel must be positive"));
    }
    let instances = if a.instances.is_empty() {
        let mut v = Vec::new();
        for &n in &a.jobs {
            for &m in &a.machines {
                if n == 0 || n > 63 || m == 0 {
                    return Err(usage(format!("unsupported size {n} jobs, {m} machines")));
                }
                for k in 0..a.per_cell {
                    let seed = a.instance_seed.wrapping_add(k as u64);
                    let inst = generate_instance(&GeneratorConfig::new(seed, n as usize, m as usize));
                    v.push((format!("n{n}-m{m}-s{seed}"), inst));
                }
            }
        }
        v
    } else {
        collect_instances(&a.instances)?
    };
    let mut algos = a.algos.clone();
    algos.sort();
    algos.dedup();
    let cells: Vec<Cell<'_>> = instances
        .iter()
        .flat_map(|(id, inst)| algos.iter().map(move |&algo| Cell { id, inst, algo }))
        .collect();
    let threads = a.jobs_parallel.unwrap_or_else(bench::default_parallelism);
    let rows: Vec<BenchRow> = bench::run_matrix(&cells, &a.solver.settings(None), threads)?;
    bench::write_csv(&a.out, &rows)?;
    eprintln!("{} rows written to {}", rows.len(), a.out.display());
    Ok(())
}

fn report(a: &ReportArgs) -> Result<()> {
    let rows = bench::read_csv(&a.input)?;
    let summary = report::summarize(&rows);
    print!("{}", report::summary_table(&summary));
    if let Some(p) = &a.json {
        write(p, &pretty(&summary))?;
    }
    if let Some(dir) = &a.svg_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (name, svg) in report::scatter_plots(&rows) {
            write(&dir.join(name), &svg)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Bench(a) => bench(a),
        Command::Report(a) => report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Usage>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
