use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use pdcsim::config::{parse_config_with, render_config};
use pdcsim::output::{sha256_hex, write_records, Format, RunManifest};
use pdcsim::selftest::run_oracles;
use pdcsim::sweep::{grid, run_sweep, Axis, SweepError, SweepRecord};
use pdcsim::ScenarioConfig;

#[derive(Parser)]
#[command(name = "pdcsim", version, about = "Coverage simulator for post-disaster multi-tier networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate coverage for one configuration.
    Run(RunArgs),
    /// Estimate coverage over a parameter grid.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// `key=v1,v2,...`; repeat for more axes. The first axis varies slowest.
        #[arg(long = "axis", value_name = "KEY=VALUES")]
        axes: Vec<String>,
    },
    /// Check the simulator against closed-form results.
    Oracle {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        threads: ThreadArgs,
    },
    /// Print the fully materialized default configuration.
    Defaults {
        #[arg(long, default_value = "small")]
        setup: String,
        #[arg(long = "r-d-m", default_value_t = 1000.0)]
        r_d_m: f64,
    },
}

#[derive(Args)]
struct ThreadArgs {
    /// Worker threads: a count or `auto`.
    #[arg(long, env = "PDCSIM_THREADS", default_value = "auto")]
    threads: String,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent. A manifest is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// `small` or `large`; overrides the document.
    #[arg(long)]
    setup: Option<String>,
    /// Disaster radius in meters; overrides the document.
    #[arg(long = "r-d-m")]
    r_d_m: Option<f64>,
    /// Any config key as `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(flatten)]
    threads: ThreadArgs,
}

/// Exit status 1: the user's input is wrong.
struct ConfigFailure(anyhow::Error);

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<ConfigFailure> for Failure {
    fn from(e: ConfigFailure) -> Self {
        Failure::Config(e.0)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn thread_count(spec: &str) -> Result<usize, ConfigFailure> {
    if spec == "auto" {
        return Ok(0);
    }
    match spec.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(ConfigFailure(anyhow!("--threads expects a positive count or `auto`, got `{spec}`"))),
    }
}

fn load_config(args: &RunArgs) -> Result<ScenarioConfig, ConfigFailure> {
    let text = match &args.config {
        Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())).map_err(ConfigFailure)?,
        None => String::new(),
    };
    let mut overrides: Vec<(String, String)> = Vec::new();
    if let Some(s) = &args.setup {
        overrides.push(("setup".into(), s.clone()));
    }
    if let Some(r) = args.r_d_m {
        overrides.push(("r_d_m".into(), r.to_string()));
    }
    for kv in &args.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| ConfigFailure(anyhow!("--set expects key=value, got `{kv}`")))?;
        overrides.push((k.trim().into(), v.trim().into()));
    }
    if let Some(seed) = args.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    parse_config_with(&text, &overrides).map_err(|e| ConfigFailure(e.into()))
}

fn emit(records: &[SweepRecord], args: &RunArgs, format: Format, manifest: RunManifest) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    write_records(records, &mut buf, format)?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, &buf).with_context(|| format!("writing {}", path.display()))?;
            let manifest = RunManifest { output_sha256: sha256_hex(&buf), ..manifest };
            manifest.write(Path::new(path))?;
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&buf)?;
        }
    }
    Ok(())
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(f))
}

fn simulate(args: &RunArgs, axes: &[String], command: &str) -> Result<(), Failure> {
    let threads = thread_count(&args.threads.threads)?;
    let format: Format = args.format.parse().map_err(|e| ConfigFailure(anyhow::Error::from(e)))?;
    let cfg = load_config(args)?;
    let axes: Vec<Axis> =
        axes.iter().map(|a| Axis::parse(a)).collect::<Result<_, _>>().map_err(|e| ConfigFailure(e.into()))?;
    // Surface grid errors as configuration errors before any simulation starts.
    grid(&cfg, &axes).map_err(|e| ConfigFailure(e.into()))?;

    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let records = in_pool(threads, || run_sweep(&cfg, &axes))?.map_err(|e: SweepError| anyhow::Error::from(e))?;

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        config: render_config(&cfg),
        axes: axes.iter().map(|a| format!("{}={}", a.key, a.values.join(","))).collect(),
        master_seed: cfg.seed,
        threads,
        started_unix,
        output_sha256: String::new(),
    };
    emit(&records, args, format, manifest)?;
    Ok(())
}

fn oracle(seed: u64, threads: &ThreadArgs) -> Result<(), Failure> {
    let threads = thread_count(&threads.threads)?;
    let checks = in_pool(threads, || run_oracles(seed))?;
    let mut failed = 0;
    for c in &checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        println!("{status} {:<30} expected {:.6e} observed {:.6e} tol {:.1e}", c.name, c.expected, c.observed, c.tolerance);
        failed += usize::from(!c.passed());
    }
    if failed > 0 {
        return Err(Failure::Runtime(anyhow!("{failed} of {} oracle checks failed", checks.len())));
    }
    Ok(())
}

fn defaults(setup: &str, r_d_m: f64) -> Result<(), Failure> {
    let overrides = [("setup".to_string(), setup.to_string()), ("r_d_m".to_string(), r_d_m.to_string())];
    let cfg = parse_config_with("", &overrides).map_err(|e| ConfigFailure(e.into()))?;
    print!("{}", render_config(&cfg));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => simulate(args, &[], "run"),
        Command::Sweep { run, axes } => simulate(run, axes, "sweep"),
        Command::Oracle { seed, threads } => oracle(*seed, threads),
        Command::Defaults { setup, r_d_m } => defaults(setup, *r_d_m),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
