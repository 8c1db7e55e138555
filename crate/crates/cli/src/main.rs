//! Command-line front end: `scan` runs windowed cohomology scans from a
//! config file, `replay` drives the proof-replay pipelines, `show` pretty
//! prints a report or a cached window computation.
//!
//! Exit codes: 0 success; 1 expectation mismatch or nonzero replay residual;
//! 2 config, parse or IO errors (including missing files for `show`);
//! 3 window errors (window inconsistency, window too small, or any other
//! windowed-engine failure).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cecoh::EngineError;
use clap::{Args, Parser, Subcommand};

use cecoh_cli::cache::{Cache, CacheKey};
use cecoh_cli::config::RunConfig;
use cecoh_cli::replay_cmd::{run_replay, ReplayError};
use cecoh_cli::report::{format_table, read_jsonl, ScanRecord};
use cecoh_cli::scan::{print_summary, run_scan, ScanError};

#[derive(Parser)]
#[command(
    name = "cecoh",
    version,
    about = "windowed cohomology engine for graded Lie algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run stabilization scans for every (q, d) pair in the config.
    Scan(RunArgs),
    /// Run the seeded proof-replay pipelines from the config.
    Replay(RunArgs),
    /// Pretty-print a scan report (JSONL path) or a cached window (hex key).
    Show {
        /// Report path or cache key.
        target: String,
        /// Cache directory for key lookups.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: config out_dir, then ./cecoh-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cache directory (default: config cache_dir, then OUT/cache).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Fixture seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for scan jobs.
    #[arg(long, default_value_t = 4)]
    jobs: usize,
}

const EXIT_MISMATCH: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_WINDOW: u8 = 3;

fn main() -> ExitCode {
    match dispatch() {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}

fn dispatch() -> Result<(), u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Scan(args) => cmd_scan(args),
        Command::Replay(args) => cmd_replay(args),
        Command::Show { target, cache } => cmd_show(&target, cache.as_deref()),
    }
}

struct RunPaths {
    config: RunConfig,
    config_dir: PathBuf,
    out_dir: PathBuf,
    cache: Cache,
}

fn prepare(args: &RunArgs) -> Result<RunPaths, u8> {
    let config = RunConfig::load(&args.config).map_err(|e| {
        eprintln!("{e}");
        EXIT_CONFIG
    })?;
    let config_dir = args
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let out_dir = args
        .out
        .clone()
        .or_else(|| config.run.out_dir.clone().map(|d| config_dir.join(d)))
        .unwrap_or_else(|| PathBuf::from("cecoh-out"));
    let cache_dir = args
        .cache
        .clone()
        .or_else(|| config.run.cache_dir.clone().map(|d| config_dir.join(d)))
        .unwrap_or_else(|| out_dir.join("cache"));
    let cache = Cache::new(Some(&cache_dir)).map_err(|e| {
        eprintln!("cannot create cache dir: {e}");
        EXIT_CONFIG
    })?;
    Ok(RunPaths {
        config,
        config_dir,
        out_dir,
        cache,
    })
}

fn cmd_scan(args: RunArgs) -> Result<(), u8> {
    let paths = prepare(&args)?;
    let summary = run_scan(
        &paths.config,
        &paths.config_dir,
        &paths.out_dir,
        &paths.cache,
        args.jobs,
    )
    .map_err(|e| {
        eprintln!("{e}");
        match e {
            ScanError::Engine(EngineError::Parse(_)) => EXIT_CONFIG,
            ScanError::Io(_) => EXIT_CONFIG,
            ScanError::Engine(_) => EXIT_WINDOW,
        }
    })?;
    print_summary(&summary);
    println!(
        "report: {}",
        paths.out_dir.join("scan_report.jsonl").display()
    );
    if summary.mismatches.is_empty() {
        Ok(())
    } else {
        Err(EXIT_MISMATCH)
    }
}

fn cmd_replay(args: RunArgs) -> Result<(), u8> {
    let paths = prepare(&args)?;
    let summary =
        run_replay(&paths.config, &paths.out_dir, &paths.cache, args.seed).map_err(|e| {
            eprintln!("{e}");
            match e {
                ReplayError::Failed(_) => EXIT_MISMATCH,
                ReplayError::Window(_) => EXIT_WINDOW,
                ReplayError::Io(_) => EXIT_CONFIG,
            }
        })?;
    println!("replay stages completed: {}", summary.stages.join(", "));
    println!("log: {}", summary.log_path.display());
    Ok(())
}

fn cmd_show(target: &str, cache_dir: Option<&Path>) -> Result<(), u8> {
    let path = Path::new(target);
    if path.exists() {
        let records = read_jsonl(path).map_err(|e| {
            eprintln!("cannot read report: {e}");
            EXIT_CONFIG
        })?;
        print!("{}", format_table(&records));
        return Ok(());
    }
    // Otherwise treat the target as a cache key.
    let cache = Cache::new(cache_dir).map_err(|_| EXIT_CONFIG)?;
    let entry = cache.load(&CacheKey(target.to_string())).ok_or_else(|| {
        eprintln!("no report at path and no cache entry for key {target:?}");
        EXIT_CONFIG
    })?;
    let record = ScanRecord::from_cached(&entry, false);
    print!("{}", format_table(&[record]));
    Ok(())
}
