//! The `scan` verb: fan windowed computations out over (q, d, r) jobs,
//! assemble stabilization verdicts, write reports and check the expectation
//! table.

use std::path::Path;

use cecoh::window::{scan_verdict, Verdict, WindowReport};
use cecoh::EngineError;
use rayon::prelude::*;

use crate::cache::{Cache, CachedWindow};
use crate::config::RunConfig;
use crate::report::{format_table, write_csv, write_jsonl, ScanRecord};

pub struct ScanSummary {
    pub records: Vec<ScanRecord>,
    /// Verdict per (q, d), in scan order.
    pub verdicts: Vec<(usize, i64, Verdict)>,
    /// Expectations that failed: (q, d, expected, verdict).
    pub mismatches: Vec<(usize, i64, usize, Option<usize>)>,
}

pub enum ScanError {
    Engine(EngineError),
    Io(std::io::Error),
}

impl From<EngineError> for ScanError {
    fn from(e: EngineError) -> Self {
        ScanError::Engine(e)
    }
}

impl From<std::io::Error> for ScanError {
    fn from(e: std::io::Error) -> Self {
        ScanError::Io(e)
    }
}

impl std::fmt::Display for ScanError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScanError::Engine(e) => write!(f, "{e}"),
            ScanError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

/// Run every (q, d) pair of the config over its radius schedule. Jobs are
/// independent and pure, so they fan out over the worker pool; reports are
/// merged in (q, d, r) order regardless of completion order.
pub fn run_scan(
    config: &RunConfig,
    config_dir: &Path,
    out_dir: &Path,
    cache: &Cache,
    jobs: usize,
) -> Result<ScanSummary, ScanError> {
    let (alg, module) = config
        .build_algebra(config_dir)
        .map_err(|e| ScanError::Engine(EngineError::Parse(e.to_string())))?;

    let mut tasks: Vec<(usize, i64, i64)> = Vec::new();
    for &(q, d) in &config.run.pairs {
        for &r in &config.run.radii {
            tasks.push((q, d, r));
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ScanError::Engine(EngineError::Parse(e.to_string())))?;
    let results: Vec<Result<CachedWindow, EngineError>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(q, d, r)| cache.load_or_compute(&alg, &module, q, d, r))
            .collect()
    });

    let mut computed: Vec<CachedWindow> = Vec::with_capacity(results.len());
    for result in results {
        computed.push(result?);
    }
    computed.sort_by_key(|e| (e.q, e.d, e.r));

    let mut records: Vec<ScanRecord> = Vec::new();
    let mut verdicts: Vec<(usize, i64, Verdict)> = Vec::new();
    for &(q, d) in &config.run.pairs {
        let group: Vec<&CachedWindow> = computed.iter().filter(|e| e.q == q && e.d == d).collect();
        let reports: Vec<WindowReport> = group.iter().map(|e| e.to_report()).collect();
        let verdict = scan_verdict(&reports);
        verdicts.push((q, d, verdict));
        for entry in group {
            let stable = matches!(verdict, Verdict::Stable(v) if v == entry.h);
            records.push(ScanRecord::from_cached(entry, stable));
        }
    }
    records.sort_by_key(|a| (a.q, a.d, a.r));

    std::fs::create_dir_all(out_dir)?;
    write_jsonl(&out_dir.join("scan_report.jsonl"), &records)?;
    write_csv(&out_dir.join("scan_summary.csv"), &records)?;

    let mut mismatches = Vec::new();
    for expectation in &config.expectations {
        let verdict = verdicts
            .iter()
            .find(|(q, d, _)| *q == expectation.q && *d == expectation.d)
            .map(|(_, _, v)| *v);
        match verdict {
            Some(Verdict::Stable(h)) if h == expectation.h => {}
            Some(Verdict::Stable(h)) => {
                mismatches.push((expectation.q, expectation.d, expectation.h, Some(h)))
            }
            _ => mismatches.push((expectation.q, expectation.d, expectation.h, None)),
        }
    }

    Ok(ScanSummary {
        records,
        verdicts,
        mismatches,
    })
}

pub fn print_summary(summary: &ScanSummary) {
    print!("{}", format_table(&summary.records));
    for (q, d, verdict) in &summary.verdicts {
        match verdict {
            Verdict::Stable(h) => println!("(q={q}, d={d}): stable at {h}"),
            Verdict::Unstable => println!("(q={q}, d={d}): NOT stabilized"),
        }
    }
    for (q, d, expected, got) in &summary.mismatches {
        match got {
            Some(h) => {
                eprintln!("expectation FAILED: (q={q}, d={d}) expected h={expected}, stable at {h}")
            }
            None => eprintln!(
                "expectation FAILED: (q={q}, d={d}) expected h={expected}, did not stabilize"
            ),
        }
    }
}
