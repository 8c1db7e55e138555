//! The `replay` verb: run seeded fixtures through the normalization and
//! level-walk pipeline, the first-cohomology walk, the degree-reduction
//! homotopy and the distinguished-cocycle certifications, writing a JSON
//! lines audit log of every step.

use std::io::Write;
use std::path::{Path, PathBuf};

use cecoh::algebra::{self, module_of, ModuleKind};
use cecoh::rational::{self, Rational};
use cecoh::replay::{
    coboundary_fixture, fuks_homotopy, h1_replay, level_vanish_check, normalize_3cocycle,
    psi1_fixture, LogEntry, Psi3,
};
use cecoh::special::{
    certify_cocycle, certify_noncoboundary, class_extends_basis, virasoro_alpha_check, GVCocycle,
};
use cecoh::window::{inner_coefficient_keys, WindowSpec};
use cecoh::EngineError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::cache::Cache;
use crate::config::RunConfig;

pub enum ReplayError {
    /// A residual survived or a certificate came back false: exit 1.
    Failed(String),
    /// Window too small for the requested pipeline: exit 3.
    Window(String),
    /// IO trouble: exit 2.
    Io(std::io::Error),
}

impl From<std::io::Error> for ReplayError {
    fn from(e: std::io::Error) -> Self {
        ReplayError::Io(e)
    }
}

impl std::fmt::Display for ReplayError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReplayError::Failed(m) => write!(f, "replay failed: {m}"),
            ReplayError::Window(m) => write!(f, "window too small: {m}"),
            ReplayError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

fn classify(e: EngineError) -> ReplayError {
    match e {
        EngineError::WindowTooSmall { .. } => ReplayError::Window(e.to_string()),
        other => ReplayError::Failed(other.to_string()),
    }
}

struct LogWriter {
    file: std::fs::File,
    pub path: PathBuf,
}

impl LogWriter {
    fn new(out_dir: &Path) -> std::io::Result<LogWriter> {
        std::fs::create_dir_all(out_dir)?;
        let path = out_dir.join("replay_log.jsonl");
        Ok(LogWriter {
            file: std::fs::File::create(&path)?,
            path,
        })
    }

    fn line(&mut self, value: serde_json::Value) -> std::io::Result<()> {
        writeln!(self.file, "{value}")
    }

    fn entries(
        &mut self,
        stage: &str,
        fixture: usize,
        seed: u64,
        entries: &[LogEntry],
    ) -> std::io::Result<()> {
        for entry in entries {
            let mut value = entry.to_json();
            let obj = value.as_object_mut().expect("entry object");
            obj.insert("stage".into(), json!(stage));
            obj.insert("fixture".into(), json!(fixture));
            obj.insert("seed".into(), json!(seed));
            self.line(value)?;
        }
        Ok(())
    }
}

pub struct ReplaySummary {
    pub log_path: PathBuf,
    pub stages: Vec<String>,
}

pub fn run_replay(
    config: &RunConfig,
    out_dir: &Path,
    cache: &Cache,
    seed_override: Option<u64>,
) -> Result<ReplaySummary, ReplayError> {
    let replay = &config.replay;
    let seed = seed_override.unwrap_or(config.run.seed);
    let window = replay.window;
    let mut log = LogWriter::new(out_dir)?;
    let mut stages = Vec::new();
    log.line(json!({
        "stage": "header",
        "seed": seed,
        "window": window,
        "engine_version": cecoh::ENGINE_VERSION,
    }))?;

    if replay.normalization {
        stages.push("normalization".to_string());
        let fixture_dir = out_dir.join("fixtures");
        std::fs::create_dir_all(&fixture_dir)?;
        for i in 0..replay.fixtures {
            let fixture_seed = seed.wrapping_add(i as u64);
            let cochain = coboundary_fixture(fixture_seed, 3, 0, window).map_err(classify)?;
            // Persist the fixture itself so failures replay from disk.
            std::fs::write(
                fixture_dir.join(format!("psi3_seed{fixture_seed}.json")),
                serde_json::to_string_pretty(&cochain.to_json()).expect("serializable"),
            )?;
            let psi = Psi3::from_cochain(&cochain).map_err(classify)?;
            let state = normalize_3cocycle(&psi).map_err(classify)?;
            log.entries("normalization/normalize", i, fixture_seed, &state.log)?;
            let cert = level_vanish_check(&state).map_err(classify)?;
            log.entries("normalization/levels", i, fixture_seed, &cert.log)?;
            log.line(json!({
                "stage": "normalization/certificate",
                "fixture": i,
                "seed": fixture_seed,
                "certified_radius": cert.certified_radius,
                "checked": cert.checked.len(),
                "residuals": cert.residuals.len(),
            }))?;
        }
    }

    if replay.h1 {
        stages.push("h1".to_string());
        for i in 0..replay.fixtures {
            let fixture_seed = seed.wrapping_add(1000 + i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(fixture_seed);
            let scale: Rational = loop {
                let c = rational::frac(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=4));
                if c != rational::zero() {
                    break c;
                }
            };
            let psi = psi1_fixture(&scale, window);
            let cert = h1_replay(&psi).map_err(classify)?;
            log.entries("h1", i, fixture_seed, &cert.log)?;
            log.line(json!({
                "stage": "h1/certificate",
                "fixture": i,
                "seed": fixture_seed,
                "scale": rational::format(&scale),
                "certified_radius": cert.certified_radius,
                "residuals": cert.residuals.len(),
            }))?;
        }
    }

    if replay.fuks {
        stages.push("fuks".to_string());
        let w = algebra::witt();
        for (k, d) in [1i64, -1, 2, -2].into_iter().enumerate() {
            for i in 0..replay.fixtures {
                let fixture_seed = seed.wrapping_add(2000 + (k * replay.fixtures + i) as u64);
                let psi = coboundary_fixture(fixture_seed, 3, d, window).map_err(classify)?;
                let out = fuks_homotopy(&psi, &w).map_err(classify)?;
                log.line(json!({
                    "stage": "fuks",
                    "fixture": i,
                    "seed": fixture_seed,
                    "degree": d,
                    "residual_radius": out.residual_radius,
                    "phi_support": out.phi.support_len(),
                }))?;
            }
        }
    }

    if replay.gv {
        stages.push("gv".to_string());
        let gv = GVCocycle::default();
        let r = 6;
        for alg in [algebra::witt(), algebra::virasoro()] {
            let c = gv.as_cochain(&alg, 2 * r).map_err(classify)?;
            let cocycle = certify_cocycle(&c, &alg, r).map_err(classify)?;
            let noncob = certify_noncoboundary(&c, &alg, r).map_err(classify)?;
            log.line(json!({
                "stage": "gv",
                "algebra": alg.name(),
                "radius": r,
                "certify_cocycle": cocycle.is_cocycle(),
                "certify_noncoboundary": noncob.is_noncoboundary,
                "functional_check": noncob.functional_check,
            }))?;
            if !cocycle.is_cocycle() || !noncob.is_noncoboundary {
                return Err(ReplayError::Failed(format!(
                    "distinguished 3-cocycle failed certification on {}",
                    alg.name()
                )));
            }
        }
        // Generator check on the Witt algebra, reusing the cached projected
        // coboundary basis when the scan already produced it.
        let w = algebra::witt();
        let triv = module_of(&w, ModuleKind::Trivial).map_err(classify)?;
        let cached = cache
            .load_or_compute(&w, &triv, 3, 0, r)
            .map_err(classify)?;
        let basis = cached.basis_rows().map_err(classify)?;
        let inner = inner_coefficient_keys(&w, &triv, 3, 0, WindowSpec::new(r));
        let c = gv.as_cochain(&w, 2 * r).map_err(classify)?;
        let generates = class_extends_basis(&c, &inner, &basis).map_err(classify)?;
        log.line(json!({
            "stage": "gv/class",
            "algebra": "witt",
            "radius": r,
            "h": cached.h,
            "class_generates": generates,
        }))?;
        if cached.h != 1 || !generates {
            return Err(ReplayError::Failed(
                "3-cocycle class does not generate".into(),
            ));
        }
        let alpha_ok = virasoro_alpha_check().map_err(classify)?;
        log.line(json!({"stage": "gv/alpha", "alpha_check": alpha_ok}))?;
        if !alpha_ok {
            return Err(ReplayError::Failed(
                "central-extension cocycle check failed".into(),
            ));
        }
    }

    Ok(ReplaySummary {
        log_path: log.path,
        stages,
    })
}
