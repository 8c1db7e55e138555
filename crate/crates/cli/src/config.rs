//! Run configuration: a single TOML file describing the scan targets, the
//! replay toggles and an optional expectation table, so that acceptance runs
//! are reproducible from one artifact.

use std::path::{Path, PathBuf};

use cecoh::algebra::{self, GradedAlgebra, GradedModule, ModuleKind};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    #[serde(default)]
    pub replay: ReplaySection,
    #[serde(default)]
    pub expectations: Vec<Expectation>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// `witt`, `virasoro`, `sl2_slice`, or `custom`.
    pub algebra: String,
    /// Path to the structure-constant JSON when `algebra = "custom"`,
    /// relative to the config file.
    pub algebra_file: Option<PathBuf>,
    /// `trivial`, `adjoint` or `witt_quotient`.
    pub module: String,
    /// (q, d) pairs to scan.
    pub pairs: Vec<(usize, i64)>,
    /// Ascending window radii.
    pub radii: Vec<i64>,
    /// Seed for replay fixtures; recorded in reports so failures replay.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Bound on |d|; pairs outside are rejected.
    #[serde(default = "default_max_abs_degree")]
    pub max_abs_degree: i64,
    /// Output directory for reports (overridable by --out).
    pub out_dir: Option<PathBuf>,
    /// Cache directory (overridable by --cache).
    pub cache_dir: Option<PathBuf>,
}

fn default_seed() -> u64 {
    42
}

fn default_max_abs_degree() -> i64 {
    6
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplaySection {
    #[serde(default)]
    pub normalization: bool,
    #[serde(default)]
    pub h1: bool,
    #[serde(default)]
    pub fuks: bool,
    #[serde(default)]
    pub gv: bool,
    /// Window radius for replay fixtures; the normalization pipeline needs >= 8.
    #[serde(default = "default_replay_window")]
    pub window: i64,
    /// Fixtures per enabled replay.
    #[serde(default = "default_fixtures")]
    pub fixtures: usize,
}

fn default_replay_window() -> i64 {
    8
}

fn default_fixtures() -> usize {
    3
}

// An absent [replay] section must carry the same defaults as an empty one.
impl Default for ReplaySection {
    fn default() -> Self {
        ReplaySection {
            normalization: false,
            h1: false,
            fuks: false,
            gv: false,
            window: default_replay_window(),
            fixtures: default_fixtures(),
        }
    }
}

/// Expected stabilized dimension for one (q, d) target.
#[derive(Debug, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub q: usize,
    pub d: i64,
    pub h: usize,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let config: RunConfig = toml::from_str(&text).map_err(|e| ConfigError(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let r = &self.run;
        if r.radii.len() < 2 || r.radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError(
                "radii must be strictly ascending with >= 2 entries".into(),
            ));
        }
        if r.radii.iter().any(|&x| x < 0) {
            return Err(ConfigError("radii must be non-negative".into()));
        }
        for &(q, d) in &r.pairs {
            if q > 4 {
                return Err(ConfigError(format!(
                    "q = {q} outside the supported range [0, 4]"
                )));
            }
            if d.abs() > r.max_abs_degree {
                return Err(ConfigError(format!(
                    "|d| = {} exceeds max_abs_degree = {}",
                    d.abs(),
                    r.max_abs_degree
                )));
            }
        }
        if self.replay.normalization && self.replay.window < 8 {
            // Reported as a window error at run time (exit 3), not a parse
            // error; the config itself is well-formed.
        }
        Ok(())
    }

    /// Resolve the algebra and module named by the config.
    pub fn build_algebra(
        &self,
        config_dir: &Path,
    ) -> Result<(GradedAlgebra, GradedModule), ConfigError> {
        let alg = match self.run.algebra.as_str() {
            "witt" => algebra::witt(),
            "virasoro" => algebra::virasoro(),
            "sl2_slice" => algebra::sl2_slice(),
            "custom" => {
                let rel =
                    self.run.algebra_file.as_ref().ok_or_else(|| {
                        ConfigError("algebra = \"custom\" needs algebra_file".into())
                    })?;
                let path = config_dir.join(rel);
                let json = std::fs::read_to_string(&path)
                    .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
                algebra::custom_from_json(&json).map_err(|e| ConfigError(e.to_string()))?
            }
            other => return Err(ConfigError(format!("unknown algebra {other:?}"))),
        };
        let kind = ModuleKind::parse(&self.run.module).map_err(|e| ConfigError(e.to_string()))?;
        let module = algebra::module_of(&alg, kind).map_err(|e| ConfigError(e.to_string()))?;
        Ok((alg, module))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(radii: &str) -> String {
        format!(
            r#"
[run]
algebra = "witt"
module = "adjoint"
pairs = [[1, 0]]
radii = {radii}
"#
        )
    }

    #[test]
    fn parses_minimal_config() {
        let config: RunConfig = toml::from_str(&minimal("[2, 3]")).unwrap();
        config.validate().unwrap();
        assert_eq!(config.run.seed, 42);
        assert_eq!(config.replay.window, 8);
    }

    #[test]
    fn rejects_descending_radii() {
        let config: RunConfig = toml::from_str(&minimal("[4, 3]")).unwrap();
        assert!(config.validate().is_err());
    }

    #[test]
    fn rejects_out_of_range_q() {
        let config: RunConfig = toml::from_str(
            r#"
[run]
algebra = "witt"
module = "adjoint"
pairs = [[7, 0]]
radii = [2, 3]
"#,
        )
        .unwrap();
        assert!(config.validate().is_err());
    }

    #[test]
    fn rejects_unknown_fields() {
        let parsed: Result<RunConfig, _> = toml::from_str(
            r#"
[run]
algebra = "witt"
module = "adjoint"
pairs = [[1, 0]]
radii = [2, 3]
typo_field = 1
"#,
        );
        assert!(parsed.is_err());
    }
}
