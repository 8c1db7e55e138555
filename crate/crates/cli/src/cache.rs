//! Disk cache for window computations, keyed by a content hash of
//! (algebra, module, q, d, radius, radii scheme, engine version). Identical
//! keys imply identical reports. Cached entries keep the projected
//! coboundary basis, not just dimensions, so generator-class checks can
//! reuse them without re-eliminating.

use std::path::{Path, PathBuf};

use cecoh::algebra::{BasisId, GradedAlgebra, GradedModule};
use cecoh::cochain::tuple_string;
use cecoh::rational;
use cecoh::window::{windowed_details, CoeffKey, WindowDetails, WindowReport, WindowSpec};
use cecoh::{EngineError, ENGINE_VERSION};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Content-hash key for one (algebra, module, q, d, r) computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheKey(pub String);

pub fn cache_key(alg: &GradedAlgebra, module: &GradedModule, q: usize, d: i64, r: i64) -> CacheKey {
    let text = format!(
        "algebra={}|module={}|q={q}|d={d}|r={r}|scheme=r:2r:4r|engine={ENGINE_VERSION}",
        alg.name(),
        module.name(),
    );
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    CacheKey(format!("{:x}", hasher.finalize()))
}

/// One serialized window computation.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CachedWindow {
    pub algebra: String,
    pub module: String,
    pub q: usize,
    pub d: i64,
    pub r: i64,
    pub h: usize,
    pub dim_z_proj: usize,
    pub dim_b_proj: usize,
    pub constraint_rows: usize,
    pub coefficient_cols: usize,
    pub elapsed_ms: u64,
    pub engine_version: String,
    /// Inner coefficient keys as "tuple[|t]" strings, in column order.
    pub inner_keys: Vec<String>,
    /// Reduced projected coboundary basis: rows of (inner index, fraction).
    pub coboundary_basis: Vec<Vec<(usize, String)>>,
}

fn key_string(key: &CoeffKey) -> String {
    let mut s = tuple_string(&key.0);
    if key.1 == BasisId::Central {
        s.push_str("|t");
    }
    s
}

impl CachedWindow {
    pub fn from_details(details: &WindowDetails) -> Self {
        let rep = &details.report;
        CachedWindow {
            algebra: rep.algebra.clone(),
            module: rep.module.clone(),
            q: rep.q,
            d: rep.d,
            r: rep.r,
            h: rep.h,
            dim_z_proj: rep.dim_projected_cocycles,
            dim_b_proj: rep.dim_projected_coboundaries,
            constraint_rows: rep.constraint_rows,
            coefficient_cols: rep.coefficient_cols,
            elapsed_ms: rep.elapsed_ms,
            engine_version: ENGINE_VERSION.to_string(),
            inner_keys: details.inner_keys.iter().map(key_string).collect(),
            coboundary_basis: details
                .coboundary_basis
                .iter()
                .map(|row| row.iter().map(|(c, v)| (*c, rational::format(v))).collect())
                .collect(),
        }
    }

    pub fn to_report(&self) -> WindowReport {
        WindowReport {
            algebra: self.algebra.clone(),
            module: self.module.clone(),
            q: self.q,
            d: self.d,
            r: self.r,
            dim_projected_cocycles: self.dim_z_proj,
            dim_projected_coboundaries: self.dim_b_proj,
            h: self.h,
            constraint_rows: self.constraint_rows,
            coefficient_cols: self.coefficient_cols,
            elapsed_ms: self.elapsed_ms,
        }
    }

    pub fn basis_rows(&self) -> Result<Vec<Vec<(usize, rational::Rational)>>, EngineError> {
        self.coboundary_basis
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(c, v)| Ok((*c, rational::parse(v)?)))
                    .collect::<Result<Vec<_>, EngineError>>()
            })
            .collect()
    }
}

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<&Path>) -> std::io::Result<Cache> {
        if let Some(d) = dir {
            std::fs::create_dir_all(d)?;
        }
        Ok(Cache {
            dir: dir.map(|d| d.to_path_buf()),
        })
    }

    pub fn path_for(&self, key: &CacheKey) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.json", key.0)))
    }

    pub fn load(&self, key: &CacheKey) -> Option<CachedWindow> {
        let path = self.path_for(key)?;
        let text = std::fs::read_to_string(path).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store(&self, key: &CacheKey, entry: &CachedWindow) -> std::io::Result<()> {
        let Some(path) = self.path_for(key) else {
            return Ok(());
        };
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_string(entry).expect("serializable"))?;
        std::fs::rename(tmp, path)
    }

    /// Cache-through window computation.
    pub fn load_or_compute(
        &self,
        alg: &GradedAlgebra,
        module: &GradedModule,
        q: usize,
        d: i64,
        r: i64,
    ) -> Result<CachedWindow, EngineError> {
        let key = cache_key(alg, module, q, d, r);
        if let Some(hit) = self.load(&key) {
            return Ok(hit);
        }
        let details = windowed_details(alg, module, q, d, WindowSpec::new(r))?;
        let entry = CachedWindow::from_details(&details);
        if let Err(e) = self.store(&key, &entry) {
            eprintln!("warning: cache write failed: {e}");
        }
        Ok(entry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cecoh::algebra::{module_of, witt, ModuleKind};

    #[test]
    fn key_is_stable_and_content_sensitive() {
        let w = witt();
        let adj = module_of(&w, ModuleKind::Adjoint).unwrap();
        let k1 = cache_key(&w, &adj, 2, 0, 4);
        let k2 = cache_key(&w, &adj, 2, 0, 4);
        let k3 = cache_key(&w, &adj, 2, 0, 5);
        assert_eq!(k1, k2);
        assert_ne!(k1, k3);
    }

    #[test]
    fn cache_round_trip_matches_recomputation() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(Some(dir.path())).unwrap();
        let w = witt();
        let adj = module_of(&w, ModuleKind::Adjoint).unwrap();
        let first = cache.load_or_compute(&w, &adj, 1, 0, 3).unwrap();
        let second = cache.load_or_compute(&w, &adj, 1, 0, 3).unwrap();
        assert_eq!(first, second, "hit returns the stored entry verbatim");
        // Spot-check soundness: the cached dimensions equal a fresh run.
        let fresh = windowed_details(&w, &adj, 1, 0, WindowSpec::new(3)).unwrap();
        assert_eq!(first.h, fresh.report.h);
        assert_eq!(first.dim_z_proj, fresh.report.dim_projected_cocycles);
        assert_eq!(first.basis_rows().unwrap().len(), first.dim_b_proj);
    }
}
