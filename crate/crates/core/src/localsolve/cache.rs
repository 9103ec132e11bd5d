//! Memoised local verdicts.
//!
//! A verdict at `p` depends only on the coefficients modulo
//! `p^(2 n0 + 1)` (times 4 when `p = 2`), so that residue vector is the key.
//! Fermat keys use the normalised coefficients.

use std::path::{Path, PathBuf};

use dashmap::DashMap;
use serde::{Deserialize, Serialize};

use super::equation::Equation;
use super::{decide_local, prime_checklist, real_soluble, search, shortcut};
use crate::arith::prime_power;
use crate::error::{Error, Result};

pub const CACHE_FORMAT_VERSION: u32 = 1;

/// Environment variable naming a directory for the persistent cache.
pub const CACHE_DIR_ENV: &str = "HASSE_CACHE_DIR";
const CACHE_FILE: &str = "local-verdicts-v1.json";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
struct CacheKey {
    p: u64,
    k: u32,
    homogeneous: bool,
    residues: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    entries: Vec<(CacheKey, bool)>,
}

#[derive(Debug, Default)]
pub struct VerdictCache {
    entries: DashMap<CacheKey, bool>,
}

fn cache_key(eq: &Equation, p: u64) -> Result<Option<CacheKey>> {
    let form = eq.form();
    let form = if eq.is_homogeneous() {
        search::normalize(&form, p)?.form
    } else {
        form
    };
    let exp = 2 * search::completeness_n0(&form, p) + 1 + if p == 2 { 2 } else { 0 };
    let Ok(m) = prime_power(p, exp) else {
        return Ok(None);
    };
    Ok(Some(CacheKey {
        p,
        k: eq.k(),
        homogeneous: eq.is_homogeneous(),
        residues: form.coeffs.iter().map(|c| c.rem_euclid(m) as i64).collect(),
    }))
}

impl VerdictCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn local_soluble(&self, eq: &Equation, p: u64, budget: u64) -> Result<bool> {
        if shortcut(eq, p).is_some() {
            return Ok(true);
        }
        let Some(key) = cache_key(eq, p)? else {
            return decide_local(eq, p, budget);
        };
        if let Some(v) = self.entries.get(&key) {
            return Ok(*v);
        }
        let v = decide_local(eq, p, budget)?;
        self.entries.insert(key, v);
        Ok(v)
    }

    /// Real solubility and solubility at every checklist prime, stopping at
    /// the first failure.
    pub fn everywhere_soluble(&self, eq: &Equation, budget: u64) -> Result<bool> {
        if !real_soluble(eq) {
            return Ok(false);
        }
        for p in prime_checklist(eq)? {
            if !self.local_soluble(eq, p, budget)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut entries: Vec<(CacheKey, bool)> = self
            .entries
            .iter()
            .map(|e| (e.key().clone(), *e.value()))
            .collect();
        entries.sort_by(|a, b| {
            (a.0.p, a.0.k, a.0.homogeneous, &a.0.residues).cmp(&(
                b.0.p,
                b.0.k,
                b.0.homogeneous,
                &b.0.residues,
            ))
        });
        let file = CacheFile {
            version: CACHE_FORMAT_VERSION,
            entries,
        };
        let text = serde_json::to_string(&file)?;
        std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Loads a saved cache. A file written by another format version is
    /// ignored and an empty cache returned.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        if value.get("version").and_then(|v| v.as_u64()) != Some(CACHE_FORMAT_VERSION as u64) {
            return Ok(Self::new());
        }
        let file: CacheFile = serde_json::from_value(value)?;
        Ok(Self {
            entries: file.entries.into_iter().collect(),
        })
    }

    /// The cache file under `$HASSE_CACHE_DIR`, if the variable is set.
    pub fn env_path() -> Option<PathBuf> {
        std::env::var_os(CACHE_DIR_ENV).map(|d| PathBuf::from(d).join(CACHE_FILE))
    }

    /// Loads from `$HASSE_CACHE_DIR` when set and present, else empty.
    pub fn from_env() -> Result<Self> {
        match Self::env_path() {
            Some(path) if path.exists() => Self::load(&path),
            _ => Ok(Self::new()),
        }
    }

    /// Writes to `$HASSE_CACHE_DIR` when set; a no-op otherwise.
    pub fn persist_env(&self) -> Result<()> {
        let Some(path) = Self::env_path() else {
            return Ok(());
        };
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|source| Error::Io {
                path: dir.to_path_buf(),
                source,
            })?;
        }
        self.save(&path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localsolve::{certify, FermatEquation, ThueEquation, DEFAULT_BUDGET};

    #[test]
    fn cache_agrees_with_certify() {
        let cache = VerdictCache::new();
        for (a, b) in [(431, -107), (23, -11), (2, 151), (1, 1), (5, 9), (-7, 12)] {
            let eq: Equation = ThueEquation::new(a, b, 3).unwrap().into();
            let want = certify(&eq).unwrap().everywhere;
            assert_eq!(
                cache.everywhere_soluble(&eq, DEFAULT_BUDGET).unwrap(),
                want,
                "{eq}"
            );
            assert_eq!(
                cache.everywhere_soluble(&eq, DEFAULT_BUDGET).unwrap(),
                want,
                "{eq}"
            );
        }
        let eq: Equation = FermatEquation::new(3, 4, 5, 3).unwrap().into();
        assert!(cache.everywhere_soluble(&eq, DEFAULT_BUDGET).unwrap());
        assert!(!cache.is_empty());
    }

    #[test]
    fn congruent_coefficients_share_entries() {
        let cache = VerdictCache::new();
        let a: Equation = ThueEquation::new(23, -11, 3).unwrap().into();
        let b: Equation = ThueEquation::new(23 + 3i64.pow(7) * 2, -11, 3)
            .unwrap()
            .into();
        assert!(!cache.local_soluble(&a, 3, DEFAULT_BUDGET).unwrap());
        let before = cache.len();
        assert!(!cache.local_soluble(&b, 3, DEFAULT_BUDGET).unwrap());
        assert_eq!(cache.len(), before);
    }

    #[test]
    fn save_and_load_round_trip() {
        let dir = std::env::temp_dir().join(format!("hasse-cache-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.json");
        let cache = VerdictCache::new();
        let eq: Equation = ThueEquation::new(2, 151, 3).unwrap().into();
        cache.everywhere_soluble(&eq, DEFAULT_BUDGET).unwrap();
        cache.save(&path).unwrap();
        let back = VerdictCache::load(&path).unwrap();
        assert_eq!(back.len(), cache.len());
        std::fs::write(&path, r#"{"version": 999, "entries": []}"#).unwrap();
        assert!(VerdictCache::load(&path).unwrap().is_empty());
        assert!(matches!(
            VerdictCache::load(&dir.join("missing.json")),
            Err(Error::Io { .. })
        ));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
