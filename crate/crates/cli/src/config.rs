use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use iwasawa2::cache::CACHE_ENV;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_CACHE_DIR: &str = ".iwasawa2-cache";

/// Resolved run configuration. Every report embeds it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Working precision in bits for complex-analytic computations.
    pub complex_bits: u32,
    /// 2-adic working precision `N`.
    pub padic_prec: u32,
    /// Series truncation degree `D`.
    pub series_degree: usize,
    pub cache_dir: PathBuf,
    /// Unit data files by `q`.
    pub units: BTreeMap<u64, PathBuf>,
    pub threads: usize,
    pub search_effort: u32,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            complex_bits: 200,
            padic_prec: 128,
            series_degree: 32,
            cache_dir: PathBuf::from(DEFAULT_CACHE_DIR),
            units: BTreeMap::new(),
            threads: 4,
            search_effort: 2,
            seed: 1,
        }
    }
}

/// Command-line overrides, applied on top of the file and environment.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub complex_bits: Option<u32>,
    pub padic_prec: Option<u32>,
    pub series_degree: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

impl Config {
    pub fn load(file: Option<&Path>, ov: &Overrides) -> Result<Config, CliError> {
        let mut cfg = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Precondition(format!("config {}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| CliError::Precondition(format!("config {}: {e}", p.display())))?
            }
            None => Config::default(),
        };
        if let Some(d) = std::env::var_os(CACHE_ENV) {
            cfg.cache_dir = PathBuf::from(d);
        }
        if let Some(v) = ov.complex_bits {
            cfg.complex_bits = v;
        }
        if let Some(v) = ov.padic_prec {
            cfg.padic_prec = v;
        }
        if let Some(v) = ov.series_degree {
            cfg.series_degree = v;
        }
        if let Some(v) = &ov.cache_dir {
            cfg.cache_dir = v.clone();
        }
        if let Some(v) = ov.threads {
            cfg.threads = v;
        }
        if let Some(v) = ov.seed {
            cfg.seed = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Precondition(m));
        if !(64..=8192).contains(&self.complex_bits) {
            return bad(format!("complex_bits = {} outside 64..=8192", self.complex_bits));
        }
        if !(16..=4096).contains(&self.padic_prec) {
            return bad(format!("padic_prec = {} outside 16..=4096", self.padic_prec));
        }
        if !(4..=256).contains(&self.series_degree) {
            return bad(format!("series_degree = {} outside 4..=256", self.series_degree));
        }
        if self.threads == 0 || self.threads > 256 {
            return bad(format!("threads = {} outside 1..=256", self.threads));
        }
        if self.search_effort == 0 || self.search_effort > 8 {
            return bad(format!("search_effort = {} outside 1..=8", self.search_effort));
        }
        Ok(())
    }
}
