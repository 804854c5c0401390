//! On-disk JSON cache for class polynomials and defining polynomials.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cm::{hilbert_class_poly_default, CmError, HilbertClassPoly};

pub const CACHE_ENV: &str = "IWASAWA2_CACHE_DIR";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache io error at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cache record {0} is malformed: {1}")]
    Malformed(PathBuf, String),
    #[error("cache record {0} failed its checksum")]
    Checksum(PathBuf),
    #[error(transparent)]
    Cm(#[from] CmError),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HcpRecord {
    pub q: u64,
    pub h: usize,
    pub coeffs: Vec<String>,
    pub prec_bits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_poly: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_k: Option<u32>,
    pub checksum: String,
}

impl HcpRecord {
    fn payload(&self) -> String {
        let fp = self.field_poly.as_ref().map(|v| v.join(",")).unwrap_or_default();
        let fk = self.field_k.map(|k| k.to_string()).unwrap_or_default();
        format!("{}|{}|{}|{}|{}|{}", self.q, self.h, self.coeffs.join(","), self.prec_bits, fp, fk)
    }

    fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.payload().as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn new(hcp: &HilbertClassPoly, field: Option<(&[BigInt], u32)>) -> Self {
        let mut r = HcpRecord {
            q: hcp.q,
            h: hcp.h(),
            coeffs: hcp.coeffs.iter().map(|c| c.to_string()).collect(),
            prec_bits: hcp.prec_bits,
            field_poly: field.map(|(p, _)| p.iter().map(|c| c.to_string()).collect()),
            field_k: field.map(|(_, k)| k),
            checksum: String::new(),
        };
        r.checksum = r.digest();
        r
    }

    pub fn verify(&self) -> bool {
        self.checksum == self.digest()
    }

    pub fn hcp(&self) -> Result<HilbertClassPoly, String> {
        let coeffs = parse_all(&self.coeffs)?;
        if coeffs.len() != self.h + 1 {
            return Err("degree does not match h".into());
        }
        Ok(HilbertClassPoly { q: self.q, coeffs, prec_bits: self.prec_bits })
    }

    pub fn field(&self) -> Result<Option<(Vec<BigInt>, u32)>, String> {
        match (&self.field_poly, self.field_k) {
            (Some(p), Some(k)) => Ok(Some((parse_all(p)?, k))),
            _ => Ok(None),
        }
    }

    /// Short identifier of the record contents.
    pub fn version(&self) -> String {
        self.checksum[..16].to_string()
    }
}

fn parse_all(v: &[String]) -> Result<Vec<BigInt>, String> {
    v.iter().map(|s| s.parse::<BigInt>().map_err(|e| format!("{s}: {e}"))).collect()
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// Directory from the environment override, else `./.iwasawa2-cache`.
    pub fn from_env() -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(d) => Cache::new(d),
            None => Cache::new(".iwasawa2-cache"),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, q: u64) -> PathBuf {
        self.dir.join(format!("hcp_{q}.json"))
    }

    pub fn load(&self, q: u64) -> Result<Option<HcpRecord>, CacheError> {
        let path = self.path(q);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(|source| CacheError::Io { path: path.clone(), source })?;
        let rec: HcpRecord =
            serde_json::from_str(&text).map_err(|e| CacheError::Malformed(path.clone(), e.to_string()))?;
        if !rec.verify() || rec.q != q {
            return Err(CacheError::Checksum(path));
        }
        Ok(Some(rec))
    }

    /// The class polynomial for `q`, from the cache when present; the flag reports a hit.
    pub fn class_poly(&self, q: u64) -> Result<(HcpRecord, bool), CacheError> {
        if let Some(rec) = self.load(q)? {
            return Ok((rec, true));
        }
        let rec = HcpRecord::new(&hilbert_class_poly_default(q)?, None);
        self.store(&rec)?;
        Ok((rec, false))
    }

    pub fn store(&self, rec: &HcpRecord) -> Result<(), CacheError> {
        fs::create_dir_all(&self.dir).map_err(|source| CacheError::Io { path: self.dir.clone(), source })?;
        let path = self.path(rec.q);
        let text = serde_json::to_string_pretty(rec).expect("record serializes");
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, text).map_err(|source| CacheError::Io { path: tmp.clone(), source })?;
        fs::rename(&tmp, &path).map_err(|source| CacheError::Io { path, source })
    }
}
