//! Content-addressed disk cache for fetched bodies.
//!
//! One file per fetched URI, named by the SHA-256 hex of the URI, plus
//! `manifest.json` mapping hash to URI, outcome, and retrieval time.
//! Writes go to a temp file first and are renamed into place. Terminal
//! HTTP statuses and redirect loops are cached; timeouts are not.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CacheOutcome {
    /// Terminal HTTP status; the body file holds the payload.
    Http { status: u16 },
    /// The redirect chain exceeded the hop limit.
    RedirectLoop,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntryMeta {
    pub uri: String,
    #[serde(flatten)]
    pub outcome: CacheOutcome,
    pub final_uri: Option<String>,
    pub content_type: Option<String>,
    pub retrieved_at: DateTime<Utc>,
}

/// A replayed cache hit.
#[derive(Debug, Clone)]
pub struct CachedFetch {
    pub meta: CacheEntryMeta,
    pub body: Vec<u8>,
}

#[derive(Debug)]
pub struct CacheStore {
    dir: PathBuf,
    manifest: BTreeMap<String, CacheEntryMeta>,
}

impl CacheStore {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let manifest_path = dir.join(MANIFEST_FILE);
        let manifest = if manifest_path.exists() {
            let data = fs::read(&manifest_path)?;
            serde_json::from_slice(&data)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?
        } else {
            BTreeMap::new()
        };
        Ok(Self { dir, manifest })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn uri_hash(uri: &str) -> String {
        let mut hasher = Sha256::new();
        hasher.update(uri.as_bytes());
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.manifest.len()
    }

    pub fn is_empty(&self) -> bool {
        self.manifest.is_empty()
    }

    pub fn contains(&self, uri: &str) -> bool {
        self.manifest.contains_key(&Self::uri_hash(uri))
    }

    pub fn lookup(&self, uri: &str) -> io::Result<Option<CachedFetch>> {
        let hash = Self::uri_hash(uri);
        let Some(meta) = self.manifest.get(&hash) else {
            return Ok(None);
        };
        let body = match meta.outcome {
            CacheOutcome::Http { .. } => fs::read(self.dir.join(&hash))?,
            CacheOutcome::RedirectLoop => Vec::new(),
        };
        Ok(Some(CachedFetch { meta: meta.clone(), body }))
    }

    pub fn store_http(
        &mut self,
        uri: &str,
        status: u16,
        final_uri: &str,
        content_type: Option<&str>,
        body: &[u8],
    ) -> io::Result<()> {
        let hash = Self::uri_hash(uri);
        self.write_atomic(&hash, body)?;
        self.manifest.insert(
            hash,
            CacheEntryMeta {
                uri: uri.to_string(),
                outcome: CacheOutcome::Http { status },
                final_uri: Some(final_uri.to_string()),
                content_type: content_type.map(str::to_string),
                retrieved_at: Utc::now(),
            },
        );
        self.write_manifest()
    }

    pub fn store_redirect_loop(&mut self, uri: &str) -> io::Result<()> {
        let hash = Self::uri_hash(uri);
        self.manifest.insert(
            hash,
            CacheEntryMeta {
                uri: uri.to_string(),
                outcome: CacheOutcome::RedirectLoop,
                final_uri: None,
                content_type: None,
                retrieved_at: Utc::now(),
            },
        );
        self.write_manifest()
    }

    fn write_atomic(&self, name: &str, data: &[u8]) -> io::Result<()> {
        let tmp = self.dir.join(format!(".{name}.tmp"));
        fs::write(&tmp, data)?;
        fs::rename(&tmp, self.dir.join(name))
    }

    fn write_manifest(&self) -> io::Result<()> {
        let data = serde_json::to_vec_pretty(&self.manifest)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        let tmp = self.dir.join(format!(".{MANIFEST_FILE}.tmp"));
        fs::write(&tmp, data)?;
        fs::rename(&tmp, self.dir.join(MANIFEST_FILE))
    }
}
