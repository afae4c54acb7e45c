//! Memento fetching: transport abstraction, redirect handling with a
//! hard hop cap, disk-cache replay, and bounded-parallel batch fetches
//! with per-host politeness.
//!
//! All fetch failures are non-fatal to a pipeline run; the offending
//! URI is excluded downstream.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::Deserialize;
use thiserror::Error;
use url::Url;

use super::cache::{CacheOutcome, CacheStore};

#[derive(Debug, Clone)]
pub struct FetchPolicy {
    /// Maximum redirect hops to follow.
    pub max_redirects: u32,
    pub timeout: Duration,
    /// Global bound on concurrent fetches in [`Fetcher::fetch_many`].
    pub parallelism: usize,
    /// Minimum delay between requests to the same host.
    pub min_host_interval: Duration,
}

impl Default for FetchPolicy {
    fn default() -> Self {
        Self {
            max_redirects: 10,
            timeout: Duration::from_secs(30),
            parallelism: 4,
            min_host_interval: Duration::from_millis(250),
        }
    }
}

/// One hop's response; redirects are not followed at this layer.
#[derive(Debug, Clone)]
pub struct HttpResponse {
    pub status: u16,
    pub location: Option<String>,
    pub content_type: Option<String>,
    pub body: Vec<u8>,
}

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("request timed out")]
    Timeout,
    #[error("{0}")]
    Other(String),
}

/// Single-hop GET. Implementations must not follow redirects; the
/// fetcher owns the hop budget.
pub trait Transport: Send + Sync {
    fn get(&self, uri: &str) -> Result<HttpResponse, TransportError>;
}

/// Network transport backed by ureq with redirects disabled.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .max_redirects(0)
            .timeout_global(Some(timeout))
            .user_agent(concat!("newsim/", env!("CARGO_PKG_VERSION")))
            .build()
            .new_agent();
        Self { agent }
    }
}

impl Transport for HttpTransport {
    fn get(&self, uri: &str) -> Result<HttpResponse, TransportError> {
        match self.agent.get(uri).call() {
            Ok(mut resp) => {
                let status = resp.status().as_u16();
                let location = resp
                    .headers()
                    .get("location")
                    .and_then(|v| v.to_str().ok())
                    .map(str::to_string);
                let content_type = resp.body().mime_type().map(str::to_string);
                let body = resp
                    .body_mut()
                    .read_to_vec()
                    .map_err(|e| TransportError::Other(e.to_string()))?;
                Ok(HttpResponse { status, location, content_type, body })
            }
            Err(ureq::Error::Timeout(_)) => Err(TransportError::Timeout),
            Err(e) => Err(TransportError::Other(e.to_string())),
        }
    }
}

#[derive(Debug, Deserialize)]
struct StoreFile {
    version: u32,
    entries: Vec<StoreEntry>,
}

#[derive(Debug, Clone, Deserialize)]
struct StoreEntry {
    uri: String,
    status: u16,
    #[serde(default)]
    content_type: Option<String>,
    #[serde(default)]
    body_file: Option<String>,
    #[serde(default)]
    location: Option<String>,
}

/// File-based transport: serves canned responses from a JSON index of
/// URIs to body files. Substitutes for the network so whole runs are
/// reproducible from disk.
pub struct StoreTransport {
    base_dir: PathBuf,
    entries: HashMap<String, StoreEntry>,
}

impl StoreTransport {
    pub fn load(index_path: impl AsRef<Path>) -> io::Result<Self> {
        let index_path = index_path.as_ref();
        let data = fs::read(index_path)?;
        let store: StoreFile = serde_json::from_slice(&data)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        if store.version != 1 {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("unsupported store version {}", store.version),
            ));
        }
        let base_dir = index_path.parent().unwrap_or(Path::new(".")).to_path_buf();
        let mut entries = HashMap::new();
        for entry in store.entries {
            if entries.insert(entry.uri.clone(), entry.clone()).is_some() {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("duplicate store entry for {}", entry.uri),
                ));
            }
        }
        Ok(Self { base_dir, entries })
    }

    /// All indexed URIs, sorted; used to seed a cache.
    pub fn uris(&self) -> Vec<String> {
        let mut uris: Vec<String> = self.entries.keys().cloned().collect();
        uris.sort();
        uris
    }
}

impl Transport for StoreTransport {
    fn get(&self, uri: &str) -> Result<HttpResponse, TransportError> {
        let entry = self
            .entries
            .get(uri)
            .ok_or_else(|| TransportError::Other(format!("no store entry for {uri}")))?;
        let body = match &entry.body_file {
            Some(rel) => fs::read(self.base_dir.join(rel))
                .map_err(|e| TransportError::Other(format!("store body {rel}: {e}")))?,
            None => Vec::new(),
        };
        Ok(HttpResponse {
            status: entry.status,
            location: entry.location.clone(),
            content_type: entry.content_type.clone(),
            body,
        })
    }
}

/// Terminal result of a successful fetch.
#[derive(Debug, Clone)]
pub struct FetchResult {
    pub status: u16,
    pub final_uri: String,
    pub content_type: Option<String>,
    pub body: Vec<u8>,
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("not an absolute http(s) URI: {0}")]
    InvalidUri(String),
    #[error("{uri} answered HTTP {status}")]
    Http { uri: String, status: u16 },
    #[error("{uri} exceeded the redirect limit")]
    TooManyRedirects { uri: String },
    #[error("{uri} timed out")]
    Timeout { uri: String },
    #[error("{uri}: {message}")]
    Transport { uri: String, message: String },
    #[error("offline and not cached: {uri}")]
    Offline { uri: String },
    #[error("cache error: {0}")]
    Cache(#[from] io::Error),
}

impl FetchError {
    /// True for failures the pipeline records and skips past.
    pub fn is_exclusion(&self) -> bool {
        !matches!(self, FetchError::Cache(_))
    }
}

/// Cache-aware fetching with redirect handling.
pub struct Fetcher {
    transport: Option<Box<dyn Transport>>,
    cache: Option<Mutex<CacheStore>>,
    policy: FetchPolicy,
    host_gate: Mutex<HashMap<String, Instant>>,
}

impl Fetcher {
    pub fn new(
        transport: Option<Box<dyn Transport>>,
        cache: Option<CacheStore>,
        policy: FetchPolicy,
    ) -> Self {
        Self {
            transport,
            cache: cache.map(Mutex::new),
            policy,
            host_gate: Mutex::new(HashMap::new()),
        }
    }

    /// Transport-backed fetcher writing through to a cache.
    pub fn online(transport: Box<dyn Transport>, cache: CacheStore, policy: FetchPolicy) -> Self {
        Self::new(Some(transport), Some(cache), policy)
    }

    /// Cache-only fetcher; misses become [`FetchError::Offline`].
    pub fn offline(cache: CacheStore, policy: FetchPolicy) -> Self {
        Self::new(None, Some(cache), policy)
    }

    /// Transport without a cache (tests, one-shot probes).
    pub fn uncached(transport: Box<dyn Transport>, policy: FetchPolicy) -> Self {
        Self::new(Some(transport), None, policy)
    }

    pub fn policy(&self) -> &FetchPolicy {
        &self.policy
    }

    /// Fetch one URI: cache replay first, then the transport with
    /// redirects followed up to the policy limit. Terminal statuses and
    /// redirect loops are written back to the cache; timeouts are not.
    pub fn fetch(&self, uri: &str) -> Result<FetchResult, FetchError> {
        validate_uri(uri)?;

        if let Some(cache) = &self.cache {
            let hit = cache.lock().unwrap().lookup(uri)?;
            if let Some(hit) = hit {
                return replay(uri, hit.meta.outcome, hit.meta.final_uri, hit.meta.content_type, hit.body);
            }
        }

        let Some(transport) = &self.transport else {
            return Err(FetchError::Offline { uri: uri.to_string() });
        };

        let mut current = uri.to_string();
        for _ in 0..=self.policy.max_redirects {
            self.politeness_wait(&current);
            let resp = transport.get(&current).map_err(|e| match e {
                TransportError::Timeout => FetchError::Timeout { uri: current.clone() },
                TransportError::Other(message) => {
                    FetchError::Transport { uri: current.clone(), message }
                }
            })?;
            if matches!(resp.status, 301 | 302 | 303 | 307 | 308) {
                if let Some(location) = &resp.location {
                    current = resolve_location(&current, location)?;
                    continue;
                }
            }
            if let Some(cache) = &self.cache {
                cache.lock().unwrap().store_http(
                    uri,
                    resp.status,
                    &current,
                    resp.content_type.as_deref(),
                    &resp.body,
                )?;
            }
            return replay(
                uri,
                CacheOutcome::Http { status: resp.status },
                Some(current),
                resp.content_type,
                resp.body,
            );
        }

        if let Some(cache) = &self.cache {
            cache.lock().unwrap().store_redirect_loop(uri)?;
        }
        Err(FetchError::TooManyRedirects { uri: uri.to_string() })
    }

    /// Fetch a batch with at most `policy.parallelism` in flight.
    /// Results come back in input order.
    pub fn fetch_many(&self, uris: &[String]) -> Vec<Result<FetchResult, FetchError>> {
        let workers = self.policy.parallelism.max(1).min(uris.len());
        if workers <= 1 {
            return uris.iter().map(|u| self.fetch(u)).collect();
        }
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<Result<FetchResult, FetchError>>>> =
            uris.iter().map(|_| Mutex::new(None)).collect();
        thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= uris.len() {
                        break;
                    }
                    let result = self.fetch(&uris[i]);
                    *slots[i].lock().unwrap() = Some(result);
                });
            }
        });
        slots
            .into_iter()
            .map(|slot| slot.into_inner().unwrap().expect("worker filled every slot"))
            .collect()
    }

    /// Reserve the next request slot for this URI's host and sleep
    /// until it opens.
    fn politeness_wait(&self, uri: &str) {
        if self.policy.min_host_interval.is_zero() {
            return;
        }
        let Some(host) = Url::parse(uri).ok().and_then(|u| u.host_str().map(str::to_string))
        else {
            return;
        };
        let now = Instant::now();
        let start_at = {
            let mut gate = self.host_gate.lock().unwrap();
            let at = match gate.get(&host) {
                Some(&last) => (last + self.policy.min_host_interval).max(now),
                None => now,
            };
            gate.insert(host, at);
            at
        };
        if start_at > now {
            thread::sleep(start_at - now);
        }
    }
}

fn validate_uri(uri: &str) -> Result<(), FetchError> {
    match Url::parse(uri) {
        Ok(u) if matches!(u.scheme(), "http" | "https") && u.host_str().is_some() => Ok(()),
        _ => Err(FetchError::InvalidUri(uri.to_string())),
    }
}

fn resolve_location(current: &str, location: &str) -> Result<String, FetchError> {
    Url::parse(current)
        .and_then(|base| base.join(location))
        .map(|u| u.to_string())
        .map_err(|e| FetchError::Transport {
            uri: current.to_string(),
            message: format!("bad redirect location {location:?}: {e}"),
        })
}

fn replay(
    uri: &str,
    outcome: CacheOutcome,
    final_uri: Option<String>,
    content_type: Option<String>,
    body: Vec<u8>,
) -> Result<FetchResult, FetchError> {
    match outcome {
        CacheOutcome::Http { status } if (200..300).contains(&status) => Ok(FetchResult {
            status,
            final_uri: final_uri.unwrap_or_else(|| uri.to_string()),
            content_type,
            body,
        }),
        CacheOutcome::Http { status } => Err(FetchError::Http { uri: uri.to_string(), status }),
        CacheOutcome::RedirectLoop => {
            Err(FetchError::TooManyRedirects { uri: uri.to_string() })
        }
    }
}
