//! Shared helpers for integration tests: fixture paths, preconfigured
//! runs over the bundled corpus, and programmable transports.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;
use std::time::Duration;

use chrono::NaiveDate;
use newsim::extract::load_config_file;
use newsim::memento::{
    CacheStore, FetchPolicy, Fetcher, HttpResponse, StoreTransport, Transport, TransportError,
};
use newsim::pipeline::RunConfig;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn store_path() -> PathBuf {
    fixtures_dir().join("store.json")
}

pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

pub fn quick_policy() -> FetchPolicy {
    FetchPolicy { min_host_interval: Duration::ZERO, ..FetchPolicy::default() }
}

/// Run config over the bundled three-site corpus, 2016-11-01..03.
pub fn fixture_run_config(cache_dir: &Path, out_dir: &Path) -> RunConfig {
    let file = load_config_file(fixtures_dir().join("sites.json")).unwrap();
    let mut cfg = RunConfig::from_config_file(
        file,
        date(2016, 11, 1),
        date(2016, 11, 3),
        cache_dir.to_path_buf(),
        out_dir.to_path_buf(),
    )
    .unwrap();
    cfg.fetch_policy = quick_policy();
    cfg
}

/// Fetcher serving the bundled response store through the given cache.
pub fn store_fetcher(cache_dir: &Path) -> Fetcher {
    let store = StoreTransport::load(store_path()).unwrap();
    let cache = CacheStore::open(cache_dir).unwrap();
    Fetcher::online(Box::new(store), cache, quick_policy())
}

/// Same, but counting every transport GET.
pub fn counting_store_fetcher(cache_dir: &Path) -> (Fetcher, Arc<AtomicU32>) {
    let store = StoreTransport::load(store_path()).unwrap();
    let counter = Arc::new(AtomicU32::new(0));
    let transport = CountingTransport { inner: Box::new(store), calls: counter.clone() };
    let cache = CacheStore::open(cache_dir).unwrap();
    (Fetcher::online(Box::new(transport), cache, quick_policy()), counter)
}

pub struct CountingTransport {
    pub inner: Box<dyn Transport>,
    pub calls: Arc<AtomicU32>,
}

impl Transport for CountingTransport {
    fn get(&self, uri: &str) -> Result<HttpResponse, TransportError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.get(uri)
    }
}

/// Programmable in-memory transport.
#[derive(Default, Clone)]
pub struct MapTransport {
    responses: HashMap<String, HttpResponse>,
}

impl MapTransport {
    pub fn insert_ok(&mut self, uri: &str, body: &str) {
        self.responses.insert(
            uri.to_string(),
            HttpResponse {
                status: 200,
                location: None,
                content_type: Some("text/html".into()),
                body: body.as_bytes().to_vec(),
            },
        );
    }

    pub fn insert_status(&mut self, uri: &str, status: u16) {
        self.responses.insert(
            uri.to_string(),
            HttpResponse { status, location: None, content_type: None, body: Vec::new() },
        );
    }

    pub fn insert_redirect(&mut self, uri: &str, to: &str) {
        self.responses.insert(
            uri.to_string(),
            HttpResponse {
                status: 302,
                location: Some(to.to_string()),
                content_type: None,
                body: Vec::new(),
            },
        );
    }
}

impl Transport for MapTransport {
    fn get(&self, uri: &str) -> Result<HttpResponse, TransportError> {
        self.responses
            .get(uri)
            .cloned()
            .ok_or_else(|| TransportError::Other(format!("no canned response for {uri}")))
    }
}

/// A three-site scenario with one poisoned rank-2 story per site:
/// a 404, a twelve-hop redirect loop, and an empty document.
pub mod error_scenario {
    use super::*;
    use newsim::archive::ArchiveConfig;
    use newsim::extract::{RuleSet, SiteConfig, TitleSource};
    use newsim::memento::FetchPolicy;

    pub const DAY: (i32, u32, u32) = (2016, 11, 5);
    pub const TS: &str = "20161105010000";
    pub const ARCHIVE: &str = "https://archive.example";

    pub fn poisoned_story_uri(site: &str) -> String {
        format!("{ARCHIVE}/web/{TS}/http://{site}.example/s2.html")
    }

    fn rules() -> RuleSet {
        RuleSet {
            valid_from: None,
            valid_to: None,
            priority: 0,
            hero_selectors: vec!["a.hero".into()],
            headline_selectors: vec!["h3.h a".into()],
            link_attribute: "href".into(),
            title_source: TitleSource::Text,
        }
    }

    pub fn sites() -> Vec<SiteConfig> {
        ["ea", "eb", "ec"]
            .iter()
            .map(|id| SiteConfig {
                site_id: id.to_string(),
                homepage_uri: format!("http://{id}.example/"),
                rule_sets: vec![rules()],
                max_stories: None,
            })
            .collect()
    }

    pub fn run_config(cache_dir: &Path, out_dir: &Path) -> RunConfig {
        RunConfig {
            archive: ArchiveConfig::new(ARCHIVE).unwrap(),
            sites: sites(),
            from: date(DAY.0, DAY.1, DAY.2),
            to: date(DAY.0, DAY.1, DAY.2),
            target_time: newsim::pipeline::default_target_time(),
            utc_offset_hours: -5,
            k_values: vec![1, 3],
            cache_dir: cache_dir.to_path_buf(),
            offline: false,
            out_dir: out_dir.to_path_buf(),
            force: false,
            fetch_policy: FetchPolicy {
                min_host_interval: Duration::ZERO,
                ..FetchPolicy::default()
            },
            dump_matrices: false,
            max_offset_minutes: None,
            mask_intra_site: false,
        }
    }

    fn homepage(site: &str) -> String {
        let story = |n: usize, text: &str| {
            format!("<h3 class=\"h\"><a href=\"/s{n}.html\">{text} number {n} for {site}</a></h3>")
        };
        format!(
            "<html><head><title>{site}</title></head><body>\
             <a class=\"hero\" href=\"/s1.html\">Election night coverage leads {site}</a>\
             {}{}{}\
             </body></html>",
            story(1, "Election night coverage leads"),
            story(2, "Broken story link"),
            story(3, "Shared election recap story")
        )
    }

    fn article(site: &str, n: usize) -> String {
        format!(
            "<html><head><title>{site} story {n}</title></head><body><article>\
             <p>Election night coverage continues with results and turnout analysis from \
             correspondents across every battleground state this evening.</p>\
             <p>Story {n} from {site} adds local reaction, county returns, and a look \
             ahead to the certification timeline for officials.</p>\
             </article></body></html>"
        )
    }

    /// Transport for the scenario; optionally poison one homepage with
    /// a 404 instead of the stories.
    pub fn transport(homepage_404_site: Option<&str>) -> MapTransport {
        let mut t = MapTransport::default();
        for site in ["ea", "eb", "ec"] {
            let home = format!("http://{site}.example/");
            let tm_uri = format!("{ARCHIVE}/web/timemap/link/{home}");
            let memento = format!("{ARCHIVE}/web/{TS}/{home}");
            t.insert_ok(
                &tm_uri,
                &format!(
                    "<{home}>; rel=\"original\",\n<{memento}>; rel=\"memento\"; \
                     datetime=\"Sat, 05 Nov 2016 01:00:00 GMT\"\n"
                ),
            );
            if homepage_404_site == Some(site) {
                t.insert_status(&memento, 404);
                continue;
            }
            t.insert_ok(&memento, &homepage(site));
            for n in [1usize, 3] {
                let uri = format!("{ARCHIVE}/web/{TS}/http://{site}.example/s{n}.html");
                t.insert_ok(&uri, &article(site, n));
            }
            let poisoned = poisoned_story_uri(site);
            match site {
                "ea" => t.insert_status(&poisoned, 404),
                "eb" => {
                    // Story URI enters a twelve-hop cycle.
                    t.insert_redirect(&poisoned, &format!("http://{site}.example/loop0"));
                    for i in 0..12 {
                        t.insert_redirect(
                            &format!("http://{site}.example/loop{i}"),
                            &format!("http://{site}.example/loop{}", (i + 1) % 12),
                        );
                    }
                }
                "ec" => t.insert_ok(
                    &poisoned,
                    "<html><body><script>var page = 1;</script></body></html>",
                ),
                _ => unreachable!(),
            }
        }
        t
    }

    pub fn fetcher(cache_dir: &Path, homepage_404_site: Option<&str>) -> Fetcher {
        let cache = CacheStore::open(cache_dir).unwrap();
        Fetcher::online(Box::new(transport(homepage_404_site)), cache, quick_policy())
    }
}
