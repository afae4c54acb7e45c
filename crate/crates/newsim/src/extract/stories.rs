//! Story extraction from homepage HTML.
//!
//! Hero selectors are tried in configured order and the first match
//! becomes the rank-1 Hero; headline selectors then contribute matches
//! in document order, selectors concatenated in configured order. When
//! no hero selector matches, the first headline is promoted. Duplicate
//! stories (same normalized original URI) keep their lowest rank, and
//! extraction stops at `k` stories.

use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use scraper::{ElementRef, Html, Selector};
use serde::{Deserialize, Serialize};
use url::Url;

use crate::archive::ArchiveConfig;

use super::config::{resolve_rules, SiteConfig, TitleSource};
use super::ExtractError;

/// One ranked story extracted from a homepage memento.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Story {
    /// 1-based rank; rank 1 is the Hero.
    pub rank: usize,
    pub title: String,
    /// Archive-resolved URI the story body is fetched from.
    pub uri: String,
    /// URI with the archive prefix stripped.
    pub original_uri: String,
    pub is_hero: bool,
    pub site_id: String,
    pub capture_datetime: DateTime<Utc>,
}

/// Split or construct the archive form of a story URI.
///
/// URIs already inside the archive replay namespace keep their own
/// capture timestamp and yield their tail as the original; anything
/// else is treated as an original URI and paired with a replay URI at
/// the homepage's capture time.
pub fn normalize_story_uri(
    uri: &str,
    archive: &ArchiveConfig,
    homepage_capture: DateTime<Utc>,
) -> Result<(String, String), ExtractError> {
    match archive.split_replay(uri) {
        Some(Ok((_, original))) => Ok((uri.to_string(), original)),
        Some(Err(e)) => Err(e.into()),
        None => Ok((archive.replay_uri(homepage_capture, uri), uri.to_string())),
    }
}

/// Deduplication key for an original URI: scheme-insensitive,
/// trailing-slash-insensitive, fragment stripped, query kept.
pub fn dedup_key(uri: &str) -> String {
    match Url::parse(uri) {
        Ok(u) => {
            let host = u.host_str().unwrap_or("").to_ascii_lowercase();
            let port = u.port().map(|p| format!(":{p}")).unwrap_or_default();
            let path = u.path().trim_end_matches('/');
            match u.query() {
                Some(q) => format!("{host}{port}{path}?{q}"),
                None => format!("{host}{port}{path}"),
            }
        }
        Err(_) => uri.trim_end_matches('/').to_string(),
    }
}

/// Extract up to `k` ranked stories from homepage bytes.
pub fn extract_stories(
    html: &[u8],
    site: &SiteConfig,
    archive: &ArchiveConfig,
    capture_datetime: DateTime<Utc>,
    base_uri: &str,
    k: usize,
) -> Result<Vec<Story>, ExtractError> {
    assert!(k >= 1, "k must be at least 1");
    let rules = resolve_rules(site, capture_datetime.date_naive())?;
    let doc = Html::parse_document(&String::from_utf8_lossy(html));

    // Selectors were validated at config load; an unparseable one here
    // simply matches nothing.
    let mut candidates: Vec<ElementRef> = Vec::new();
    for sel in &rules.hero_selectors {
        let Ok(sel) = Selector::parse(sel) else { continue };
        if let Some(el) = doc.select(&sel).next() {
            candidates.push(el);
            break;
        }
    }
    for sel in &rules.headline_selectors {
        let Ok(sel) = Selector::parse(sel) else { continue };
        candidates.extend(doc.select(&sel));
    }

    let mut stories: Vec<Story> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for el in candidates {
        if stories.len() == k {
            break;
        }
        let Some(href) = find_link(el, &rules.link_attribute) else {
            continue;
        };
        let Some(resolved) = resolve_href(&href, base_uri, archive) else {
            continue;
        };
        if !matches!(resolved.scheme(), "http" | "https") {
            continue;
        }
        // A recognized replay URI with a broken tail is a bad link on
        // the page, not a failed extraction; skip the candidate.
        let Ok((uri, original_uri)) =
            normalize_story_uri(resolved.as_str(), archive, capture_datetime)
        else {
            continue;
        };
        let title = match &rules.title_source {
            TitleSource::Text => collapse_ws(&el.text().collect::<String>()),
            TitleSource::Attribute(name) => collapse_ws(el.value().attr(name).unwrap_or("")),
        };
        if title.is_empty() {
            continue;
        }
        if !seen.insert(dedup_key(&original_uri)) {
            continue;
        }
        let rank = stories.len() + 1;
        stories.push(Story {
            rank,
            title,
            uri,
            original_uri,
            is_hero: rank == 1,
            site_id: site.site_id.clone(),
            capture_datetime,
        });
    }

    if stories.is_empty() {
        return Err(ExtractError::NoStoriesExtracted { site_id: site.site_id.clone() });
    }
    Ok(stories)
}

/// The story link lives on the matched element, failing that on its
/// first descendant carrying the attribute, failing that on the nearest
/// ancestor (headline text wrapped inside an anchor).
fn find_link(el: ElementRef<'_>, attr: &str) -> Option<String> {
    for node in el.descendants() {
        if let Some(v) = ElementRef::wrap(node).and_then(|e| e.value().attr(attr)) {
            return Some(v.to_string());
        }
    }
    for node in el.ancestors() {
        if let Some(v) = ElementRef::wrap(node).and_then(|e| e.value().attr(attr)) {
            return Some(v.to_string());
        }
    }
    None
}

fn resolve_href(href: &str, base_uri: &str, archive: &ArchiveConfig) -> Option<Url> {
    let href = href.trim();
    if href.is_empty() {
        return None;
    }
    if let Ok(u) = Url::parse(href) {
        return Some(u);
    }
    // Path-absolute replay links belong to the archive host.
    if is_replay_path(href) {
        return Url::parse(archive.base()).ok()?.join(href).ok();
    }
    Url::parse(base_uri).ok()?.join(href).ok()
}

fn is_replay_path(href: &str) -> bool {
    let Some(rest) = href.strip_prefix("/web/") else {
        return false;
    };
    let Some(slash) = rest.find('/') else {
        return false;
    };
    let stamp = &rest[..slash];
    stamp.len() >= 14 && stamp.as_bytes()[..14].iter().all(u8::is_ascii_digit)
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::config::RuleSet;
    use chrono::TimeZone;
    use proptest::prelude::*;

    fn archive() -> ArchiveConfig {
        ArchiveConfig::new("https://archive.example").unwrap()
    }

    fn capture() -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2016, 11, 1, 1, 0, 0).unwrap()
    }

    fn site(hero: &[&str], headlines: &[&str]) -> SiteConfig {
        SiteConfig {
            site_id: "usatoday".into(),
            homepage_uri: "http://news.example/".into(),
            rule_sets: vec![RuleSet {
                valid_from: None,
                valid_to: None,
                priority: 0,
                hero_selectors: hero.iter().map(|s| s.to_string()).collect(),
                headline_selectors: headlines.iter().map(|s| s.to_string()).collect(),
                link_attribute: "href".into(),
                title_source: TitleSource::Text,
            }],
            max_stories: None,
        }
    }

    fn extract(html: &str, site: &SiteConfig, k: usize) -> Result<Vec<Story>, ExtractError> {
        extract_stories(html.as_bytes(), site, &archive(), capture(), "http://news.example/", k)
    }

    const HOMEPAGE: &str = r#"
        <html><body>
          <div class="hfwmm">
            <a class="hfwmm-primary-hed-link" href="/news/hero-story.html">Exchange enrollment opens statewide amid rate questions</a>
          </div>
          <div class="grid">
            <a class="hgrid-hed" href="/news/hero-story.html">Exchange enrollment opens statewide amid rate questions</a>
            <a class="hgrid-hed" href="/news/second.html">Second headline here</a>
            <a class="hgrid-hed" href="/news/third.html">Third headline here</a>
          </div>
        </body></html>"#;

    #[test]
    fn hero_selector_single_occurrence_is_rank_one() {
        let site = site(&["a.hfwmm-primary-hed-link"], &["a.hgrid-hed"]);
        let stories = extract(HOMEPAGE, &site, 10).unwrap();
        assert_eq!(stories[0].rank, 1);
        assert!(stories[0].is_hero);
        assert_eq!(stories[0].title, "Exchange enrollment opens statewide amid rate questions");
        assert_eq!(stories[0].original_uri, "http://news.example/news/hero-story.html");
        // Hero repeated in the grid dedups to a single rank-1 story.
        assert_eq!(stories.len(), 3);
        assert_eq!(stories[1].original_uri, "http://news.example/news/second.html");
        assert!(!stories[1].is_hero);
    }

    #[test]
    fn missing_hero_promotes_first_headline() {
        let site = site(&["a.never-matches"], &["a.hgrid-hed"]);
        let stories = extract(HOMEPAGE, &site, 10).unwrap();
        assert!(stories[0].is_hero);
        assert_eq!(stories[0].rank, 1);
        assert_eq!(stories[0].original_uri, "http://news.example/news/hero-story.html");
    }

    #[test]
    fn truncates_to_k() {
        let links: String = (0..12)
            .map(|i| format!("<a class=\"h\" href=\"/s{i}.html\">Headline number {i}</a>"))
            .collect();
        let html = format!("<body>{links}</body>");
        let site = site(&[], &["a.h"]);
        let stories = extract(&html, &site, 10).unwrap();
        assert_eq!(stories.len(), 10);
        assert_eq!(
            stories.iter().map(|s| s.rank).collect::<Vec<_>>(),
            (1..=10).collect::<Vec<_>>()
        );
    }

    #[test]
    fn ranks_stay_consecutive_through_dedup() {
        let html = r#"<body>
            <a class="h" href="/a.html">Story a</a>
            <a class="h" href="/a.html#frag">Story a again</a>
            <a class="h" href="/b.html">Story b</a>
        </body>"#;
        let site = site(&[], &["a.h"]);
        let stories = extract(html, &site, 10).unwrap();
        assert_eq!(stories.len(), 2);
        assert_eq!(stories[1].rank, 2);
        assert_eq!(stories[1].original_uri, "http://news.example/b.html");
    }

    #[test]
    fn relative_uri_resolves_against_homepage_base() {
        let html = r#"<body><a class="h" href="/politics/story.html">Campaign swings through the midwest</a></body>"#;
        let site = site(&[], &["a.h"]);
        let stories = extract(html, &site, 3).unwrap();
        assert_eq!(stories[0].original_uri, "http://news.example/politics/story.html");
        assert_eq!(
            stories[0].uri,
            "https://archive.example/web/20161101010000/http://news.example/politics/story.html"
        );
    }

    #[test]
    fn archive_namespace_link_keeps_own_timestamp() {
        let html = r#"<body><a class="h"
            href="https://archive.example/web/20161101005800/http://news.example/x.html">Archived story link</a></body>"#;
        let site = site(&[], &["a.h"]);
        let stories = extract(html, &site, 3).unwrap();
        assert_eq!(
            stories[0].uri,
            "https://archive.example/web/20161101005800/http://news.example/x.html"
        );
        assert_eq!(stories[0].original_uri, "http://news.example/x.html");
    }

    #[test]
    fn path_absolute_replay_link_joins_archive_host() {
        let html = r#"<body><a class="h" href="/web/20161101005800/http://news.example/y.html">Replay style link</a></body>"#;
        let site = site(&[], &["a.h"]);
        let stories = extract(html, &site, 3).unwrap();
        assert_eq!(stories[0].original_uri, "http://news.example/y.html");
    }

    #[test]
    fn cross_host_syndication_links_kept() {
        let html = r#"<body><a class="h" href="http://wire.example/shared/story.html">Syndicated wire story</a></body>"#;
        let site = site(&[], &["a.h"]);
        let stories = extract(html, &site, 3).unwrap();
        assert_eq!(stories[0].original_uri, "http://wire.example/shared/story.html");
    }

    #[test]
    fn non_http_schemes_dropped() {
        let html = r#"<body>
            <a class="h" href="mailto:tips@news.example">Send us tips</a>
            <a class="h" href="javascript:void(0)">Menu toggle</a>
            <a class="h" href="/real.html">A real story link</a>
        </body>"#;
        let site = site(&[], &["a.h"]);
        let stories = extract(html, &site, 10).unwrap();
        assert_eq!(stories.len(), 1);
        assert_eq!(stories[0].original_uri, "http://news.example/real.html");
    }

    #[test]
    fn empty_titles_are_skipped() {
        let html = r#"<body>
            <a class="h" href="/img.html"><img src="x.png"></a>
            <a class="h" href="/titled.html">  Titled   story  </a>
        </body>"#;
        let site = site(&[], &["a.h"]);
        let stories = extract(html, &site, 10).unwrap();
        assert_eq!(stories.len(), 1);
        assert_eq!(stories[0].title, "Titled story");
    }

    #[test]
    fn no_matches_is_an_error() {
        let site = site(&["a.none"], &["a.nothing"]);
        assert!(matches!(
            extract("<body><p>no links</p></body>", &site, 3),
            Err(ExtractError::NoStoriesExtracted { .. })
        ));
    }

    #[test]
    fn link_found_on_ancestor_anchor() {
        let html = r#"<body><a href="/wrapped.html"><h2 class="hed">Wrapped headline text here</h2></a></body>"#;
        let site = site(&[], &["h2.hed"]);
        let stories = extract(html, &site, 3).unwrap();
        assert_eq!(stories[0].original_uri, "http://news.example/wrapped.html");
    }

    #[test]
    fn title_from_attribute_source() {
        let mut site = site(&[], &["a.h"]);
        site.rule_sets[0].title_source = TitleSource::Attribute("aria-label".into());
        let html = r#"<body><a class="h" href="/s.html" aria-label="Label title"><span></span></a></body>"#;
        let stories = extract(html, &site, 3).unwrap();
        assert_eq!(stories[0].title, "Label title");
    }

    #[test]
    fn extraction_is_deterministic() {
        let site = site(&["a.hfwmm-primary-hed-link"], &["a.hgrid-hed"]);
        let a = extract(HOMEPAGE, &site, 10).unwrap();
        let b = extract(HOMEPAGE, &site, 10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn normalize_story_uri_spec_cases() {
        let a = archive();
        let ts = capture();
        let (arch, orig) = normalize_story_uri(
            "https://archive.example/web/20161101010000/http://news.example/a",
            &a,
            ts,
        )
        .unwrap();
        assert_eq!(orig, "http://news.example/a");
        assert_eq!(arch, "https://archive.example/web/20161101010000/http://news.example/a");

        let (arch, orig) = normalize_story_uri("http://news.example/a", &a, ts).unwrap();
        assert_eq!(orig, "http://news.example/a");
        assert_eq!(arch, "https://archive.example/web/20161101010000/http://news.example/a");

        assert!(normalize_story_uri(
            "https://archive.example/web/20161101010000/not-absolute",
            &a,
            ts
        )
        .is_err());
    }

    #[test]
    fn replay_uri_string_survives_url_parse() {
        let raw = "https://archive.example/web/20161101005800/http://alpha.example/story/x.html";
        assert_eq!(Url::parse(raw).unwrap().as_str(), raw);
    }

    #[test]
    fn dedup_key_normalizations() {
        assert_eq!(dedup_key("http://A.Example/x/"), dedup_key("https://a.example/x"));
        assert_eq!(dedup_key("http://a.example/x#frag"), dedup_key("http://a.example/x"));
        assert_ne!(dedup_key("http://a.example/x?q=1"), dedup_key("http://a.example/x"));
        assert_ne!(dedup_key("http://a.example/x"), dedup_key("http://a.example/y"));
    }

    proptest! {
        #[test]
        fn smaller_k_is_prefix_of_larger(k1 in 1usize..=12, k2 in 1usize..=12) {
            let (k1, k2) = (k1.min(k2), k1.max(k2));
            let links: String = (0..12)
                .map(|i| format!("<a class=\"h\" href=\"/s{i}.html\">Headline number {i}</a>"))
                .collect();
            let html = format!("<body>{links}</body>");
            let site = site(&[], &["a.h"]);
            let small = extract(&html, &site, k1).unwrap();
            let large = extract(&html, &site, k2).unwrap();
            prop_assert_eq!(&large[..small.len()], &small[..]);
        }
    }
}
