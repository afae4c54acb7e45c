//! Link-format TimeMap parsing and serialization.
//!
//! A TimeMap is a comma-separated list of link values, each a
//! `<URI>` followed by `;`-separated parameters whose values are either
//! tokens or quoted strings:
//!
//! ```text
//! <http://a.example/>; rel="original",
//! <http://arc.example/web/20161101005800/http://a.example/>; rel="memento";
//!     datetime="Tue, 01 Nov 2016 00:58:00 GMT"
//! ```
//!
//! Entries whose `rel` contains the `memento` relation become records;
//! `original`, `self`, and `timegate` entries are dropped. A memento's
//! capture time comes from the 14-digit timestamp in its archive path
//! or from the `datetime` attribute; when both are present they must
//! agree.

use chrono::{DateTime, Utc};

use crate::archive::parse_ts14;

use super::{MementoRecord, TimeMap, TimeMapError};

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Self { s, pos: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, want: char) -> bool {
        if self.peek() == Some(want) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.bump();
        }
    }

    fn take_until(&mut self, stop: char) -> Option<&'a str> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == stop {
                let out = &self.s[start..self.pos];
                self.bump();
                return Some(out);
            }
            self.bump();
        }
        None
    }

    fn take_token(&mut self) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() || matches!(c, ';' | ',' | '=' | '"') {
                break;
            }
            self.bump();
        }
        &self.s[start..self.pos]
    }

    fn take_quoted(&mut self) -> Result<String, TimeMapError> {
        debug_assert_eq!(self.peek(), Some('"'));
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some(c) => out.push(c),
                    None => return Err(TimeMapError::Malformed("escape at end of input".into())),
                },
                Some(c) => out.push(c),
                None => return Err(TimeMapError::Malformed("unterminated quoted string".into())),
            }
        }
    }
}

struct LinkValue<'a> {
    target: &'a str,
    params: Vec<(&'a str, String)>,
}

impl LinkValue<'_> {
    /// First occurrence wins, matching the rel-parameter rule.
    fn param(&self, name: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }
}

fn parse_link_values(body: &str) -> Result<Vec<LinkValue<'_>>, TimeMapError> {
    let mut cur = Cursor::new(body);
    let mut values = Vec::new();
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            return Ok(values);
        }
        if !cur.eat('<') {
            return Err(TimeMapError::Malformed(format!(
                "expected '<' at offset {}",
                cur.pos
            )));
        }
        let target = cur
            .take_until('>')
            .ok_or_else(|| TimeMapError::Malformed("unterminated URI reference".into()))?;
        let mut params = Vec::new();
        loop {
            cur.skip_ws();
            match cur.peek() {
                None => break,
                Some(',') => {
                    cur.bump();
                    break;
                }
                Some(';') => {
                    cur.bump();
                    cur.skip_ws();
                    let name = cur.take_token();
                    if name.is_empty() {
                        return Err(TimeMapError::Malformed(format!(
                            "empty parameter name at offset {}",
                            cur.pos
                        )));
                    }
                    cur.skip_ws();
                    let value = if cur.eat('=') {
                        cur.skip_ws();
                        if cur.peek() == Some('"') {
                            cur.take_quoted()?
                        } else {
                            cur.take_token().to_string()
                        }
                    } else {
                        String::new()
                    };
                    params.push((name, value));
                }
                Some(c) => {
                    return Err(TimeMapError::Malformed(format!(
                        "unexpected character {c:?} at offset {}",
                        cur.pos
                    )));
                }
            }
        }
        values.push(LinkValue { target, params });
    }
}

/// Capture time from the 14-digit timestamp in a replay path, if any.
fn path_timestamp(uri: &str) -> Option<DateTime<Utc>> {
    let mut rest = uri;
    while let Some(idx) = rest.find("/web/") {
        let after = &rest[idx + 5..];
        if after.len() >= 14 && after.as_bytes()[..14].iter().all(u8::is_ascii_digit) {
            if let Some(ts) = parse_ts14(&after[..14]) {
                return Some(ts);
            }
        }
        rest = &rest[idx + 5..];
    }
    None
}

/// Parse a link-format TimeMap body.
///
/// Returns every entry whose `rel` includes `memento`, deduplicated on
/// `(uri_m, capture_datetime)` and sorted ascending by capture time.
pub fn parse_timemap(body: &str, original_uri: &str) -> Result<TimeMap, TimeMapError> {
    let values = parse_link_values(body)?;
    let mut mementos = Vec::new();
    for value in &values {
        let rels = value.param("rel").unwrap_or("");
        if !rels.split_ascii_whitespace().any(|r| r == "memento") {
            continue;
        }
        let attr_dt = match value.param("datetime") {
            Some(raw) => Some(
                DateTime::parse_from_rfc2822(raw)
                    .map_err(|e| {
                        TimeMapError::Malformed(format!("bad datetime {raw:?}: {e}"))
                    })?
                    .with_timezone(&Utc),
            ),
            None => None,
        };
        let path_dt = path_timestamp(value.target);
        let capture_datetime = match (attr_dt, path_dt) {
            (Some(a), Some(p)) if a != p => {
                return Err(TimeMapError::Malformed(format!(
                    "datetime attribute {a} disagrees with path timestamp {p} for {}",
                    value.target
                )));
            }
            (Some(a), _) => a,
            (None, Some(p)) => p,
            (None, None) => {
                return Err(TimeMapError::Malformed(format!(
                    "memento entry {} has no datetime",
                    value.target
                )));
            }
        };
        mementos.push(MementoRecord {
            uri_m: value.target.to_string(),
            original_uri: original_uri.to_string(),
            capture_datetime,
        });
    }

    mementos.sort_by(|a, b| {
        a.capture_datetime
            .cmp(&b.capture_datetime)
            .then_with(|| a.uri_m.cmp(&b.uri_m))
    });
    mementos.dedup_by(|a, b| a.uri_m == b.uri_m && a.capture_datetime == b.capture_datetime);

    if mementos.is_empty() {
        return Err(TimeMapError::Empty);
    }
    Ok(TimeMap { original_uri: original_uri.to_string(), mementos })
}

/// Serialize a TimeMap back to link-format.
///
/// Emits the `original` entry followed by one `memento` entry per
/// record; `parse_timemap` on the output reproduces the memento list.
pub fn serialize_timemap(tm: &TimeMap) -> String {
    let mut out = format!("<{}>; rel=\"original\"", tm.original_uri);
    for m in &tm.mementos {
        out.push_str(",\n");
        out.push_str(&format!(
            "<{}>; rel=\"memento\"; datetime=\"{}\"",
            m.uri_m,
            m.capture_datetime.format("%a, %d %b %Y %H:%M:%S GMT")
        ));
    }
    out.push('\n');
    out
}
