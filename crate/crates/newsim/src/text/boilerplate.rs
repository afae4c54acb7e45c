//! Boilerplate removal: recover main article text from a story page.
//!
//! The document is segmented at block-level elements; every text node
//! belongs to its nearest block-level ancestor. `script`, `style`,
//! `nav`, `header`, `footer`, and `aside` subtrees are dropped outright.
//! A block survives iff it has at least [`MIN_BLOCK_WORDS`] words and
//! its link density (linked words over total words) stays below
//! [`MAX_LINK_DENSITY`]. The `<title>` text, when present, is prepended
//! to the surviving blocks.

use scraper::{Html, Node, Selector};

use super::TextError;

/// Minimum words for a content block to survive.
pub const MIN_BLOCK_WORDS: usize = 10;
/// A block at or above this linked-word share is treated as chrome.
pub const MAX_LINK_DENSITY: f64 = 0.33;

const DROP_TAGS: &[&str] = &["script", "style", "nav", "header", "footer", "aside", "head"];

const BLOCK_TAGS: &[&str] = &[
    "html", "body", "main", "article", "section", "div", "p", "li", "ul", "ol", "dl", "dt",
    "dd", "h1", "h2", "h3", "h4", "h5", "h6", "blockquote", "pre", "table", "tr", "td", "th",
    "figure", "figcaption", "form", "fieldset", "address", "details", "summary",
];

#[derive(Default)]
struct Block {
    // (text, inside a link)
    segments: Vec<(String, bool)>,
}

impl Block {
    fn text(&self) -> String {
        let joined: String = self.segments.iter().map(|(t, _)| t.as_str()).collect();
        collapse_ws(&joined)
    }

    fn word_count(&self) -> usize {
        self.text().split_whitespace().count()
    }

    fn linked_words(&self) -> usize {
        self.segments
            .iter()
            .filter(|(_, linked)| *linked)
            .map(|(t, _)| t.split_whitespace().count())
            .sum()
    }

    fn survives(&self) -> bool {
        let words = self.word_count();
        if words < MIN_BLOCK_WORDS {
            return false;
        }
        (self.linked_words() as f64 / words as f64) < MAX_LINK_DENSITY
    }
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Extract main-content text from story HTML.
///
/// Returns [`TextError::EmptyDocument`] when no block survives the
/// filter; a bare `<title>` does not count as content.
pub fn strip_boilerplate(html: &[u8]) -> Result<String, TextError> {
    let doc = Html::parse_document(&String::from_utf8_lossy(html));

    let mut blocks: Vec<Block> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    walk(doc.tree.root(), &mut blocks, &mut stack, 0);

    let kept: Vec<String> = blocks
        .iter()
        .filter(|b| b.survives())
        .map(Block::text)
        .collect();
    if kept.is_empty() {
        return Err(TextError::EmptyDocument);
    }

    let title_sel = Selector::parse("title").unwrap();
    let title = doc
        .select(&title_sel)
        .next()
        .map(|t| collapse_ws(&t.text().collect::<String>()))
        .filter(|t| !t.is_empty());

    let mut out = String::new();
    if let Some(t) = title {
        out.push_str(&t);
        out.push('\n');
    }
    out.push_str(&kept.join("\n"));
    Ok(out)
}

fn walk(
    node: ego_tree::NodeRef<'_, Node>,
    blocks: &mut Vec<Block>,
    stack: &mut Vec<usize>,
    link_depth: usize,
) {
    for child in node.children() {
        match child.value() {
            Node::Text(t) => {
                if let Some(&bi) = stack.last() {
                    blocks[bi].segments.push((t.to_string(), link_depth > 0));
                }
            }
            Node::Element(el) => {
                let name = el.name();
                if DROP_TAGS.contains(&name) {
                    continue;
                }
                let next_link_depth = link_depth + usize::from(name == "a");
                if BLOCK_TAGS.contains(&name) {
                    blocks.push(Block::default());
                    stack.push(blocks.len() - 1);
                    walk(child, blocks, stack, next_link_depth);
                    stack.pop();
                } else {
                    walk(child, blocks, stack, next_link_depth);
                }
            }
            _ => {}
        }
    }
}
