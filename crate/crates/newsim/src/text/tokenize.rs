//! Tokenization: lowercased maximal runs of Unicode alphanumerics,
//! dropping tokens shorter than two characters. No stopword removal,
//! no stemming.

/// Split `text` into terms.
///
/// The text is lowercased first and then split on non-alphanumeric
/// characters, so every emitted token is already in its final form and
/// re-tokenizing the joined output is a no-op.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_string)
        .collect()
}
