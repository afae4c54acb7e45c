//! Text pipeline: boilerplate removal, tokenization, and TF-IDF vectors
//! over a day's story collection.

mod boilerplate;
mod tfidf;
mod tokenize;

pub use boilerplate::strip_boilerplate;
pub use tfidf::{build_tfidf, CleanDocument, Corpus, StoryRef, TermVector};
pub use tokenize::tokenize;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TextError {
    /// No content block survived the boilerplate filter.
    #[error("no content block survived boilerplate removal")]
    EmptyDocument,
    /// A similarity collection needs at least two documents.
    #[error("corpus has {0} documents, need at least 2")]
    CorpusTooSmall(usize),
}
