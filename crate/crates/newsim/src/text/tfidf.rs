//! TF-IDF vectors over a day's story collection.
//!
//! Weighting is the textbook form: raw term frequency times
//! `ln(n / df)`, no smoothing and no in-vector normalization (cosine
//! normalizes downstream). Document frequencies always come from the
//! corpus being weighted, never from an external vocabulary.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{tokenize, TextError};

/// Identifies the story a cleaned document came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoryRef {
    pub site_id: String,
    pub rank: usize,
    pub capture_date: NaiveDate,
}

/// A story's de-boilerplated text.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CleanDocument {
    pub story_ref: StoryRef,
    pub text: String,
    pub token_count: usize,
}

impl CleanDocument {
    pub fn new(story_ref: StoryRef, text: String) -> Self {
        let token_count = tokenize(&text).len();
        Self { story_ref, text, token_count }
    }
}

/// A day's document collection with its shared vocabulary and document
/// frequencies.
#[derive(Debug, Clone)]
pub struct Corpus {
    documents: Vec<CleanDocument>,
    vocabulary: Vec<String>,
    df: Vec<usize>,
    // term index -> raw count, one map per document
    term_counts: Vec<BTreeMap<usize, usize>>,
}

impl Corpus {
    /// Tokenize `documents` and derive vocabulary and document
    /// frequencies. The vocabulary is sorted lexicographically so the
    /// term ordering is deterministic.
    pub fn build(documents: Vec<CleanDocument>) -> Self {
        let tokenized: Vec<Vec<String>> =
            documents.iter().map(|d| tokenize(&d.text)).collect();

        let mut terms: std::collections::BTreeSet<String> = Default::default();
        for tokens in &tokenized {
            terms.extend(tokens.iter().cloned());
        }
        let vocabulary: Vec<String> = terms.into_iter().collect();
        let index_of: BTreeMap<&str, usize> = vocabulary
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i))
            .collect();

        let mut df = vec![0usize; vocabulary.len()];
        let mut term_counts = Vec::with_capacity(documents.len());
        for tokens in &tokenized {
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for t in tokens {
                *counts.entry(index_of[t.as_str()]).or_insert(0) += 1;
            }
            for &i in counts.keys() {
                df[i] += 1;
            }
            term_counts.push(counts);
        }

        Self { documents, vocabulary, df, term_counts }
    }

    pub fn n(&self) -> usize {
        self.documents.len()
    }

    pub fn documents(&self) -> &[CleanDocument] {
        &self.documents
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    /// Document frequency per vocabulary index.
    pub fn df(&self) -> &[usize] {
        &self.df
    }
}

/// Sparse TF-IDF vector over a corpus's vocabulary ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct TermVector {
    entries: BTreeMap<usize, f64>,
    norm: f64,
    dim: usize,
}

impl TermVector {
    /// Build from (term index, weight) entries; zero weights are dropped.
    pub fn from_entries(entries: BTreeMap<usize, f64>, dim: usize) -> Self {
        let entries: BTreeMap<usize, f64> =
            entries.into_iter().filter(|&(_, w)| w != 0.0).collect();
        let norm = entries.values().map(|w| w * w).sum::<f64>().sqrt();
        Self { entries, norm, dim }
    }

    /// Build from a dense slice (used mainly by tests).
    pub fn from_dense(weights: &[f64]) -> Self {
        let entries = weights
            .iter()
            .enumerate()
            .filter(|&(_, &w)| w != 0.0)
            .map(|(i, &w)| (i, w))
            .collect();
        Self::from_entries(entries, weights.len())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(&i, &w)| (i, w))
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.entries.get(&index).copied().unwrap_or(0.0)
    }

    /// Cached Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Vocabulary size this vector was built over.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dot(&self, other: &TermVector) -> f64 {
        // Iterate the sparser side.
        let (a, b) = if self.entries.len() <= other.entries.len() {
            (self, other)
        } else {
            (other, self)
        };
        a.entries
            .iter()
            .filter_map(|(i, w)| b.entries.get(i).map(|v| w * v))
            .sum()
    }
}

/// Represent every document in `corpus` as a TF-IDF vector over the
/// shared vocabulary ordering.
///
/// `weight(t, d) = tf(t, d) * ln(n / df(t))` with raw counts for tf.
/// Terms occurring in every document get `ln(1) = 0` and are dropped
/// from the sparse entries.
pub fn build_tfidf(corpus: &Corpus) -> Result<Vec<TermVector>, TextError> {
    let n = corpus.n();
    if n < 2 {
        return Err(TextError::CorpusTooSmall(n));
    }
    let dim = corpus.vocabulary.len();
    let idf: Vec<f64> = corpus
        .df
        .iter()
        .map(|&df| (n as f64 / df as f64).ln())
        .collect();

    Ok(corpus
        .term_counts
        .iter()
        .map(|counts| {
            let entries = counts
                .iter()
                .map(|(&i, &tf)| (i, tf as f64 * idf[i]))
                .collect();
            TermVector::from_entries(entries, dim)
        })
        .collect())
}
