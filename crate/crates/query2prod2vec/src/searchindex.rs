//! Inverted index over product metadata with TF-IDF weighting and Boolean
//! AND search.
//!
//! This deliberately stays a toy engine: its only job is to stand in for a
//! production search API when simulating click events. No stemming, no
//! stopwords, no phrase queries, no incremental updates.

use std::collections::{HashMap, HashSet};

use crate::datamodel::Catalog;
use crate::error::{Error, Result};

/// Field names accepted by [`InvertedIndex::build`].
pub const DEFAULT_FIELDS: [&str; 4] = ["description", "brand", "product_type", "activity"];

/// One postings entry: a document and the raw term count within it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Posting {
    pub product_id: String,
    pub term_frequency: u32,
}

/// Immutable term -> postings map over a catalog snapshot.
///
/// Postings lists are sorted by product id; the document frequency of a term
/// is by construction the length of its postings list.
#[derive(Debug, Clone)]
pub struct InvertedIndex {
    postings: HashMap<String, Vec<Posting>>,
    doc_count: usize,
    indexed_fields: Vec<String>,
}

/// Lowercase, split on non-alphanumeric boundaries, drop empty tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

impl InvertedIndex {
    /// Indexes each product over the concatenation of the selected fields.
    pub fn build(catalog: &Catalog, fields: &[&str]) -> Result<InvertedIndex> {
        if fields.is_empty() {
            return Err(Error::InvalidConfig("no index fields selected".into()));
        }
        for field in fields {
            if !DEFAULT_FIELDS.contains(field) {
                return Err(Error::UnknownField((*field).to_string()));
            }
        }
        if catalog.is_empty() {
            return Err(Error::EmptyCatalog);
        }
        let mut postings: HashMap<String, Vec<Posting>> = HashMap::new();
        for product in catalog.products() {
            let mut text = String::new();
            for field in fields {
                let value = match *field {
                    "description" => Some(product.description.as_str()),
                    "brand" => product.brand.as_deref(),
                    "product_type" => product.product_type.as_deref(),
                    "activity" => product.activity.as_deref(),
                    _ => unreachable!("validated above"),
                };
                if let Some(value) = value {
                    text.push_str(value);
                    text.push(' ');
                }
            }
            let mut counts: HashMap<String, u32> = HashMap::new();
            for token in tokenize(&text) {
                *counts.entry(token).or_insert(0) += 1;
            }
            for (term, term_frequency) in counts {
                postings.entry(term).or_default().push(Posting {
                    product_id: product.product_id.clone(),
                    term_frequency,
                });
            }
        }
        for list in postings.values_mut() {
            list.sort_by(|a, b| a.product_id.cmp(&b.product_id));
        }
        Ok(InvertedIndex {
            postings,
            doc_count: catalog.len(),
            indexed_fields: fields.iter().map(|f| (*f).to_string()).collect(),
        })
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn indexed_fields(&self) -> &[String] {
        &self.indexed_fields
    }

    /// Documents containing `term`; `df(term) == postings(term).len()`.
    pub fn postings(&self, term: &str) -> Option<&[Posting]> {
        self.postings.get(term).map(Vec::as_slice)
    }

    pub fn doc_frequency(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    /// Boolean AND retrieval with TF-IDF scoring.
    ///
    /// A document qualifies iff it contains every query token; its score is
    /// `sum over query tokens of tf(t, d) * ln(doc_count / df(t))`. Results
    /// are ordered by descending score, ties by ascending product id, and
    /// truncated to `limit`.
    pub fn search(&self, query: &str, limit: usize) -> Vec<(String, f64)> {
        let tokens = tokenize(query);
        if tokens.is_empty() || limit == 0 {
            return Vec::new();
        }
        // AND semantics: every token must have postings.
        if tokens.iter().any(|t| !self.postings.contains_key(t)) {
            return Vec::new();
        }
        // Candidates = docs present in every token's postings list.
        let mut candidates: HashSet<&str> = self.postings[&tokens[0]]
            .iter()
            .map(|p| p.product_id.as_str())
            .collect();
        for token in &tokens[1..] {
            let list: HashSet<&str> = self.postings[token]
                .iter()
                .map(|p| p.product_id.as_str())
                .collect();
            candidates.retain(|id| list.contains(id));
        }
        let mut scores: HashMap<&str, f64> = candidates.iter().map(|&id| (id, 0.0)).collect();
        for token in &tokens {
            let list = &self.postings[token];
            let idf = (self.doc_count as f64 / list.len() as f64).ln();
            for posting in list {
                if let Some(score) = scores.get_mut(posting.product_id.as_str()) {
                    *score += f64::from(posting.term_frequency) * idf;
                }
            }
        }
        let mut ranked: Vec<(String, f64)> = scores
            .into_iter()
            .map(|(id, score)| (id.to_string(), score))
            .collect();
        ranked.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("scores are finite")
                .then_with(|| a.0.cmp(&b.0))
        });
        ranked.truncate(limit);
        ranked
    }
}
