//! Query embeddings from click feedback.
//!
//! A query's vector is the frequency-weighted average of the embeddings of
//! the products clicked after it, restricted to the `rank` most clicked
//! products. Real and synthetic click logs feed the same path; merging is
//! plain concatenation of their events.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::datamodel::{ClickEvent, ClickLog, EmbeddingSpace, SpaceKind};
use crate::error::{Error, Result};

/// Click counts for one normalized query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClickHistogram {
    pub query: String,
    /// product id -> click count; non-empty, all counts >= 1
    pub counts: HashMap<String, u64>,
}

/// How many of the most-clicked products contribute to a query's embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankConfig {
    pub rank: usize,
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig { rank: 5 }
    }
}

impl RankConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::InvalidConfig("rank must be at least 1".into()));
        }
        Ok(())
    }
}

/// Groups click events by query, summing counts per product. Event order is
/// irrelevant; the result maps each query to its histogram.
pub fn aggregate_clicks(log: &ClickLog) -> BTreeMap<String, ClickHistogram> {
    aggregate_events(log.events())
}

fn aggregate_events<'a>(
    events: impl IntoIterator<Item = &'a ClickEvent>,
) -> BTreeMap<String, ClickHistogram> {
    let mut histograms: BTreeMap<String, ClickHistogram> = BTreeMap::new();
    for event in events {
        let histogram = histograms
            .entry(event.query.clone())
            .or_insert_with(|| ClickHistogram {
                query: event.query.clone(),
                counts: HashMap::new(),
            });
        *histogram.counts.entry(event.product_id.clone()).or_insert(0) += 1;
    }
    histograms
}

/// The histogram's products ordered by (count desc, product id asc),
/// truncated to the top `rank`. Selection happens before intersecting with
/// any embedding vocabulary.
fn top_ranked(histogram: &ClickHistogram, rank: usize) -> Vec<(&str, u64)> {
    let mut ranked: Vec<(&str, u64)> = histogram
        .counts
        .iter()
        .map(|(id, &count)| (id.as_str(), count))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(rank);
    ranked
}

/// Embeds one query as the count-weighted mean of its top-`rank` clicked
/// products that have vectors in `products`.
///
/// Weights are normalized counts (`count / total`), computed before the
/// weighted sum; because an integer scaling of all counts cancels exactly in
/// each `count/total` quotient, the output is bit-for-bit invariant under
/// count scaling.
pub fn embed_query(
    histogram: &ClickHistogram,
    products: &EmbeddingSpace,
    config: &RankConfig,
) -> Result<Vec<f64>> {
    config.validate()?;
    let selected: Vec<(&str, u64, &[f64])> = top_ranked(histogram, config.rank)
        .into_iter()
        .filter_map(|(id, count)| products.get(id).map(|v| (id, count, v)))
        .collect();
    if selected.is_empty() {
        return Err(Error::QueryNotEmbeddable(histogram.query.clone()));
    }
    let total: f64 = selected.iter().map(|(_, count, _)| *count as f64).sum();
    let mut out = vec![0.0f64; products.dimension()];
    for (_, count, vector) in &selected {
        let weight = *count as f64 / total;
        for (slot, component) in out.iter_mut().zip(*vector) {
            *slot += weight * component;
        }
    }
    Ok(out)
}

/// Builds the query lexicon over one or more click logs (merging is event
/// concatenation). Returns the lexicon and the queries that could not be
/// embedded because none of their top-ranked products had a vector.
///
/// Lexicon keys replace internal spaces with `_` so multiword queries
/// serialize in the text embedding format.
pub fn build_lexicon(
    logs: &[&ClickLog],
    products: &EmbeddingSpace,
    config: &RankConfig,
) -> Result<(EmbeddingSpace, Vec<String>)> {
    config.validate()?;
    if logs.iter().all(|log| log.is_empty()) {
        return Err(Error::EmptyInput("click logs are empty".into()));
    }
    if products.is_empty() {
        return Err(Error::EmptyInput("product space is empty".into()));
    }
    let histograms = aggregate_events(logs.iter().flat_map(|log| log.events()));
    let mut lexicon = EmbeddingSpace::new(SpaceKind::Query, products.dimension());
    let mut omitted = Vec::new();
    for (query, histogram) in &histograms {
        match embed_query(histogram, products, config) {
            Ok(vector) => lexicon.insert(query.replace(' ', "_"), &vector)?,
            Err(Error::QueryNotEmbeddable(_)) => omitted.push(query.clone()),
            Err(other) => return Err(other),
        }
    }
    if lexicon.is_empty() {
        return Err(Error::NoEmbeddableQueries);
    }
    Ok((lexicon, omitted))
}
