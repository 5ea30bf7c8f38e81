//! Synthetic click-event generation.
//!
//! For every word in a list, the word is issued as a query against the
//! inverted index; the returned products are then sampled N times by
//! popularity, producing (word, product) click events. Words whose search
//! comes back empty are skipped and reported. This is what makes cold-start
//! query embeddings possible: the product space exists before any real
//! search traffic does.

mod shop;

use std::collections::HashMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::datamodel::{ClickEvent, ClickLog, ClickSource, SessionSet};
use crate::error::{Error, Result};
use crate::searchindex::InvertedIndex;
use crate::seed::derive_seed;

pub use shop::{generate_synthetic_shop, GroundTruth, ShopData, ShopSpec};

/// Non-negative sampling weights over products. Products never observed have
/// weight zero.
#[derive(Debug, Clone)]
pub struct PopularityDistribution {
    weights: HashMap<String, f64>,
}

impl PopularityDistribution {
    pub fn new(weights: HashMap<String, f64>) -> Result<PopularityDistribution> {
        if weights.values().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig(
                "popularity weights must be finite and non-negative".into(),
            ));
        }
        if !weights.values().any(|w| *w > 0.0) {
            return Err(Error::InvalidConfig(
                "popularity needs at least one positive weight".into(),
            ));
        }
        Ok(PopularityDistribution { weights })
    }

    pub fn weight(&self, product_id: &str) -> f64 {
        self.weights.get(product_id).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Estimates popularity as the total interaction count of each product
/// across all sessions.
pub fn estimate_popularity(sessions: &SessionSet) -> Result<PopularityDistribution> {
    if sessions.is_empty() {
        return Err(Error::EmptyInput("session set is empty".into()));
    }
    let mut weights: HashMap<String, f64> = HashMap::new();
    for session in sessions.iter() {
        for product_id in &session.events {
            *weights.entry(product_id.clone()).or_insert(0.0) += 1.0;
        }
    }
    PopularityDistribution::new(weights)
}

/// Simulation knobs: `simulations_per_word` is the N of the event-generation
/// loop; `search_limit` caps the candidate pool returned per query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthConfig {
    pub simulations_per_word: usize,
    pub search_limit: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            simulations_per_word: 500,
            search_limit: 50,
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.simulations_per_word == 0 {
            return Err(Error::InvalidConfig(
                "simulations_per_word must be at least 1".into(),
            ));
        }
        if self.search_limit == 0 {
            return Err(Error::InvalidConfig("search_limit must be at least 1".into()));
        }
        Ok(())
    }
}

/// Inverse-CDF draw over a cumulative weight array.
pub(crate) fn sample_cumulative(cumulative: &[f64], rng: &mut impl RngExt) -> usize {
    let total = *cumulative.last().expect("non-empty cumulative weights");
    let r: f64 = rng.random::<f64>() * total;
    cumulative
        .partition_point(|&c| c <= r)
        .min(cumulative.len() - 1)
}

/// Shared event loop: one independently seeded stream per word, derived from
/// `(seed, word)`, so per-word generation is order-independent and could run
/// in parallel without changing output.
fn simulate_events(
    words: &[String],
    index: &InvertedIndex,
    dist: &PopularityDistribution,
    config: &SynthConfig,
) -> (Vec<ClickEvent>, Vec<String>) {
    let mut events = Vec::new();
    let mut skipped = Vec::new();
    for word in words {
        let results = index.search(word, config.search_limit);
        if results.is_empty() {
            skipped.push(word.clone());
            continue;
        }
        // Restrict the popularity distribution to the result list and
        // renormalize; if every returned product has zero weight, fall back
        // to uniform so new products are still clickable.
        let mut weights: Vec<f64> = results.iter().map(|(id, _)| dist.weight(id)).collect();
        if weights.iter().all(|w| *w == 0.0) {
            weights.iter_mut().for_each(|w| *w = 1.0);
        }
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, word));
        for _ in 0..config.simulations_per_word {
            let pick = sample_cumulative(&cumulative, &mut rng);
            events.push(ClickEvent {
                query: word.clone(),
                product_id: results[pick].0.clone(),
            });
        }
    }
    (events, skipped)
}

/// Generates synthetic click events for a word list. Returns the synthetic
/// log plus the words skipped because their search produced no results.
pub fn generate_synthetic_events(
    words: &[String],
    index: &InvertedIndex,
    dist: &PopularityDistribution,
    config: &SynthConfig,
) -> Result<(ClickLog, Vec<String>)> {
    config.validate()?;
    if words.is_empty() {
        return Err(Error::EmptyInput("word list is empty".into()));
    }
    let (events, skipped) = simulate_events(words, index, dist, config);
    Ok((ClickLog::new(events, ClickSource::Synthetic), skipped))
}

/// Same simulation, tagged as real traffic. Used by the shop generator to
/// fabricate the "historical" click log of a synthetic shop.
pub(crate) fn simulate_real_style_log(
    words: &[String],
    index: &InvertedIndex,
    dist: &PopularityDistribution,
    config: &SynthConfig,
) -> ClickLog {
    let (events, _) = simulate_events(words, index, dist, config);
    ClickLog::new(events, ClickSource::Real)
}
