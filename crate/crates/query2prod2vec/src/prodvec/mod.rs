//! The latent product space: skip-gram with negative sampling over shopping
//! sessions, with sessions playing the role of sentences and products the
//! role of words. The same optimizer core is reused over description text
//! for the bag-of-words baseline.

mod trainer;

use std::collections::HashMap;

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::datamodel::{cosine, EmbeddingSpace, SessionSet};
use crate::error::{Error, Result};

pub use trainer::{train, train_parallel, train_text, train_with_report, TrainReport};

/// Skip-gram training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dimension: usize,
    pub window: usize,
    pub epochs: usize,
    pub ns_exponent: f64,
    pub negatives_per_positive: usize,
    pub learning_rate_initial: f64,
    pub min_count: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dimension: 50,
            window: 10,
            epochs: 30,
            ns_exponent: 0.75,
            negatives_per_positive: 5,
            learning_rate_initial: 0.025,
            min_count: 1,
            seed: 42,
        }
    }
}

impl TrainConfig {
    /// Defaults tuned for description text rather than product sessions:
    /// text corpora are larger and noisier, so rare tokens are filtered.
    pub fn for_text() -> Self {
        TrainConfig {
            min_count: 5,
            ..TrainConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidConfig("dimension must be positive".into()));
        }
        if self.window == 0 {
            return Err(Error::InvalidConfig("window must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.ns_exponent) {
            return Err(Error::InvalidConfig(
                "ns_exponent must lie in [0, 1]".into(),
            ));
        }
        if self.negatives_per_positive == 0 {
            return Err(Error::InvalidConfig(
                "negatives_per_positive must be at least 1".into(),
            ));
        }
        if !self.learning_rate_initial.is_finite() || self.learning_rate_initial <= 0.0 {
            return Err(Error::InvalidConfig(
                "learning_rate_initial must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Item vocabulary with frequencies, indexed in descending-frequency order
/// (ties broken by identifier) so training and serialization are
/// reproducible.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    entries: Vec<VocabEntry>,
    index: HashMap<String, usize>,
}

#[derive(Debug, Clone)]
pub struct VocabEntry {
    pub token: String,
    pub count: u64,
}

impl Vocabulary {
    /// Counts items over arbitrary token sequences and filters by
    /// `min_count`.
    pub fn from_sequences<S: AsRef<[String]>>(sequences: &[S], min_count: usize) -> Result<Self> {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for sequence in sequences {
            for token in sequence.as_ref() {
                *counts.entry(token).or_insert(0) += 1;
            }
        }
        let mut entries: Vec<VocabEntry> = counts
            .into_iter()
            .filter(|&(_, count)| count >= min_count as u64)
            .map(|(token, count)| VocabEntry {
                token: token.to_string(),
                count,
            })
            .collect();
        if entries.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        entries.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.token.cmp(&b.token)));
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.token.clone(), i))
            .collect();
        Ok(Vocabulary { entries, index })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn entry(&self, position: usize) -> &VocabEntry {
        &self.entries[position]
    }

    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }
}

/// Builds the training vocabulary from sessions, excluding items seen fewer
/// than `min_count` times.
pub fn build_vocabulary(sessions: &SessionSet, min_count: usize) -> Result<Vocabulary> {
    if sessions.is_empty() {
        return Err(Error::EmptyInput("session set is empty".into()));
    }
    let sequences: Vec<&[String]> = sessions.iter().map(|s| s.events.as_slice()).collect();
    Vocabulary::from_sequences(&sequences, min_count)
}

/// Encodes a token sequence as vocabulary positions; out-of-vocabulary
/// items keep their position in the sequence but yield `None`.
fn encode(sequence: &[String], vocab: &Vocabulary) -> Vec<Option<u32>> {
    sequence
        .iter()
        .map(|t| vocab.position(t).map(|p| p as u32))
        .collect()
}

/// Core pair walk shared by pair generation, the schedule dry-run and the
/// trainer: for each center position one window width is drawn, then every
/// in-vocabulary item within that many positions becomes a context.
/// Out-of-vocabulary items still occupy positions (they widen distances) but
/// produce no pairs.
fn for_each_pair(
    encoded: &[Option<u32>],
    mut draw_width: impl FnMut() -> usize,
    mut emit: impl FnMut(u32, u32),
) {
    let n = encoded.len();
    for (i, center) in encoded.iter().enumerate() {
        let width = draw_width();
        let Some(center) = center else { continue };
        let lo = i.saturating_sub(width);
        let hi = (i + width).min(n.saturating_sub(1));
        for (j, context) in encoded.iter().enumerate().take(hi + 1).skip(lo) {
            if j == i {
                continue;
            }
            if let Some(context) = context {
                emit(*center, *context);
            }
        }
    }
}

/// Skip-gram pairs for one session with dynamic window shrinkage: the
/// effective width for each center is drawn uniformly from `1..=window`.
/// Returned values are positions into `vocab`.
pub fn generate_pairs(
    events: &[String],
    vocab: &Vocabulary,
    window: usize,
    rng: &mut impl RngExt,
) -> Vec<(u32, u32)> {
    let encoded = encode(events, vocab);
    let mut pairs = Vec::new();
    for_each_pair(
        &encoded,
        || rng.random_range(1..=window),
        |center, context| pairs.push((center, context)),
    );
    pairs
}

/// Samples vocabulary positions proportionally to `count^exponent`.
///
/// Implemented as inverse-CDF over the cumulative weights, so the sampled
/// distribution is exact (no table quantization).
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    cumulative: Vec<f64>,
    total: f64,
}

impl NegativeSampler {
    pub fn new(vocab: &Vocabulary, exponent: f64) -> NegativeSampler {
        let mut cumulative = Vec::with_capacity(vocab.len());
        let mut total = 0.0;
        for entry in vocab.entries() {
            total += (entry.count as f64).powf(exponent);
            cumulative.push(total);
        }
        NegativeSampler { cumulative, total }
    }

    pub fn sample(&self, rng: &mut impl RngExt) -> usize {
        let r: f64 = rng.random::<f64>() * self.total;
        self.cumulative.partition_point(|&c| c <= r).min(self.cumulative.len() - 1)
    }
}

/// The `k` nearest keys to `key` by cosine similarity, excluding `key`
/// itself; ties broken by ascending key order.
pub fn nearest_neighbors(
    space: &EmbeddingSpace,
    key: &str,
    k: usize,
) -> Result<Vec<(String, f64)>> {
    let query = space
        .get(key)
        .ok_or_else(|| Error::UnknownKey(key.to_string()))?;
    let mut scored: Vec<(String, f64)> = space
        .iter()
        .filter(|(other, _)| *other != key)
        .map(|(other, vector)| (other.to_string(), cosine(query, vector)))
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("cosines are finite")
            .then_with(|| a.0.cmp(&b.0))
    });
    scored.truncate(k);
    Ok(scored)
}
