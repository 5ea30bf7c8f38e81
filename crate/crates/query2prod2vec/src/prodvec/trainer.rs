//! Skip-gram negative-sampling optimizer.
//!
//! Two contracts:
//! - [`train`] / [`train_with_report`] / [`train_text`]: single-threaded,
//!   bit-for-bit deterministic under a fixed seed.
//! - [`train_parallel`]: hogwild-style workers over session shards with
//!   unsynchronized vector updates; callers trade determinism for speed.
//!
//! The published embedding of an item is its input-matrix row; the output
//! (context) matrix is discarded after training.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{for_each_pair, NegativeSampler, TrainConfig, Vocabulary};
use crate::datamodel::{EmbeddingSpace, SessionSet, SpaceKind};
use crate::error::Result;
use crate::seed::derive_seed;

/// Statistics from a deterministic training run.
#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Mean per-pair SGNS loss for each epoch.
    pub epoch_loss: Vec<f64>,
    /// Total (center, context) pair updates across all epochs.
    pub total_pairs: u64,
    pub vocab_size: usize,
}

/// Trains product embeddings over shopping sessions.
pub fn train(sessions: &SessionSet, config: &TrainConfig) -> Result<EmbeddingSpace> {
    let sequences: Vec<&[String]> = sessions.iter().map(|s| s.events.as_slice()).collect();
    Ok(train_core(&sequences, config, SpaceKind::Product, false)?.0)
}

/// As [`train`], additionally returning per-epoch loss statistics.
pub fn train_with_report(
    sessions: &SessionSet,
    config: &TrainConfig,
) -> Result<(EmbeddingSpace, TrainReport)> {
    let sequences: Vec<&[String]> = sessions.iter().map(|s| s.events.as_slice()).collect();
    train_core(&sequences, config, SpaceKind::Product, true)
}

/// Trains token embeddings over arbitrary token sequences (e.g. tokenized
/// product descriptions) with the same optimizer.
pub fn train_text(corpus: &[Vec<String>], config: &TrainConfig) -> Result<EmbeddingSpace> {
    let sequences: Vec<&[String]> = corpus.iter().map(Vec::as_slice).collect();
    Ok(train_core(&sequences, config, SpaceKind::Text, false)?.0)
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `ln(1 + e^x)` without overflow; `-ln sigmoid(x) == softplus(-x)`.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (1.0 + (-x.abs()).exp()).ln()
}

fn init_input_matrix(vocab_size: usize, dimension: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "init"));
    (0..vocab_size * dimension)
        .map(|_| (rng.random::<f64>() - 0.5) / dimension as f64)
        .collect()
}

/// Counts how many pair updates the full run will perform, replaying the
/// same width draws the training pass will make. Knowing the total up front
/// lets the learning rate decay linearly from `initial` to `initial/10000`
/// over exactly all pair updates.
fn count_pairs(encoded: &[Vec<Option<u32>>], window: usize, epochs: usize, seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "pairs"));
    let mut total = 0u64;
    for _ in 0..epochs {
        for sequence in encoded {
            for_each_pair(sequence, || rng.random_range(1..=window), |_, _| total += 1);
        }
    }
    total
}

fn train_core(
    sequences: &[&[String]],
    config: &TrainConfig,
    kind: SpaceKind,
    track_loss: bool,
) -> Result<(EmbeddingSpace, TrainReport)> {
    config.validate()?;
    let vocab = Vocabulary::from_sequences(sequences, config.min_count)?;
    let encoded: Vec<Vec<Option<u32>>> = sequences
        .iter()
        .map(|s| super::encode(s, &vocab))
        .collect();
    let dim = config.dimension;
    let total_pairs = count_pairs(&encoded, config.window, config.epochs, config.seed).max(1);

    let mut input = init_input_matrix(vocab.len(), dim, config.seed);
    let mut output = vec![0.0f64; vocab.len() * dim];
    let sampler = NegativeSampler::new(&vocab, config.ns_exponent);
    let mut rng_pairs = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, "pairs"));
    let mut rng_neg = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, "negatives"));

    let lr = config.learning_rate_initial;
    let negatives = config.negatives_per_positive;
    let mut pairs_done = 0u64;
    let mut epoch_loss = Vec::with_capacity(config.epochs);
    let mut center = vec![0.0f64; dim];
    let mut grad = vec![0.0f64; dim];

    for _ in 0..config.epochs {
        let mut loss_sum = 0.0f64;
        let mut loss_pairs = 0u64;
        for sequence in &encoded {
            for_each_pair(
                sequence,
                || rng_pairs.random_range(1..=config.window),
                |c, o| {
                    let alpha = lr * (1.0 - pairs_done as f64 / total_pairs as f64).max(1e-4);
                    pairs_done += 1;
                    let c = c as usize;
                    let o = o as usize;
                    center.copy_from_slice(&input[c * dim..(c + 1) * dim]);
                    grad.fill(0.0);

                    // positive target, label 1
                    let row = &mut output[o * dim..(o + 1) * dim];
                    let dot: f64 = center.iter().zip(row.iter()).map(|(a, b)| a * b).sum();
                    let g = (1.0 - sigmoid(dot)) * alpha;
                    if track_loss {
                        loss_sum += softplus(-dot);
                    }
                    for j in 0..dim {
                        grad[j] += g * row[j];
                        row[j] += g * center[j];
                    }

                    // negative targets, label 0; a draw colliding with the
                    // positive is skipped, as in the reference optimizer
                    for _ in 0..negatives {
                        let n = sampler.sample(&mut rng_neg);
                        if n == o {
                            continue;
                        }
                        let row = &mut output[n * dim..(n + 1) * dim];
                        let dot: f64 = center.iter().zip(row.iter()).map(|(a, b)| a * b).sum();
                        let g = -sigmoid(dot) * alpha;
                        if track_loss {
                            loss_sum += softplus(dot);
                        }
                        for j in 0..dim {
                            grad[j] += g * row[j];
                            row[j] += g * center[j];
                        }
                    }

                    let row = &mut input[c * dim..(c + 1) * dim];
                    for j in 0..dim {
                        row[j] += grad[j];
                    }
                    loss_pairs += 1;
                },
            );
        }
        if track_loss {
            epoch_loss.push(loss_sum / loss_pairs.max(1) as f64);
        }
    }

    debug_assert_eq!(
        pairs_done.max(1),
        total_pairs,
        "schedule dry-run diverged from training pass"
    );
    let report = TrainReport {
        epoch_loss,
        total_pairs: pairs_done,
        vocab_size: vocab.len(),
    };
    Ok((build_space(&vocab, &input, dim, kind)?, report))
}

fn build_space(
    vocab: &Vocabulary,
    input: &[f64],
    dim: usize,
    kind: SpaceKind,
) -> Result<EmbeddingSpace> {
    let mut space = EmbeddingSpace::new(kind, dim);
    for (i, entry) in vocab.entries().iter().enumerate() {
        space.insert(entry.token.as_str(), &input[i * dim..(i + 1) * dim])?;
    }
    Ok(space)
}

/// Shared matrix for lock-free concurrent updates. Reads and writes are
/// relaxed atomic loads/stores of the f64 bit patterns; read-modify-write
/// races lose updates, which SGNS tolerates.
struct SharedMatrix {
    cells: Vec<AtomicU64>,
}

impl SharedMatrix {
    fn from_values(values: &[f64]) -> SharedMatrix {
        SharedMatrix {
            cells: values.iter().map(|v| AtomicU64::new(v.to_bits())).collect(),
        }
    }

    fn read_row(&self, row: usize, dim: usize, buf: &mut [f64]) {
        for (j, slot) in buf.iter_mut().enumerate() {
            *slot = f64::from_bits(self.cells[row * dim + j].load(Ordering::Relaxed));
        }
    }

    fn add_to_row(&self, row: usize, dim: usize, delta: &[f64]) {
        for (j, d) in delta.iter().enumerate() {
            let cell = &self.cells[row * dim + j];
            let current = f64::from_bits(cell.load(Ordering::Relaxed));
            cell.store((current + d).to_bits(), Ordering::Relaxed);
        }
    }

    fn into_values(self) -> Vec<f64> {
        self.cells
            .into_iter()
            .map(|c| f64::from_bits(c.into_inner()))
            .collect()
    }
}

/// Multi-worker training over session shards. Not deterministic: update
/// interleaving depends on scheduling.
pub fn train_parallel(
    sessions: &SessionSet,
    config: &TrainConfig,
    workers: usize,
) -> Result<EmbeddingSpace> {
    if workers <= 1 {
        return train(sessions, config);
    }
    config.validate()?;
    let sequences: Vec<&[String]> = sessions.iter().map(|s| s.events.as_slice()).collect();
    let vocab = Vocabulary::from_sequences(&sequences, config.min_count)?;
    let encoded: Vec<Vec<Option<u32>>> = sequences
        .iter()
        .map(|s| super::encode(s, &vocab))
        .collect();
    let dim = config.dimension;

    // Round-robin shards; each worker replays its own width draws to size
    // the shared learning-rate schedule.
    let shards: Vec<Vec<&Vec<Option<u32>>>> = (0..workers)
        .map(|w| encoded.iter().skip(w).step_by(workers).collect())
        .collect();
    let mut total_pairs = 0u64;
    for (w, shard) in shards.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &format!("pairs/{w}")));
        for _ in 0..config.epochs {
            for sequence in shard {
                for_each_pair(sequence, || rng.random_range(1..=config.window), |_, _| {
                    total_pairs += 1;
                });
            }
        }
    }
    let total_pairs = total_pairs.max(1);

    let input = SharedMatrix::from_values(&init_input_matrix(vocab.len(), dim, config.seed));
    let output = SharedMatrix::from_values(&vec![0.0f64; vocab.len() * dim]);
    let sampler = NegativeSampler::new(&vocab, config.ns_exponent);
    let progress = AtomicU64::new(0);
    let lr = config.learning_rate_initial;
    let negatives = config.negatives_per_positive;

    std::thread::scope(|scope| {
        for (w, shard) in shards.iter().enumerate() {
            let input = &input;
            let output = &output;
            let sampler = &sampler;
            let progress = &progress;
            scope.spawn(move || {
                let mut rng_pairs =
                    ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &format!("pairs/{w}")));
                let mut rng_neg =
                    ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &format!("negatives/{w}")));
                let mut center = vec![0.0f64; dim];
                let mut row = vec![0.0f64; dim];
                let mut grad = vec![0.0f64; dim];
                let mut delta = vec![0.0f64; dim];
                for _ in 0..config.epochs {
                    for sequence in shard {
                        for_each_pair(
                            sequence,
                            || rng_pairs.random_range(1..=config.window),
                            |c, o| {
                                let done = progress.fetch_add(1, Ordering::Relaxed);
                                let alpha =
                                    lr * (1.0 - done as f64 / total_pairs as f64).max(1e-4);
                                let c = c as usize;
                                let o = o as usize;
                                input.read_row(c, dim, &mut center);
                                grad.fill(0.0);

                                output.read_row(o, dim, &mut row);
                                let dot: f64 =
                                    center.iter().zip(row.iter()).map(|(a, b)| a * b).sum();
                                let g = (1.0 - sigmoid(dot)) * alpha;
                                for j in 0..dim {
                                    grad[j] += g * row[j];
                                    delta[j] = g * center[j];
                                }
                                output.add_to_row(o, dim, &delta);

                                for _ in 0..negatives {
                                    let n = sampler.sample(&mut rng_neg);
                                    if n == o {
                                        continue;
                                    }
                                    output.read_row(n, dim, &mut row);
                                    let dot: f64 =
                                        center.iter().zip(row.iter()).map(|(a, b)| a * b).sum();
                                    let g = -sigmoid(dot) * alpha;
                                    for j in 0..dim {
                                        grad[j] += g * row[j];
                                        delta[j] = g * center[j];
                                    }
                                    output.add_to_row(n, dim, &delta);
                                }

                                input.add_to_row(c, dim, &grad);
                            },
                        );
                    }
                }
            });
        }
    });

    build_space(&vocab, &input.into_values(), dim, SpaceKind::Product)
}
