//! File-based pipeline drivers behind the `q2p` binary.
//!
//! One flat JSON config document feeds every stage; the global seed fans out
//! to per-module seeds (see [`crate::seed`]) so each subcommand is
//! independently reproducible. A subcommand either writes all of its
//! artifacts or none: outputs are staged through temp files and anything
//! already created is removed when a later step fails.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::datamodel::{
    load_catalog, load_click_log, load_sessions, save_catalog, save_click_log, save_sessions,
    ClickLog, ClickSource, EmbeddingSpace, SpaceKind, TaxonomyField,
};
use crate::error::{Error, Result};
use crate::evalkit::{
    generate_analogies, hit_rate_with_options, load_analogies, load_triplets, save_analogies,
    similarity_accuracy, AnalogyGenConfig, EvalReport,
};
use crate::prodvec::{train, train_parallel, TrainConfig};
use crate::queryembed::{build_lexicon, RankConfig};
use crate::searchindex::{InvertedIndex, DEFAULT_FIELDS};
use crate::seed::derive_seed;
use crate::synth::{
    estimate_popularity, generate_synthetic_events, generate_synthetic_shop, ShopSpec, SynthConfig,
};

/// The single flat configuration document. Every field has a default, so an
/// empty object `{}` is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub catalog: Option<PathBuf>,
    pub sessions: Option<PathBuf>,
    pub clicks: Option<PathBuf>,
    pub out_dir: PathBuf,

    pub dimension: usize,
    pub window: usize,
    pub epochs: usize,
    pub ns_exponent: f64,
    pub negatives_per_positive: usize,
    pub learning_rate_initial: f64,
    pub min_count: usize,

    pub rank: usize,

    pub simulations_per_word: usize,
    pub search_limit: usize,

    pub gini_percentile: f64,
    pub samples_per_entity: usize,

    pub cutoffs: Vec<usize>,
    pub open_vocabulary: bool,

    pub seed: u64,
    pub threads: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        PipelineConfig {
            catalog: None,
            sessions: None,
            clicks: None,
            out_dir: PathBuf::from("out"),
            dimension: train.dimension,
            window: train.window,
            epochs: train.epochs,
            ns_exponent: train.ns_exponent,
            negatives_per_positive: train.negatives_per_positive,
            learning_rate_initial: train.learning_rate_initial,
            min_count: train.min_count,
            rank: RankConfig::default().rank,
            simulations_per_word: SynthConfig::default().simulations_per_word,
            search_limit: SynthConfig::default().search_limit,
            gini_percentile: AnalogyGenConfig::default().gini_percentile,
            samples_per_entity: AnalogyGenConfig::default().samples_per_entity,
            cutoffs: vec![5, 10],
            open_vocabulary: false,
            seed: 42,
            threads: 1,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<PipelineConfig> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::malformed(path, 1, e.to_string()))
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            dimension: self.dimension,
            window: self.window,
            epochs: self.epochs,
            ns_exponent: self.ns_exponent,
            negatives_per_positive: self.negatives_per_positive,
            learning_rate_initial: self.learning_rate_initial,
            min_count: self.min_count,
            seed: derive_seed(self.seed, "prodvec"),
        }
    }

    pub fn synth_config(&self) -> SynthConfig {
        SynthConfig {
            simulations_per_word: self.simulations_per_word,
            search_limit: self.search_limit,
            seed: derive_seed(self.seed, "synth"),
        }
    }

    pub fn analogy_config(&self) -> AnalogyGenConfig {
        AnalogyGenConfig {
            gini_percentile: self.gini_percentile,
            samples_per_entity: self.samples_per_entity,
            seed: derive_seed(self.seed, "evalkit"),
        }
    }

    pub fn rank_config(&self) -> RankConfig {
        RankConfig { rank: self.rank }
    }

    fn require(&self, field: &str, value: &Option<PathBuf>) -> Result<PathBuf> {
        value
            .clone()
            .ok_or_else(|| Error::InvalidConfig(format!("{field} path is required but not set")))
    }
}

/// Which click logs feed the query lexicon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbedMode {
    Real,
    Synthetic,
    Merged,
}

impl FromStr for EmbedMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<EmbedMode> {
        match s {
            "real" => Ok(EmbedMode::Real),
            "synthetic" => Ok(EmbedMode::Synthetic),
            "merged" => Ok(EmbedMode::Merged),
            other => Err(Error::InvalidConfig(format!(
                "unknown mode {other:?} (expected real, synthetic or merged)"
            ))),
        }
    }
}

impl fmt::Display for EmbedMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmbedMode::Real => "real",
            EmbedMode::Synthetic => "synthetic",
            EmbedMode::Merged => "merged",
        })
    }
}

/// Tracks files created by one subcommand; anything staged but not committed
/// is deleted on drop, so failures cannot leave partial outputs behind.
struct OutputGuard {
    created: Vec<PathBuf>,
    committed: bool,
}

impl OutputGuard {
    fn new() -> OutputGuard {
        OutputGuard {
            created: Vec::new(),
            committed: false,
        }
    }

    fn write(&mut self, path: PathBuf, contents: &str) -> Result<PathBuf> {
        let tmp = path.with_extension("tmp");
        if let Err(e) = fs::write(&tmp, contents) {
            let _ = fs::remove_file(&tmp);
            return Err(Error::io(&tmp, e));
        }
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        self.created.push(path.clone());
        Ok(path)
    }

    /// Registers a path for cleanup before it is written, so a failed or
    /// partial write is removed too.
    fn stage(&mut self, path: PathBuf) -> PathBuf {
        self.created.push(path.clone());
        path
    }

    fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.created)
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if !self.committed {
            for path in &self.created {
                let _ = fs::remove_file(path);
            }
        }
    }
}

fn ensure_out_dir(config: &PipelineConfig) -> Result<PathBuf> {
    fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;
    Ok(config.out_dir.clone())
}

/// `simulate-shop`: writes catalog.jsonl, sessions.jsonl, clicks.jsonl and
/// ground_truth.json for a planted synthetic shop.
pub fn cmd_simulate_shop(config: &PipelineConfig, spec: &ShopSpec) -> Result<Vec<PathBuf>> {
    let out = ensure_out_dir(config)?;
    let shop = generate_synthetic_shop(spec)?;
    let mut guard = OutputGuard::new();

    let catalog_path = guard.stage(out.join("catalog.jsonl"));
    save_catalog(catalog_path, &shop.catalog)?;

    let sessions_path = guard.stage(out.join("sessions.jsonl"));
    save_sessions(sessions_path, &shop.sessions)?;

    let clicks_path = guard.stage(out.join("clicks.jsonl"));
    save_click_log(clicks_path, &shop.clicks)?;

    let truth =
        serde_json::to_string_pretty(&shop.ground_truth).expect("ground truth serializes");
    guard.write(out.join("ground_truth.json"), &format!("{truth}\n"))?;

    Ok(guard.commit())
}

/// `train-products`: trains the product space over the configured sessions
/// and writes product_embeddings.txt plus ingestion_report.txt.
pub fn cmd_train_products(config: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let out = ensure_out_dir(config)?;
    let sessions_path = config.require("sessions", &config.sessions)?;
    let catalog = match &config.catalog {
        Some(path) => Some(load_catalog(path)?),
        None => None,
    };
    let (sessions, report) = load_sessions(&sessions_path, catalog.as_ref())?;
    let train_config = config.train_config();
    let space = if config.threads > 1 {
        eprintln!(
            "warning: training with {} threads voids single-run determinism",
            config.threads
        );
        train_parallel(&sessions, &train_config, config.threads)?
    } else {
        train(&sessions, &train_config)?
    };
    let mut guard = OutputGuard::new();
    guard.write(out.join("product_embeddings.txt"), &space.to_text())?;
    guard.write(out.join("ingestion_report.txt"), &report.to_string())?;
    Ok(guard.commit())
}

fn read_word_list(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect())
}

/// `embed-queries`: builds the query lexicon from real clicks, simulated
/// clicks, or both, and writes query_lexicon.txt plus embed_report.txt
/// (skipped words and omitted queries).
pub fn cmd_embed_queries(
    config: &PipelineConfig,
    mode: EmbedMode,
    embeddings: Option<&Path>,
    words: Option<&Path>,
) -> Result<Vec<PathBuf>> {
    let out = ensure_out_dir(config)?;
    let embeddings_path = embeddings
        .map(Path::to_path_buf)
        .unwrap_or_else(|| out.join("product_embeddings.txt"));
    let products = EmbeddingSpace::load_text(&embeddings_path, SpaceKind::Product)?;

    let mut logs: Vec<ClickLog> = Vec::new();
    let mut skipped: Vec<String> = Vec::new();
    let mut real_ingest = None;
    if matches!(mode, EmbedMode::Real | EmbedMode::Merged) {
        let clicks_path = config.require("clicks", &config.clicks)?;
        let (log, ingest) = load_click_log(&clicks_path, ClickSource::Real)?;
        real_ingest = Some(ingest);
        logs.push(log);
    }
    if matches!(mode, EmbedMode::Synthetic | EmbedMode::Merged) {
        let catalog_path = config.require("catalog", &config.catalog)?;
        let sessions_path = config.require("sessions", &config.sessions)?;
        let catalog = load_catalog(&catalog_path)?;
        let (sessions, _) = load_sessions(&sessions_path, Some(&catalog))?;
        let popularity = estimate_popularity(&sessions)?;
        let index = InvertedIndex::build(&catalog, &DEFAULT_FIELDS)?;
        let word_list: Vec<String> = match words {
            Some(path) => read_word_list(path)?,
            None => catalog.taxonomy_tokens().into_iter().collect(),
        };
        let (log, skipped_words) =
            generate_synthetic_events(&word_list, &index, &popularity, &config.synth_config())?;
        skipped = skipped_words;
        logs.push(log);
    }

    let log_refs: Vec<&ClickLog> = logs.iter().collect();
    let (lexicon, omitted) = build_lexicon(&log_refs, &products, &config.rank_config())?;

    let mut report = String::new();
    report.push_str(&format!("mode: {mode}\n"));
    report.push_str(&format!("queries embedded: {}\n", lexicon.len()));
    if let Some(ingest) = &real_ingest {
        report.push_str(&format!(
            "real click events loaded: {} (dropped {})\n",
            ingest.loaded, ingest.dropped
        ));
    }
    for word in &skipped {
        report.push_str(&format!("skipped (no search results): {word}\n"));
    }
    for query in &omitted {
        report.push_str(&format!("omitted (no embedded referent): {query}\n"));
    }

    let mut guard = OutputGuard::new();
    guard.write(out.join("query_lexicon.txt"), &lexicon.to_text())?;
    guard.write(out.join("embed_report.txt"), &report)?;
    Ok(guard.commit())
}

/// Parses a `source:target` taxonomy pair, e.g. `brand:activity`.
pub fn parse_type_pair(spec: &str) -> Result<(TaxonomyField, TaxonomyField)> {
    let (source, target) = spec
        .split_once(':')
        .ok_or_else(|| Error::InvalidConfig(format!("type pair {spec:?} must be source:target")))?;
    Ok((TaxonomyField::parse(source)?, TaxonomyField::parse(target)?))
}

/// `build-analogies`: one `analogies_<source>_<target>.jsonl` per type pair.
pub fn cmd_build_analogies(
    config: &PipelineConfig,
    pairs: &[(TaxonomyField, TaxonomyField)],
) -> Result<Vec<PathBuf>> {
    let out = ensure_out_dir(config)?;
    if pairs.is_empty() {
        return Err(Error::InvalidConfig("no type pairs given".into()));
    }
    let catalog_path = config.require("catalog", &config.catalog)?;
    let catalog = load_catalog(&catalog_path)?;
    let analogy_config = config.analogy_config();
    let mut guard = OutputGuard::new();
    for &(source, target) in pairs {
        let analogies = generate_analogies(&catalog, (source, target), &analogy_config)?;
        let path =
            guard.stage(out.join(format!("analogies_{}_{}.jsonl", source.name(), target.name())));
        save_analogies(path, &analogies)?;
    }
    Ok(guard.commit())
}

/// `evaluate`: scores a query lexicon on analogy files (and optionally a
/// triplet file), writing eval_report.json and eval_report.txt.
pub fn cmd_evaluate(
    config: &PipelineConfig,
    lexicon_path: &Path,
    analogy_paths: &[PathBuf],
    triplet_path: Option<&Path>,
) -> Result<Vec<PathBuf>> {
    let out = ensure_out_dir(config)?;
    if analogy_paths.is_empty() {
        return Err(Error::InvalidConfig("no analogy files given".into()));
    }
    let catalog_path = config.require("catalog", &config.catalog)?;
    let catalog = load_catalog(&catalog_path)?;
    let lexicon = EmbeddingSpace::load_text(lexicon_path, SpaceKind::Query)?;
    let mut analogies = Vec::new();
    for path in analogy_paths {
        analogies.extend(load_analogies(path)?);
    }
    let mut report: EvalReport = hit_rate_with_options(
        &lexicon,
        &analogies,
        &catalog,
        &config.cutoffs,
        config.open_vocabulary,
    )?;
    if let Some(path) = triplet_path {
        let triplets = load_triplets(path)?;
        report.st_accuracy = Some(similarity_accuracy(&lexicon, &triplets)?.accuracy);
    }
    let mut guard = OutputGuard::new();
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    guard.write(out.join("eval_report.json"), &format!("{json}\n"))?;
    guard.write(out.join("eval_report.txt"), &report.to_table())?;
    Ok(guard.commit())
}
