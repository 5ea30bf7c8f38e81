//! Desk-scale synthetic shop generator.
//!
//! Real shop data is proprietary; this generator plants known structure so
//! the rest of the pipeline has something measurable to recover: products
//! live in (brand, type) cells, each brand owns a dominant activity,
//! sessions are biased random walks that stay inside a cell with probability
//! 0.8, and popularity follows a configurable Zipf law.

use std::collections::BTreeMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{sample_cumulative, simulate_real_style_log, PopularityDistribution, SynthConfig};
use crate::datamodel::{Catalog, ClickLog, Product, Session, SessionSet};
use crate::error::{Error, Result};
use crate::searchindex::{InvertedIndex, DEFAULT_FIELDS};
use crate::seed::derive_seed;

/// Probability that a session walk stays inside its current (brand, type)
/// cell. Synthetic-only knob, chosen so cluster structure is reliably
/// recoverable at desk scale.
const CLUSTER_STAY: f64 = 0.8;

/// Events per label token in the generated "historical" click log.
const REAL_EVENTS_PER_WORD: usize = 100;

const FILLER: [&str; 12] = [
    "classic", "comfort", "durable", "edition", "light", "premium", "pro", "season", "series",
    "soft", "strong", "value",
];

/// Shape of the generated shop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShopSpec {
    pub n_brands: usize,
    pub n_types: usize,
    pub n_activities: usize,
    pub products_per_cell: usize,
    pub n_sessions: usize,
    /// Inclusive (min, max) session length.
    pub session_length_range: (usize, usize),
    pub popularity_zipf_exponent: f64,
    pub seed: u64,
}

impl Default for ShopSpec {
    fn default() -> Self {
        ShopSpec {
            n_brands: 8,
            n_types: 5,
            n_activities: 8,
            products_per_cell: 4,
            n_sessions: 50_000,
            session_length_range: (3, 8),
            popularity_zipf_exponent: 1.0,
            seed: 42,
        }
    }
}

impl ShopSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("n_brands", self.n_brands),
            ("n_types", self.n_types),
            ("n_activities", self.n_activities),
            ("products_per_cell", self.products_per_cell),
            ("n_sessions", self.n_sessions),
        ] {
            if value == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        let (min, max) = self.session_length_range;
        if min < 2 || max < min {
            return Err(Error::InvalidConfig(
                "session_length_range must satisfy 2 <= min <= max".into(),
            ));
        }
        if !self.popularity_zipf_exponent.is_finite() || self.popularity_zipf_exponent < 0.0 {
            return Err(Error::InvalidConfig(
                "popularity_zipf_exponent must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn n_products(&self) -> usize {
        self.n_brands * self.n_types * self.products_per_cell
    }
}

/// Planted structure of a generated shop, for evaluation oracles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// brand -> product ids of that brand (sorted)
    pub brands: BTreeMap<String, Vec<String>>,
    /// brand -> the activity all of its products carry
    pub dominant_activity: BTreeMap<String, String>,
}

/// Everything a shop run produces.
#[derive(Debug, Clone)]
pub struct ShopData {
    pub catalog: Catalog,
    pub sessions: SessionSet,
    /// Simulated "historical" log (source tagged real): each label token
    /// issued against the generated catalog, clicks sampled by popularity.
    pub clicks: ClickLog,
    pub ground_truth: GroundTruth,
    /// Planted popularity weights by product id.
    pub popularity: PopularityDistribution,
}

pub fn generate_synthetic_shop(spec: &ShopSpec) -> Result<ShopData> {
    spec.validate()?;

    let brand_names: Vec<String> = (0..spec.n_brands).map(|i| format!("brand{i:02}")).collect();
    let type_names: Vec<String> = (0..spec.n_types).map(|i| format!("type{i:02}")).collect();
    let activity_names: Vec<String> = (0..spec.n_activities)
        .map(|i| format!("activity{i:02}"))
        .collect();

    // Catalog: one cell per (brand, type), each brand bound to one activity.
    let mut rng_catalog = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, "catalog"));
    let mut products = Vec::with_capacity(spec.n_products());
    let mut cell_of = Vec::with_capacity(spec.n_products());
    for (b, brand) in brand_names.iter().enumerate() {
        let activity = &activity_names[b % spec.n_activities];
        for (t, type_name) in type_names.iter().enumerate() {
            for _ in 0..spec.products_per_cell {
                let idx = products.len();
                let mut description = format!("{brand} {type_name} {activity}");
                for _ in 0..3 {
                    description.push(' ');
                    description.push_str(FILLER[rng_catalog.random_range(0..FILLER.len())]);
                }
                products.push(Product {
                    product_id: format!("p{idx:05}"),
                    brand: Some(brand.clone()),
                    product_type: Some(type_name.clone()),
                    activity: Some(activity.clone()),
                    description,
                });
                cell_of.push(b * spec.n_types + t);
            }
        }
    }
    let catalog = Catalog::new(products)?;

    // Popularity: Zipf weights assigned over a shuffled rank order.
    let n = catalog.len();
    let mut rng_pop = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, "popularity"));
    let mut ranks: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng_pop.random_range(0..=i);
        ranks.swap(i, j);
    }
    let mut weights = vec![0.0f64; n];
    for (product_idx, rank) in ranks.iter().enumerate() {
        weights[product_idx] = 1.0 / ((rank + 1) as f64).powf(spec.popularity_zipf_exponent);
    }
    let popularity = PopularityDistribution::new(
        catalog
            .products()
            .iter()
            .enumerate()
            .map(|(i, p)| (p.product_id.clone(), weights[i]))
            .collect(),
    )?;

    // Per-cell and global cumulative weights for the session walks.
    let n_cells = spec.n_brands * spec.n_types;
    let mut cell_members: Vec<Vec<usize>> = vec![Vec::new(); n_cells];
    for (product_idx, &cell) in cell_of.iter().enumerate() {
        cell_members[cell].push(product_idx);
    }
    let cumulative_of = |indices: &[usize]| -> Vec<f64> {
        let mut acc = 0.0;
        indices
            .iter()
            .map(|&i| {
                acc += weights[i];
                acc
            })
            .collect()
    };
    let all_indices: Vec<usize> = (0..n).collect();
    let global_cumulative = cumulative_of(&all_indices);
    let cell_cumulative: Vec<Vec<f64>> = cell_members.iter().map(|m| cumulative_of(m)).collect();

    // Sessions: popularity-seeded biased random walks. Because both the
    // global and the within-cell draw are proportional to planted weights,
    // the marginal visit distribution stays the planted Zipf law.
    let mut rng_sessions = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, "sessions"));
    let (min_len, max_len) = spec.session_length_range;
    let mut sessions = Vec::with_capacity(spec.n_sessions);
    for s in 0..spec.n_sessions {
        let length = rng_sessions.random_range(min_len..=max_len);
        let mut current = sample_cumulative(&global_cumulative, &mut rng_sessions);
        let mut events = Vec::with_capacity(length);
        events.push(catalog.products()[current].product_id.clone());
        for _ in 1..length {
            current = if rng_sessions.random_bool(CLUSTER_STAY) {
                let cell = cell_of[current];
                let within = sample_cumulative(&cell_cumulative[cell], &mut rng_sessions);
                cell_members[cell][within]
            } else {
                sample_cumulative(&global_cumulative, &mut rng_sessions)
            };
            events.push(catalog.products()[current].product_id.clone());
        }
        sessions.push(Session {
            session_id: format!("s{s:06}"),
            events,
        });
    }
    let sessions = SessionSet::new(sessions);

    // Historical click log: every label token issued against the catalog.
    let index = InvertedIndex::build(&catalog, &DEFAULT_FIELDS)?;
    let words: Vec<String> = catalog.taxonomy_tokens().into_iter().collect();
    let click_config = SynthConfig {
        simulations_per_word: REAL_EVENTS_PER_WORD,
        search_limit: 50,
        seed: derive_seed(spec.seed, "clicks"),
    };
    let clicks = simulate_real_style_log(&words, &index, &popularity, &click_config);

    let mut brands: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut dominant_activity = BTreeMap::new();
    for product in catalog.products() {
        let brand = product.brand.clone().expect("generated products have brands");
        brands
            .entry(brand.clone())
            .or_default()
            .push(product.product_id.clone());
        dominant_activity
            .entry(brand)
            .or_insert_with(|| product.activity.clone().expect("generated activity"));
    }

    Ok(ShopData {
        catalog,
        sessions,
        clicks,
        ground_truth: GroundTruth {
            brands,
            dominant_activity,
        },
        popularity,
    })
}
