//! Evaluation instruments: taxonomy-derived analogies, hit rate and
//! coverage, and a small human-judged similarity task.
//!
//! Analogies are generated from catalog labels instead of hand annotation:
//! for a pair of taxonomy fields (say brand : activity), entities whose
//! label distribution is concentrated enough (Gini above the configured
//! percentile) are "determinate" and paired with each other in both
//! directions. The solver is 3CosAdd: candidates ranked by cosine against
//! `v_b - v_a + v_c`.

mod gini;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::datamodel::{cosine, label_token, Catalog, EmbeddingSpace, TaxonomyField};
use crate::error::{Error, Result};

pub use gini::gini;

/// One analogy `a : b = c : ?` with gold answer `d`, annotated with the
/// (source field, target field) pair it was generated from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analogy {
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
    /// (entity field, label field), e.g. ("brand", "activity")
    pub type_pair: (String, String),
}

/// Generation knobs: entities qualify when their Gini is at or above the
/// `gini_percentile` of all entity Ginis; each qualifying entity is paired
/// `samples_per_entity` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalogyGenConfig {
    pub gini_percentile: f64,
    pub samples_per_entity: usize,
    pub seed: u64,
}

impl Default for AnalogyGenConfig {
    fn default() -> Self {
        AnalogyGenConfig {
            gini_percentile: 75.0,
            samples_per_entity: 10,
            seed: 42,
        }
    }
}

impl AnalogyGenConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gini_percentile > 0.0 && self.gini_percentile < 100.0) {
            return Err(Error::InvalidConfig(
                "gini_percentile must lie strictly between 0 and 100".into(),
            ));
        }
        if self.samples_per_entity == 0 {
            return Err(Error::InvalidConfig(
                "samples_per_entity must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A human judgement: which option is more similar to the anchor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimilarityTriplet {
    pub anchor: String,
    pub option_a: String,
    pub option_b: String,
    pub human_choice: Choice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Choice {
    A,
    B,
}

/// Evaluation result: hit rate per cutoff over covered analogies, coverage,
/// and optionally accuracy on the similarity task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub hit_rate: BTreeMap<usize, f64>,
    pub coverage: f64,
    pub n_analogies: usize,
    pub n_covered: usize,
    pub st_accuracy: Option<f64>,
}

impl EvalReport {
    /// One-line table in the style of the usual benchmark summaries:
    /// HR@cutoffs, CV, ST.
    pub fn to_table(&self) -> String {
        let mut header = String::new();
        let mut values = String::new();
        for cutoff in self.hit_rate.keys() {
            header.push_str(&format!("{:>10}", format!("HR@{cutoff}")));
            values.push_str(&format!("{:>10.3}", self.hit_rate[cutoff]));
        }
        header.push_str(&format!("{:>10}", "CV"));
        values.push_str(&format!("{:>10.3}", self.coverage));
        header.push_str(&format!("{:>10}", "ST"));
        match self.st_accuracy {
            Some(acc) => values.push_str(&format!("{:>10.3}", acc)),
            None => values.push_str(&format!("{:>10}", "-")),
        }
        header.push_str(&format!("{:>12}", "analogies"));
        values.push_str(&format!("{:>12}", self.n_analogies));
        format!("{header}\n{values}\n")
    }
}

/// Frequencies of every `target_field` label (zeros included over the full
/// label vocabulary of the catalog) among products whose `entity_field`
/// equals `entity_value`.
pub fn label_distribution(
    catalog: &Catalog,
    entity_field: TaxonomyField,
    entity_value: &str,
    target_field: TaxonomyField,
) -> Result<BTreeMap<String, u64>> {
    let vocabulary = catalog.labels(target_field);
    let mut counts: BTreeMap<String, u64> =
        vocabulary.into_iter().map(|label| (label, 0)).collect();
    let mut entity_seen = false;
    let mut labeled = 0u64;
    for product in catalog.products() {
        if product.label(entity_field) != Some(entity_value) {
            continue;
        }
        entity_seen = true;
        if let Some(label) = product.label(target_field) {
            *counts.get_mut(label).expect("label in vocabulary") += 1;
            labeled += 1;
        }
    }
    if !entity_seen || labeled == 0 {
        // An entity with no labeled products carries no distribution; treat
        // it as unknown for this field.
        return Err(Error::UnknownKey(format!(
            "{entity_value} (no {} labels)",
            target_field.name()
        )));
    }
    Ok(counts)
}

/// A determinate entity: its Gini and its most frequent target label
/// (ties broken by ascending label).
fn entity_profile(
    catalog: &Catalog,
    entity_field: TaxonomyField,
    entity: &str,
    target_field: TaxonomyField,
) -> Result<(f64, String)> {
    let distribution = label_distribution(catalog, entity_field, entity, target_field)?;
    let frequencies: Vec<f64> = distribution.values().map(|&c| c as f64).collect();
    let coefficient = gini(&frequencies)?;
    let top = distribution
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
        .map(|(label, _)| label.clone())
        .expect("non-empty distribution");
    Ok((coefficient, top))
}

/// Nearest-rank percentile: the smallest value such that at least
/// `percentile` percent of the sample is at or below it.
fn nearest_rank_percentile(values: &mut [f64], percentile: f64) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = values.len();
    let rank = ((percentile / 100.0) * n as f64).ceil() as usize;
    values[rank.clamp(1, n) - 1]
}

/// Generates the analogy test set for one (entity field, label field) pair.
///
/// Entities at or above the Gini threshold are each paired
/// `samples_per_entity` times with a uniformly drawn different qualifying
/// entity; both directions are emitted and exact duplicates removed.
/// Deterministic under the config seed.
pub fn generate_analogies(
    catalog: &Catalog,
    type_pair: (TaxonomyField, TaxonomyField),
    config: &AnalogyGenConfig,
) -> Result<Vec<Analogy>> {
    config.validate()?;
    let (entity_field, target_field) = type_pair;
    let mut profiles: Vec<(String, f64, String)> = Vec::new();
    for entity in catalog.labels(entity_field) {
        // Entities without any labeled product carry no distribution.
        if let Ok((coefficient, top)) =
            entity_profile(catalog, entity_field, &entity, target_field)
        {
            profiles.push((entity, coefficient, top));
        }
    }
    if profiles.len() < 2 {
        return Err(Error::EmptyInput(format!(
            "need at least 2 {} entities with {} labels",
            entity_field.name(),
            target_field.name()
        )));
    }
    let mut ginis: Vec<f64> = profiles.iter().map(|(_, g, _)| *g).collect();
    let threshold = nearest_rank_percentile(&mut ginis, config.gini_percentile);
    let qualified: Vec<&(String, f64, String)> =
        profiles.iter().filter(|(_, g, _)| *g >= threshold).collect();
    if qualified.len() < 2 {
        return Err(Error::EmptyInput(format!(
            "fewer than 2 entities reach the {}th-percentile Gini threshold",
            config.gini_percentile
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let pair_names = (
        entity_field.name().to_string(),
        target_field.name().to_string(),
    );
    let mut seen: HashSet<(String, String, String, String)> = HashSet::new();
    let mut analogies = Vec::new();
    let mut push = |analogies: &mut Vec<Analogy>,
                    source: &(String, f64, String),
                    target: &(String, f64, String)| {
        let quad = (
            label_token(&source.0),
            label_token(&source.2),
            label_token(&target.0),
            label_token(&target.2),
        );
        if seen.insert(quad.clone()) {
            analogies.push(Analogy {
                a: quad.0,
                b: quad.1,
                c: quad.2,
                d: quad.3,
                type_pair: pair_names.clone(),
            });
        }
    };
    for (i, source) in qualified.iter().enumerate() {
        for _ in 0..config.samples_per_entity {
            let mut j = rng.random_range(0..qualified.len() - 1);
            if j >= i {
                j += 1;
            }
            let target = qualified[j];
            push(&mut analogies, source, target);
            push(&mut analogies, target, source);
        }
    }
    Ok(analogies)
}

/// Ranks `candidates \ {a, b, c}` by cosine against `v_b - v_a + v_c`
/// (3CosAdd), ties broken by ascending token. Returns `None` when any of
/// `a`, `b`, `c` has no vector: an "uncovered" analogy, not an error.
/// Candidates without vectors are skipped.
pub fn solve_analogy(
    space: &EmbeddingSpace,
    a: &str,
    b: &str,
    c: &str,
    candidates: &BTreeSet<String>,
) -> Option<Vec<(String, f64)>> {
    let va = space.get(a)?;
    let vb = space.get(b)?;
    let vc = space.get(c)?;
    let target: Vec<f64> = vb
        .iter()
        .zip(va)
        .zip(vc)
        .map(|((b, a), c)| b - a + c)
        .collect();
    let mut ranked: Vec<(String, f64)> = candidates
        .iter()
        .filter(|token| token.as_str() != a && token.as_str() != b && token.as_str() != c)
        .filter_map(|token| {
            space
                .get(token)
                .map(|v| (token.clone(), cosine(v, &target)))
        })
        .collect();
    ranked.sort_by(|x, y| {
        y.1.partial_cmp(&x.1)
            .expect("cosines are finite")
            .then_with(|| x.0.cmp(&y.0))
    });
    Some(ranked)
}

/// Scores an analogy set against a space.
///
/// Coverage is the fraction of analogies whose four tokens all have
/// vectors; hit rate at each cutoff is computed over covered analogies
/// only. The candidate set for an analogy is every catalog value of the
/// answer's taxonomy field present in the space (or, with
/// `open_vocabulary`, every key of the space).
pub fn hit_rate(
    space: &EmbeddingSpace,
    analogies: &[Analogy],
    catalog: &Catalog,
    cutoffs: &[usize],
) -> Result<EvalReport> {
    hit_rate_with_options(space, analogies, catalog, cutoffs, false)
}

pub fn hit_rate_with_options(
    space: &EmbeddingSpace,
    analogies: &[Analogy],
    catalog: &Catalog,
    cutoffs: &[usize],
    open_vocabulary: bool,
) -> Result<EvalReport> {
    if analogies.is_empty() {
        return Err(Error::EmptyInput("analogy set is empty".into()));
    }
    if cutoffs.is_empty() || cutoffs.contains(&0) || cutoffs.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidConfig(
            "cutoffs must be positive and sorted ascending".into(),
        ));
    }
    let mut candidate_cache: HashMap<String, BTreeSet<String>> = HashMap::new();
    let mut hits: BTreeMap<usize, usize> = cutoffs.iter().map(|&k| (k, 0)).collect();
    let mut covered = 0usize;
    for analogy in analogies {
        if !(space.contains(&analogy.a)
            && space.contains(&analogy.b)
            && space.contains(&analogy.c)
            && space.contains(&analogy.d))
        {
            continue;
        }
        covered += 1;
        let field_name = &analogy.type_pair.1;
        if !candidate_cache.contains_key(field_name) {
            let candidates: BTreeSet<String> = if open_vocabulary {
                space.keys().map(str::to_owned).collect()
            } else {
                let field = TaxonomyField::parse(field_name)?;
                catalog
                    .labels(field)
                    .into_iter()
                    .map(|label| label_token(&label))
                    .filter(|token| space.contains(token))
                    .collect()
            };
            candidate_cache.insert(field_name.clone(), candidates);
        }
        let ranking = solve_analogy(
            space,
            &analogy.a,
            &analogy.b,
            &analogy.c,
            &candidate_cache[field_name],
        )
        .expect("all four tokens covered");
        let position = ranking.iter().position(|(token, _)| *token == analogy.d);
        if let Some(position) = position {
            for (&cutoff, count) in hits.iter_mut() {
                if position < cutoff {
                    *count += 1;
                }
            }
        }
    }
    let hit_rate = hits
        .into_iter()
        .map(|(cutoff, count)| {
            let rate = if covered == 0 {
                0.0
            } else {
                count as f64 / covered as f64
            };
            (cutoff, rate)
        })
        .collect();
    Ok(EvalReport {
        hit_rate,
        coverage: covered as f64 / analogies.len() as f64,
        n_analogies: analogies.len(),
        n_covered: covered,
        st_accuracy: None,
    })
}

/// Outcome of the similarity task: accuracy plus the indices of triplets
/// with at least one missing token (counted incorrect, reported apart).
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityOutcome {
    pub accuracy: f64,
    pub missing: Vec<usize>,
}

/// Fraction of triplets where the cosine choice matches the human choice.
/// Ties resolve to option a.
pub fn similarity_accuracy(
    space: &EmbeddingSpace,
    triplets: &[SimilarityTriplet],
) -> Result<SimilarityOutcome> {
    if triplets.is_empty() {
        return Err(Error::EmptyInput("triplet set is empty".into()));
    }
    let mut correct = 0usize;
    let mut missing = Vec::new();
    for (i, triplet) in triplets.iter().enumerate() {
        let vectors = (
            space.get(&triplet.anchor),
            space.get(&triplet.option_a),
            space.get(&triplet.option_b),
        );
        let (Some(anchor), Some(option_a), Some(option_b)) = vectors else {
            missing.push(i);
            continue;
        };
        let choice = if cosine(anchor, option_a) >= cosine(anchor, option_b) {
            Choice::A
        } else {
            Choice::B
        };
        if choice == triplet.human_choice {
            correct += 1;
        }
    }
    Ok(SimilarityOutcome {
        accuracy: correct as f64 / triplets.len() as f64,
        missing,
    })
}

pub fn save_analogies(path: impl AsRef<Path>, analogies: &[Analogy]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for analogy in analogies {
        out.push_str(&serde_json::to_string(analogy).expect("analogy serializes"));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_analogies(path: impl AsRef<Path>) -> Result<Vec<Analogy>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut analogies = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        analogies.push(
            serde_json::from_str(line)
                .map_err(|e| Error::malformed(path, idx + 1, e.to_string()))?,
        );
    }
    Ok(analogies)
}

pub fn save_triplets(path: impl AsRef<Path>, triplets: &[SimilarityTriplet]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for triplet in triplets {
        out.push_str(&serde_json::to_string(triplet).expect("triplet serializes"));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_triplets(path: impl AsRef<Path>) -> Result<Vec<SimilarityTriplet>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut triplets = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        triplets.push(
            serde_json::from_str(line)
                .map_err(|e| Error::malformed(path, idx + 1, e.to_string()))?,
        );
    }
    Ok(triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::{Product, SpaceKind};

    fn product(id: &str, brand: &str, activity: Option<&str>) -> Product {
        Product {
            product_id: id.to_string(),
            brand: Some(brand.to_string()),
            product_type: None,
            activity: activity.map(str::to_owned),
            description: String::new(),
        }
    }

    fn nike_wilson_catalog() -> Catalog {
        let mut products = Vec::new();
        for i in 0..10 {
            products.push(product(&format!("n{i}"), "nike", Some("soccer")));
        }
        for i in 0..8 {
            products.push(product(&format!("b{i}"), "nike", Some("basketball")));
        }
        for i in 0..8 {
            products.push(product(&format!("w{i}"), "wilson", Some("tennis")));
        }
        for i in 0..3 {
            products.push(product(&format!("c{i}"), "cressi", Some("scubadiving")));
        }
        Catalog::new(products).unwrap()
    }

    #[test]
    fn label_distribution_includes_zero_counts() {
        let catalog = nike_wilson_catalog();
        let distribution = label_distribution(
            &catalog,
            TaxonomyField::Brand,
            "nike",
            TaxonomyField::Activity,
        )
        .unwrap();
        assert_eq!(distribution["soccer"], 10);
        assert_eq!(distribution["basketball"], 8);
        assert_eq!(distribution["scubadiving"], 0);
        assert_eq!(distribution["tennis"], 0);
    }

    #[test]
    fn label_distribution_single_label_brand() {
        // brand owning only tennis products over vocabulary {tennis, ...}
        let catalog = nike_wilson_catalog();
        let distribution = label_distribution(
            &catalog,
            TaxonomyField::Brand,
            "wilson",
            TaxonomyField::Activity,
        )
        .unwrap();
        assert_eq!(distribution["tennis"], 8);
        assert!(distribution.values().filter(|&&c| c == 0).count() >= 1);
    }

    #[test]
    fn label_distribution_unknown_entity_errors() {
        let catalog = nike_wilson_catalog();
        assert!(label_distribution(
            &catalog,
            TaxonomyField::Brand,
            "adidas",
            TaxonomyField::Activity,
        )
        .is_err());
        // brand with products but no activity labels
        let catalog = Catalog::new(vec![product("x", "plainbrand", None)]).unwrap();
        assert!(label_distribution(
            &catalog,
            TaxonomyField::Brand,
            "plainbrand",
            TaxonomyField::Activity,
        )
        .is_err());
    }

    fn determinate_catalog() -> Catalog {
        // wilson -> tennis, atomic -> skiing: fully determinate; nike is
        // split across two activities and falls below the threshold.
        let mut products = Vec::new();
        for i in 0..6 {
            products.push(product(&format!("w{i}"), "wilson", Some("tennis")));
            products.push(product(&format!("a{i}"), "atomic", Some("skiing")));
        }
        for i in 0..5 {
            products.push(product(&format!("n{i}"), "nike", Some("soccer")));
            products.push(product(&format!("m{i}"), "nike", Some("basketball")));
        }
        Catalog::new(products).unwrap()
    }

    #[test]
    fn generates_both_directions() {
        let analogies = generate_analogies(
            &determinate_catalog(),
            (TaxonomyField::Brand, TaxonomyField::Activity),
            &AnalogyGenConfig::default(),
        )
        .unwrap();
        let forward = analogies
            .iter()
            .any(|an| an.a == "wilson" && an.b == "tennis" && an.c == "atomic" && an.d == "skiing");
        let backward = analogies
            .iter()
            .any(|an| an.a == "atomic" && an.b == "skiing" && an.c == "wilson" && an.d == "tennis");
        assert!(forward && backward, "{analogies:?}");
    }

    #[test]
    fn below_threshold_entity_never_a_source() {
        let analogies = generate_analogies(
            &determinate_catalog(),
            (TaxonomyField::Brand, TaxonomyField::Activity),
            &AnalogyGenConfig::default(),
        )
        .unwrap();
        assert!(analogies.iter().all(|an| an.a != "nike" && an.c != "nike"));
    }

    #[test]
    fn emitted_pairs_are_direction_symmetric() {
        let analogies = generate_analogies(
            &determinate_catalog(),
            (TaxonomyField::Brand, TaxonomyField::Activity),
            &AnalogyGenConfig::default(),
        )
        .unwrap();
        let pairs: HashSet<(String, String)> = analogies
            .iter()
            .map(|an| (an.a.clone(), an.c.clone()))
            .collect();
        for (source, target) in &pairs {
            assert!(
                pairs.contains(&(target.clone(), source.clone())),
                "missing reverse of ({source}, {target})"
            );
        }
    }

    #[test]
    fn emitted_analogies_stay_above_threshold() {
        // 8 single-activity brands: recompute each emitted analogy's source
        // and target Gini as an oracle and compare against the recomputed
        // nearest-rank threshold.
        let shop = crate::synth::generate_synthetic_shop(&crate::synth::ShopSpec {
            n_brands: 8,
            n_types: 2,
            n_activities: 8,
            products_per_cell: 2,
            n_sessions: 10,
            session_length_range: (2, 4),
            popularity_zipf_exponent: 1.0,
            seed: 77,
        })
        .unwrap();
        let config = AnalogyGenConfig::default();
        let analogies = generate_analogies(
            &shop.catalog,
            (TaxonomyField::Brand, TaxonomyField::Activity),
            &config,
        )
        .unwrap();
        assert!(!analogies.is_empty());

        let gini_of = |brand: &str| -> f64 {
            let distribution = label_distribution(
                &shop.catalog,
                TaxonomyField::Brand,
                brand,
                TaxonomyField::Activity,
            )
            .unwrap();
            let frequencies: Vec<f64> = distribution.values().map(|&c| c as f64).collect();
            gini(&frequencies).unwrap()
        };
        let mut all: Vec<f64> = shop
            .catalog
            .labels(TaxonomyField::Brand)
            .iter()
            .map(|b| gini_of(b))
            .collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let rank = ((config.gini_percentile / 100.0) * all.len() as f64).ceil() as usize;
        let threshold = all[rank.clamp(1, all.len()) - 1];
        for analogy in &analogies {
            assert!(gini_of(&analogy.a) >= threshold, "{analogy:?}");
            assert!(gini_of(&analogy.c) >= threshold, "{analogy:?}");
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let catalog = determinate_catalog();
        let config = AnalogyGenConfig::default();
        let pair = (TaxonomyField::Brand, TaxonomyField::Activity);
        let a = generate_analogies(&catalog, pair, &config).unwrap();
        let b = generate_analogies(&catalog, pair, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn too_few_qualifying_entities_error() {
        let mut products = Vec::new();
        for i in 0..4 {
            products.push(product(&format!("w{i}"), "wilson", Some("tennis")));
        }
        let catalog = Catalog::new(products).unwrap();
        assert!(generate_analogies(
            &catalog,
            (TaxonomyField::Brand, TaxonomyField::Activity),
            &AnalogyGenConfig::default(),
        )
        .is_err());
    }

    fn toy_space() -> EmbeddingSpace {
        let mut space = EmbeddingSpace::new(SpaceKind::Query, 4);
        space.insert("a", &[1.0, 0.0, 0.0, 0.0]).unwrap();
        space.insert("b", &[0.0, 1.0, 0.0, 0.0]).unwrap();
        space.insert("c", &[0.0, 0.0, 1.0, 0.0]).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        space.insert("d", &[0.0, s, s, 0.0]).unwrap();
        space.insert("e", &[1.0, 0.0, 0.0, 0.0]).unwrap();
        space
    }

    #[test]
    fn solver_ranks_by_hand_computed_cosines() {
        let space = toy_space();
        let candidates: BTreeSet<String> =
            ["b", "d", "e"].iter().map(|s| (*s).to_string()).collect();
        let ranking = solve_analogy(&space, "a", "b", "c", &candidates).unwrap();
        // target = b - a + c = (-1, 1, 1, 0); b itself is excluded
        assert_eq!(ranking.len(), 2);
        assert_eq!(ranking[0].0, "d");
        assert!((ranking[0].1 - 2.0 / 6.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(ranking[1].0, "e");
        assert!((ranking[1].1 - (-1.0 / 3.0_f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn solver_exact_match_ranks_first() {
        let mut space = EmbeddingSpace::new(SpaceKind::Query, 3);
        space.insert("a", &[1.0, 0.0, 0.0]).unwrap();
        space.insert("b", &[0.0, 1.0, 0.0]).unwrap();
        space.insert("c", &[0.0, 0.0, 1.0]).unwrap();
        space.insert("gold", &[-1.0, 1.0, 1.0]).unwrap();
        space.insert("other", &[0.3, -0.7, 0.1]).unwrap();
        let candidates: BTreeSet<String> = ["gold", "other"]
            .iter()
            .map(|s| (*s).to_string())
            .collect();
        let ranking = solve_analogy(&space, "a", "b", "c", &candidates).unwrap();
        assert_eq!(ranking[0].0, "gold");
        assert!((ranking[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solver_invariant_under_candidate_scaling() {
        // cosine ignores per-vector magnitude: scaling any candidate by a
        // positive constant must not move it in the ranking
        let mut rng_values = [0.83_f64, -0.41, 0.29, 0.64, -0.77, 0.12, 0.55, -0.2];
        let mut base = EmbeddingSpace::new(SpaceKind::Query, 2);
        let mut scaled = EmbeddingSpace::new(SpaceKind::Query, 2);
        for (i, token) in ["a", "b", "c", "x0", "x1", "x2", "x3"].iter().enumerate() {
            let v = [
                rng_values[i % rng_values.len()],
                rng_values[(i + 3) % rng_values.len()],
            ];
            base.insert(*token, &v).unwrap();
            let factor = if token.starts_with('x') { 1.0 + i as f64 } else { 1.0 };
            scaled
                .insert(*token, &[v[0] * factor, v[1] * factor])
                .unwrap();
            rng_values[i % rng_values.len()] *= -0.9;
        }
        let candidates: BTreeSet<String> =
            ["x0", "x1", "x2", "x3"].iter().map(|s| (*s).to_string()).collect();
        let order = |space: &EmbeddingSpace| -> Vec<String> {
            solve_analogy(space, "a", "b", "c", &candidates)
                .unwrap()
                .into_iter()
                .map(|(t, _)| t)
                .collect()
        };
        assert_eq!(order(&base), order(&scaled));
    }

    #[test]
    fn solver_single_candidate_and_uncovered() {
        let space = toy_space();
        let only: BTreeSet<String> = std::iter::once("d".to_string()).collect();
        let ranking = solve_analogy(&space, "a", "b", "c", &only).unwrap();
        assert_eq!(ranking.len(), 1);
        assert_eq!(ranking[0].0, "d");
        assert!(solve_analogy(&space, "zz", "b", "c", &only).is_none());
    }

    fn coverage_fixture() -> (EmbeddingSpace, Vec<Analogy>, Catalog) {
        // Two activities, two brands per activity; space over all tokens.
        let products = vec![
            product("p1", "wilson", Some("tennis")),
            product("p2", "atomic", Some("skiing")),
        ];
        let catalog = Catalog::new(products).unwrap();
        let mut space = EmbeddingSpace::new(SpaceKind::Query, 2);
        for (token, v) in [
            ("wilson", [1.0, 0.0]),
            ("atomic", [0.0, 1.0]),
            ("tennis", [0.9, 0.1]),
            ("skiing", [0.1, 0.9]),
        ] {
            space.insert(token, &v).unwrap();
        }
        let analogy = |a: &str, b: &str, c: &str, d: &str| Analogy {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
            type_pair: ("brand".into(), "activity".into()),
        };
        let analogies = vec![
            analogy("wilson", "tennis", "atomic", "skiing"),
            analogy("atomic", "skiing", "wilson", "tennis"),
        ];
        (space, analogies, catalog)
    }

    #[test]
    fn hit_rate_full_coverage() {
        let (space, analogies, catalog) = coverage_fixture();
        let report = hit_rate(&space, &analogies, &catalog, &[1, 5]).unwrap();
        assert_eq!(report.coverage, 1.0);
        assert_eq!(report.n_covered, 2);
        // with both activities in space and b excluded, the single candidate
        // left is the gold answer
        assert_eq!(report.hit_rate[&1], 1.0);
        assert_eq!(report.hit_rate[&5], 1.0);
    }

    #[test]
    fn hit_rate_counts_missing_token_as_uncovered() {
        // 10 analogies, exactly one with a token absent from the space
        let (space, base, catalog) = coverage_fixture();
        let mut analogies = Vec::new();
        for _ in 0..4 {
            analogies.extend(base.iter().cloned());
        }
        analogies.push(base[0].clone());
        analogies.push(Analogy {
            a: "wilson".into(),
            b: "tennis".into(),
            c: "atomic".into(),
            d: "ghost".into(),
            type_pair: ("brand".into(), "activity".into()),
        });
        let report = hit_rate(&space, &analogies, &catalog, &[5]).unwrap();
        assert_eq!(report.n_analogies, 10);
        assert_eq!(report.n_covered, 9);
        assert!((report.coverage - 0.9).abs() < 1e-12);
    }

    #[test]
    fn hit_rate_monotone_in_cutoff() {
        let (space, analogies, catalog) = coverage_fixture();
        let report = hit_rate(&space, &analogies, &catalog, &[5, 10]).unwrap();
        assert!(report.hit_rate[&5] <= report.hit_rate[&10]);
    }

    #[test]
    fn open_vocabulary_widens_the_candidate_pool() {
        let (mut space, analogies, catalog) = coverage_fixture();
        // an off-taxonomy key sitting exactly on the first analogy's
        // 3CosAdd target (tennis - wilson + atomic); closed-vocabulary
        // ranking never sees it
        space.insert("interloper", &[-0.1, 1.1]).unwrap();
        let closed = hit_rate(&space, &analogies, &catalog, &[1]).unwrap();
        let open =
            hit_rate_with_options(&space, &analogies, &catalog, &[1], true).unwrap();
        assert_eq!(closed.hit_rate[&1], 1.0);
        assert!(open.hit_rate[&1] < closed.hit_rate[&1]);
    }

    #[test]
    fn hit_rate_rejects_bad_input() {
        let (space, analogies, catalog) = coverage_fixture();
        assert!(hit_rate(&space, &[], &catalog, &[5]).is_err());
        assert!(hit_rate(&space, &analogies, &catalog, &[10, 5]).is_err());
        assert!(hit_rate(&space, &analogies, &catalog, &[0]).is_err());
    }

    #[test]
    fn similarity_task_scores_and_reports_missing() {
        let mut space = EmbeddingSpace::new(SpaceKind::Query, 2);
        space.insert("nike", &[1.0, 0.0]).unwrap();
        space.insert("adidas", &[1.0, 0.1]).unwrap();
        space.insert("wilson", &[0.0, 1.0]).unwrap();
        let triplet = |anchor: &str, a: &str, b: &str, choice: Choice| SimilarityTriplet {
            anchor: anchor.into(),
            option_a: a.into(),
            option_b: b.into(),
            human_choice: choice,
        };
        let triplets = vec![
            triplet("nike", "adidas", "wilson", Choice::A),
            triplet("nike", "wilson", "adidas", Choice::B),
            triplet("ghost", "adidas", "wilson", Choice::A),
        ];
        let outcome = similarity_accuracy(&space, &triplets).unwrap();
        assert!((outcome.accuracy - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(outcome.missing, vec![2]);
        assert!(similarity_accuracy(&space, &[]).is_err());
    }

    #[test]
    fn similarity_task_perfect_space_full_marks() {
        // 46 triplets, space aligned with every human choice
        let mut space = EmbeddingSpace::new(SpaceKind::Query, 2);
        let mut triplets = Vec::new();
        for i in 0..46 {
            let anchor = format!("anchor{i}");
            let near = format!("near{i}");
            let far = format!("far{i}");
            space.insert(anchor.as_str(), &[1.0, 0.0]).unwrap();
            space.insert(near.as_str(), &[0.9, 0.1]).unwrap();
            space.insert(far.as_str(), &[0.0, 1.0]).unwrap();
            let (option_a, option_b, human_choice) = if i % 2 == 0 {
                (near, far, Choice::A)
            } else {
                (far, near, Choice::B)
            };
            triplets.push(SimilarityTriplet {
                anchor,
                option_a,
                option_b,
                human_choice,
            });
        }
        let outcome = similarity_accuracy(&space, &triplets).unwrap();
        assert_eq!(outcome.accuracy, 1.0);
        assert!(outcome.missing.is_empty());
    }

    #[test]
    fn analogy_files_roundtrip() {
        let (_, analogies, _) = coverage_fixture();
        let dir = std::env::temp_dir().join("q2p_evalkit_io");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("analogies.jsonl");
        save_analogies(&path, &analogies).unwrap();
        let loaded = load_analogies(&path).unwrap();
        assert_eq!(loaded, analogies);

        let triplets = vec![SimilarityTriplet {
            anchor: "nike".into(),
            option_a: "adidas".into(),
            option_b: "wilson".into(),
            human_choice: Choice::A,
        }];
        let path = dir.join("triplets.jsonl");
        save_triplets(&path, &triplets).unwrap();
        assert_eq!(load_triplets(&path).unwrap(), triplets);
    }

    #[test]
    fn report_table_lists_all_cutoffs() {
        let report = EvalReport {
            hit_rate: [(5, 0.25), (10, 0.5), (20, 0.75)].into_iter().collect(),
            coverage: 0.9,
            n_analogies: 40,
            n_covered: 36,
            st_accuracy: Some(0.88),
        };
        let table = report.to_table();
        for needle in ["HR@5", "HR@10", "HR@20", "CV", "ST", "0.880"] {
            assert!(table.contains(needle), "missing {needle} in {table}");
        }
    }
}
