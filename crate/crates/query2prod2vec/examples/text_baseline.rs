//! Bag-of-words baseline: token vectors from product descriptions.
//!
//! The same optimizer that trains the product space can train token
//! embeddings directly over description text. On this toy shop the
//! descriptions do name the labels, so the baseline gets the answer into
//! its top 10, but the grounded lexicon separates at strict cutoffs
//! (compare the HR@1 columns). Real catalogs are far less tidy.
//!
//! ```bash
//! cargo run --example text_baseline
//! ```

use query2prod2vec::datamodel::TaxonomyField;
use query2prod2vec::evalkit::{generate_analogies, hit_rate, AnalogyGenConfig};
use query2prod2vec::prodvec::{train, train_text, TrainConfig};
use query2prod2vec::queryembed::{build_lexicon, RankConfig};
use query2prod2vec::searchindex::{tokenize, InvertedIndex, DEFAULT_FIELDS};
use query2prod2vec::synth::{
    estimate_popularity, generate_synthetic_events, generate_synthetic_shop, ShopSpec, SynthConfig,
};

fn main() -> query2prod2vec::Result<()> {
    let shop = generate_synthetic_shop(&ShopSpec {
        n_brands: 10,
        n_types: 4,
        n_activities: 10,
        products_per_cell: 3,
        n_sessions: 8_000,
        session_length_range: (3, 8),
        popularity_zipf_exponent: 1.0,
        seed: 23,
    })?;
    let analogies = generate_analogies(
        &shop.catalog,
        (TaxonomyField::Brand, TaxonomyField::Activity),
        &AnalogyGenConfig::default(),
    )?;

    // grounded lexicon: product space + simulated clicks
    let products = train(
        &shop.sessions,
        &TrainConfig {
            dimension: 32,
            epochs: 10,
            ..TrainConfig::default()
        },
    )?;
    let index = InvertedIndex::build(&shop.catalog, &DEFAULT_FIELDS)?;
    let popularity = estimate_popularity(&shop.sessions)?;
    let words: Vec<String> = shop.catalog.taxonomy_tokens().into_iter().collect();
    let (clicks, _) = generate_synthetic_events(
        &words,
        &index,
        &popularity,
        &SynthConfig::default(),
    )?;
    let (grounded, _) = build_lexicon(&[&clicks], &products, &RankConfig::default())?;
    let grounded_report = hit_rate(&grounded, &analogies, &shop.catalog, &[1, 5, 10])?;

    // text baseline: token embeddings straight from descriptions
    let corpus: Vec<Vec<String>> = shop
        .catalog
        .products()
        .iter()
        .map(|p| tokenize(&p.description))
        .collect();
    let text_space = train_text(
        &corpus,
        &TrainConfig {
            dimension: 32,
            epochs: 10,
            min_count: 1,
            ..TrainConfig::default()
        },
    )?;
    let text_report = hit_rate(&text_space, &analogies, &shop.catalog, &[1, 5, 10])?;

    println!("grounded lexicon:\n{}", grounded_report.to_table());
    println!("description-text baseline:\n{}", text_report.to_table());
    Ok(())
}
