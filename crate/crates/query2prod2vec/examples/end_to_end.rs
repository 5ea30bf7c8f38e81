//! The whole pipeline in one run, comparing three lexicon sources.
//!
//! shop -> product space -> {real clicks, simulated clicks, both} ->
//! query lexicons -> analogy evaluation. The "synthetic" column is the
//! cold-start story: it uses zero real search interactions.
//!
//! ```bash
//! cargo run --release --example end_to_end
//! ```

use query2prod2vec::datamodel::{ClickLog, TaxonomyField};
use query2prod2vec::evalkit::{generate_analogies, hit_rate, AnalogyGenConfig};
use query2prod2vec::prodvec::{train, TrainConfig};
use query2prod2vec::queryembed::{build_lexicon, RankConfig};
use query2prod2vec::searchindex::{InvertedIndex, DEFAULT_FIELDS};
use query2prod2vec::synth::{
    estimate_popularity, generate_synthetic_events, generate_synthetic_shop, ShopSpec, SynthConfig,
};

fn main() -> query2prod2vec::Result<()> {
    let start = std::time::Instant::now();
    let shop = generate_synthetic_shop(&ShopSpec {
        n_brands: 12,
        n_types: 5,
        n_activities: 12,
        products_per_cell: 3,
        n_sessions: 20_000,
        session_length_range: (3, 8),
        popularity_zipf_exponent: 1.0,
        seed: 42,
    })?;
    println!(
        "shop: {} products, {} sessions",
        shop.catalog.len(),
        shop.sessions.len()
    );

    let products = train(&shop.sessions, &TrainConfig::default())?;
    println!("product space trained in {:.1?}", start.elapsed());

    let index = InvertedIndex::build(&shop.catalog, &DEFAULT_FIELDS)?;
    let popularity = estimate_popularity(&shop.sessions)?;
    let words: Vec<String> = shop.catalog.taxonomy_tokens().into_iter().collect();
    let (synthetic, skipped) = generate_synthetic_events(
        &words,
        &index,
        &popularity,
        &SynthConfig::default(),
    )?;
    println!(
        "simulated {} click events over {} words ({} skipped)",
        synthetic.len(),
        words.len(),
        skipped.len()
    );

    let rank = RankConfig::default();
    let analogies = generate_analogies(
        &shop.catalog,
        (TaxonomyField::Brand, TaxonomyField::Activity),
        &AnalogyGenConfig::default(),
    )?;
    println!("{} brand:activity analogies\n", analogies.len());

    let variants: [(&str, Vec<&ClickLog>); 3] = [
        ("real only", vec![&shop.clicks]),
        ("synthetic only", vec![&synthetic]),
        ("merged", vec![&shop.clicks, &synthetic]),
    ];
    for (name, logs) in variants {
        let (lexicon, _) = build_lexicon(&logs, &products, &rank)?;
        let report = hit_rate(&lexicon, &analogies, &shop.catalog, &[1, 5, 10])?;
        println!("{name} ({} queries):\n{}", lexicon.len(), report.to_table());
    }
    println!("total wall time {:.1?}", start.elapsed());
    Ok(())
}
