//! Build a query lexicon from click feedback.
//!
//! A query's vector is the frequency-weighted average of its top-`rank`
//! clicked products' vectors, so the lexicon lives in the product space:
//! the nearest products to a query vector are its most plausible referents.
//!
//! ```bash
//! cargo run --example embed_queries
//! ```

use query2prod2vec::datamodel::cosine;
use query2prod2vec::prodvec::{train, TrainConfig};
use query2prod2vec::queryembed::{aggregate_clicks, build_lexicon, RankConfig};
use query2prod2vec::synth::{generate_synthetic_shop, ShopSpec};

fn main() -> query2prod2vec::Result<()> {
    let shop = generate_synthetic_shop(&ShopSpec {
        n_brands: 4,
        n_types: 3,
        n_activities: 4,
        products_per_cell: 2,
        n_sessions: 4_000,
        session_length_range: (3, 8),
        popularity_zipf_exponent: 1.0,
        seed: 21,
    })?;

    let products = train(
        &shop.sessions,
        &TrainConfig {
            dimension: 24,
            epochs: 8,
            ..TrainConfig::default()
        },
    )?;

    let histograms = aggregate_clicks(&shop.clicks);
    println!("{} distinct queries in the click log", histograms.len());

    let (lexicon, omitted) =
        build_lexicon(&[&shop.clicks], &products, &RankConfig { rank: 5 })?;
    println!(
        "lexicon: {} query vectors of dimension {} ({} omitted)",
        lexicon.len(),
        lexicon.dimension(),
        omitted.len()
    );

    for query in ["brand00", "activity01", "type02"] {
        let Some(query_vector) = lexicon.get(query) else { continue };
        let mut scored: Vec<(&str, f64)> = products
            .iter()
            .map(|(id, v)| (id, cosine(query_vector, v)))
            .collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        print!("  {query:>10} ->");
        for (id, score) in scored.iter().take(3) {
            let label = shop
                .catalog
                .get(id)
                .map(|p| {
                    format!(
                        "{}/{}",
                        p.brand.as_deref().unwrap_or("-"),
                        p.activity.as_deref().unwrap_or("-")
                    )
                })
                .unwrap_or_default();
            print!(" {id} ({label}, {score:.2})");
        }
        println!();
    }
    Ok(())
}
