//! Simulate click events for a word list against the inverted index.
//!
//! For each word: search the index, then sample the result list N times by
//! product popularity. Words with no search results are skipped and
//! reported; they simply get no embedding later.
//!
//! ```bash
//! cargo run --example synthetic_clicks
//! ```

use std::collections::HashMap;

use query2prod2vec::searchindex::{InvertedIndex, DEFAULT_FIELDS};
use query2prod2vec::synth::{
    estimate_popularity, generate_synthetic_events, generate_synthetic_shop, ShopSpec, SynthConfig,
};

fn main() -> query2prod2vec::Result<()> {
    let shop = generate_synthetic_shop(&ShopSpec {
        n_brands: 4,
        n_types: 3,
        n_activities: 4,
        products_per_cell: 2,
        n_sessions: 3_000,
        session_length_range: (3, 8),
        popularity_zipf_exponent: 1.0,
        seed: 13,
    })?;

    let index = InvertedIndex::build(&shop.catalog, &DEFAULT_FIELDS)?;
    let popularity = estimate_popularity(&shop.sessions)?;

    let mut words: Vec<String> = shop.catalog.taxonomy_tokens().into_iter().collect();
    words.push("hovercraft".to_string()); // matches nothing on purpose

    let config = SynthConfig {
        simulations_per_word: 200,
        search_limit: 50,
        seed: 99,
    };
    let (log, skipped) = generate_synthetic_events(&words, &index, &popularity, &config)?;

    println!(
        "{} events over {} words ({} skipped: {:?})",
        log.len(),
        words.len(),
        skipped.len(),
        skipped
    );
    for word in words.iter().take(5) {
        let mut clicks: HashMap<&str, usize> = HashMap::new();
        for event in log.events().iter().filter(|e| e.query == *word) {
            *clicks.entry(event.product_id.as_str()).or_default() += 1;
        }
        let mut ranked: Vec<(&str, usize)> = clicks.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        let top: Vec<String> = ranked
            .iter()
            .take(3)
            .map(|(id, n)| format!("{id} x{n}"))
            .collect();
        println!("  {word:>12}: most clicked {}", top.join(", "));
    }
    Ok(())
}
