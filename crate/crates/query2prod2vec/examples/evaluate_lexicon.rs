//! Score a query lexicon: analogy hit rate, coverage, similarity task.
//!
//! Analogies are solved with 3CosAdd (rank candidates by cosine against
//! `v_b - v_a + v_c`); hit rate is computed over covered analogies with
//! coverage reported separately. The similarity task compares the cosine
//! choice against a human choice on (anchor, option_a, option_b) triplets.
//!
//! ```bash
//! cargo run --example evaluate_lexicon
//! ```

use query2prod2vec::datamodel::TaxonomyField;
use query2prod2vec::evalkit::{
    generate_analogies, hit_rate, similarity_accuracy, solve_analogy, AnalogyGenConfig, Choice,
    SimilarityTriplet,
};
use query2prod2vec::prodvec::{train, TrainConfig};
use query2prod2vec::queryembed::{build_lexicon, RankConfig};
use query2prod2vec::searchindex::{InvertedIndex, DEFAULT_FIELDS};
use query2prod2vec::synth::{
    estimate_popularity, generate_synthetic_events, generate_synthetic_shop, ShopSpec, SynthConfig,
};

fn main() -> query2prod2vec::Result<()> {
    let shop = generate_synthetic_shop(&ShopSpec {
        n_brands: 6,
        n_types: 4,
        n_activities: 6,
        products_per_cell: 3,
        n_sessions: 8_000,
        session_length_range: (3, 8),
        popularity_zipf_exponent: 1.0,
        seed: 17,
    })?;

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
    let (synthetic, _) = generate_synthetic_events(
        &words,
        &index,
        &popularity,
        &SynthConfig {
            simulations_per_word: 300,
            ..SynthConfig::default()
        },
    )?;
    let (lexicon, _) = build_lexicon(
        &[&shop.clicks, &synthetic],
        &products,
        &RankConfig::default(),
    )?;

    let analogies = generate_analogies(
        &shop.catalog,
        (TaxonomyField::Brand, TaxonomyField::Activity),
        &AnalogyGenConfig::default(),
    )?;

    // peek at one solved analogy
    if let Some(example) = analogies.first() {
        let candidates = shop
            .catalog
            .labels(TaxonomyField::Activity)
            .into_iter()
            .filter(|t| lexicon.contains(t))
            .collect();
        if let Some(ranking) =
            solve_analogy(&lexicon, &example.a, &example.b, &example.c, &candidates)
        {
            println!(
                "{} : {} = {} : ?  (gold {})",
                example.a, example.b, example.c, example.d
            );
            for (token, score) in ranking.iter().take(3) {
                println!("  candidate {token} cosine {score:.3}");
            }
        }
    }

    let mut report = hit_rate(&lexicon, &analogies, &shop.catalog, &[5, 10])?;

    // a tiny hand-made similarity task: same-activity brands should beat
    // cross-activity brands
    let triplets = vec![
        SimilarityTriplet {
            anchor: "brand00".into(),
            option_a: "activity00".into(),
            option_b: "activity03".into(),
            human_choice: Choice::A,
        },
        SimilarityTriplet {
            anchor: "brand01".into(),
            option_a: "activity00".into(),
            option_b: "activity01".into(),
            human_choice: Choice::B,
        },
    ];
    report.st_accuracy = Some(similarity_accuracy(&lexicon, &triplets)?.accuracy);

    println!("\n{}", report.to_table());
    Ok(())
}
