//! Turn catalog taxonomy into an analogy test set.
//!
//! For the (brand, activity) pair: each brand gets a Gini coefficient over
//! its activity distribution (zeros included over the full activity
//! vocabulary). Brands at or above the 75th-percentile Gini are
//! "determinate" and paired with each other in both directions.
//!
//! ```bash
//! cargo run --example build_analogies
//! ```

use query2prod2vec::datamodel::TaxonomyField;
use query2prod2vec::evalkit::{
    generate_analogies, gini, label_distribution, AnalogyGenConfig,
};
use query2prod2vec::synth::{generate_synthetic_shop, ShopSpec};

fn main() -> query2prod2vec::Result<()> {
    let shop = generate_synthetic_shop(&ShopSpec {
        n_brands: 6,
        n_types: 3,
        n_activities: 6,
        products_per_cell: 3,
        n_sessions: 100,
        session_length_range: (3, 8),
        popularity_zipf_exponent: 1.0,
        seed: 31,
    })?;

    println!("per-brand activity distributions and Gini coefficients:");
    for brand in shop.catalog.labels(TaxonomyField::Brand) {
        let distribution = label_distribution(
            &shop.catalog,
            TaxonomyField::Brand,
            &brand,
            TaxonomyField::Activity,
        )?;
        let frequencies: Vec<f64> = distribution.values().map(|&c| c as f64).collect();
        let coefficient = gini(&frequencies)?;
        let nonzero: Vec<String> = distribution
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(label, c)| format!("{label}:{c}"))
            .collect();
        println!("  {brand}: gini {coefficient:.3}, {}", nonzero.join(" "));
    }

    let analogies = generate_analogies(
        &shop.catalog,
        (TaxonomyField::Brand, TaxonomyField::Activity),
        &AnalogyGenConfig::default(),
    )?;
    println!("\n{} analogies generated; first five:", analogies.len());
    for analogy in analogies.iter().take(5) {
        println!(
            "  {} : {} = {} : ? (gold {})",
            analogy.a, analogy.b, analogy.c, analogy.d
        );
    }
    Ok(())
}
