//! Train a product space from shopping sessions and inspect it.
//!
//! Sessions play the role of sentences and products the role of words;
//! skip-gram with negative sampling does the rest. Products browsed in the
//! same sessions end up close in the space, which is exactly what the
//! planted two-cluster shop lets us verify by eye.
//!
//! ```bash
//! cargo run --example train_products
//! ```

use query2prod2vec::datamodel::cosine;
use query2prod2vec::prodvec::{nearest_neighbors, train_with_report, TrainConfig};
use query2prod2vec::synth::{generate_synthetic_shop, ShopSpec};

fn main() -> query2prod2vec::Result<()> {
    let shop = generate_synthetic_shop(&ShopSpec {
        n_brands: 2,
        n_types: 1,
        n_activities: 2,
        products_per_cell: 10,
        n_sessions: 2_000,
        session_length_range: (3, 8),
        popularity_zipf_exponent: 1.0,
        seed: 7,
    })?;

    let config = TrainConfig {
        dimension: 16,
        epochs: 10,
        ..TrainConfig::default()
    };
    let (space, report) = train_with_report(&shop.sessions, &config)?;
    println!(
        "trained {} vectors of dimension {} over {} pair updates",
        space.len(),
        space.dimension(),
        report.total_pairs
    );
    println!(
        "epoch loss: first {:.4} -> last {:.4}",
        report.epoch_loss.first().unwrap(),
        report.epoch_loss.last().unwrap()
    );

    let probe = "p00000";
    println!("nearest neighbors of {probe} (same brand cluster expected):");
    for (id, score) in nearest_neighbors(&space, probe, 5)? {
        let brand = shop.catalog.get(&id).and_then(|p| p.brand.clone());
        println!("  {id} cosine {score:.3} brand {}", brand.unwrap_or_default());
    }

    // quantify the planted separation
    let clusters: Vec<&Vec<String>> = shop.ground_truth.brands.values().collect();
    let mean_cos = |ids_a: &[String], ids_b: &[String], same: bool| {
        let mut sum = 0.0;
        let mut n = 0u32;
        for a in ids_a {
            for b in ids_b {
                if same && a >= b {
                    continue;
                }
                sum += cosine(space.get(a).unwrap(), space.get(b).unwrap());
                n += 1;
            }
        }
        sum / f64::from(n)
    };
    let intra = (mean_cos(clusters[0], clusters[0], true)
        + mean_cos(clusters[1], clusters[1], true))
        / 2.0;
    let inter = mean_cos(clusters[0], clusters[1], false);
    println!("mean intra-cluster cosine {intra:.3}, inter-cluster {inter:.3}");
    Ok(())
}
