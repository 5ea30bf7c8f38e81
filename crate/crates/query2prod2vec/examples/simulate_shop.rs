//! Generate a synthetic shop and write its artifacts to disk.
//!
//! The generator plants recoverable structure: products grouped in
//! (brand, type) cells, one activity per brand, Zipf popularity, and
//! sessions that stay inside a cell with probability 0.8.
//!
//! ```bash
//! cargo run --example simulate_shop
//! ```

use query2prod2vec::datamodel::{save_catalog, save_click_log, save_sessions};
use query2prod2vec::synth::{generate_synthetic_shop, ShopSpec};

fn main() -> query2prod2vec::Result<()> {
    let spec = ShopSpec {
        n_brands: 6,
        n_types: 4,
        n_activities: 6,
        products_per_cell: 3,
        n_sessions: 5_000,
        session_length_range: (3, 8),
        popularity_zipf_exponent: 1.0,
        seed: 42,
    };
    let shop = generate_synthetic_shop(&spec)?;

    let out = std::env::temp_dir().join("q2p_example_shop");
    std::fs::create_dir_all(&out).expect("create output dir");
    save_catalog(out.join("catalog.jsonl"), &shop.catalog)?;
    save_sessions(out.join("sessions.jsonl"), &shop.sessions)?;
    save_click_log(out.join("clicks.jsonl"), &shop.clicks)?;
    std::fs::write(
        out.join("ground_truth.json"),
        serde_json::to_string_pretty(&shop.ground_truth).unwrap(),
    )
    .expect("write ground truth");

    println!(
        "shop: {} products, {} sessions, {} historical click events",
        shop.catalog.len(),
        shop.sessions.len(),
        shop.clicks.len()
    );
    println!("sample products:");
    for product in shop.catalog.products().iter().take(4) {
        println!(
            "  {} | brand={} type={} activity={} | {}",
            product.product_id,
            product.brand.as_deref().unwrap_or("-"),
            product.product_type.as_deref().unwrap_or("-"),
            product.activity.as_deref().unwrap_or("-"),
            product.description
        );
    }
    println!("brand -> activity ground truth:");
    for (brand, activity) in &shop.ground_truth.dominant_activity {
        println!("  {brand} -> {activity}");
    }
    println!("artifacts written to {}", out.display());
    Ok(())
}
