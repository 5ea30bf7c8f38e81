//! Boolean AND search with TF-IDF scoring over product metadata.
//!
//! This is the stand-in for a production search API used during click
//! simulation. Deliberately simple: conjunctive semantics, raw term
//! frequencies, `ln(N/df)` weighting, deterministic id tiebreak.
//!
//! ```bash
//! cargo run --example search_index
//! ```

use query2prod2vec::datamodel::{Catalog, Product};
use query2prod2vec::searchindex::{tokenize, InvertedIndex, DEFAULT_FIELDS};

fn main() -> query2prod2vec::Result<()> {
    let rows = [
        ("p1", "wilson", "racket", "tennis", "Pro staff tennis racket, tournament grade"),
        ("p2", "wilson", "ball", "tennis", "Championship tennis balls, pack of four"),
        ("p3", "atomic", "ski", "skiing", "Carving ski for groomed slopes"),
        ("p4", "atomic", "boot", "skiing", "Stiff alpine ski boot"),
        ("p5", "arena", "cap", "swimming", "Silicone bathing cap for indoor swimming"),
    ];
    let catalog = Catalog::new(
        rows.iter()
            .map(|(id, brand, kind, activity, text)| Product {
                product_id: (*id).to_string(),
                brand: Some((*brand).to_string()),
                product_type: Some((*kind).to_string()),
                activity: Some((*activity).to_string()),
                description: (*text).to_string(),
            })
            .collect(),
    )?;
    let index = InvertedIndex::build(&catalog, &DEFAULT_FIELDS)?;

    println!("tokenize(\"Pro-Staff Tennis!\") = {:?}", tokenize("Pro-Staff Tennis!"));
    println!("document frequency of 'tennis': {}", index.doc_frequency("tennis"));

    for query in ["tennis", "wilson tennis", "ski boot", "swimming", "hovercraft"] {
        let results = index.search(query, 10);
        print!("search({query:?}) ->");
        if results.is_empty() {
            println!(" no results");
            continue;
        }
        for (id, score) in results {
            print!(" {id} ({score:.3})");
        }
        println!();
    }
    Ok(())
}
