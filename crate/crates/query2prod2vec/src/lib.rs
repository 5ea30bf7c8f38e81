//! Grounded word embeddings for product search.
//!
//! Queries in a digital shop refer to products. This crate builds query
//! embeddings from that referential signal instead of from co-occurrence
//! text statistics alone:
//!
//! 1. [`prodvec`] learns a latent product space from shopping sessions
//!    (skip-gram with negative sampling, sessions playing the role of
//!    sentences).
//! 2. [`queryembed`] maps each query into that space as the
//!    frequency-weighted average of the products most often clicked
//!    after it.
//! 3. [`searchindex`] + [`synth`] simulate search-and-click events
//!    against a TF-IDF inverted index, so a query lexicon can be built
//!    before any real search traffic exists ("cold start").
//! 4. [`evalkit`] turns catalog taxonomy into analogy test sets
//!    (Gini-thresholded determinate pairs) and scores a lexicon with
//!    hit rate, coverage and a similarity-triplet task.
//!
//! The `examples/` directory walks through every capability; the `q2p`
//! binary chains them into a reproducible file-based pipeline.

pub mod datamodel;
pub mod error;
pub mod evalkit;
pub mod pipeline;
pub mod prodvec;
pub mod queryembed;
pub mod searchindex;
pub mod seed;
pub mod synth;

pub use datamodel::{
    Catalog, ClickEvent, ClickLog, ClickSource, EmbeddingSpace, Product, Session, SessionSet,
    SpaceKind, TaxonomyField,
};
pub use error::{Error, Result};
pub use evalkit::{Analogy, AnalogyGenConfig, EvalReport, SimilarityTriplet};
pub use prodvec::TrainConfig;
pub use queryembed::RankConfig;
pub use searchindex::InvertedIndex;
pub use synth::{PopularityDistribution, ShopSpec, SynthConfig};
