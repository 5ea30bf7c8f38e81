//! Shared domain types: catalog, sessions, click logs and embedding spaces.
//!
//! All values are immutable after construction/ingestion and safe to share
//! across threads for reading. The JSON-lines loaders normalize on the way
//! in so that a save/load cycle is a fixpoint.

mod io;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{
    load_catalog, load_click_log, load_sessions, save_catalog, save_click_log, save_sessions,
    IngestReport,
};

/// One catalog entry. Taxonomy labels are merchandiser-assigned and optional;
/// the description is free text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Product {
    pub product_id: String,
    #[serde(default)]
    pub brand: Option<String>,
    #[serde(default)]
    pub product_type: Option<String>,
    #[serde(default)]
    pub activity: Option<String>,
    pub description: String,
}

impl Product {
    /// The label value for a taxonomy field, if the product carries one.
    pub fn label(&self, field: TaxonomyField) -> Option<&str> {
        match field {
            TaxonomyField::Brand => self.brand.as_deref(),
            TaxonomyField::ProductType => self.product_type.as_deref(),
            TaxonomyField::Activity => self.activity.as_deref(),
        }
    }
}

/// The label fields a catalog may carry. `Activity` is the vertical-specific
/// third field (sport for an apparel shop, part of the house for DIY).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TaxonomyField {
    Brand,
    ProductType,
    Activity,
}

impl TaxonomyField {
    pub const ALL: [TaxonomyField; 3] = [
        TaxonomyField::Brand,
        TaxonomyField::ProductType,
        TaxonomyField::Activity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaxonomyField::Brand => "brand",
            TaxonomyField::ProductType => "product_type",
            TaxonomyField::Activity => "activity",
        }
    }

    pub fn parse(name: &str) -> Result<TaxonomyField> {
        match name {
            "brand" => Ok(TaxonomyField::Brand),
            "product_type" => Ok(TaxonomyField::ProductType),
            "activity" => Ok(TaxonomyField::Activity),
            other => Err(Error::UnknownField(other.to_string())),
        }
    }
}

impl std::fmt::Display for TaxonomyField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated product catalog.
///
/// Invariants: product ids are unique and non-empty; label values are
/// lowercased with whitespace collapsed.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    products: Vec<Product>,
    by_id: HashMap<String, usize>,
    taxonomy_fields: Vec<TaxonomyField>,
}

impl Catalog {
    /// Validates and normalizes a product list into a catalog.
    pub fn new(products: Vec<Product>) -> Result<Catalog> {
        let mut normalized = Vec::with_capacity(products.len());
        let mut by_id = HashMap::with_capacity(products.len());
        for mut product in products {
            if product.product_id.is_empty() {
                return Err(Error::InvalidKey(String::new()));
            }
            product.brand = product.brand.as_deref().map(normalize_label);
            product.product_type = product.product_type.as_deref().map(normalize_label);
            product.activity = product.activity.as_deref().map(normalize_label);
            // Normalization can empty a label ("  " -> ""); treat as absent.
            for slot in [
                &mut product.brand,
                &mut product.product_type,
                &mut product.activity,
            ] {
                if slot.as_deref() == Some("") {
                    *slot = None;
                }
            }
            if by_id
                .insert(product.product_id.clone(), normalized.len())
                .is_some()
            {
                return Err(Error::DuplicateProduct(product.product_id));
            }
            normalized.push(product);
        }
        let taxonomy_fields = TaxonomyField::ALL
            .into_iter()
            .filter(|&f| normalized.iter().any(|p| p.label(f).is_some()))
            .collect();
        Ok(Catalog {
            products: normalized,
            by_id,
            taxonomy_fields,
        })
    }

    pub fn len(&self) -> usize {
        self.products.len()
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    pub fn products(&self) -> &[Product] {
        &self.products
    }

    pub fn get(&self, product_id: &str) -> Option<&Product> {
        self.by_id.get(product_id).map(|&i| &self.products[i])
    }

    pub fn contains(&self, product_id: &str) -> bool {
        self.by_id.contains_key(product_id)
    }

    /// The taxonomy fields that are populated for at least one product,
    /// in canonical order.
    pub fn taxonomy_fields(&self) -> &[TaxonomyField] {
        &self.taxonomy_fields
    }

    /// Every distinct value of `field` observed in the catalog.
    pub fn labels(&self, field: TaxonomyField) -> BTreeSet<String> {
        self.products
            .iter()
            .filter_map(|p| p.label(field))
            .map(str::to_owned)
            .collect()
    }

    /// All taxonomy label values across all populated fields, as lexicon
    /// tokens (internal spaces joined with `_`). This is the default word
    /// list for synthetic click generation.
    pub fn taxonomy_tokens(&self) -> BTreeSet<String> {
        self.taxonomy_fields
            .iter()
            .flat_map(|&f| self.labels(f))
            .map(|label| label_token(&label))
            .collect()
    }
}

/// An ordered sequence of product interactions from one visit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub events: Vec<String>,
}

/// A collection of sessions: the training corpus for the product space.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SessionSet {
    sessions: Vec<Session>,
}

impl SessionSet {
    pub fn new(sessions: Vec<Session>) -> SessionSet {
        SessionSet { sessions }
    }

    pub fn len(&self) -> usize {
        self.sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.is_empty()
    }

    pub fn sessions(&self) -> &[Session] {
        &self.sessions
    }

    pub fn iter(&self) -> impl Iterator<Item = &Session> {
        self.sessions.iter()
    }
}

/// Whether a click log came from real traffic or from simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClickSource {
    Real,
    Synthetic,
}

/// A single (query, clicked product) observation. The query is stored in
/// normalized form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClickEvent {
    pub query: String,
    pub product_id: String,
}

/// A set of click events with a provenance tag fixed at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClickLog {
    events: Vec<ClickEvent>,
    source: ClickSource,
}

impl ClickLog {
    pub fn new(events: Vec<ClickEvent>, source: ClickSource) -> ClickLog {
        ClickLog { events, source }
    }

    pub fn events(&self) -> &[ClickEvent] {
        &self.events
    }

    pub fn source(&self) -> ClickSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// What a space's keys denote.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Product,
    Query,
    Text,
}

impl SpaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Product => "product",
            SpaceKind::Query => "query",
            SpaceKind::Text => "text",
        }
    }
}

/// A dense embedding table: key -> vector, all vectors sharing one dimension,
/// no NaN/Inf components, keys unique and whitespace-free.
///
/// Iteration order is insertion order, which makes serialized output
/// reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpace {
    kind: SpaceKind,
    dimension: usize,
    keys: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
}

impl EmbeddingSpace {
    pub fn new(kind: SpaceKind, dimension: usize) -> EmbeddingSpace {
        EmbeddingSpace {
            kind,
            dimension,
            keys: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Inserts a vector, enforcing the space invariants.
    pub fn insert(&mut self, key: impl Into<String>, vector: &[f64]) -> Result<()> {
        let key = key.into();
        if key.is_empty() || key.chars().any(char::is_whitespace) {
            return Err(Error::InvalidKey(key));
        }
        if vector.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                key,
                expected: self.dimension,
                got: vector.len(),
            });
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteVector(key));
        }
        if self.index.contains_key(&key) {
            return Err(Error::InvalidKey(key));
        }
        self.index.insert(key.clone(), self.keys.len());
        self.keys.push(key);
        self.data.extend_from_slice(vector);
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&[f64]> {
        self.index
            .get(key)
            .map(|&i| &self.data[i * self.dimension..(i + 1) * self.dimension])
    }

    pub fn contains(&self, key: &str) -> bool {
        self.index.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.keys.iter().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.keys
            .iter()
            .enumerate()
            .map(|(i, k)| (k.as_str(), &self.data[i * self.dimension..(i + 1) * self.dimension]))
    }

    /// Renders the textual interchange format: a `<count> <dimension>` header
    /// line, then one `<key> <v1> ... <vd>` line per key with components at
    /// six significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} {}\n", self.len(), self.dimension));
        for (key, vector) in self.iter() {
            out.push_str(key);
            for v in vector {
                out.push(' ');
                out.push_str(&format_sig6(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn save_text(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    /// Parses the textual interchange format produced by [`Self::to_text`].
    pub fn load_text(path: impl AsRef<std::path::Path>, kind: SpaceKind) -> Result<EmbeddingSpace> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::malformed(path, 1, "missing header line"))?;
        let mut parts = header.split_whitespace();
        let count: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::malformed(path, 1, "bad count in header"))?;
        let dimension: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::malformed(path, 1, "bad dimension in header"))?;
        let mut space = EmbeddingSpace::new(kind, dimension);
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let line_no = idx + 1;
            let mut fields = line.split_whitespace();
            let key = fields
                .next()
                .ok_or_else(|| Error::malformed(path, line_no, "missing key"))?;
            let vector = fields
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| Error::malformed(path, line_no, e.to_string()))
                })
                .collect::<Result<Vec<f64>>>()?;
            space.insert(key, &vector)?;
        }
        if space.len() != count {
            return Err(Error::malformed(
                path,
                1,
                format!("header declares {count} vectors, found {}", space.len()),
            ));
        }
        Ok(space)
    }
}

/// Cosine similarity; zero if either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut dot = 0.0;
    let mut norm_a = 0.0;
    let mut norm_b = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        norm_a += x * x;
        norm_b += y * y;
    }
    if norm_a == 0.0 || norm_b == 0.0 {
        return 0.0;
    }
    dot / (norm_a.sqrt() * norm_b.sqrt())
}

/// Six significant digits, round-trippable by `f64::from_str`.
fn format_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    format!("{v:.5e}")
}

/// Lowercases a label and collapses internal whitespace runs.
pub fn normalize_label(raw: &str) -> String {
    raw.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Query normalization: lowercase, strip leading/trailing punctuation from
/// each whitespace-separated token, drop emptied tokens, single-space join.
pub fn normalize_query(raw: &str) -> String {
    raw.to_lowercase()
        .split_whitespace()
        .map(|tok| tok.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|tok| !tok.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Turns a (possibly multiword) taxonomy label into a lexicon token by
/// joining internal spaces with `_`, matching the query-lexicon key
/// convention.
pub fn label_token(label: &str) -> String {
    label.replace(' ', "_")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(id: &str, brand: Option<&str>, description: &str) -> Product {
        Product {
            product_id: id.to_string(),
            brand: brand.map(str::to_owned),
            product_type: None,
            activity: None,
            description: description.to_string(),
        }
    }

    #[test]
    fn catalog_rejects_duplicate_ids() {
        let err = Catalog::new(vec![
            product("p1", None, "a"),
            product("p1", None, "b"),
        ])
        .unwrap_err();
        assert!(err.to_string().contains("p1"));
    }

    #[test]
    fn catalog_normalizes_labels() {
        let catalog = Catalog::new(vec![product("p1", Some("  Nike "), "shoes")]).unwrap();
        assert_eq!(catalog.get("p1").unwrap().brand.as_deref(), Some("nike"));
    }

    #[test]
    fn taxonomy_fields_reflect_population() {
        let catalog = Catalog::new(vec![product("p1", Some("nike"), "shoes")]).unwrap();
        assert_eq!(catalog.taxonomy_fields(), &[TaxonomyField::Brand]);
    }

    #[test]
    fn normalize_query_cases() {
        assert_eq!(normalize_query("Sneakers"), "sneakers");
        assert_eq!(normalize_query("  "), "");
        assert_eq!(normalize_query("\"Air-Max!\"  90 "), "air-max 90");
        assert_eq!(normalize_query("bathing_cap"), "bathing_cap");
    }

    #[test]
    fn label_token_joins_spaces() {
        assert_eq!(label_token("bathing cap"), "bathing_cap");
        assert_eq!(label_token("tennis"), "tennis");
    }

    #[test]
    fn space_rejects_bad_vectors() {
        let mut space = EmbeddingSpace::new(SpaceKind::Product, 2);
        space.insert("a", &[1.0, 2.0]).unwrap();
        assert!(space.insert("a", &[1.0, 2.0]).is_err());
        assert!(space.insert("b", &[1.0]).is_err());
        assert!(space.insert("c", &[f64::NAN, 0.0]).is_err());
        assert!(space.insert("with space", &[1.0, 2.0]).is_err());
    }

    #[test]
    fn space_text_roundtrip() {
        let mut space = EmbeddingSpace::new(SpaceKind::Product, 3);
        space.insert("p1", &[1.0, -0.25, 3.0e-7]).unwrap();
        space.insert("p2", &[0.0, 123456.75, -2.0]).unwrap();
        let dir = std::env::temp_dir().join("q2p_space_roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("space.txt");
        space.save_text(&path).unwrap();
        let loaded = EmbeddingSpace::load_text(&path, SpaceKind::Product).unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded.dimension(), 3);
        // Six significant digits survive the round trip.
        for (key, vector) in space.iter() {
            let got = loaded.get(key).unwrap();
            for (a, b) in vector.iter().zip(got) {
                assert!((a - b).abs() <= a.abs().max(1.0) * 1e-5);
            }
        }
    }

    #[test]
    fn space_load_rejects_malformed_files() {
        let dir = std::env::temp_dir().join("q2p_space_malformed");
        std::fs::create_dir_all(&dir).unwrap();
        let write = |name: &str, contents: &str| {
            let path = dir.join(name);
            std::fs::write(&path, contents).unwrap();
            path
        };
        let bad_header = write("bad_header.txt", "two 3\na 1 2 3\n");
        assert!(EmbeddingSpace::load_text(&bad_header, SpaceKind::Product).is_err());
        let bad_float = write("bad_float.txt", "1 2\na 1.0 oops\n");
        assert!(EmbeddingSpace::load_text(&bad_float, SpaceKind::Product).is_err());
        let count_mismatch = write("count_mismatch.txt", "2 2\na 1 2\n");
        assert!(EmbeddingSpace::load_text(&count_mismatch, SpaceKind::Product).is_err());
        let wrong_dim = write("wrong_dim.txt", "1 3\na 1 2\n");
        assert!(EmbeddingSpace::load_text(&wrong_dim, SpaceKind::Product).is_err());
        let duplicate = write("duplicate.txt", "2 1\na 1\na 2\n");
        assert!(EmbeddingSpace::load_text(&duplicate, SpaceKind::Product).is_err());
    }

    #[test]
    fn loaded_values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Catalog>();
        assert_send_sync::<SessionSet>();
        assert_send_sync::<ClickLog>();
        assert_send_sync::<EmbeddingSpace>();
    }

    #[test]
    fn cosine_basics() {
        assert!((cosine(&[1.0, 0.0], &[1.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!(cosine(&[1.0, 0.0], &[0.0, 1.0]).abs() < 1e-15);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]), 0.0);
    }
}
