//! JSON-lines ingestion and serialization for the shared domain types.
//!
//! One JSON object per line. Loading is deterministic (same bytes, same
//! value) and strict: a malformed line aborts with its 1-based line number
//! rather than being skipped silently.

use std::fmt;
use std::fs;
use std::path::Path;

use super::{
    normalize_query, Catalog, ClickEvent, ClickLog, ClickSource, Product, Session, SessionSet,
};
use crate::error::{Error, Result};

/// Counters accumulated while loading one file. `unknown` is only populated
/// when the loader was given a catalog to check ids against.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub loaded: usize,
    pub dropped: usize,
    pub unknown: usize,
    pub warnings: Vec<String>,
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "loaded: {}", self.loaded)?;
        writeln!(f, "dropped: {}", self.dropped)?;
        writeln!(f, "unknown: {}", self.unknown)?;
        for warning in &self.warnings {
            writeln!(f, "warning: {warning}")?;
        }
        Ok(())
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(str::to_owned).collect())
}

fn parse_line<T: serde::de::DeserializeOwned>(path: &Path, line_no: usize, line: &str) -> Result<T> {
    serde_json::from_str(line).map_err(|e| Error::malformed(path, line_no, e.to_string()))
}

/// Loads and validates a catalog file. Label fields are normalized; duplicate
/// product ids are an error naming the offending id.
pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog> {
    let path = path.as_ref();
    let mut products = Vec::new();
    for (idx, line) in read_lines(path)?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        products.push(parse_line::<Product>(path, idx + 1, line)?);
    }
    Catalog::new(products)
}

pub fn save_catalog(path: impl AsRef<Path>, catalog: &Catalog) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for product in catalog.products() {
        out.push_str(&serde_json::to_string(product).expect("product serializes"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Loads sessions, dropping those with fewer than two events (they produce
/// no training pairs). When a catalog is supplied, event ids absent from it
/// are counted in `unknown`; the sessions themselves are kept.
pub fn load_sessions(
    path: impl AsRef<Path>,
    catalog: Option<&Catalog>,
) -> Result<(SessionSet, IngestReport)> {
    let path = path.as_ref();
    let mut report = IngestReport::default();
    let mut sessions = Vec::new();
    for (idx, line) in read_lines(path)?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let session: Session = parse_line(path, idx + 1, line)?;
        if session.events.iter().any(String::is_empty) {
            return Err(Error::malformed(path, idx + 1, "empty product id in events"));
        }
        if session.events.len() < 2 {
            report.dropped += 1;
            continue;
        }
        if let Some(catalog) = catalog {
            report.unknown += session
                .events
                .iter()
                .filter(|id| !catalog.contains(id))
                .count();
        }
        sessions.push(session);
    }
    report.loaded = sessions.len();
    if sessions.is_empty() {
        report.warnings.push(format!(
            "no usable sessions in {} (empty file or all below 2 events)",
            path.display()
        ));
    }
    Ok((SessionSet::new(sessions), report))
}

pub fn save_sessions(path: impl AsRef<Path>, sessions: &SessionSet) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for session in sessions.iter() {
        out.push_str(&serde_json::to_string(session).expect("session serializes"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Loads a click log. Queries are normalized; rows whose query is empty
/// after normalization are dropped and counted.
pub fn load_click_log(
    path: impl AsRef<Path>,
    source: ClickSource,
) -> Result<(ClickLog, IngestReport)> {
    let path = path.as_ref();
    let mut report = IngestReport::default();
    let mut events = Vec::new();
    for (idx, line) in read_lines(path)?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut event: ClickEvent = parse_line(path, idx + 1, line)?;
        event.query = normalize_query(&event.query);
        if event.query.is_empty() {
            report.dropped += 1;
            continue;
        }
        events.push(event);
    }
    report.loaded = events.len();
    Ok((ClickLog::new(events, source), report))
}

pub fn save_click_log(path: impl AsRef<Path>, log: &ClickLog) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for event in log.events() {
        out.push_str(&serde_json::to_string(event).expect("event serializes"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
