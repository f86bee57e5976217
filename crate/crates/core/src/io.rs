//! Window files: parsing with structural checks and canonical emission.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::window::Window;

/// Reads a window file. Duplicate ids and edge ends naming no vertex are
/// rejected here; every other rule is left to `validate_window`.
pub fn parse_window(text: &str) -> Result<Window> {
    let w: Window = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut seen = BTreeSet::new();
    for id in w.vertices.iter().map(|v| &v.id).chain(w.edges.iter().map(|e| &e.id)) {
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    let vertices: BTreeSet<&str> = w.vertices.iter().map(|v| v.id.as_str()).collect();
    for e in &w.edges {
        if let Some(end) = e.ends.iter().find(|x| !vertices.contains(x.as_str())) {
            return Err(Error::DanglingEnd {
                edge: e.id.clone(),
                end: end.clone(),
            });
        }
    }
    Ok(w)
}

/// Canonical text: arrays ordered by id, pretty-printed, trailing newline.
pub fn emit_window(w: &Window) -> String {
    let mut w = w.clone();
    w.normalize();
    let mut out = serde_json::to_string_pretty(&w).expect("windows always serialize");
    out.push('\n');
    out
}

pub fn read_window(path: &std::path::Path) -> Result<Window> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_window(&text)
}
