//! JSON persistence for product tables.
//!
//! Entries are written in sorted order, so saving the same table twice is
//! byte-identical. Loading re-validates every class (rank, Laurent-freeness,
//! nonnegativity, length grading) before anything is trusted.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::class::QHClass;
use crate::error::Error;
use crate::perm::Permutation;
use crate::qpoly::{PolyTermJson, QPolynomial};
use crate::ring::ProductTable;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    format_version: u32,
    n: usize,
    entries: Vec<CacheEntry>,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    u: String,
    v: String,
    class: Vec<ClassTerm>,
}

#[derive(Serialize, Deserialize)]
struct ClassTerm {
    w: String,
    poly: Vec<PolyTermJson>,
}

fn class_to_terms(class: &QHClass) -> Vec<ClassTerm> {
    class
        .iter()
        .map(|(w, poly)| ClassTerm {
            w: w.to_string(),
            poly: poly.to_json_terms(),
        })
        .collect()
}

fn class_from_terms(n: usize, terms: &[ClassTerm]) -> Result<QHClass, Error> {
    let mut class = QHClass::zero(n);
    for t in terms {
        let w: Permutation =
            t.w.parse()
                .map_err(|e: Error| Error::CacheFormat(e.to_string()))?;
        if w.n() != n {
            return Err(Error::CacheFormat(format!(
                "permutation {w} has rank {} in a rank-{n} table",
                w.n()
            )));
        }
        let poly = QPolynomial::from_json_terms(n, &t.poly)?;
        if poly.is_zero() {
            return Err(Error::CacheFormat(format!("empty polynomial on {w}")));
        }
        class.add_term(w, &poly);
    }
    Ok(class)
}

/// Serializes every cached product, sorted by (u, v).
pub fn save_table(table: &ProductTable, path: &Path) -> Result<(), Error> {
    let mut entries: Vec<CacheEntry> = table
        .entries_sorted()
        .into_iter()
        .map(|((u, v), class)| CacheEntry {
            u: u.to_string(),
            v: v.to_string(),
            class: class_to_terms(&class),
        })
        .collect();
    entries.sort_by(|a, b| (&a.u, &a.v).cmp(&(&b.u, &b.v)));
    let file = CacheFile {
        format_version: FORMAT_VERSION,
        n: table.n(),
        entries,
    };
    let text = serde_json::to_string(&file)
        .map_err(|e| Error::CacheFormat(format!("serialization failed: {e}")))?;
    std::fs::write(path, text)
        .map_err(|e| Error::CacheFormat(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// Loads a cache file into a fresh table after validating every entry.
pub fn load_table(path: &Path) -> Result<ProductTable, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::CacheFormat(format!("cannot read {}: {e}", path.display())))?;
    let file: CacheFile = serde_json::from_str(&text)
        .map_err(|e| Error::CacheFormat(format!("malformed cache: {e}")))?;
    if file.format_version != FORMAT_VERSION {
        return Err(Error::CacheFormat(format!(
            "format version {} (expected {FORMAT_VERSION})",
            file.format_version
        )));
    }
    let table = ProductTable::new(file.n)?;
    for entry in &file.entries {
        let u: Permutation = entry
            .u
            .parse()
            .map_err(|e: Error| Error::CacheFormat(e.to_string()))?;
        let v: Permutation = entry
            .v
            .parse()
            .map_err(|e: Error| Error::CacheFormat(e.to_string()))?;
        if u.n() != file.n || v.n() != file.n {
            return Err(Error::CacheFormat("entry rank mismatch".into()));
        }
        let class = class_from_terms(file.n, &entry.class)?;
        if !class.is_laurent_free() || !class.is_nonnegative() {
            return Err(Error::CacheFormat(format!("invalid class for ({u}, {v})")));
        }
        if !class.is_length_homogeneous((u.length() + v.length()) as i64) {
            return Err(Error::CacheFormat(format!(
                "class for ({u}, {v}) breaks the length grading"
            )));
        }
        table.insert_cached(u, v, class);
    }
    Ok(table)
}
