//! JSON manifest describing a selected view set.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::{parse_pattern_query, QueryDoc};
use crate::view::{ExtendedGraphView, ViewPattern};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub pattern: QueryDoc,
    pub order: Vec<usize>,
    pub size_bytes: u64,
    pub file: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub views: Vec<ManifestEntry>,
}

impl Manifest {
    /// Entries for `views`, each pointing at `{id}.graphml`.
    pub fn from_views(views: &[ExtendedGraphView]) -> Self {
        Manifest {
            views: views
                .iter()
                .map(|v| ManifestEntry {
                    id: v.id.clone(),
                    pattern: v.vp.pattern().to_doc(),
                    order: v.vp.order().to_vec(),
                    size_bytes: v.size_bytes,
                    file: format!("{}.graphml", sanitize(&v.id)),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse("manifest", e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// The view patterns, with their ids.
    pub fn patterns(&self) -> Result<Vec<(String, ViewPattern)>> {
        self.views
            .iter()
            .map(|e| {
                Ok((
                    e.id.clone(),
                    ViewPattern::new(parse_pattern_query(&e.pattern)?, e.order.clone())?,
                ))
            })
            .collect()
    }
}

/// A file-name-safe form of a view id.
pub fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}
