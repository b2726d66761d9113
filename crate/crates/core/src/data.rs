//! Explicit groups shipped as JSON files (one per exceptional group).
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{matrix_closure, Group, GroupError, Relation, TABLE_BOUND};
use crate::CycMatrix;

pub const DATA_DIR_ENV: &str = "GALREFL_DATA";

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("bad JSON in {path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("{label}: closure has order {found}, file says {expected}")]
    OrderMismatch { label: String, found: usize, expected: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: CycMatrix,
}

/// Images of the generators under ι̃(ζ ↦ ζ^exponent), as words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IotaEntry {
    pub conductor: u32,
    pub exponent: u32,
    pub images: std::collections::BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitData {
    pub kind: String,
    pub label: String,
    pub order: usize,
    pub center_order: usize,
    pub field_conductor: u32,
    pub generators: Vec<NamedMatrix>,
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default)]
    pub iota: Vec<IotaEntry>,
    #[serde(default)]
    pub degrees: Vec<u32>,
}

impl ExplicitData {
    pub fn load(path: &Path) -> Result<Self, DataError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| DataError::Io { path: p.clone(), source })?;
        serde_json::from_str(&text).map_err(|source| DataError::Json { path: p, source })
    }

    pub fn generator_list(&self) -> Vec<(String, CycMatrix)> {
        self.generators.iter().map(|g| (g.name.clone(), g.matrix.canonicalize())).collect()
    }

    pub fn relation_list(&self) -> Vec<Relation> {
        self.relations.iter().map(|s| Relation::from_strs(s)).collect()
    }

    /// Closes the generators and checks the order recorded in the file.
    pub fn group(&self) -> Result<Group, DataError> {
        let eg = matrix_closure(&self.label, &self.generator_list(), TABLE_BOUND)?;
        if eg.order() != self.order {
            return Err(DataError::OrderMismatch { label: self.label.clone(), found: eg.order(), expected: self.order });
        }
        Ok(Group::explicit(&eg, self.relation_list())?)
    }
}

/// `$GALREFL_DATA` if set, else `./data`.
pub fn data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("data"))
}

/// Loads `<dir>/<name>.json`, e.g. `G4`.
pub fn load_named(dir: &Path, name: &str) -> Result<ExplicitData, DataError> {
    ExplicitData::load(&dir.join(format!("{name}.json")))
}
