//! Data files (inventory, grammar, reference polygon). Built-in copies are
//! compiled in; a directory named by `ORAL_BILLIARDS_DATA` overrides any
//! file it contains.

use std::path::PathBuf;

use thiserror::Error;

use crate::geometry::{GeometryError, PolygonConfig, DEFAULT_POLYGON_JSON};
use crate::grammar::{Grammar, GrammarError, DEFAULT_GRAMMAR_JSON};
use crate::phonetics::{Inventory, PhoneticsError, DEFAULT_INVENTORY_JSON};

pub const DATA_ENV: &str = "ORAL_BILLIARDS_DATA";
pub const INVENTORY_FILE: &str = "inventory.json";
pub const GRAMMAR_FILE: &str = "grammar.json";
pub const POLYGON_FILE: &str = "oral_polygon.json";

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Inventory {
        path: String,
        source: PhoneticsError,
    },
    #[error("{path}: {source}")]
    Grammar { path: String, source: GrammarError },
    #[error("{path}: {source}")]
    Polygon { path: String, source: GeometryError },
}

pub fn data_dir() -> Option<PathBuf> {
    std::env::var_os(DATA_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

/// Contents of `name` from the override directory, or the built-in text.
fn read(name: &str, builtin: &'static str) -> Result<(String, String), DataError> {
    if let Some(dir) = data_dir() {
        let path = dir.join(name);
        if path.is_file() {
            let text = std::fs::read_to_string(&path).map_err(|source| DataError::Io {
                path: path.clone(),
                source,
            })?;
            return Ok((text, path.display().to_string()));
        }
    }
    Ok((builtin.to_string(), format!("<builtin {name}>")))
}

pub fn load_inventory() -> Result<Inventory, DataError> {
    let (text, path) = read(INVENTORY_FILE, DEFAULT_INVENTORY_JSON)?;
    Inventory::from_json(&text).map_err(|source| DataError::Inventory { path, source })
}

pub fn load_grammar() -> Result<Grammar, DataError> {
    let (text, path) = read(GRAMMAR_FILE, DEFAULT_GRAMMAR_JSON)?;
    Grammar::from_json(&text).map_err(|source| DataError::Grammar { path, source })
}

pub fn load_polygon_config() -> Result<PolygonConfig, DataError> {
    let (text, path) = read(POLYGON_FILE, DEFAULT_POLYGON_JSON)?;
    PolygonConfig::from_json(&text).map_err(|source| DataError::Polygon { path, source })
}
