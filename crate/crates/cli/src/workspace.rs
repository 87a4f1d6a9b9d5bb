//! Content-addressed object store.
//!
//! Objects are written as canonical JSON (sorted keys, compact, trailing
//! newline) under `objects/<sha256>.json`; `names.json` maps user-chosen
//! names to hashes and object kinds.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameEntry {
    pub hash: String,
    pub kind: String,
}

pub struct Workspace {
    root: PathBuf,
}

/// Canonical bytes of a serializable value.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Input(format!("cannot serialize: {e}")))?;
    let mut s = serde_json::to_string(&v).map_err(|e| CliError::Input(format!("cannot serialize: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Workspace {
    pub fn new(root: &Path) -> Self {
        Workspace { root: root.to_path_buf() }
    }

    fn names_path(&self) -> PathBuf {
        self.root.join("names.json")
    }

    fn io(e: std::io::Error, what: &Path) -> CliError {
        CliError::Input(format!("{}: {e}", what.display()))
    }

    pub fn names(&self) -> Result<BTreeMap<String, NameEntry>, CliError> {
        let p = self.names_path();
        if !p.exists() {
            return Ok(BTreeMap::new());
        }
        let text = fs::read_to_string(&p).map_err(|e| Self::io(e, &p))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: line {} column {}: {e}", p.display(), e.line(), e.column())))
    }

    /// Stores `value` under `name`, returning its hash.
    pub fn save<T: Serialize>(&self, name: &str, kind: &str, value: &T) -> Result<String, CliError> {
        let text = canonical_json(value)?;
        let hash = digest(text.as_bytes());
        let dir = self.root.join("objects");
        fs::create_dir_all(&dir).map_err(|e| Self::io(e, &dir))?;
        let obj = dir.join(format!("{hash}.json"));
        if !obj.exists() {
            fs::write(&obj, &text).map_err(|e| Self::io(e, &obj))?;
        }
        let mut names = self.names()?;
        names.insert(name.to_string(), NameEntry { hash: hash.clone(), kind: kind.to_string() });
        let p = self.names_path();
        fs::write(&p, canonical_json(&names)?).map_err(|e| Self::io(e, &p))?;
        Ok(hash)
    }

    /// Raw canonical text of a named object, after checking its hash.
    pub fn load_text(&self, name: &str, kind: &str) -> Result<String, CliError> {
        let names = self.names()?;
        let entry = names
            .get(name)
            .ok_or_else(|| CliError::Input(format!("no object named {name:?} in {}", self.root.display())))?;
        if entry.kind != kind {
            return Err(CliError::Input(format!("{name:?} is a {}, expected a {kind}", entry.kind)));
        }
        let p = self.root.join("objects").join(format!("{}.json", entry.hash));
        let text = fs::read_to_string(&p).map_err(|e| Self::io(e, &p))?;
        if digest(text.as_bytes()) != entry.hash {
            return Err(CliError::Input(format!("{}: content does not match its hash", p.display())));
        }
        Ok(text)
    }

    pub fn load<T: DeserializeOwned>(&self, name: &str, kind: &str) -> Result<T, CliError> {
        let text = self.load_text(name, kind)?;
        parse_document(&text, name)
    }

    pub fn contains(&self, name: &str) -> Result<bool, CliError> {
        Ok(self.names()?.contains_key(name))
    }
}

pub fn parse_document<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{origin}: line {} column {}: {e}", e.line(), e.column())))
}

/// Reads a JSON document from a file path.
pub fn read_file<T: DeserializeOwned>(path: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    parse_document(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn save_load_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::new(dir.path());
        let value = serde_json::json!({"b": [1, 2], "a": "1/2"});
        let h = ws.save("v", "value", &value).unwrap();
        let text = ws.load_text("v", "value").unwrap();
        assert_eq!(text, "{\"a\":\"1/2\",\"b\":[1,2]}\n");
        assert_eq!(digest(text.as_bytes()), h);
        let back: serde_json::Value = ws.load("v", "value").unwrap();
        assert_eq!(canonical_json(&back).unwrap(), text);
        assert!(ws.load::<serde_json::Value>("v", "atlas").is_err());
        assert!(ws.load::<serde_json::Value>("w", "value").is_err());
    }
}
