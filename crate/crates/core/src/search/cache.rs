use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::hypergraph::Mode;

/// Proved extremal values keyed by `(n, r, pattern, mode)`, optionally
/// persisted as a JSON object.
#[derive(Clone, Debug, Default)]
pub struct ValueCache {
    path: Option<PathBuf>,
    values: BTreeMap<String, usize>,
    dirty: bool,
}

fn key(n: usize, r: usize, pattern: &str, mode: Mode) -> String {
    format!("{n}|{r}|{pattern}|{mode}")
}

impl ValueCache {
    pub fn in_memory() -> Self {
        ValueCache::default()
    }

    /// Opens the cache file at `path`; a missing file starts empty.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let values = if path.exists() { serde_json::from_str(&fs::read_to_string(&path)?)? } else { BTreeMap::new() };
        Ok(ValueCache { path: Some(path), values, dirty: false })
    }

    pub fn get(&self, n: usize, r: usize, pattern: &str, mode: Mode) -> Option<usize> {
        self.values.get(&key(n, r, pattern, mode)).copied()
    }

    pub fn insert(&mut self, n: usize, r: usize, pattern: &str, mode: Mode, value: usize) {
        if self.values.insert(key(n, r, pattern, mode), value) != Some(value) {
            self.dirty = true;
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Writes the cache back if it has a path and changed.
    pub fn save(&mut self) -> Result<()> {
        if let (Some(path), true) = (&self.path, self.dirty) {
            fs::write(path, serde_json::to_string_pretty(&self.values)?)?;
            self.dirty = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("values.json");
        let mut c = ValueCache::open(&path).unwrap();
        assert!(c.is_empty());
        c.insert(7, 2, "cp:2:3", Mode::Cyclic, 11);
        c.save().unwrap();
        let c = ValueCache::open(&path).unwrap();
        assert_eq!(c.get(7, 2, "cp:2:3", Mode::Cyclic), Some(11));
        assert_eq!(c.get(7, 2, "cp:2:3", Mode::Linear), None);
    }
}
