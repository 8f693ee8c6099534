//! Flat key=value config files: one assignment per line, `#` comments and
//! blank lines ignored. Keys prefixed `result.` are run outcomes written
//! into manifests; loaders skip them, which makes every manifest a valid
//! config for reproducing its run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::HarnessError;

#[derive(Debug, Clone)]
pub struct Config {
    path: PathBuf,
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self, HarnessError> {
        let mut entries = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| HarnessError::Config {
                path: path.to_path_buf(),
                message: format!("line {}: expected key=value, got {line:?}", idx + 1),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.starts_with("result.") {
                continue;
            }
            if entries.insert(key.clone(), value).is_some() {
                return Err(HarnessError::Config {
                    path: path.to_path_buf(),
                    message: format!("line {}: duplicate key {key:?}", idx + 1),
                });
            }
        }
        Ok(Config {
            path: path.to_path_buf(),
            entries,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Fail fast on keys outside the allowed set, naming the first offender.
    pub fn ensure_keys(&self, allowed: &[&str]) -> Result<(), HarnessError> {
        for key in self.entries.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(HarnessError::UnknownKey {
                    path: self.path.clone(),
                    key: key.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str, HarnessError> {
        self.get(key).ok_or_else(|| HarnessError::Config {
            path: self.path.clone(),
            message: format!("missing required key {key:?}"),
        })
    }

    fn parse_as<T: std::str::FromStr>(&self, key: &str, value: &str) -> Result<T, HarnessError> {
        value.parse().map_err(|_| HarnessError::Config {
            path: self.path.clone(),
            message: format!(
                "key {key:?}: cannot parse {value:?} as {}",
                std::any::type_name::<T>()
            ),
        })
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64, HarnessError> {
        match self.get(key) {
            Some(v) => self.parse_as(key, v),
            None => Ok(default),
        }
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64, HarnessError> {
        match self.get(key) {
            Some(v) => self.parse_as(key, v),
            None => Ok(default),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize, HarnessError> {
        match self.get(key) {
            Some(v) => self.parse_as(key, v),
            None => Ok(default),
        }
    }

    pub fn get_bool(&self, key: &str, default: bool) -> Result<bool, HarnessError> {
        match self.get(key) {
            Some(v) => self.parse_as(key, v),
            None => Ok(default),
        }
    }

    /// Comma-separated list of usize.
    pub fn require_usize_list(&self, key: &str) -> Result<Vec<usize>, HarnessError> {
        let raw = self.require(key)?;
        raw.split(',')
            .map(|p| self.parse_as(key, p.trim()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Config, HarnessError> {
        Config::parse(Path::new("test.cfg"), text)
    }

    #[test]
    fn parses_values_comments_and_blanks() {
        let cfg = parse("# a comment\nfamily=blobs\n\nnoise = 1.25\nseed=7\n").unwrap();
        assert_eq!(cfg.require("family").unwrap(), "blobs");
        assert_eq!(cfg.get_f64("noise", 0.0).unwrap(), 1.25);
        assert_eq!(cfg.get_u64("seed", 0).unwrap(), 7);
        assert_eq!(cfg.get_u64("missing", 42).unwrap(), 42);
    }

    #[test]
    fn duplicate_keys_fail_fast() {
        let err = parse("a=1\na=2\n").unwrap_err();
        assert!(matches!(err, HarnessError::Config { .. }));
    }

    #[test]
    fn unknown_keys_are_named() {
        let cfg = parse("family=blobs\nnois=0.5\n").unwrap();
        match cfg.ensure_keys(&["family", "noise"]) {
            Err(HarnessError::UnknownKey { key, .. }) => assert_eq!(key, "nois"),
            other => panic!("expected unknown-key error, got {other:?}"),
        }
    }

    #[test]
    fn result_keys_are_skipped_on_load() {
        let cfg = parse("family=blobs\nresult.optimal_epoch=3\n").unwrap();
        assert!(cfg.get("result.optimal_epoch").is_none());
        assert!(cfg.ensure_keys(&["family"]).is_ok());
    }

    #[test]
    fn lines_without_equals_are_errors() {
        assert!(parse("familyblobs\n").is_err());
    }

    #[test]
    fn usize_lists() {
        let cfg = parse("counts=20, 20,20\n").unwrap();
        assert_eq!(cfg.require_usize_list("counts").unwrap(), vec![20, 20, 20]);
    }
}
