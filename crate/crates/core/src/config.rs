//! Flat `key = value` experiment configs.
//!
//! One pair per line; `#` starts a comment; blank lines are ignored. Values
//! are parsed on access so errors can name the line they came from. Every
//! key present must be consumed by the command that reads the file.

use crate::error::{Error, Result};
use sha2::{Digest, Sha256};
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default)]
pub struct Config {
    entries: BTreeMap<String, (String, usize)>,
    used: RefCell<BTreeSet<String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| Error::Config { line, msg: format!("expected `key = value`, got `{body}`") })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::Config { line, msg: format!("bad key `{k}`") });
            }
            if v.is_empty() {
                return Err(Error::Config { line, msg: format!("key `{k}` has no value") });
            }
            if let Some((_, first)) = entries.insert(k.to_string(), (v.to_string(), line)) {
                return Err(Error::Config { line, msg: format!("key `{k}` repeats line {first}") });
            }
        }
        Ok(Self { entries, used: RefCell::new(BTreeSet::new()) })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn raw(&self, key: &str) -> Option<&(String, usize)> {
        self.used.borrow_mut().insert(key.to_string());
        self.entries.get(key)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some((v, line)) => v
                .parse()
                .map_err(|_| Error::Config { line: *line, msg: format!("cannot parse `{v}` for `{key}`") }),
        }
    }

    pub fn get_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config { line: *line, msg: format!("cannot parse `{v}` for `{key}`") }),
        }
    }

    pub fn get_str(&self, key: &str, default: &str) -> String {
        self.raw(key).map(|(v, _)| v.clone()).unwrap_or_else(|| default.to_string())
    }

    /// Comma-separated list.
    pub fn get_list<T: FromStr>(&self, key: &str, default: &[T]) -> Result<Vec<T>>
    where
        T: Clone,
    {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some((v, line)) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::Config { line: *line, msg: format!("cannot parse `{s}` in `{key}`") })
                })
                .collect(),
        }
    }

    /// Fails on the first key present in the file that no getter asked for.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        match self.entries.keys().find(|k| !used.contains(*k)) {
            Some(k) => Err(Error::UnknownKey(k.clone())),
            None => Ok(()),
        }
    }

    /// Line of `key` in the source, for messages about its value.
    pub fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map(|e| e.1).unwrap_or(0)
    }

    /// Hex SHA-256 of the command name and the sorted `key=value` pairs.
    pub fn hash(&self, command: &str) -> String {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(b"\n");
        for (k, (v, _)) in &self.entries {
            h.update(format!("{k}={v}\n").as_bytes());
        }
        hex::encode(h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reports_lines() {
        let c = Config::parse("# c\nL = 64\n\nn_points=128 # tail\n").unwrap();
        assert_eq!(c.get("L", 0.0).unwrap(), 64.0);
        assert_eq!(c.get("n_points", 0usize).unwrap(), 128);
        assert!(c.finish().is_ok());
        let c = Config::parse("a = 1\nb = x\n").unwrap();
        assert!(matches!(c.get("b", 0.0), Err(Error::Config { line: 2, .. })));
        assert!(matches!(Config::parse("a 1"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(Config::parse("a=1\na=2"), Err(Error::Config { line: 2, .. })));
    }

    #[test]
    fn unknown_key_is_named() {
        let c = Config::parse("dt = 0.1\nbogus = 3\n").unwrap();
        c.get("dt", 0.0).unwrap();
        match c.finish() {
            Err(Error::UnknownKey(k)) => assert_eq!(k, "bogus"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hash_ignores_order_and_comments() {
        let a = Config::parse("a=1\nb=2\n").unwrap();
        let b = Config::parse("# x\nb = 2\na = 1\n").unwrap();
        assert_eq!(a.hash("simulate"), b.hash("simulate"));
        assert_ne!(a.hash("simulate"), a.hash("kernel"));
        assert_eq!(a.hash("simulate").len(), 64);
    }
}
