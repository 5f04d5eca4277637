//! Flat key-value configuration files with `[section]` headers.
//!
//! The format is line oriented: `#` starts a comment, `[name]` opens a
//! section, `key = value` assigns inside the current section. Keys are
//! addressed as `section.key`. Values are parsed on demand; every lookup
//! failure produces an actionable message naming the key.

use gzk_core::error::{GzkError, Result};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(GzkError::Validation(format!(
                    "line {}: expected `key = value` or `[section]`, got `{line}`",
                    lineno + 1
                )));
            };
            let full = if section.is_empty() {
                key.trim().to_string()
            } else {
                format!("{section}.{}", key.trim())
            };
            entries.insert(full, value.trim().to_string());
        }
        Ok(Config { entries })
    }

    pub fn from_file(path: &std::path::Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GzkError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    /// Stable digest of the effective configuration (sorted key order), for
    /// stamping report rows.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.entries {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        let out = h.finalize();
        out.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| {
                GzkError::Validation(format!("{key}: expected a number, got `{v}`"))
            }),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| {
                GzkError::Validation(format!("{key}: expected an integer, got `{v}`"))
            }),
        }
    }

    pub fn u32_or(&self, key: &str, default: u32) -> Result<u32> {
        Ok(self.usize_or(key, default as usize)? as u32)
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| {
                GzkError::Validation(format!("{key}: expected an integer, got `{v}`"))
            }),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.entries.get(key).map(|s| s.as_str()) {
            None => Ok(default),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(v) => Err(GzkError::Validation(format!(
                "{key}: expected true/false, got `{v}`"
            ))),
        }
    }

    pub fn string_or(&self, key: &str, default: &str) -> String {
        self.entries
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string())
    }

    /// Comma-separated list of numbers.
    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.entries.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|p| {
                    p.trim().parse().map_err(|_| {
                        GzkError::Validation(format!("{key}: expected numbers, got `{p}`"))
                    })
                })
                .collect(),
        }
    }

    pub fn usize_list_or(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.entries.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|p| {
                    p.trim().parse().map_err(|_| {
                        GzkError::Validation(format!("{key}: expected integers, got `{p}`"))
                    })
                })
                .collect(),
        }
    }
}
