//! `key = value` files with `[section]` headers.
//!
//! Keys before the first header are shared by every command; a command reads its
//! own section first and falls back to the shared keys.

use std::fmt;
use std::path::{Path, PathBuf};

use gaussamp::points::PointSet1D;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "config error: {}", self.message)
        } else {
            write!(f, "config error at line {}, column {}: {}", self.line, self.column, self.message)
        }
    }
}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { line, column, message: message.into() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub section: Option<String>,
    pub key: String,
    pub value: String,
    pub line: usize,
    /// 1-based column of the value.
    pub column: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    pub entries: Vec<Entry>,
    pub base_dir: Option<PathBuf>,
}

impl Config {
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self, ConfigError> {
        let mut entries = Vec::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let trimmed = body.trim();
            if trimmed.is_empty() {
                continue;
            }
            let indent = body.len() - body.trim_start().len();
            if let Some(rest) = trimmed.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return err(line, indent + 1, "unterminated section header");
                };
                let name = name.trim();
                if name.is_empty() {
                    return err(line, indent + 2, "empty section name");
                }
                section = Some(name.to_string());
                continue;
            }
            let Some(eq) = body.find('=') else {
                return err(line, indent + 1, "expected key = value");
            };
            let key = body[..eq].trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return err(line, indent + 1, format!("invalid key '{key}'"));
            }
            let after = &body[eq + 1..];
            let value = after.trim();
            let column = eq + 2 + (after.len() - after.trim_start().len());
            if entries.iter().any(|e: &Entry| e.section == section && e.key == key) {
                return err(line, indent + 1, format!("duplicate key '{key}'"));
            }
            entries.push(Entry { section: section.clone(), key: key.to_string(), value: value.to_string(), line, column });
        }
        Ok(Config { entries, base_dir: base_dir.map(Path::to_path_buf) })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError { line: 0, column: 0, message: format!("cannot read {}: {e}", path.display()) })?;
        Config::parse(&text, path.parent())
    }

    /// Apply a `key=value` override to the shared section.
    pub fn set(&mut self, kv: &str) -> Result<(), ConfigError> {
        let Some((k, v)) = kv.split_once('=') else {
            return err(0, 0, format!("override '{kv}' is not key=value"));
        };
        let k = k.trim().to_string();
        self.entries.retain(|e| e.key != k);
        self.entries.push(Entry { section: None, key: k, value: v.trim().to_string(), line: 0, column: 0 });
        Ok(())
    }

    /// Reject keys in `section` that the command does not know.
    pub fn check_keys(&self, section: &str, known: &[&str]) -> Result<(), ConfigError> {
        for e in &self.entries {
            if e.section.as_deref() == Some(section) && !known.contains(&e.key.as_str()) {
                return err(e.line, 1, format!("unknown key '{}' for {section}", e.key));
            }
        }
        Ok(())
    }

    pub fn view<'a>(&'a self, section: &'a str) -> View<'a> {
        View { cfg: self, section }
    }
}

/// Lookups for one command.
pub struct View<'a> {
    cfg: &'a Config,
    section: &'a str,
}

fn parse_float(s: &str) -> Option<f64> {
    let s = s.trim();
    match s {
        "pi" => Some(std::f64::consts::PI),
        "golden" => Some((1.0 + 5f64.sqrt()) / 2.0),
        _ => s.parse().ok(),
    }
}

impl View<'_> {
    pub fn entry(&self, key: &str) -> Option<&Entry> {
        let es = &self.cfg.entries;
        es.iter()
            .rev()
            .find(|e| e.line == 0 && e.key == key)
            .or_else(|| es.iter().find(|e| e.section.as_deref() == Some(self.section) && e.key == key))
            .or_else(|| es.iter().find(|e| e.section.is_none() && e.key == key))
    }

    pub fn str_or(&self, key: &str, default: &str) -> String {
        self.entry(key).map(|e| e.value.clone()).unwrap_or_else(|| default.to_string())
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.entry(key) {
            None => Ok(default),
            Some(e) => parse_float(&e.value).map_or_else(|| err(e.line, e.column, format!("'{}' is not a number", e.value)), Ok),
        }
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.entry(key) {
            None => Ok(None),
            Some(_) => self.f64_or(key, 0.0).map(Some),
        }
    }

    pub fn i64_or(&self, key: &str, default: i64) -> Result<i64, ConfigError> {
        match self.entry(key) {
            None => Ok(default),
            Some(e) => e.value.parse().map_err(|_| ConfigError { line: e.line, column: e.column, message: format!("'{}' is not an integer", e.value) }),
        }
    }

    pub fn i64_list_or(&self, key: &str, default: &[i64]) -> Result<Vec<i64>, ConfigError> {
        match self.entry(key) {
            None => Ok(default.to_vec()),
            Some(e) => {
                let mut out = Vec::new();
                let mut col = e.column;
                for part in e.value.split(',') {
                    let v = part.trim().parse().map_err(|_| ConfigError { line: e.line, column: col + part.len() - part.trim_start().len(), message: format!("'{}' is not an integer", part.trim()) })?;
                    out.push(v);
                    col += part.len() + 1;
                }
                Ok(out)
            }
        }
    }

    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        match self.entry(key) {
            None => Ok(default.to_vec()),
            Some(e) => {
                let mut out = Vec::new();
                let mut col = e.column;
                for part in e.value.split(',') {
                    let v = parse_float(part).ok_or_else(|| ConfigError { line: e.line, column: col + part.len() - part.trim_start().len(), message: format!("'{}' is not a number", part.trim()) })?;
                    out.push(v);
                    col += part.len() + 1;
                }
                Ok(out)
            }
        }
    }

    /// A point set descriptor; parse errors are reported at the config position.
    pub fn set_or(&self, key: &str, default: &str) -> Result<PointSet1D, ConfigError> {
        let (text, line, column) = match self.entry(key) {
            None => (default.to_string(), 0, 0),
            Some(e) => (e.value.clone(), e.line, e.column),
        };
        PointSet1D::parse(&text, self.cfg.base_dir.as_deref()).map_err(|e| match e {
            gaussamp::Error::Parse { column: c, message, .. } => ConfigError { line, column: column + c.saturating_sub(1), message },
            other => ConfigError { line, column, message: other.to_string() },
        })
    }
}
