//! Line-oriented `key: value` documents shared by instance files and reports.
//!
//! Blank lines and lines starting with `#` are ignored. Keys may repeat;
//! a value may be empty.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    entries: Vec<(String, String)>,
}

impl Document {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key: value`", lineno + 1)))?;
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(Error::Parse(format!("line {}: bad key `{key}`", lineno + 1)));
            }
            entries.push((key.to_string(), value.trim().to_string()));
        }
        Ok(Document { entries })
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get_all<'a>(&'a self, key: &str) -> impl Iterator<Item = &'a str> + 'a {
        let key = key.to_string();
        self.entries.iter().filter(move |(k, _)| *k == key).map(|(_, v)| v.as_str())
    }

    /// The single value for `key`, if present; repeated keys are a parse error.
    pub fn get(&self, key: &str) -> Result<Option<&str>> {
        let mut it = self.get_all(key);
        let first = it.next();
        if it.next().is_some() {
            return Err(Error::Parse(format!("key `{key}` given more than once")));
        }
        Ok(first)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)?.ok_or_else(|| Error::Parse(format!("missing key `{key}`")))
    }

    /// Parses the value of `key` with `FromStr`, mapping failures to parse errors.
    pub fn require_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let v = self.require(key)?;
        v.parse().map_err(|_| Error::Parse(format!("bad value for `{key}`: `{v}`")))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            if v.is_empty() {
                let _ = writeln!(out, "{k}:");
            } else {
                let _ = writeln!(out, "{k}: {v}");
            }
        }
        out
    }
}

/// Splits a list value on `sep`, trimming pieces and dropping empty ones.
pub fn split_list(value: &str, sep: char) -> Vec<&str> {
    value.split(sep).map(str::trim).filter(|s| !s.is_empty()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut d = Document::new();
        d.push("p", 5);
        d.push("eq", "1,0 : 1");
        d.push("eq", "");
        let back = Document::parse(&d.render()).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.get_all("eq").count(), 2);
        assert!(back.get("eq").is_err());
        assert_eq!(back.require_parsed::<u64>("p").unwrap(), 5);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Document::parse("no colon here").is_err());
        assert!(Document::parse("# comment\n\nk: v").is_ok());
    }
}
