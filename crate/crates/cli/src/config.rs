//! Line-oriented `key = value` scenario files.
//!
//! ```text
//! # comment                     blank lines and '#' comments are ignored
//! name = my-run                 keys are dotted identifiers
//! times = 0.5, 0.8, 1.4         lists are comma separated
//! description = text # not a comment   '#' only starts a comment at line start
//! ```
//!
//! Keys may appear once. Values run to the end of the line with
//! surrounding whitespace trimmed. See the README for the recognised keys.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::CliError;

/// Parsed key/value pairs, remembering the line each came from.
#[derive(Debug, Clone, Default)]
pub struct ConfigMap {
    entries: BTreeMap<String, (String, usize)>,
    origin: String,
}

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key.split('.').all(|part| {
            !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        })
}

impl ConfigMap {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!("{origin}:{line_no}: expected `key = value`")));
            };
            let key = key.trim();
            if !valid_key(key) {
                return Err(CliError::Config(format!("{origin}:{line_no}: invalid key `{key}`")));
            }
            if entries.insert(key.to_string(), (value.trim().to_string(), line_no)).is_some() {
                return Err(CliError::Config(format!("{origin}:{line_no}: duplicate key `{key}`")));
            }
        }
        Ok(ConfigMap { entries, origin: origin.to_string() })
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn at(&self, key: &str) -> String {
        match self.entries.get(key) {
            Some((_, line)) => format!("{}:{line}", self.origin),
            None => self.origin.clone(),
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("{}: cannot parse `{key} = {v}`", self.at(key)))),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.get(key)?
            .ok_or_else(|| CliError::Config(format!("{}: missing required key `{key}`", self.origin)))
    }

    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        v.split(',')
            .map(|item| {
                item.trim().parse().map_err(|_| {
                    CliError::Config(format!("{}: cannot parse list item `{}` of `{key}`", self.at(key), item.trim()))
                })
            })
            .collect::<Result<Vec<T>, _>>()
            .map(Some)
    }

    /// Fails on the first key outside `known`.
    pub fn reject_unknown(&self, known: &[&str]) -> Result<(), CliError> {
        match self.entries.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(CliError::Config(format!("{}: unknown key `{k}`", self.at(k)))),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_lists_and_comments() {
        let text = "# header\n\nname = demo\nmc.seed = 42\ntimes = 0.5, 1.0 ,1.4\ndescription = a # b\n";
        let c = ConfigMap::parse(text, "demo.conf").unwrap();
        assert_eq!(c.raw("name"), Some("demo"));
        assert_eq!(c.require::<u64>("mc.seed").unwrap(), 42);
        assert_eq!(c.get_list::<f64>("times").unwrap().unwrap(), vec![0.5, 1.0, 1.4]);
        assert_eq!(c.raw("description"), Some("a # b"));
        assert!(c.get::<f64>("missing").unwrap().is_none());
    }

    #[test]
    fn reports_line_numbers() {
        let err = ConfigMap::parse("name = a\nnonsense\n", "x.conf").unwrap_err();
        assert!(err.to_string().contains("x.conf:2"), "{err}");
        let err = ConfigMap::parse("a = 1\na = 2\n", "x.conf").unwrap_err();
        assert!(err.to_string().contains("duplicate"));
        let err = ConfigMap::parse("bad key = 1\n", "x.conf").unwrap_err();
        assert!(err.to_string().contains("invalid key"));
        let c = ConfigMap::parse("\nmc.seed = lots\n", "x.conf").unwrap();
        assert!(c.get::<u64>("mc.seed").unwrap_err().to_string().contains("x.conf:2"));
        assert!(c.reject_unknown(&["name"]).is_err());
    }
}
