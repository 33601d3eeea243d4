//! Flat "key = value" config files.
//!
//! One assignment per line, `#` starts a comment, keys are snake_case.
//! Every run writes its fully resolved settings back out in the same format
//! (with provenance comments), so a manifest doubles as a config that
//! reproduces the run exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "config line {}: {}", self.line, self.message)
        } else {
            write!(f, "config: {}", self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

/// Parsed key/value file, remembering the line of each key for diagnostics.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line_no, format!("expected \"key = value\", got {raw:?}")))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(err(line_no, "empty key"));
            }
            if values.insert(key.clone(), (line_no, value)).is_some() {
                return Err(err(line_no, format!("duplicate key {key:?}")));
            }
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(0, format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(_, v)| v.as_str())
    }

    fn line_of(&self, key: &str) -> usize {
        self.values.get(key).map(|(l, _)| *l).unwrap_or(0)
    }

    pub fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                err(
                    self.line_of(key),
                    format!("field {key:?}: cannot parse {raw:?}"),
                )
            }),
        }
    }

    /// Comma-separated list field.
    pub fn get_list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|t| t.trim())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<T>().map_err(|_| {
                        err(
                            self.line_of(key),
                            format!("field {key:?}: cannot parse list item {t:?}"),
                        )
                    })
                })
                .collect::<Result<Vec<T>, ConfigError>>()
                .map(Some),
        }
    }

    /// Rejects keys that no command understands; catches typos early.
    pub fn check_known(&self, known: &[&str]) -> Result<(), ConfigError> {
        for (key, (line, _)) in &self.values {
            if !known.contains(&key.as_str()) {
                return Err(err(*line, format!("unknown field {key:?}")));
            }
        }
        Ok(())
    }
}

/// Serializes resolved settings as a manifest that parses back into the
/// same run. Comment lines carry provenance only.
pub struct ManifestWriter {
    buf: String,
}

impl ManifestWriter {
    pub fn new(tool: &str, command: &str) -> Self {
        let mut buf = String::new();
        buf.push_str(&format!("# {tool} {command} manifest\n"));
        buf.push_str(&format!("# version = {}\n", env!("CARGO_PKG_VERSION")));
        buf.push_str(&format!(
            "# timestamp = {}\n",
            chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
        ));
        buf.push_str(
            "# abandonment_semantics = abandon after exactly 2^a failed code-book queries; \
             the hitting query is included in query counts\n",
        );
        buf.push_str(&format!("command = {command}\n"));
        ManifestWriter { buf }
    }

    pub fn field(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.buf.push_str(&format!("{key} = {value}\n"));
        self
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let cfg = ConfigFile::parse("# header\n\nn = 128  # inline\nk = 116\n").unwrap();
        assert_eq!(cfg.get("n"), Some("128"));
        assert_eq!(cfg.get_parsed::<usize>("k").unwrap(), Some(116));
        assert_eq!(cfg.get("missing"), None);
    }

    #[test]
    fn reports_line_numbers() {
        let e = ConfigFile::parse("n = 1\nbogus line\n").unwrap_err();
        assert_eq!(e.line, 2);
        let cfg = ConfigFile::parse("n = 1\nk = x\n").unwrap();
        let e = cfg.get_parsed::<usize>("k").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn rejects_duplicates_and_unknown_keys() {
        assert!(ConfigFile::parse("a = 1\na = 2\n").is_err());
        let cfg = ConfigFile::parse("a = 1\nzz = 2\n").unwrap();
        assert!(cfg.check_known(&["a"]).is_err());
        assert!(cfg.check_known(&["a", "zz"]).is_ok());
    }

    #[test]
    fn lists_parse() {
        let cfg = ConfigFile::parse("xs = 1, 2,3\n").unwrap();
        assert_eq!(cfg.get_list::<u32>("xs").unwrap(), Some(vec![1, 2, 3]));
        let bad = ConfigFile::parse("xs = 1,two\n").unwrap();
        assert!(bad.get_list::<u32>("xs").is_err());
    }

    #[test]
    fn manifest_roundtrips_through_parser() {
        let mut m = ManifestWriter::new("grandsim", "simulate");
        m.field("n", 128).field("p_grid", "0.01,0.02");
        let text = m.finish();
        let cfg = ConfigFile::parse(&text).unwrap();
        assert_eq!(cfg.get("command"), Some("simulate"));
        assert_eq!(cfg.get("n"), Some("128"));
        assert_eq!(
            cfg.get_list::<f64>("p_grid").unwrap(),
            Some(vec![0.01, 0.02])
        );
    }
}
