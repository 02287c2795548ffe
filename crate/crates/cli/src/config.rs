//! Flat sectioned `key = value` configuration files.
//!
//! ```text
//! # comment
//! [hamiltonian]
//! family = pendulum
//! [thermostat]
//! variant = nh
//! epsilon = 0.05
//! temperature = 1.0
//! ```
//!
//! Every key must be consumed by the command that runs; unknown or
//! leftover keys are reported with their line number. The grammar is
//! documented in `docs/config.md`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
    used: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<(String, String), Entry>,
    path: String,
}

impl Config {
    pub fn parse(path: &str, text: &str) -> Result<Config, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if trimmed.starts_with('[') {
                if !trimmed.ends_with(']') || trimmed.len() < 3 {
                    return Err(ConfigError(format!("{path}:{line}: malformed section header")));
                }
                section = trimmed[1..trimmed.len() - 1].trim().to_string();
                continue;
            }
            let Some(eq) = trimmed.find('=') else {
                return Err(ConfigError(format!("{path}:{line}: expected `key = value`")));
            };
            let key = trimmed[..eq].trim().to_string();
            let value = trimmed[eq + 1..].trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError(format!("{path}:{line}: empty key or value")));
            }
            if section.is_empty() {
                return Err(ConfigError(format!("{path}:{line}: key outside any [section]")));
            }
            let prev = entries.insert((section.clone(), key.clone()), Entry { value, line, used: false });
            if prev.is_some() {
                return Err(ConfigError(format!("{path}:{line}: duplicate key `{key}` in [{section}]")));
            }
        }
        Ok(Config { entries, path: path.to_string() })
    }

    fn take(&mut self, section: &str, key: &str) -> Option<(String, usize)> {
        if let Some(entry) = self.entries.get_mut(&(section.to_string(), key.to_string())) {
            entry.used = true;
            return Some((entry.value.clone(), entry.line));
        }
        None
    }

    pub fn str_opt(&mut self, section: &str, key: &str) -> Option<String> {
        self.take(section, key).map(|(v, _)| v)
    }

    pub fn str_or(&mut self, section: &str, key: &str, default: &str) -> String {
        self.str_opt(section, key).unwrap_or_else(|| default.to_string())
    }

    pub fn f64_opt(&mut self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.take(section, key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<f64>().map(Some).map_err(|_| {
                ConfigError(format!("{}:{line}: `{key}` must be a number, got `{v}`", self.path))
            }),
        }
    }

    pub fn f64_or(&mut self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64_opt(section, key)?.unwrap_or(default))
    }

    pub fn usize_or(&mut self, section: &str, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.take(section, key) {
            None => Ok(default),
            Some((v, line)) => v.parse::<usize>().map_err(|_| {
                ConfigError(format!("{}:{line}: `{key}` must be a nonnegative integer", self.path))
            }),
        }
    }

    pub fn u32_or(&mut self, section: &str, key: &str, default: u32) -> Result<u32, ConfigError> {
        match self.take(section, key) {
            None => Ok(default),
            Some((v, line)) => v.parse::<u32>().map_err(|_| {
                ConfigError(format!("{}:{line}: `{key}` must be a nonnegative integer", self.path))
            }),
        }
    }

    /// Comma-separated list of numbers.
    pub fn f64_list_or(
        &mut self,
        section: &str,
        key: &str,
        default: &[f64],
    ) -> Result<Vec<f64>, ConfigError> {
        match self.take(section, key) {
            None => Ok(default.to_vec()),
            Some((v, line)) => v
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|_| {
                    ConfigError(format!(
                        "{}:{line}: `{key}` must be a comma-separated list of numbers",
                        self.path
                    ))
                }),
        }
    }

    pub fn u32_list_or(
        &mut self,
        section: &str,
        key: &str,
        default: &[u32],
    ) -> Result<Vec<u32>, ConfigError> {
        match self.take(section, key) {
            None => Ok(default.to_vec()),
            Some((v, line)) => v
                .split(',')
                .map(|s| s.trim().parse::<u32>())
                .collect::<Result<Vec<u32>, _>>()
                .map_err(|_| {
                    ConfigError(format!(
                        "{}:{line}: `{key}` must be a comma-separated list of integers",
                        self.path
                    ))
                }),
        }
    }

    /// Pair `a,b`.
    pub fn f64_pair_opt(
        &mut self,
        section: &str,
        key: &str,
    ) -> Result<Option<(f64, f64)>, ConfigError> {
        let list = match self.take(section, key) {
            None => return Ok(None),
            Some((v, line)) => {
                let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(ConfigError(format!(
                        "{}:{line}: `{key}` must be a pair `lo,hi`",
                        self.path
                    )));
                }
                let a = parts[0].parse::<f64>();
                let b = parts[1].parse::<f64>();
                match (a, b) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => {
                        return Err(ConfigError(format!(
                            "{}:{line}: `{key}` must be a pair of numbers",
                            self.path
                        )))
                    }
                }
            }
        };
        Ok(Some(list))
    }

    /// Fail on any key no command consumed.
    pub fn finish(&self) -> Result<(), ConfigError> {
        let mut msg = String::new();
        for ((section, key), entry) in &self.entries {
            if !entry.used {
                let _ = writeln!(
                    msg,
                    "{}:{}: unknown key `{key}` in [{section}]",
                    self.path, entry.line
                );
            }
        }
        if msg.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(msg.trim_end().to_string()))
        }
    }
}
