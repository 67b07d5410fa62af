//! Flat key-value configuration files with flag > file > default precedence.
//!
//! Config files are TOML tables of scalars whose keys mirror the flag names
//! (dashes become underscores). Every resolved value records where it came
//! from, and the commands print that provenance in a banner line so a run's
//! effective configuration is always visible in its output.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Flag,
    File,
    Default,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Flag => "flag",
            Source::File => "file",
            Source::Default => "default",
        })
    }
}

/// Loaded config file plus the provenance banner being built up.
pub struct Resolver {
    table: toml::Table,
    banner: Vec<String>,
}

impl Resolver {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let table = match path {
            None => toml::Table::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::config(format!("cannot read config {}: {e}", p.display()))
                })?;
                text.parse::<toml::Table>().map_err(|e| {
                    CliError::config(format!("cannot parse config {}: {e}", p.display()))
                })?
            }
        };
        Ok(Self {
            table,
            banner: Vec::new(),
        })
    }

    fn record<T: fmt::Display>(&mut self, key: &str, value: &T, source: Source) {
        self.banner.push(format!("{key}={value} ({source})"));
    }

    /// One line describing every resolved value and its origin.
    pub fn banner(&self) -> String {
        format!("# config: {}", self.banner.join(" "))
    }

    fn file_str(&self, key: &str) -> Result<Option<String>, CliError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s.clone())),
            Some(toml::Value::Integer(i)) => Ok(Some(i.to_string())),
            Some(toml::Value::Float(f)) => Ok(Some(f.to_string())),
            Some(toml::Value::Boolean(b)) => Ok(Some(b.to_string())),
            Some(other) => Err(CliError::config(format!(
                "config key `{key}` must be a scalar, got {other}"
            ))),
        }
    }

    /// Resolve a value: flag wins, then file, then the default.
    pub fn value<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + fmt::Display,
        <T as FromStr>::Err: fmt::Display,
    {
        if let Some(v) = flag {
            self.record(key, &v, Source::Flag);
            return Ok(v);
        }
        if let Some(raw) = self.file_str(key)? {
            let v = raw.parse::<T>().map_err(|e| {
                CliError::config(format!("config key `{key}` = `{raw}`: {e}"))
            })?;
            self.record(key, &v, Source::File);
            return Ok(v);
        }
        self.record(key, &default, Source::Default);
        Ok(default)
    }

    /// Resolve a value that has no default.
    pub fn required<T>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T: FromStr + fmt::Display,
        <T as FromStr>::Err: fmt::Display,
    {
        if let Some(v) = flag {
            self.record(key, &v, Source::Flag);
            return Ok(v);
        }
        if let Some(raw) = self.file_str(key)? {
            let v = raw.parse::<T>().map_err(|e| {
                CliError::config(format!("config key `{key}` = `{raw}`: {e}"))
            })?;
            self.record(key, &v, Source::File);
            return Ok(v);
        }
        Err(CliError::config(format!(
            "missing required value `{key}` (pass --{} or set it in the config file)",
            key.replace('_', "-")
        )))
    }

    /// Resolve an optional value with no default.
    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr + fmt::Display,
        <T as FromStr>::Err: fmt::Display,
    {
        if let Some(v) = flag {
            self.record(key, &v, Source::Flag);
            return Ok(Some(v));
        }
        if let Some(raw) = self.file_str(key)? {
            let v = raw.parse::<T>().map_err(|e| {
                CliError::config(format!("config key `{key}` = `{raw}`: {e}"))
            })?;
            self.record(key, &v, Source::File);
            return Ok(Some(v));
        }
        Ok(None)
    }
}
