//! Config-file loading: one TOML table per subcommand, flag overrides, and
//! the resolved config written next to every output.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use toml::{Table, Value};

use crate::error::{CliError, Result};

/// Top-level sections a config file may contain.
pub const SECTIONS: [&str; 8] =
    ["loss_curves", "divergence", "region", "gradient", "bounds", "equivalence", "train", "sweep"];

/// A parsed config file; empty when none was given.
#[derive(Debug, Default)]
pub struct ConfigFile {
    root: Table,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let root: Table = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {}", path.display(), one_line(&e.to_string()))))?;
        for (k, v) in &root {
            if !SECTIONS.contains(&k.as_str()) {
                return Err(CliError::Config(format!("unknown section '{k}'")));
            }
            if !v.is_table() {
                return Err(CliError::Config(format!("'{k}' must be a table")));
            }
        }
        Ok(ConfigFile { root })
    }

    /// Section `name` with `overrides` applied on top, deserialized into `T`.
    pub fn section<T: DeserializeOwned>(&self, name: &str, overrides: Overrides) -> Result<T> {
        Self::parse(name, self.merged(name, overrides))
    }

    /// Like [`section`](Self::section) for types without an `out` key:
    /// `out` is split off and returned separately.
    pub fn section_and_out<T: DeserializeOwned>(
        &self,
        name: &str,
        overrides: Overrides,
    ) -> Result<(T, Option<PathBuf>)> {
        let mut table = self.merged(name, overrides);
        let out = match table.remove("out") {
            Some(Value::String(s)) => Some(PathBuf::from(s)),
            Some(_) => return Err(CliError::Config(format!("[{name}] out must be a string"))),
            None => None,
        };
        Ok((Self::parse(name, table)?, out))
    }

    fn merged(&self, name: &str, overrides: Overrides) -> Table {
        let mut table = match self.root.get(name) {
            Some(Value::Table(t)) => t.clone(),
            _ => Table::new(),
        };
        for (k, v) in overrides.0 {
            table.insert(k.to_string(), v);
        }
        table
    }

    fn parse<T: DeserializeOwned>(name: &str, table: Table) -> Result<T> {
        Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(format!("[{name}] {}", one_line(&e.to_string()))))
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Flag values to merge over a config section.
#[derive(Debug, Default)]
pub struct Overrides(Vec<(&'static str, Value)>);

impl Overrides {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set<T: Serialize>(mut self, key: &'static str, v: Option<T>) -> Result<Self> {
        if let Some(v) = v {
            let value = Value::try_from(v).map_err(|e| CliError::Config(format!("--{key}: {e}")))?;
            self.0.push((key, value));
        }
        Ok(self)
    }
}

/// A serializable value as a TOML value.
pub fn value<T: Serialize>(v: &T) -> Result<Value> {
    Value::try_from(v).map_err(|e| CliError::Config(format!("resolving config: {e}")))
}

/// Create the output directory and write `config.resolved` into it.
pub fn prepare_out(out: &Path, sections: Vec<(&str, Value)>) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))?;
    let root: Table = sections.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let text = toml::to_string(&root).map_err(|e| CliError::Config(format!("resolving config: {e}")))?;
    write(out, "config.resolved", &text)
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path: PathBuf = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}
