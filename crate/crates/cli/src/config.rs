//! Optional TOML configuration. Each subcommand reads the table of the same
//! name; keys are the long flag names. Flags given on the command line win.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use toml::{Table, Value};

const SECTIONS: [&str; 4] = ["simulate", "fp", "fit", "gini"];

pub fn load(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let table: Table = text.parse().with_context(|| format!("parsing config {}", path.display()))?;
    for key in table.keys() {
        if !SECTIONS.contains(&key.as_str()) {
            bail!("{}: unknown section [{key}], expected one of {}", path.display(), SECTIONS.join(", "));
        }
    }
    Ok(table)
}

/// Overlays the flags that were given on top of the `[section]` table.
pub fn merge<T: Serialize + DeserializeOwned>(flags: T, config: Option<&Table>, section: &str) -> Result<T> {
    let Some(config) = config else { return Ok(flags) };
    let mut table = match config.get(section) {
        None => return Ok(flags),
        Some(Value::Table(t)) => t.clone(),
        Some(_) => bail!("config entry {section:?} must be a table"),
    };
    // Unset options are skipped by the serializer, so only explicit flags override.
    match Value::try_from(&flags)? {
        Value::Table(given) => table.extend(given),
        _ => unreachable!("argument structs serialize to tables"),
    }
    Value::Table(table).try_into().with_context(|| format!("invalid [{section}] table in config"))
}
