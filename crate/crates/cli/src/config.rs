//! Configuration merging: serde defaults, then the JSON file, then `GCQ_SEED`, then flags.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{usage, CliResult};

pub const SEED_ENV: &str = "GCQ_SEED";

/// Collects the flags that were given on the command line.
#[derive(Default)]
pub struct Overrides(Map<String, Value>);

impl Overrides {
    pub fn set<T: Serialize>(&mut self, key: &str, value: Option<T>) -> &mut Self {
        if let Some(v) = value {
            self.0.insert(
                key.into(),
                serde_json::to_value(v).expect("flag values serialize"),
            );
        }
        self
    }
}

pub fn load<T: DeserializeOwned>(
    file: Option<&Path>,
    overrides: Overrides,
    seeded: bool,
) -> CliResult<T> {
    let mut value = match file {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str::<Value>(&text)
                .map_err(|e| usage(format!("malformed config {}: {e}", p.display())))?
        }
        None => Value::Object(Map::new()),
    };
    let obj = value
        .as_object_mut()
        .ok_or_else(|| usage("config must be a JSON object"))?;
    if seeded {
        if let Ok(s) = std::env::var(SEED_ENV) {
            let seed: u64 = s.trim().parse().map_err(|_| {
                usage(format!(
                    "{SEED_ENV} must be a non-negative integer, got {s:?}"
                ))
            })?;
            obj.insert("seed".into(), seed.into());
        }
    }
    obj.extend(overrides.0);
    serde_json::from_value(value).map_err(|e| usage(format!("invalid config: {e}")))
}

/// Parses `1,2,3` style lists.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<T>()
                .map_err(|_| format!("cannot parse {x:?}"))
        })
        .collect()
}
