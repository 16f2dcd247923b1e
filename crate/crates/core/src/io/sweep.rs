//! Sweep files: a base scenario and a Cartesian product of numeric axes.
//!
//! ```toml
//! base = "fig2a"          # preset name, or a scenario file relative to this file
//! out_dir = "out/kappa"   # optional
//! max_points = 10000      # optional
//!
//! [axes]
//! kappa = [0.1, 0.5, 1.5]
//! epsilon = [0.1, 0.2]
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::params::{preset, Scenario};

use super::scenario_file::{parse_scenario, set_numeric_key, SCENARIO_KEYS};

pub const DEFAULT_MAX_POINTS: usize = 10_000;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    base: String,
    out_dir: Option<PathBuf>,
    max_points: Option<usize>,
    #[serde(default)]
    axes: toml::Table,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub base_name: String,
    pub base: Scenario,
    pub out_dir: Option<PathBuf>,
    pub axes: Vec<(String, Vec<f64>)>,
}

fn parse_err(message: impl std::fmt::Display) -> Error {
    Error::Parse {
        context: "sweep".into(),
        message: message.to_string().trim().to_string(),
    }
}

/// Parses a sweep file. Relative `base` paths resolve against `dir`.
pub fn parse_sweep(text: &str, dir: &Path) -> Result<Sweep> {
    let file: SweepFile = toml::from_str(text).map_err(parse_err)?;
    let (base_name, base) = match preset(&file.base) {
        Ok(p) => (p.name.to_string(), p.scenario),
        Err(_) => {
            let path = dir.join(&file.base);
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "sweep".into());
            (name, parse_scenario(&text)?)
        }
    };
    let mut axes = Vec::new();
    for (key, values) in &file.axes {
        if !SCENARIO_KEYS.contains(&key.as_str()) {
            return Err(Error::UnknownKey(key.clone()));
        }
        let arr = values
            .as_array()
            .ok_or_else(|| Error::invalid(key, "axis values must be an array"))?;
        if arr.is_empty() {
            return Err(Error::invalid(key, "axis needs at least one value"));
        }
        let vals = arr
            .iter()
            .map(|v| match v {
                toml::Value::Float(f) => Ok(*f),
                toml::Value::Integer(i) => Ok(*i as f64),
                _ => Err(Error::invalid(key, "axis values must be numbers")),
            })
            .collect::<Result<Vec<f64>>>()?;
        axes.push((key.clone(), vals));
    }
    let points: usize = axes.iter().map(|(_, v)| v.len()).product();
    let max = file.max_points.unwrap_or(DEFAULT_MAX_POINTS);
    if points > max {
        return Err(Error::invalid(
            "max_points",
            format!("sweep has {points} points, limit is {max}"),
        ));
    }
    Ok(Sweep {
        base_name,
        base,
        out_dir: file.out_dir,
        axes,
    })
}

impl Sweep {
    /// Every point of the product, named `<base>_<key>-<value>_...`, each
    /// validated.
    pub fn expand(&self) -> Result<Vec<(String, Scenario)>> {
        let mut points = vec![(self.base_name.clone(), self.base.clone())];
        for (key, values) in &self.axes {
            let mut next = Vec::with_capacity(points.len() * values.len());
            for (name, s) in &points {
                for &v in values {
                    next.push((format!("{name}_{key}-{v}"), set_numeric_key(s, key, v)?));
                }
            }
            points = next;
        }
        for (_, s) in &points {
            s.validate()?;
        }
        Ok(points)
    }
}
