//! `key = value` protocol configuration files.
//!
//! ```text
//! # comments and blank lines are ignored
//! learner = ik-ogd-anne
//! t = 200
//! psi_grid = 4,16,64
//! ```
//!
//! Keys may use `-` or `_`. Values given on the command line are applied
//! after the file, so they win.

use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::ProtocolConfig;

/// `(line, key, value)` triples in file order.
pub fn parse_config(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got {line:?}", i + 1)))?;
        out.push((i + 1, k.trim().replace('-', "_"), v.trim().to_string()));
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

/// Parses a comma-separated list of sizes.
pub fn parse_list(key: &str, value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num(key, s))
        .collect()
}

pub fn apply_setting(cfg: &mut ProtocolConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "learner" => {
            cfg.learner = value
                .parse()
                .map_err(|e: Error| Error::Config(e.to_string()))?
        }
        "eta" => cfg.eta = num(key, value)?,
        "t" => cfg.t = num(key, value)?,
        "b" => cfg.b = num(key, value)?,
        "r" => cfg.r = num(key, value)?,
        "psi" => cfg.psi = Some(num(key, value)?),
        "psi_grid" => cfg.psi_grid = parse_list(key, value)?,
        "block_size" => cfg.block_size = num(key, value)?,
        "folds" => cfg.folds = num(key, value)?,
        "seed" => cfg.seed = num(key, value)?,
        "initial_train" => cfg.initial_train = Some(num(key, value)?),
        "normalize" => cfg.normalize = num(key, value)?,
        other => return Err(Error::Config(format!("unknown config key {other:?}"))),
    }
    Ok(())
}

/// Defaults overridden by the settings in `text`.
pub fn config_from_str(text: &str) -> Result<ProtocolConfig> {
    let mut cfg = ProtocolConfig::default();
    for (line, k, v) in parse_config(text)? {
        apply_setting(&mut cfg, &k, &v).map_err(|e| Error::Config(format!("line {line}: {e}")))?;
    }
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ProtocolConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    config_from_str(&text)
}
