//! Scenario runner for the Fokker-Planck similarity solutions: loads
//! scenarios, dispatches to the analytic, finite-volume and Monte Carlo
//! engines, writes CSVs and gnuplot scripts, and hosts the acceptance suite.

// `!(a < b)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod config;
pub mod error;
pub mod runner;
pub mod scenario;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::ConfigMap;
pub use error::CliError;
pub use scenario::Scenario;

/// User scenario directory: `$FPE_SIM_CONFIG_DIR`, else
/// `$XDG_CONFIG_HOME/fpe-sim`, else `$HOME/.config/fpe-sim`.
pub fn config_dir() -> Option<PathBuf> {
    let var = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
    var("FPE_SIM_CONFIG_DIR")
        .or_else(|| var("XDG_CONFIG_HOME").map(|p| p.join("fpe-sim")))
        .or_else(|| var("HOME").map(|p| p.join(".config").join("fpe-sim")))
}

pub fn load_file(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    Scenario::from_config(&ConfigMap::parse(&text, &path.display().to_string())?)
}

/// Resolves a `run` target: a built-in name, a path to a config file, or
/// the stem of a `*.conf` file in the config directory.
pub fn resolve(target: &str, dir: Option<&Path>) -> Result<Scenario, CliError> {
    if let Some(s) = scenario::builtin(target) {
        return Ok(s);
    }
    let path = Path::new(target);
    if path.is_file() {
        return load_file(path);
    }
    if let Some(dir) = dir {
        let candidate = dir.join(format!("{target}.conf"));
        if candidate.is_file() {
            return load_file(&candidate);
        }
    }
    Err(CliError::Config(format!("unknown scenario `{target}`: not a built-in, a file, or a user config")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Listing {
    /// `(name, description)` for built-ins then valid user configs.
    pub entries: Vec<(String, String)>,
    /// One message per user config that failed to load.
    pub warnings: Vec<String>,
}

/// Built-ins plus the `*.conf` files of `dir`, in file-name order.
pub fn list_scenarios(dir: Option<&Path>) -> Listing {
    let mut entries: Vec<(String, String)> = scenario::BUILTIN_NAMES
        .iter()
        .map(|n| {
            let s = scenario::builtin(n).expect("built-in");
            (s.name, s.description)
        })
        .collect();
    let mut warnings = Vec::new();
    let mut files: Vec<PathBuf> = dir
        .and_then(|d| fs::read_dir(d).ok())
        .map(|rd| {
            rd.filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "conf") && p.is_file())
                .collect()
        })
        .unwrap_or_default();
    files.sort();
    for path in files {
        match load_file(&path) {
            Ok(s) => entries.push((s.name, s.description)),
            Err(e) => warnings.push(format!("skipping malformed config {}: {e}", path.display())),
        }
    }
    Listing { entries, warnings }
}
