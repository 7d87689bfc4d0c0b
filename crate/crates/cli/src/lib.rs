//! Command-line front end: reads a `key = value` run configuration and
//! writes CSV tables of simulated and analytic typical-user distributions.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod units;

use std::io::Write;
use std::path::Path;

pub use commands::Table;
pub use config::{ConfigError, PatternKey, RunConfig};

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so `path` either keeps its old contents or gets all of the
/// new ones.
pub fn write_atomically(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
