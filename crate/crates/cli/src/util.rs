//! Shared CLI plumbing: atomic output files and small parsers.

use std::io::Write;
use std::path::Path;

use crate::commands::{runtime, CmdError};

/// Write via a temporary file in the target directory plus rename, so
/// partially written outputs are never observed.
pub fn atomic_write(path: &Path, content: &str) -> Result<(), CmdError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir),
        None => tempfile::NamedTempFile::new_in("."),
    }
    .map_err(|e| runtime(format!("cannot create temporary file: {e}")))?;
    tmp.write_all(content.as_bytes())
        .map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// Parse a comma-separated list of floats (e.g. `--x "0.5,-1"`).
pub fn parse_vector(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().map_err(|_| format!("bad number `{t}`"))
        })
        .collect()
}

/// Parse a comma-separated list of integer seeds; empty input means no seeds.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<u64>().map_err(|_| format!("bad seed `{t}`"))
        })
        .collect()
}

/// Parse a radial profile knot list `t:jump,t:jump,...`.
pub fn parse_knots(s: &str) -> Result<Vec<(f64, f64)>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|pair| {
            let (t, j) = pair
                .split_once(':')
                .ok_or_else(|| format!("expected t:jump, found `{pair}`"))?;
            let t = t.trim().parse::<f64>().map_err(|_| format!("bad knot `{t}`"))?;
            let j = j.trim().parse::<f64>().map_err(|_| format!("bad jump `{j}`"))?;
            Ok((t, j))
        })
        .collect()
}
