//! Shared inputs for the benchmarks: the fixture corpus shipped with the
//! core crate.

use std::fs;
use std::path::{Path, PathBuf};

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

/// Every `.sol` file under the fixture directory as `(path, source)`,
/// sorted by path.
pub fn corpus() -> Vec<(String, String)> {
    let mut out = Vec::new();
    collect(&fixtures_dir(), &mut out);
    out.sort();
    out
}

fn collect(dir: &Path, out: &mut Vec<(String, String)>) {
    let Ok(entries) = fs::read_dir(dir) else { return };
    for entry in entries.flatten() {
        let path = entry.path();
        if path.is_dir() {
            collect(&path, out);
        } else if path.extension().is_some_and(|e| e == "sol") {
            if let Ok(src) = fs::read_to_string(&path) {
                out.push((path.display().to_string(), src));
            }
        }
    }
}
