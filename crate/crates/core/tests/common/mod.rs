#![allow(dead_code)]

pub mod dot;
pub mod fuzz;
pub mod gen;

use std::path::{Path, PathBuf};

use smartgraph_core::{parse_source, DetectorId, SourceUnit};

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Every `.sol` file under fixtures/, sorted by path.
pub fn corpus() -> Vec<(PathBuf, String)> {
    fn walk(dir: &Path, out: &mut Vec<PathBuf>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(&path, out);
            } else if path.extension().is_some_and(|e| e == "sol") {
                out.push(path);
            }
        }
    }
    let mut paths = Vec::new();
    walk(&fixtures_dir(), &mut paths);
    paths.sort();
    paths.into_iter().map(|p| (p.clone(), read(&p))).collect()
}

pub fn rel(path: &Path) -> String {
    path.strip_prefix(fixtures_dir()).unwrap_or(path).display().to_string()
}

pub struct DetectorCase {
    pub name: String,
    pub dir: PathBuf,
    pub detector: DetectorId,
}

impl DetectorCase {
    pub fn source(&self, file: &str) -> String {
        read(&self.dir.join(file))
    }

    pub fn baseline(&self) -> Option<SourceUnit> {
        let path = self.dir.join("baseline.sol");
        path.exists().then(|| parse_source(&read(&path), &path.display().to_string()))
    }
}

/// fixtures/detectors/dNN_*, one per detector.
pub fn detector_cases() -> Vec<DetectorCase> {
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(fixtures_dir().join("detectors"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    dirs.into_iter()
        .map(|dir| {
            let name = dir.file_name().unwrap().to_string_lossy().into_owned();
            let n: u32 = name[1..3].parse().unwrap();
            let detector = format!("D{n}").parse().unwrap();
            DetectorCase { name, dir, detector }
        })
        .collect()
}

/// `Contract.function: a, b` lines of a `.writes` file.
pub fn parse_writes(text: &str) -> Vec<(String, String, Vec<String>)> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (owner, vars) = l.split_once(':').expect("`Contract.function: vars`");
            let (c, f) = owner.trim().split_once('.').expect("`Contract.function`");
            let vars = vars.split(',').map(str::trim).filter(|v| !v.is_empty()).map(String::from).collect();
            (c.to_string(), f.to_string(), vars)
        })
        .collect()
}
