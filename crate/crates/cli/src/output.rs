use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance stamped on every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Stamp {
    pub scenario: String,
    pub scenario_hash: String,
    pub version: &'static str,
}

/// Formats a double with 17 significant digits.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    format!("{x:.16e}")
}

/// CSV text: two `#` provenance lines, a header row, then the rows.
pub fn csv(stamp: &Stamp, header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# wsmorse {} scenario={}", stamp.version, stamp.scenario);
    let _ = writeln!(out, "# scenario_hash={}", stamp.scenario_hash);
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| num(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    #[serde(flatten)]
    stamp: &'a Stamp,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON of `body` with the stamp fields merged in at the top level.
pub fn json<T: Serialize>(stamp: &Stamp, body: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Stamped { stamp, body }).expect("serializable record");
    s.push('\n');
    s
}

/// Output directory for one scenario.
pub struct OutDir {
    pub path: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path, scenario: &str) -> std::io::Result<Self> {
        let path = root.join(scenario);
        fs::create_dir_all(&path)?;
        Ok(Self { path })
    }

    pub fn write(&self, name: &str, contents: &str) -> std::io::Result<PathBuf> {
        let p = self.path.join(name);
        fs::write(&p, contents)?;
        Ok(p)
    }
}
