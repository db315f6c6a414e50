//! File formats. CSVs carry a `# config_hash: <hex>` line above the header,
//! JSON documents a `config_hash` field, and `.dat` files are whitespace
//! columns for gnuplot.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use hypercross_core::heat::HeatTraceCurve;
use hypercross_core::spectral::Spectrum;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{as_json, ExperimentConfig};
use crate::LabError;

fn io_err(path: &Path, e: impl std::fmt::Display) -> LabError {
    LabError::Io(format!("{}: {e}", path.display()))
}

/// Where one run writes: `<dir>/<stem>-<hash12>.<ext>`.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub dir: PathBuf,
    pub stem: String,
    pub hash: String,
    pub written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(cfg: &ExperimentConfig, stem: &str) -> Result<Self, LabError> {
        let dir = cfg.out_dir();
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        Ok(Self { dir, stem: stem.to_string(), hash: cfg.hash(), written: Vec::new() })
    }

    pub fn path(&self, suffix: &str, ext: &str) -> PathBuf {
        let tag = &self.hash[..12];
        let name = if suffix.is_empty() {
            format!("{}-{tag}.{ext}", self.stem)
        } else {
            format!("{}-{suffix}-{tag}.{ext}", self.stem)
        };
        self.dir.join(name)
    }

    fn put(&mut self, path: PathBuf, body: &str) -> Result<PathBuf, LabError> {
        fs::write(&path, body).map_err(|e| io_err(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// CSV with the hash line and a header row.
    pub fn csv(&mut self, suffix: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, LabError> {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(header).map_err(|e| LabError::Io(e.to_string()))?;
        for r in rows {
            w.write_record(r).map_err(|e| LabError::Io(e.to_string()))?;
        }
        let data = w.into_inner().map_err(|e| LabError::Io(e.to_string()))?;
        let body = format!("# config_hash: {}\n{}", self.hash, String::from_utf8_lossy(&data));
        let p = self.path(suffix, "csv");
        self.put(p, &body)
    }

    /// Gnuplot data: comment lines, then whitespace-separated columns.
    pub fn dat(&mut self, suffix: &str, columns: &[&str], rows: &[Vec<f64>]) -> Result<PathBuf, LabError> {
        let mut body = format!("# config_hash: {}\n# {}\n", self.hash, columns.join(" "));
        for r in rows {
            let line: Vec<String> = r.iter().map(|v| format!("{v:.17e}")).collect();
            body.push_str(&line.join(" "));
            body.push('\n');
        }
        let p = self.path(suffix, "dat");
        self.put(p, &body)
    }

    /// JSON document with `config_hash` added at the top level.
    pub fn json<T: Serialize>(&mut self, suffix: &str, value: &T) -> Result<PathBuf, LabError> {
        let mut v = serde_json::to_value(value).map_err(|e| LabError::Io(e.to_string()))?;
        if let Value::Object(m) = &mut v {
            m.insert("config_hash".into(), Value::String(self.hash.clone()));
        }
        let body = serde_json::to_string_pretty(&v).map_err(|e| LabError::Io(e.to_string()))? + "\n";
        let p = self.path(suffix, "json");
        self.put(p, &body)
    }

    /// The canonical config next to the outputs, so the run can be repeated
    /// with `--config`.
    pub fn config(&mut self, cfg: &ExperimentConfig) -> Result<PathBuf, LabError> {
        let body = format!("# config_hash: {}\n{}", self.hash, cfg.canonical());
        let p = self.path("config", "txt");
        self.put(p, &body)
    }
}

pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn spectrum_rows(s: &Spectrum) -> Vec<Vec<String>> {
    s.eigenvalues
        .iter()
        .zip(&s.convergence)
        .enumerate()
        .map(|(i, (l, c))| vec![i.to_string(), num(*l), num(*c)])
        .collect()
}

pub const SPECTRUM_HEADER: [&str; 3] = ["index", "eigenvalue", "convergence_estimate"];
pub const CURVE_HEADER: [&str; 4] = ["t", "value", "error", "source"];

pub fn curve_rows(c: &HeatTraceCurve) -> Vec<Vec<String>> {
    c.samples.iter().map(|s| vec![num(s.t), num(s.value), num(s.error), c.source.name().to_string()]).collect()
}

/// Summary document shared by every subcommand.
pub fn summary(cfg: &ExperimentConfig, outputs: Value, elapsed: Duration, files: &[PathBuf]) -> Value {
    let mut inputs: Map<String, Value> = as_json(cfg);
    inputs.remove("out");
    json!({
        "subcommand": cfg.subcommand,
        "inputs": inputs,
        "outputs": outputs,
        "versions": {
            "hypercross-core": hypercross_core_version(),
            "hypercross-lab": env!("CARGO_PKG_VERSION"),
        },
        "seed": cfg.seed,
        "timing": { "wall_seconds": elapsed.as_secs_f64() },
        "files": files.iter().map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()).collect::<Vec<_>>(),
    })
}

fn hypercross_core_version() -> &'static str {
    // both crates share the workspace version
    env!("CARGO_PKG_VERSION")
}

/// Read a two-column numeric CSV, or the eigenvalue column of a spectrum CSV
/// (returned as (λ_j, j+1) counting pairs). Lines starting with `#` are
/// skipped.
pub fn read_xy(path: &Path) -> Result<(Vec<f64>, Vec<f64>), LabError> {
    let body = fs::read_to_string(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
    let cleaned: String = body.lines().filter(|l| !l.trim_start().starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(cleaned.as_bytes());
    let headers = r.headers().map_err(|e| LabError::Config(e.to_string()))?.clone();
    let spectrum = headers.iter().any(|h| h == "eigenvalue");
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| LabError::Config(e.to_string()))?;
        let field = |j: usize| -> Result<f64, LabError> {
            rec.get(j)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| LabError::Config(format!("{}: row {} column {} is not a number", path.display(), i + 1, j + 1)))
        };
        if spectrum {
            let col = headers.iter().position(|h| h == "eigenvalue").unwrap_or(1);
            xs.push(field(col)?);
            ys.push((i + 1) as f64);
        } else {
            xs.push(field(0)?);
            ys.push(field(1)?);
        }
    }
    Ok((xs, ys))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_carries_the_hash() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::default().apply([("out", dir.path().to_str().unwrap())]).unwrap();
        let mut a = Artifacts::new(&cfg, "eig").unwrap();
        let s = Spectrum::exact(vec![1.0, 3.0]).unwrap();
        let p = a.csv("", &SPECTRUM_HEADER, &spectrum_rows(&s)).unwrap();
        let body = fs::read_to_string(&p).unwrap();
        let mut lines = body.lines();
        assert_eq!(lines.next().unwrap(), format!("# config_hash: {}", cfg.hash()));
        assert_eq!(lines.next().unwrap(), "index,eigenvalue,convergence_estimate");
        let (x, y) = read_xy(&p).unwrap();
        assert_eq!(x, vec![1.0, 3.0]);
        assert_eq!(y, vec![1.0, 2.0]);
    }
}
