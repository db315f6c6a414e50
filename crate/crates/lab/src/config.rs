//! Experiment configuration: a flat `key = value` file merged with
//! command-line overrides, hashed in canonical form.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

use crate::LabError;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "HYPERCROSS_OUT";

/// Every parameter of every subcommand. Keys in config files and on the
/// command line are the field names; `-` and `_` are interchangeable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Subcommand the config was written for. Default: empty.
    pub subcommand: String,
    /// Exponent vector; a single entry means −d²/dx² + g|x|^γ. Default 2,1.
    pub alpha: Vec<f64>,
    /// g in the one-dimensional potential. Default 1.
    pub coupling: f64,
    /// Power j in −Δ + (Π|x_i|^{α_i})^j. Default 1.
    pub power: f64,
    /// Number of eigenvalues. Default 20.
    pub k: usize,
    /// Energy window top; when set, every eigenvalue below it is computed
    /// on one planned box instead of refining for `k` levels. Default unset.
    pub e_max: Option<f64>,
    /// Grid spacing h = h_coef/√E_max. Default 0.3.
    pub h_coef: f64,
    /// Box faces sit where the channel threshold is box_factor·E_max. Default 2.
    pub box_factor: f64,
    /// Nodes with V > cap_factor·E_max are dropped. Default 8.
    pub cap_factor: f64,
    /// Largest grid the eigensolver will build. Default 40 000 000.
    pub node_cap: usize,
    /// Relative convergence tolerance for eigenvalues. Default 1e-6.
    pub rel_tol: f64,
    /// Grid halvings allowed by the refinement loop. Default 6.
    pub max_refinements: usize,
    /// Times for heat traces. Default 0.2,0.5,1.
    pub t: Vec<f64>,
    /// Eigen method (`auto`, `fd`, `shooting`) or trace method (`spectrum`,
    /// `sliced-bread`, `sliced-gt`, `classical`, `separable`, `fk`, `chain`).
    /// Default `auto`, which means `shooting` in 1D and `chain` for traces.
    pub method: String,
    /// Monte Carlo paths. Default 100 000.
    pub paths: usize,
    /// Time steps per bridge. Default 128.
    pub steps: usize,
    /// RNG seed. Default 1.
    pub seed: u64,
    /// Midpoint cells per axis for Feynman–Kac; unset picks paths/8 cells.
    pub cells: Option<usize>,
    /// `none`, `xn-band` or `all-band`. Default `none`.
    pub confinement: String,
    /// Constant in κ(t); unset means n.
    pub kappa_c: Option<f64>,
    /// Theorem for `constants`. Default T7.
    pub theorem: String,
    /// Dimension for equal-exponent theorems. Default 2.
    pub n: usize,
    /// Common exponent for equal-exponent theorems. Default 1.
    pub alpha0: f64,
    /// Spectral zeta value for the zeta-type theorems; computed when unset.
    pub zeta_value: Option<f64>,
    /// Log-volume integrand: `exp`, `gauss` or `cubic`. Default `exp`.
    pub integrand: String,
    /// Log-volume cutoff a. Default 1.
    pub a: f64,
    /// Log-volume left side: `quadrature` or `mc`. Default `quadrature`.
    pub lhs: String,
    /// Monte Carlo samples for the log-volume left side. Default 200 000.
    pub samples: usize,
    /// Zeta argument. Default 2.
    pub s: f64,
    /// Zeta tail: `none`, `weyl-power`, `weyl-power-log`. Default `weyl-power`.
    pub tail: String,
    /// CSV for `fit`: two numeric columns (x, y) or a spectrum file. Default unset.
    pub input: Option<String>,
    /// `counting` or `heat`. Default `counting`.
    pub regime: String,
    /// Candidate log powers. Default 0,1.
    pub d: Vec<u32>,
    /// Fit window lo,hi; empty means everything. Default empty.
    pub window: Vec<f64>,
    /// Homotopy powers. Default 1,2,4,8,16,32,64.
    pub j: Vec<f64>,
    /// Acceptance suite: `primary` (all criteria) or ids such as `2,12`.
    /// Default `primary`.
    pub suite: String,
    /// Output directory; falls back to $HYPERCROSS_OUT, then ./hypercross-out.
    /// Not part of the config hash.
    pub out: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            subcommand: String::new(),
            alpha: vec![2.0, 1.0],
            coupling: 1.0,
            power: 1.0,
            k: 20,
            e_max: None,
            h_coef: 0.3,
            box_factor: 2.0,
            cap_factor: 8.0,
            node_cap: 40_000_000,
            rel_tol: 1e-6,
            max_refinements: 6,
            t: vec![0.2, 0.5, 1.0],
            method: "auto".into(),
            paths: 100_000,
            steps: 128,
            seed: 1,
            cells: None,
            confinement: "none".into(),
            kappa_c: None,
            theorem: "T7".into(),
            n: 2,
            alpha0: 1.0,
            zeta_value: None,
            integrand: "exp".into(),
            a: 1.0,
            lhs: "quadrature".into(),
            samples: 200_000,
            s: 2.0,
            tail: "weyl-power".into(),
            input: None,
            regime: "counting".into(),
            d: vec![0, 1],
            window: Vec::new(),
            j: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            suite: "primary".into(),
            out: None,
        }
    }
}

fn bad(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

fn parse_number(key: &str, raw: &str, integer: bool) -> Result<Value, LabError> {
    let raw = raw.trim();
    if integer {
        let v: u64 = raw.replace('_', "").parse().map_err(|_| bad(format!("{key}: expected an integer, got {raw:?}")))?;
        return Ok(Value::Number(v.into()));
    }
    let v: f64 = raw.parse().map_err(|_| bad(format!("{key}: expected a number, got {raw:?}")))?;
    Number::from_f64(v).map(Value::Number).ok_or_else(|| bad(format!("{key}: {raw} is not finite")))
}

fn parse_list(key: &str, raw: &str, integer: bool) -> Result<Value, LabError> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(Value::Array(Vec::new()));
    }
    raw.split(',').map(|p| parse_number(key, p, integer)).collect::<Result<Vec<_>, _>>().map(Value::Array)
}

/// Option fields take their type from this table since their default is null.
fn optional_kind(key: &str) -> Option<&'static str> {
    match key {
        "e_max" | "kappa_c" | "zeta_value" => Some("float"),
        "cells" => Some("int"),
        "input" | "out" => Some("string"),
        _ => None,
    }
}

/// Integer-typed list fields.
fn integer_list(key: &str) -> bool {
    key == "d"
}

impl ExperimentConfig {
    /// Apply `key = value` pairs on top of `self`.
    pub fn apply<'a, I>(&self, pairs: I) -> Result<Self, LabError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let Value::Object(mut map) = serde_json::to_value(self).map_err(|e| bad(e.to_string()))? else {
            unreachable!("config serializes to an object")
        };
        for (key, raw) in pairs {
            let key = key.trim().replace('-', "_");
            let Some(current) = map.get(&key) else {
                return Err(bad(format!("unknown key {key:?}")));
            };
            let value = match current {
                _ if optional_kind(&key).is_some() && matches!(raw.trim(), "" | "none") => Value::Null,
                Value::String(_) => Value::String(raw.trim().to_string()),
                Value::Number(n) => parse_number(&key, raw, n.is_u64())?,
                Value::Array(_) => parse_list(&key, raw, integer_list(&key))?,
                Value::Null => match (optional_kind(&key), raw.trim()) {
                    (Some("float"), r) => parse_number(&key, r, false)?,
                    (Some("int"), r) => parse_number(&key, r, true)?,
                    (_, r) => Value::String(r.to_string()),
                },
                Value::Bool(_) => Value::Bool(raw.trim().parse().map_err(|_| bad(format!("{key}: expected true/false")))?),
                Value::Object(_) => return Err(bad(format!("{key} is not a scalar"))),
            };
            map.insert(key, value);
        }
        let cfg: Self = serde_json::from_value(Value::Object(map)).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parse a config file body: one `key = value` per line, `#` comments.
    pub fn parse_file_body(&self, body: &str) -> Result<Self, LabError> {
        let mut pairs = Vec::new();
        for (no, line) in body.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| bad(format!("line {}: expected key = value", no + 1)))?;
            pairs.push((k.trim(), v.trim()));
        }
        self.apply(pairs)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let body = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::default().parse_file_body(&body)
    }

    fn validate(&self) -> Result<(), LabError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(bad(format!("{name} must be positive")))
            }
        };
        if self.alpha.is_empty() || self.alpha.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(bad("alpha must be a nonempty list of positive exponents"));
        }
        positive("coupling", self.coupling)?;
        positive("power", self.power)?;
        positive("h_coef", self.h_coef)?;
        positive("rel_tol", self.rel_tol)?;
        positive("a", self.a)?;
        positive("s", self.s)?;
        positive("alpha0", self.alpha0)?;
        if self.box_factor < 1.0 {
            return Err(bad("box_factor must be at least 1"));
        }
        if self.t.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(bad("every t must be positive"));
        }
        if let Some(e) = self.e_max {
            positive("e_max", e)?;
        }
        if !(self.window.is_empty() || self.window.len() == 2 && self.window[0] < self.window[1]) {
            return Err(bad("window must be empty or lo,hi with lo < hi"));
        }
        if self.k == 0 {
            return Err(bad("k must be at least 1"));
        }
        Ok(())
    }

    /// `key=value` lines in key order, excluding `out`. The hash is taken
    /// over exactly this text.
    pub fn canonical(&self) -> String {
        let Ok(Value::Object(map)) = serde_json::to_value(self) else { unreachable!() };
        let sorted: BTreeMap<String, Value> = map.into_iter().filter(|(k, _)| k != "out").collect();
        let mut s = String::new();
        for (k, v) in sorted {
            s.push_str(&k);
            s.push('=');
            s.push_str(&render(&v));
            s.push('\n');
        }
        s
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    /// Output directory: the `out` key, then $HYPERCROSS_OUT, then
    /// ./hypercross-out.
    pub fn out_dir(&self) -> PathBuf {
        if let Some(o) = &self.out {
            return PathBuf::from(o);
        }
        match std::env::var_os(OUT_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => PathBuf::from("hypercross-out"),
        }
    }

    /// The mode as a lowercase string, with `auto` resolved for the caller.
    pub fn method_or(&self, auto: &str) -> String {
        if self.method == "auto" {
            auto.to_string()
        } else {
            self.method.to_ascii_lowercase()
        }
    }
}

fn render(v: &Value) -> String {
    match v {
        Value::Null => "none".into(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(render).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

/// The config as a JSON object, for summaries.
pub fn as_json(cfg: &ExperimentConfig) -> Map<String, Value> {
    match serde_json::to_value(cfg) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_are_typed() {
        let c = ExperimentConfig::default()
            .apply([("alpha", "1,1"), ("k", "40"), ("e-max", "12.5"), ("t", "0.1, 0.3"), ("d", "1")])
            .unwrap();
        assert_eq!(c.alpha, vec![1.0, 1.0]);
        assert_eq!(c.k, 40);
        assert_eq!(c.e_max, Some(12.5));
        assert_eq!(c.t, vec![0.1, 0.3]);
        assert_eq!(c.d, vec![1]);
        assert!(ExperimentConfig::default().apply([("k", "4.5")]).is_err());
        assert!(ExperimentConfig::default().apply([("nope", "1")]).is_err());
        assert!(ExperimentConfig::default().apply([("alpha", "2,-1")]).is_err());
    }

    #[test]
    fn file_round_trip_keeps_the_hash() {
        let c = ExperimentConfig::default().apply([("alpha", "3,2,1"), ("seed", "7"), ("cells", "20")]).unwrap();
        let back = ExperimentConfig::default().parse_file_body(&c.canonical()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        assert_ne!(c.hash(), ExperimentConfig::default().hash());
    }

    #[test]
    fn out_dir_is_not_hashed() {
        let c = ExperimentConfig::default();
        let d = c.apply([("out", "/tmp/x")]).unwrap();
        assert_eq!(c.hash(), d.hash());
        assert_eq!(d.out_dir(), PathBuf::from("/tmp/x"));
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = ExperimentConfig::default().parse_file_body("# header\n\nk = 5  # five\nmethod=fd\n").unwrap();
        assert_eq!((c.k, c.method.as_str()), (5, "fd"));
        assert!(ExperimentConfig::default().parse_file_body("k 5").is_err());
    }
}
