//! Run configuration (TOML) with dotted-key overrides.
//!
//! ```toml
//! [warp]
//! n = 3
//! lambda = 1.0
//! p = 1
//! breakpoints = [0.0, 1.0]
//! coefficients = [[0.0, 0.0367879, -0.0735759, 0.0367879]]
//!
//! [numerics]
//! kernel_n = 512
//!
//! [outputs]
//! dir = "out"
//! ```
//!
//! `coefficients[i]` are the Taylor coefficients of `V` about
//! `breakpoints[i]`. Instead of them, `bump = c` (with `a`) gives
//! `V = c x (a - x)^{p+1}`. Every `numerics` key has a default.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use crate::contour::Rect;
use crate::error::{Error, Result};
use crate::model::{PiecewisePoly, WarpSpec};

/// Environment variable overriding `outputs.dir`.
pub const OUT_DIR_ENV: &str = "REGGE_OUT_DIR";

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarpConfig {
    pub n: u32,
    pub lambda: f64,
    pub p: u32,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub breakpoints: Option<Vec<f64>>,
    #[serde(default)]
    pub coefficients: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub bump: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub grid_size: usize,
    pub kernel_n: usize,
    pub kernel_tol: f64,
    pub pole_tol: f64,
    pub max_cells: usize,
    pub beta_pairs: u32,
    pub truncation_radius: f64,
    /// `None`: `200 / a`.
    pub k_max: Option<f64>,
    pub dk: f64,
    pub glm_h: f64,
    /// Sphere modes `k = 0..=dtn_modes` for the DtN map.
    pub dtn_modes: u32,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            grid_size: 256,
            kernel_n: crate::kernel::DEFAULT_N,
            kernel_tol: crate::kernel::DEFAULT_TOL,
            pole_tol: 1e-10,
            max_cells: 20_000,
            beta_pairs: 8,
            truncation_radius: 20.0,
            k_max: None,
            dk: 0.025,
            glm_h: 0.02,
            dtn_modes: 4,
            threads: 0,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Regions {
    /// `[re0, re1, im0, im1]`; empty means the predictor-based default.
    pub poles: Vec<[f64; 4]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub dir: PathBuf,
    /// Subset of `csv`, `json`.
    pub formats: Vec<String>,
    /// Reuse a binary kernel cache in the output directory.
    pub kernel_cache: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs { dir: PathBuf::from("out"), formats: vec!["csv".into(), "json".into()], kernel_cache: true }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub warp: WarpConfig,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub regions: Regions,
    #[serde(default)]
    pub outputs: Outputs,
}

fn config_err(path: &str, msg: impl Into<String>) -> Error {
    Error::Config { path: path.into(), msg: msg.into() }
}

/// Apply `key.path=value` overrides to a parsed TOML document. Values are
/// read as TOML literals, falling back to strings.
pub fn apply_overrides(doc: &mut toml::Value, overrides: &[String]) -> Result<()> {
    for o in overrides {
        let (key, raw) = o.split_once('=').ok_or_else(|| config_err(o, "override must look like key.path=value"))?;
        let value: toml::Value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
            Ok(mut t) => t.remove("v").unwrap(),
            Err(_) => toml::Value::String(raw.to_string()),
        };
        let mut cur = &mut *doc;
        let parts: Vec<&str> = key.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            let table = cur.as_table_mut().ok_or_else(|| config_err(key, "path runs through a non-table value"))?;
            if i + 1 == parts.len() {
                table.insert(part.to_string(), value.clone());
                break;
            }
            cur = table.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        }
    }
    Ok(())
}

impl RunConfig {
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: toml::Value = toml::from_str(text).map_err(|e| config_err("", e.message().to_string()))?;
        apply_overrides(&mut doc, overrides)?;
        let cfg: RunConfig = serde_path_to_error::deserialize(doc).map_err(|e| {
            let mut path = e.path().to_string();
            let msg = e.into_inner().to_string();
            let msg = msg.lines().next().unwrap_or_default().to_string();
            if let Some(field) = msg.strip_prefix("missing field `").and_then(|m| m.split('`').next()) {
                path = if path == "." { field.to_string() } else { format!("{path}.{field}") };
            }
            config_err(&path, msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, overrides)
    }

    pub fn validate(&self) -> Result<()> {
        let n = &self.numerics;
        let positive = [
            ("numerics.kernel_tol", n.kernel_tol),
            ("numerics.pole_tol", n.pole_tol),
            ("numerics.truncation_radius", n.truncation_radius),
            ("numerics.dk", n.dk),
            ("numerics.glm_h", n.glm_h),
        ];
        for (path, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_err(path, format!("must be positive, got {v}")));
            }
        }
        if let Some(k) = n.k_max {
            if !(k > 0.0) {
                return Err(config_err("numerics.k_max", format!("must be positive, got {k}")));
            }
        }
        if n.kernel_n < 128 || n.kernel_n % 2 == 1 {
            return Err(config_err("numerics.kernel_n", "must be even and at least 128"));
        }
        if n.grid_size < 64 {
            return Err(config_err("numerics.grid_size", "must be at least 64"));
        }
        for (i, r) in self.regions.poles.iter().enumerate() {
            Rect::new(r[0], r[1], r[2], r[3]).map_err(|e| config_err(&format!("regions.poles[{i}]"), e.to_string()))?;
        }
        for f in &self.outputs.formats {
            if f != "csv" && f != "json" {
                return Err(config_err("outputs.formats", format!("unknown format {f}")));
            }
        }
        self.warp_spec()?;
        Ok(())
    }

    pub fn warp_spec(&self) -> Result<WarpSpec> {
        let w = &self.warp;
        let v = match (&w.bump, &w.breakpoints, &w.coefficients) {
            (Some(c), None, None) => {
                let a = w.a.ok_or_else(|| config_err("warp.a", "required with warp.bump"))?;
                WarpSpec::bump(w.n, w.lambda, a, w.p, *c).v
            }
            (None, Some(b), Some(c)) => {
                let v = PiecewisePoly::new(b.clone(), c.clone()).map_err(|e| config_err("warp.coefficients", e.to_string()))?;
                if let Some(a) = w.a {
                    if (a - v.support_end()).abs() > 1e-12 {
                        return Err(config_err("warp.a", "does not match the last breakpoint"));
                    }
                }
                v
            }
            (None, None, _) => return Err(config_err("warp.breakpoints", "missing field (or give warp.bump)")),
            (None, _, None) => return Err(config_err("warp.coefficients", "missing field (or give warp.bump)")),
            _ => return Err(config_err("warp.bump", "give either bump or breakpoints/coefficients")),
        };
        let spec = WarpSpec { n: w.n, lambda: w.lambda, p: w.p, v };
        spec.validate().map_err(|e| config_err("warp", e.to_string()))?;
        Ok(spec)
    }

    /// Flag, then environment, then config.
    pub fn out_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(f) = flag {
            return f.to_path_buf();
        }
        if let Ok(env) = std::env::var(OUT_DIR_ENV) {
            if !env.is_empty() {
                return PathBuf::from(env);
            }
        }
        self.outputs.dir.clone()
    }

    pub fn k_max(&self, a: f64) -> f64 {
        self.numerics.k_max.unwrap_or(200.0 / a)
    }

    /// SHA-256 of the canonical JSON form, excluding the output location.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.outputs.dir = PathBuf::new();
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "[warp]\nn = 3\nlambda = 1.0\np = 1\na = 1.0\nbump = 0.3\n";

    #[test]
    fn defaults_and_overrides() {
        let c = RunConfig::from_toml_str(BASE, &["numerics.kernel_n=256".into()]).unwrap();
        assert_eq!(c.numerics.kernel_n, 256);
        assert_eq!(c.numerics.glm_h, 0.02);
        assert!((c.warp_spec().unwrap().a() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn missing_key_reports_path() {
        let err = RunConfig::from_toml_str("[warp]\nn = 3\np = 1\n", &[]).unwrap_err();
        match err {
            Error::Config { path, msg } => assert!(path == "warp.lambda" && msg.contains("lambda"), "{path}: {msg}"),
            e => panic!("{e}"),
        }
        let err = RunConfig::from_toml_str(BASE, &["numerics.glm_h=-1".into()]).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "numerics.glm_h"));
    }

    #[test]
    fn hash_ignores_output_dir() {
        let a = RunConfig::from_toml_str(BASE, &[]).unwrap();
        let b = RunConfig::from_toml_str(BASE, &["outputs.dir=\"elsewhere\"".into()]).unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig::from_toml_str(BASE, &["numerics.dk=0.05".into()]).unwrap();
        assert_ne!(a.hash(), c.hash());
    }
}
