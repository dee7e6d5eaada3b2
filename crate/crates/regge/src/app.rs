//! Subcommand orchestration behind the `regge` binary.
//!
//! Every command writes its artifacts into the output directory plus a
//! `manifest.json`. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | numerical or model error |
//! | 2 | configuration error |
//! | 3 | I/O error |

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use crate::config::RunConfig;
use crate::contour::Rect;
use crate::error::{Error, Result};
use crate::io::{write_json, Table};
use crate::jost::Jost;
use crate::kernel::{jump_estimate, solve_cached, solve_kernel, KernelSolution};
use crate::marchenko::{roundtrip, ForwardOptions, RoundtripOptions};
use crate::model::{build_potential, shifted_momenta, sphere_spectrum, PotentialTable};
use crate::poles::{asymptotics_report, default_region, locate_poles, ReggePole, SearchOptions};
use crate::wt::{build_model, dtn_multipliers};

type C = Complex64;

/// `re0:re1:im0:im1:n`, an `n x n` sampling grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub rect: Rect,
    pub n: usize,
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config { path: "--grid".into(), msg: format!("expected re0:re1:im0:im1:n, got {s}") };
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 5 {
            return Err(bad());
        }
        let v: Vec<f64> = parts[..4].iter().map(|p| p.trim().parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        let n: usize = parts[4].trim().parse().map_err(|_| bad())?;
        if n < 2 {
            return Err(bad());
        }
        let rect = Rect::new(v[0], v[1], v[2], v[3]).map_err(|e| Error::Config { path: "--grid".into(), msg: e.to_string() })?;
        Ok(GridSpec { rect, n })
    }
}

#[derive(Clone, Debug)]
pub enum Command {
    Potential,
    Kernel,
    Jost { grid: GridSpec },
    Poles,
    VerifyAsymptotics,
    WtReconstruct { test_points: Option<PathBuf> },
    Dtn,
    MarchenkoRoundtrip,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Potential => "potential",
            Command::Kernel => "kernel",
            Command::Jost { .. } => "jost",
            Command::Poles => "poles",
            Command::VerifyAsymptotics => "verify-asymptotics",
            Command::WtReconstruct { .. } => "wt-reconstruct",
            Command::Dtn => "dtn",
            Command::MarchenkoRoundtrip => "marchenko-roundtrip",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config_hash: String,
    pub version: String,
    pub artifacts: Vec<String>,
    pub wall_time_s: f64,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } => 2,
        Error::Io(_) => 3,
        _ => 1,
    }
}

/// `{"error": kind, "message": ..., "path": ...}` for stderr.
pub fn error_json(e: &Error) -> serde_json::Value {
    let kind = match e {
        Error::Validation(_) => "validation",
        Error::Model(_) => "model",
        Error::GammaPole(_) => "gamma_pole",
        Error::Domain(_) => "domain",
        Error::Numeric(_) => "numeric",
        Error::Divergence(_) => "divergence",
        Error::Resolution(_) => "resolution",
        Error::BoundaryTooClose { .. } => "boundary_too_close",
        Error::Precision(_) => "precision",
        Error::PoleProximity(_) => "pole_proximity",
        Error::Data(_) => "data",
        Error::Config { .. } => "config",
        Error::Io(_) => "io",
    };
    let mut v = json!({ "error": kind, "message": e.to_string(), "exit_code": exit_code(e) });
    if let Error::Config { path, .. } = e {
        v["path"] = json!(path);
    }
    v
}

struct Writer<'a> {
    dir: &'a Path,
    csv: bool,
    json: bool,
    artifacts: Vec<String>,
}

impl Writer<'_> {
    fn table(&mut self, name: &str, t: &Table) -> Result<()> {
        if self.csv {
            t.write(&self.dir.join(name))?;
            self.artifacts.push(name.into());
        }
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, v: &T) -> Result<()> {
        if self.json {
            write_json(v, &self.dir.join(name))?;
            self.artifacts.push(name.into());
        }
        Ok(())
    }
}

fn c(v: C) -> serde_json::Value {
    json!([v.re, v.im])
}

fn search_options(cfg: &RunConfig) -> SearchOptions {
    SearchOptions { tol: cfg.numerics.pole_tol, max_cells: cfg.numerics.max_cells, ..SearchOptions::default() }
}

fn kernel(cfg: &RunConfig, table: &PotentialTable, dir: &Path) -> Result<KernelSolution> {
    let n = &cfg.numerics;
    if cfg.outputs.kernel_cache {
        solve_cached(&table.potential, n.kernel_n, n.kernel_tol, &dir.join("kernel.bin"))
    } else {
        solve_kernel(&table.potential, n.kernel_n, n.kernel_tol)
    }
}

fn pole_regions(cfg: &RunConfig, table: &PotentialTable, big_a: f64) -> Result<Vec<Rect>> {
    if !cfg.regions.poles.is_empty() {
        return cfg.regions.poles.iter().map(|r| Rect::new(r[0], r[1], r[2], r[3])).collect();
    }
    if table.degenerate || big_a == 0.0 {
        return Ok(vec![Rect::new(-10.5, 1.0, -1.0, 1.0)?]);
    }
    Ok(vec![default_region(table.potential.a(), table.potential.p(), big_a, cfg.numerics.beta_pairs)?])
}

fn find_poles(cfg: &RunConfig, jost: &Jost, regions: &[Rect]) -> Result<Vec<ReggePole>> {
    let opts = search_options(cfg);
    let mut all: Vec<ReggePole> = Vec::new();
    for r in regions {
        for p in locate_poles(r, jost, &opts)?.poles {
            if !all.iter().any(|q| (q.location - p.location).norm() < 1e-8) {
                all.push(p);
            }
        }
    }
    all.sort_by(|x, y| x.location.re.total_cmp(&y.location.re).then(x.location.im.total_cmp(&y.location.im)));
    Ok(all)
}

fn default_test_points() -> Vec<C> {
    (0..10).map(|k| C::from_polar(1.0 + 0.4 * k as f64, 0.3 + 2.0 * PI * k as f64 / 10.0)).collect()
}

/// Runs one subcommand and writes its artifacts and manifest into `out_dir`.
pub fn run(cmd: &Command, cfg: &RunConfig, out_dir: &Path) -> Result<Manifest> {
    let start = Instant::now();
    std::fs::create_dir_all(out_dir)?;
    let formats = &cfg.outputs.formats;
    let mut w = Writer {
        dir: out_dir,
        csv: formats.iter().any(|f| f == "csv"),
        json: formats.iter().any(|f| f == "json"),
        artifacts: Vec::new(),
    };
    let spec = cfg.warp_spec()?;
    let table = build_potential(&spec, cfg.numerics.grid_size)?;
    let pot = &table.potential;
    let meta = json!({
        "n": spec.n,
        "lambda": spec.lambda,
        "a": pot.a(),
        "p": pot.p(),
        "kernel_n": cfg.numerics.kernel_n,
        "kernel_tol": cfg.numerics.kernel_tol,
        "pole_tol": cfg.numerics.pole_tol,
    });

    match cmd {
        Command::Potential => {
            let mut t = Table::new(&["x", "Qf"]);
            for (&x, &q) in table.grid.iter().zip(&table.qf_values) {
                t.push(vec![x.into(), q.into()]);
            }
            w.table("potential.csv", &t)?;
            w.json(
                "potential.json",
                &json!({
                    "run": meta,
                    "jump_order": table.jump_order,
                    "jump_value": table.jump_value,
                    "f0": table.f0,
                    "f0_prime": table.f0_prime,
                    "degenerate": table.degenerate,
                }),
            )?;
        }
        Command::Kernel => {
            let sol = kernel(cfg, &table, out_dir)?;
            if cfg.outputs.kernel_cache {
                w.artifacts.push("kernel.bin".into());
            }
            let mut t = Table::new(&["x", "t", "K", "dKx", "dKt"]);
            let n = sol.grid.n;
            for i in 0..=n {
                for j in 0..=i {
                    let (x, tt) = sol.grid.xt(i, j);
                    t.push(vec![x.into(), tt.into(), sol.at(i, j).into(), sol.dk_x(i, j).into(), sol.dk_t(i, j).into()]);
                }
            }
            w.table("kernel.csv", &t)?;
            let jump = jump_estimate(&sol, pot.p())?;
            w.json(
                "kernel.json",
                &json!({
                    "run": meta,
                    "iterations": sol.iterations,
                    "residual": sol.residual,
                    "jump_analytic": jump.analytic,
                    "jump_numeric": jump.numeric,
                    "residue_constant": sol.residue_constant(),
                }),
            )?;
        }
        Command::Jost { grid } => {
            let sol = kernel(cfg, &table, out_dir)?;
            let jost = Jost::new(&sol);
            let r = grid.rect;
            let n = grid.n;
            let mut t = Table::new(&["re", "im", "psi_re", "psi_im", "abs_psi"]);
            for i in 0..n {
                let im = r.im0 + (r.im1 - r.im0) * i as f64 / (n - 1) as f64;
                for k in 0..n {
                    let re = r.re0 + (r.re1 - r.re0) * k as f64 / (n - 1) as f64;
                    let psi = jost.psi(C::new(re, im));
                    t.push(vec![re.into(), im.into(), psi.re.into(), psi.im.into(), psi.norm().into()]);
                }
            }
            w.table("jost.csv", &t)?;
        }
        Command::Poles | Command::VerifyAsymptotics => {
            let sol = kernel(cfg, &table, out_dir)?;
            let jost = Jost::new(&sol);
            let big_a = if table.degenerate { 0.0 } else { sol.residue_constant() };
            let regions = pole_regions(cfg, &table, big_a)?;
            let poles = find_poles(cfg, &jost, &regions)?;
            if let Command::Poles = cmd {
                let mut t = Table::new(&["re", "im", "multiplicity", "family", "res_re", "res_im", "winding"]);
                for p in &poles {
                    t.push(vec![
                        p.location.re.into(),
                        p.location.im.into(),
                        (p.multiplicity as i64).into(),
                        p.family.as_str().into(),
                        p.residue.re.into(),
                        p.residue.im.into(),
                        p.winding_certificate.into(),
                    ]);
                }
                w.table("poles.csv", &t)?;
                let regions: Vec<[f64; 4]> = regions.iter().map(|r| [r.re0, r.re1, r.im0, r.im1]).collect();
                w.json("poles.json", &json!({ "run": meta, "regions": regions, "residue_constant": big_a, "poles": poles }))?;
            } else {
                let rep = asymptotics_report(&poles, pot.a(), pot.p(), big_a)?;
                let mut t = Table::new(&["k", "alpha", "predicted", "deviation"]);
                for r in &rep.alpha {
                    t.push(vec![(r.k as i64).into(), r.location.into(), (-(r.k as f64)).into(), r.deviation.into()]);
                }
                w.table("alpha.csv", &t)?;
                let mut t = Table::new(&["j", "re", "im", "predicted_re", "predicted_im", "re_residual", "im_gap"]);
                for b in &rep.beta {
                    t.push(vec![
                        b.j.into(),
                        b.location.re.into(),
                        b.location.im.into(),
                        b.predicted.map(|z| z.re).into(),
                        b.predicted.map(|z| z.im).into(),
                        b.re_residual.into(),
                        b.im_gap.into(),
                    ]);
                }
                w.table("beta.csv", &t)?;
                w.json("asymptotics.json", &json!({ "run": meta, "report": rep }))?;
            }
        }
        Command::WtReconstruct { test_points } => {
            let points = match test_points {
                Some(p) => crate::io::read_points(p)?,
                None => default_test_points(),
            };
            let sol = kernel(cfg, &table, out_dir)?;
            let jost = Jost::new(&sol);
            let model = build_model(&jost, cfg.numerics.truncation_radius, &search_options(cfg))?;
            let mut t = Table::new(&["z_re", "z_im", "m_direct_re", "m_direct_im", "m_recon_re", "m_recon_im", "abs_err"]);
            let mut budgets = Vec::new();
            for &z in &points {
                let direct = jost.weyl_m(z);
                let recon = match model.reconstruct_m(z) {
                    Ok(m) => Some(m),
                    Err(Error::PoleProximity(_)) => None,
                    Err(e) => return Err(e),
                };
                let err = direct.zip(recon).map(|(d, r)| (d - r).norm());
                t.push(vec![
                    z.re.into(),
                    z.im.into(),
                    direct.map(|m| m.re).into(),
                    direct.map(|m| m.im).into(),
                    recon.map(|m| m.re).into(),
                    recon.map(|m| m.im).into(),
                    err.into(),
                ]);
                budgets.push(model.error_budget(z));
            }
            w.table("wt_reconstruct.csv", &t)?;
            w.json(
                "wt_reconstruct.json",
                &json!({
                    "run": meta,
                    "truncation_radius": model.truncation_radius,
                    "poles_used": model.poles.len(),
                    "poles_omitted": model.omitted.len(),
                    "m0": c(model.m0),
                    "m0_prime": c(model.m0_prime),
                    "zero_pole_mode": model.zero_pole_mode,
                    "error_budget": budgets,
                }),
            )?;
        }
        Command::Dtn => {
            let sol = kernel(cfg, &table, out_dir)?;
            let jost = Jost::new(&sol);
            let model = build_model(&jost, cfg.numerics.truncation_radius, &search_options(cfg))?;
            let modes = sphere_spectrum(spec.n, cfg.numerics.dtn_modes);
            let mu_sq: Vec<f64> = modes.iter().map(|m| m.0).collect();
            let spectrum = shifted_momenta(&mu_sq, spec.n)?;
            let entries = dtn_multipliers(&jost, Some(&model), &spectrum, table.f0, table.f0_prime, spec.n)?;
            let mut t = Table::new(&["mu_sq", "multiplicity", "z", "dtn_direct", "dtn_reconstructed", "collision"]);
            for e in &entries {
                let mult = modes.iter().find(|m| m.0 == e.mu_sq).map_or(0, |m| m.1);
                t.push(vec![
                    e.mu_sq.into(),
                    (mult as i64).into(),
                    e.z.into(),
                    e.direct.into(),
                    e.reconstructed.into(),
                    (e.collision as i64).into(),
                ]);
            }
            w.table("dtn.csv", &t)?;
            w.json("dtn.json", &json!({ "run": meta, "f0": table.f0, "f0_prime": table.f0_prime, "entries": entries }))?;
        }
        Command::MarchenkoRoundtrip => {
            let a = pot.a();
            let n = &cfg.numerics;
            let opts = RoundtripOptions {
                kernel_n: n.kernel_n,
                forward: ForwardOptions { k_max: cfg.k_max(a), dk: n.dk, ..ForwardOptions::for_support(a) },
                h: n.glm_h,
            };
            let rep = roundtrip(pot, &opts)?;
            let mut t = Table::new(&["x", "Qf_true", "Qf_recovered", "abs_err"]);
            for ((&x, &q), &r) in rep.x.iter().zip(&rep.qf_true).zip(&rep.qf_recovered) {
                t.push(vec![x.into(), q.into(), r.into(), (q - r).abs().into()]);
            }
            w.table("marchenko_roundtrip.csv", &t)?;
            w.json(
                "marchenko_roundtrip.json",
                &json!({
                    "run": meta,
                    "l2_error": rep.l2_error,
                    "linf_error": rep.linf_error,
                    "relative_l2": rep.relative_l2,
                    "k_max": rep.k_max,
                    "dk": rep.dk,
                    "glm_h": rep.h,
                    "x_max": rep.x_max,
                    "tail": rep.tail,
                    "tail_estimate": rep.tail_estimate,
                    "bound_states": rep.bound_states,
                    "max_condition": rep.max_condition,
                }),
            )?;
        }
    }

    let manifest = Manifest {
        command: cmd.name().into(),
        config_hash: cfg.hash(),
        version: env!("CARGO_PKG_VERSION").into(),
        artifacts: w.artifacts,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    write_json(&manifest, &out_dir.join("manifest.json"))?;
    Ok(manifest)
}
