//! Transformation kernel `K(x, t)` on `{0 <= x <= t, x + t <= 2a}`.
//!
//! Everything is done in characteristic coordinates `u = (t+x)/2`,
//! `v = (t-x)/2`, where the domain is the triangle `0 <= v <= u <= a` and the
//! fixed-point map is an iterated pair of one-dimensional integrals:
//!
//! ```text
//! K(u, v) = 1/2 int_u^a Q_f + int_u^a int_0^v w(al, be) K(al, be) dbe dal
//! w(al, be) = q(al - be) - q0(al + be),   q0(x) = -lambda e^{-2x},  q = q0 + Q_f
//! ```
//!
//! The outer integral stops at `a`: for `al > a` the point lies on or past
//! `x + t = 2a`, where `K` vanishes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::Potential;
use crate::quad::{cumulative, cumulative_from_end};

pub const DEFAULT_N: usize = 512;
pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_EXTRA_ITERATIONS: usize = 400;

/// Triangular node set `u_i = i h`, `v_j = j h`, `0 <= j <= i <= N`, `h = a/N`.
/// Node `(i, j)` is `(x, t) = ((i-j) h, (i+j) h)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriGrid {
    pub n: usize,
    pub a: f64,
}

impl TriGrid {
    pub fn new(n: usize, a: f64) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::Validation(format!("kernel grid size must be even and >= 2, got {n}")));
        }
        Ok(TriGrid { n, a })
    }

    pub fn h(&self) -> f64 {
        self.a / self.n as f64
    }

    pub fn len(&self) -> usize {
        (self.n + 1) * (self.n + 2) / 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * (i + 1) / 2 + j
    }

    pub fn xt(&self, i: usize, j: usize) -> (f64, f64) {
        let h = self.h();
        ((i - j) as f64 * h, (i + j) as f64 * h)
    }
}

/// Precomputed weight `w(u_i, v_j)`.
#[derive(Clone, Debug)]
pub struct Weights {
    grid: TriGrid,
    w: Vec<f64>,
    /// `Q_f(u_i)`, left limit at `a`.
    q_u: Vec<f64>,
    /// `1/2 int_{u_i}^a Q_f`.
    k1: Vec<f64>,
}

impl Weights {
    pub fn new(potential: &Potential, grid: TriGrid) -> Self {
        let h = grid.h();
        let lambda = potential.lambda();
        let n = grid.n;
        let q_x: Vec<f64> = (0..=n).map(|d| potential.q(d as f64 * h)).collect();
        let mut w = vec![0.0; grid.len()];
        for i in 0..=n {
            for j in 0..=i {
                let x = (i - j) as f64 * h;
                let t = (i + j) as f64 * h;
                w[grid.idx(i, j)] = q_x[i - j] - lambda * (-2.0 * x).exp() + lambda * (-2.0 * t).exp();
            }
        }
        let k1 = (0..=n).map(|i| 0.5 * potential.integral_from(i as f64 * h)).collect();
        Weights { grid, w, q_u: q_x, k1 }
    }

    /// `M = max_al int_0^al |w(al, be)| dbe`.
    pub fn m_bound(&self) -> f64 {
        let g = self.grid;
        let mut best = 0.0f64;
        let mut row = Vec::new();
        let mut cum = Vec::new();
        for i in 0..=g.n {
            row.clear();
            row.extend((0..=i).map(|j| self.w[g.idx(i, j)].abs()));
            cum.resize(i + 1, 0.0);
            cumulative(&row, g.h(), &mut cum);
            best = best.max(cum[i]);
        }
        best
    }

    /// First Picard term `K_1(u, v) = 1/2 int_u^a Q_f`.
    pub fn first_term(&self) -> Vec<f64> {
        let g = self.grid;
        let mut out = vec![0.0; g.len()];
        for i in 0..=g.n {
            for j in 0..=i {
                out[g.idx(i, j)] = self.k1[i];
            }
        }
        out
    }

    /// Rows of `int_0^{v_j} w(u_i, be) L(u_i, be) dbe`.
    fn inner(&self, l: &[f64]) -> Vec<f64> {
        let g = self.grid;
        let h = g.h();
        let rows: Vec<Vec<f64>> = (0..=g.n)
            .into_par_iter()
            .map(|i| {
                let f: Vec<f64> = (0..=i).map(|j| self.w[g.idx(i, j)] * l[g.idx(i, j)]).collect();
                let mut out = vec![0.0; i + 1];
                cumulative(&f, h, &mut out);
                out
            })
            .collect();
        rows.concat()
    }

    /// Columns of `int_{u_i}^a F(al, v_j) dal` for a node field `F`.
    fn outer(&self, f: &[f64]) -> Vec<f64> {
        let g = self.grid;
        let h = g.h();
        let cols: Vec<Vec<f64>> = (0..=g.n)
            .into_par_iter()
            .map(|j| {
                let col: Vec<f64> = (j..=g.n).map(|i| f[g.idx(i, j)]).collect();
                let mut out = vec![0.0; col.len()];
                cumulative_from_end(&col, h, &mut out);
                out
            })
            .collect();
        let mut out = vec![0.0; g.len()];
        for (j, col) in cols.iter().enumerate() {
            for (k, v) in col.iter().enumerate() {
                out[g.idx(j + k, j)] = *v;
            }
        }
        out
    }

    /// One application of the integral operator.
    pub fn picard_term(&self, prev: &[f64]) -> Vec<f64> {
        self.outer(&self.inner(prev))
    }
}

/// Kernel values and characteristic derivatives on the triangular grid.
#[derive(Clone, Debug)]
pub struct KernelSolution {
    pub grid: TriGrid,
    pub lambda: f64,
    pub p: u32,
    pub fingerprint: [u8; 32],
    pub k: Vec<f64>,
    pub dk_u: Vec<f64>,
    pub dk_v: Vec<f64>,
    /// Analytic `d^p/ds^p K(0, 2a^-)`.
    pub jump_s_p: f64,
    pub iterations: usize,
    pub residual: f64,
}

impl KernelSolution {
    pub fn a(&self) -> f64 {
        self.grid.a
    }

    /// Value at node `(i, j)` in characteristic indices.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.k[self.grid.idx(i, j)]
    }

    pub fn dk_x(&self, i: usize, j: usize) -> f64 {
        let id = self.grid.idx(i, j);
        0.5 * (self.dk_u[id] - self.dk_v[id])
    }

    pub fn dk_t(&self, i: usize, j: usize) -> f64 {
        let id = self.grid.idx(i, j);
        0.5 * (self.dk_u[id] + self.dk_v[id])
    }

    /// `K(0, s)` at `s_i = 2 i h`, `i = 0..=N`.
    pub fn trace(&self) -> Vec<f64> {
        (0..=self.grid.n).map(|i| self.at(i, i)).collect()
    }

    /// `d_x K(0, s)` at the same nodes.
    pub fn trace_dx(&self) -> Vec<f64> {
        (0..=self.grid.n).map(|i| self.dk_x(i, i)).collect()
    }

    /// Spacing of the trace in `s`.
    pub fn trace_step(&self) -> f64 {
        2.0 * self.grid.h()
    }

    /// `K(x, x)`, the `v = 0` edge, at `x = u_i`.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..=self.grid.n).map(|i| self.at(i, 0)).collect()
    }

    /// Residue constant `A = (-1)^p d_s^p K(0, 2a^-) / (p-1)!`.
    pub fn residue_constant(&self) -> f64 {
        let p = self.p as i32;
        let fact: f64 = (1..p).map(|k| k as f64).product();
        (-1f64).powi(p) * self.jump_s_p / fact
    }
}

/// Picard terms `K_1, ..., K_count` (for bound checks).
pub fn picard_terms(potential: &Potential, n: usize, count: usize) -> Result<(Vec<Vec<f64>>, f64)> {
    let grid = TriGrid::new(n, potential.a())?;
    let weights = Weights::new(potential, grid);
    let mut terms = vec![weights.first_term()];
    while terms.len() < count {
        let next = weights.picard_term(terms.last().unwrap());
        terms.push(next);
    }
    Ok((terms, weights.m_bound()))
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Sums the Picard series until the increment drops below `tol`.
pub fn solve_kernel(potential: &Potential, n: usize, tol: f64) -> Result<KernelSolution> {
    if !(tol > 0.0) {
        return Err(Error::Validation("tol must be positive".into()));
    }
    let a = potential.a();
    let grid = TriGrid::new(n, a)?;
    let weights = Weights::new(potential, grid);
    let m_bound = weights.m_bound();
    let settle = (std::f64::consts::E * m_bound * a).ceil() as usize;

    let mut term = weights.first_term();
    let mut k = term.clone();
    let mut norm = sup(&term);
    let mut iterations = 1;
    let mut residual = norm;
    while norm >= tol {
        let next = weights.picard_term(&term);
        let next_norm = sup(&next);
        if iterations > settle && next_norm > 0.5 * norm {
            return Err(Error::Divergence(format!(
                "increment {next_norm:e} after {iterations} terms did not halve (M = {m_bound}, a = {a})"
            )));
        }
        if iterations > settle + MAX_EXTRA_ITERATIONS {
            return Err(Error::Divergence(format!("no convergence after {iterations} terms")));
        }
        for (kv, nv) in k.iter_mut().zip(&next) {
            *kv += nv;
        }
        term = next;
        norm = next_norm;
        residual = next_norm;
        iterations += 1;
    }

    let inner = weights.inner(&k);
    let mut dk_u = vec![0.0; grid.len()];
    for i in 0..=n {
        for j in 0..=i {
            let id = grid.idx(i, j);
            dk_u[id] = -0.5 * weights.q_u[i] - inner[id];
        }
    }
    let wk: Vec<f64> = weights.w.iter().zip(&k).map(|(w, k)| w * k).collect();
    let dk_v = weights.outer(&wk);

    let p = potential.p();
    Ok(KernelSolution {
        grid,
        lambda: potential.lambda(),
        p,
        fingerprint: potential.fingerprint(),
        k,
        dk_u,
        dk_v,
        jump_s_p: analytic_jump(potential),
        iterations,
        residual,
    })
}

/// `d_s^p K(0, 2a^-) = -2^{-(p+1)} Q_f^{(p-1)}(a^-)`; only the first Picard
/// term is non-smooth at the corner.
pub fn analytic_jump(potential: &Potential) -> f64 {
    let p = potential.p() as i32;
    -(0.5f64).powi(p + 1) * potential.jump_value()
}

/// Analytic jump and its finite-difference cross-check.
#[derive(Clone, Copy, Debug)]
pub struct JumpEstimate {
    pub analytic: f64,
    pub numeric: f64,
}

/// Backward `p`-th difference of `K(0, s)` at `s = 2a`, Richardson
/// extrapolated over steps `H, 2H, 4H`.
pub fn jump_estimate(sol: &KernelSolution, p: u32) -> Result<JumpEstimate> {
    let tr = sol.trace();
    let hs = sol.trace_step();
    let last = tr.len() - 1;
    let p = p as usize;
    let diff = |step: usize| -> Option<f64> {
        if p * step > last {
            return None;
        }
        let mut s = 0.0;
        let mut binom = 1.0;
        for r in 0..=p {
            if r > 0 {
                binom *= (p - r + 1) as f64 / r as f64;
            }
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * binom * tr[last - r * step];
        }
        Some(s / (step as f64 * hs).powi(p as i32))
    };
    let (d1, d2, d4) = match (diff(1), diff(2), diff(4)) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(Error::Resolution("kernel grid too coarse for the jump estimate".into())),
    };
    let e1 = 2.0 * d1 - d2;
    let e2 = 2.0 * d2 - d4;
    let numeric = (4.0 * e1 - e2) / 3.0;
    let analytic = sol.jump_s_p;
    let scale = analytic.abs().max(numeric.abs());
    if scale > 1e-14 && (numeric - analytic).abs() > 0.1 * analytic.abs().max(1e-300) {
        return Err(Error::Resolution(format!(
            "jump estimate {numeric:e} disagrees with analytic {analytic:e}; increase N"
        )));
    }
    Ok(JumpEstimate { analytic, numeric })
}

const CACHE_MAGIC: &[u8; 4] = b"RGKC";
const CACHE_VERSION: u32 = 1;

/// Binary cache, little endian:
///
/// ```text
/// magic "RGKC" | version u32 | N u32 | a f64 | lambda f64 | p u32
/// | fingerprint [u8; 32] | jump f64 | iterations u32 | residual f64
/// | K, dK_u, dK_v: (N+1)(N+2)/2 f64 each, rows u_i with j = 0..=i
/// ```
pub fn write_cache(sol: &KernelSolution, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(CACHE_MAGIC)?;
    w.write_u32::<LittleEndian>(CACHE_VERSION)?;
    w.write_u32::<LittleEndian>(sol.grid.n as u32)?;
    w.write_f64::<LittleEndian>(sol.grid.a)?;
    w.write_f64::<LittleEndian>(sol.lambda)?;
    w.write_u32::<LittleEndian>(sol.p)?;
    w.write_all(&sol.fingerprint)?;
    w.write_f64::<LittleEndian>(sol.jump_s_p)?;
    w.write_u32::<LittleEndian>(sol.iterations as u32)?;
    w.write_f64::<LittleEndian>(sol.residual)?;
    for arr in [&sol.k, &sol.dk_u, &sol.dk_v] {
        for &v in arr.iter() {
            w.write_f64::<LittleEndian>(v)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_cache(path: &Path) -> Result<KernelSolution> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(Error::Data(format!("{} is not a kernel cache", path.display())));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != CACHE_VERSION {
        return Err(Error::Data(format!("kernel cache version {version} unsupported")));
    }
    let n = r.read_u32::<LittleEndian>()? as usize;
    let a = r.read_f64::<LittleEndian>()?;
    let lambda = r.read_f64::<LittleEndian>()?;
    let p = r.read_u32::<LittleEndian>()?;
    let mut fingerprint = [0u8; 32];
    r.read_exact(&mut fingerprint)?;
    let jump_s_p = r.read_f64::<LittleEndian>()?;
    let iterations = r.read_u32::<LittleEndian>()? as usize;
    let residual = r.read_f64::<LittleEndian>()?;
    let grid = TriGrid::new(n, a)?;
    let mut read_arr = || -> Result<Vec<f64>> {
        let mut v = vec![0.0; grid.len()];
        r.read_f64_into::<LittleEndian>(&mut v)?;
        Ok(v)
    };
    let k = read_arr()?;
    let dk_u = read_arr()?;
    let dk_v = read_arr()?;
    Ok(KernelSolution { grid, lambda, p, fingerprint, k, dk_u, dk_v, jump_s_p, iterations, residual })
}

/// Loads a cache if it matches the potential and resolution, else solves
/// and writes one.
pub fn solve_cached(potential: &Potential, n: usize, tol: f64, path: &Path) -> Result<KernelSolution> {
    if let Ok(sol) = read_cache(path) {
        if sol.grid.n == n && sol.fingerprint == potential.fingerprint() && sol.residual < tol {
            return Ok(sol);
        }
    }
    let sol = solve_kernel(potential, n, tol)?;
    write_cache(&sol, path)?;
    Ok(sol)
}
