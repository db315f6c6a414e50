//! Feynman–Kac estimates of Z(t) = Tr e^{−t(−Δ+V)}.
//!
//! Convention: b is standard Brownian motion (variance s at time s), bridges
//! run over [0, 2t], and
//!
//!   Z(t) = (4πt)^{−n/2} ∫ E_{x,x;2t}[exp(−½∫_0^{2t} V(b(s)) ds)] dx.
//!
//! This is e^{tΔ} written with the clock doubled, which the harmonic
//! oscillator pins: its estimate reproduces 1/(2 sinh t).
//!
//! The x-integral is a midpoint rule on the positive orthant (V is even in
//! each coordinate) in coordinates x = sinh(u). Paths are dealt out to the
//! cells in turn; path p uses ChaCha stream p of the seed, so the confined
//! estimators see exactly the same bridges as [`fk_trace`] and lie below it
//! path by path.

mod bridge;
mod logvol;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::discretize::Problem;
use crate::error::{invalid, Error, Result};
use crate::numeric::pairwise_sum;
use crate::spectral::{abs_pow, ExponentVector};

pub use bridge::{exit_probability, sample_bridges, ExitReport, PathEnsemble};
pub use logvol::{log_volume_lhs, log_volume_rhs, LhsMethod};

/// Tag written next to every estimate.
pub const CONVENTION: &str = "bm-variance-s;horizon-2t;half-V;prefactor-(4 pi t)^(-n/2)";

/// The potential being traced.
#[derive(Debug, Clone, PartialEq)]
pub enum FkPotential {
    /// g|x|^γ on the line.
    Power { gamma: f64, coupling: f64 },
    /// Π|x_i|^{α_i}.
    Product(ExponentVector),
}

impl FkPotential {
    pub fn dim(&self) -> usize {
        match self {
            FkPotential::Power { .. } => 1,
            FkPotential::Product(a) => a.n(),
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            FkPotential::Power { gamma, coupling } => coupling * abs_pow(x[0], *gamma),
            FkPotential::Product(a) => a.potential(x),
        }
    }

    /// Half-width per axis beyond which e^{−tV} is negligible even where
    /// the other coordinates sit in the transverse ground state.
    fn extents(&self, t: f64) -> Result<Vec<f64>> {
        let spread = 6.0 * libm::sqrt(t);
        match self {
            FkPotential::Power { gamma, coupling } => Ok(vec![libm::pow(40.0 / (t * coupling), 1.0 / gamma) + spread]),
            FkPotential::Product(a) if a.n() == 1 => Ok(vec![libm::pow(40.0 / t, 1.0 / a.alphas()[0]) + spread]),
            FkPotential::Product(a) => {
                let laws = Problem::Product { alpha: a.clone(), power: 1.0 }.channel_laws()?;
                Ok(laws.iter().map(|(lam, e)| libm::pow(40.0 / (t * lam), 1.0 / e) + spread).collect())
            }
        }
    }
}

/// Sampling parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct McParams {
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
    /// Midpoint cells per axis; None picks about paths/8 cells in total.
    pub cells_per_axis: Option<usize>,
}

impl Default for McParams {
    fn default() -> Self {
        Self { paths: 100_000, steps: 64, seed: 1, cells_per_axis: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FkEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub t: f64,
    pub paths: usize,
    pub steps: usize,
    pub seed: u64,
    /// Fraction of paths that survived the confinement test.
    pub paths_kept: f64,
    /// Share of the estimate carried by the outermost layer of cells.
    pub truncation: f64,
    pub cells: usize,
    pub convention: String,
}

/// Which paths and points the lower bounds keep.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ConfinementMode {
    None,
    /// Keep paths with max|b_n − x_n| ≤ 1; use (|x_n|+1)^{α_n} for |b_n|^{α_n}.
    XnBand,
    /// Keep points with every |x_i| ≥ √t (ln t)² and paths with every
    /// max|b_i − x_i| ≤ √t|ln t|; bound V(b) by κ-corrected V(x).
    AllBand,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfinementPolicy {
    pub mode: ConfinementMode,
    /// c in κ(t) = exp(c/|ln t|).
    pub c: f64,
}

impl ConfinementPolicy {
    pub fn new(mode: ConfinementMode, n: usize) -> Self {
        Self { mode, c: n as f64 }
    }
}

/// κ(t) = exp(c/|ln t|), which exceeds 1 for t < 1 and tends to 1 as t → 0.
pub fn kappa(t: f64, c: f64) -> f64 {
    libm::exp(c / libm::fabs(libm::log(t)))
}

struct Grid {
    n: usize,
    m: usize,
    /// Per axis: midpoints and weights in x.
    nodes: Vec<Vec<(f64, f64)>>,
}

impl Grid {
    fn new(extents: &[f64], m: usize) -> Self {
        let nodes = extents
            .iter()
            .map(|&x_max| {
                let u_max = libm::asinh(x_max);
                let du = u_max / m as f64;
                (0..m)
                    .map(|i| {
                        let u = (i as f64 + 0.5) * du;
                        (libm::sinh(u), libm::cosh(u) * du)
                    })
                    .collect()
            })
            .collect();
        Self { n: extents.len(), m, nodes }
    }

    fn cells(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    /// Midpoint, weight and whether the cell touches the outer face.
    fn cell(&self, mut c: usize, x: &mut [f64]) -> (f64, bool) {
        let mut w = 1.0;
        let mut outer = false;
        for axis in 0..self.n {
            let i = c % self.m;
            c /= self.m;
            let (xi, wi) = self.nodes[axis][i];
            x[axis] = xi;
            w *= wi;
            outer |= i + 1 == self.m;
        }
        (w, outer)
    }
}

/// What each path contributes at one point.
enum Integrand<'a> {
    Full(&'a FkPotential),
    XnBand(&'a ExponentVector),
    AllBand { alpha: &'a ExponentVector, a: f64, band: f64, factor: f64 },
}

struct Tally {
    sum: f64,
    sq: f64,
    count: usize,
}

fn estimate(integrand: Integrand<'_>, n: usize, extents: &[f64], t: f64, mc: &McParams) -> Result<FkEstimate> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid!("t must be positive"));
    }
    if mc.steps < 16 || mc.paths < 16 {
        return Err(invalid!("need steps >= 16 and paths >= 16"));
    }
    let m = mc.cells_per_axis.unwrap_or_else(|| {
        let target = (mc.paths / 8).max(1) as f64;
        (libm::floor(libm::pow(target, 1.0 / n as f64)) as usize).clamp(1, 400)
    });
    let grid = Grid::new(extents, m);
    let cells = grid.cells();
    if mc.paths < 2 * cells {
        return Err(invalid!("{} paths cannot fill {} cells with two paths each", mc.paths, cells));
    }
    let steps = mc.steps;
    let dt = 2.0 * t / steps as f64;
    let mut tallies: Vec<Tally> = (0..cells).map(|_| Tally { sum: 0.0, sq: 0.0, count: 0 }).collect();
    let mut b = vec![0.0; n * (steps + 1)];
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut kept = 0usize;
    for p in 0..mc.paths {
        let mut rng = bridge::path_rng(mc.seed, p as u64);
        for axis in 0..n {
            bridge::bridge_into(&mut rng, 2.0 * t, &mut b[axis * (steps + 1)..(axis + 1) * (steps + 1)]);
        }
        let c = p % cells;
        grid.cell(c, &mut x);
        let value = match &integrand {
            Integrand::Full(v) => {
                kept += 1;
                let mut acc = 0.0;
                for k in 0..=steps {
                    for axis in 0..n {
                        y[axis] = x[axis] + b[axis * (steps + 1) + k];
                    }
                    let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
                    acc += w * v.value(&y);
                }
                libm::exp(-0.5 * dt * acc)
            }
            Integrand::XnBand(alpha) => {
                let last = n - 1;
                let bn = &b[last * (steps + 1)..];
                if bn.iter().any(|v| v.abs() > 1.0) {
                    0.0
                } else {
                    kept += 1;
                    let cap = abs_pow(x[last].abs() + 1.0, alpha.last());
                    let mut acc = 0.0;
                    for k in 0..=steps {
                        let mut v = cap;
                        for axis in 0..last {
                            v *= abs_pow(x[axis] + b[axis * (steps + 1) + k], alpha.alphas()[axis]);
                        }
                        let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
                        acc += w * v;
                    }
                    libm::exp(-0.5 * dt * acc)
                }
            }
            Integrand::AllBand { alpha, a, band, factor } => {
                if b.iter().any(|v| v.abs() > *band) {
                    0.0
                } else {
                    kept += 1;
                    if x.iter().any(|xi| xi.abs() < *a) {
                        0.0
                    } else {
                        libm::exp(-t * factor * alpha.potential(&x))
                    }
                }
            }
        };
        let tl = &mut tallies[c];
        tl.sum += value;
        tl.sq += value * value;
        tl.count += 1;
    }
    let pref = libm::pow(2.0, n as f64) * libm::pow(4.0 * core::f64::consts::PI * t, -(n as f64) / 2.0);
    let mut parts = Vec::with_capacity(cells);
    let mut vars = Vec::with_capacity(cells);
    let mut outer_parts = Vec::new();
    for (c, tl) in tallies.iter().enumerate() {
        let (w, outer) = grid.cell(c, &mut x);
        let k = tl.count as f64;
        let mean = tl.sum / k;
        let var = ((tl.sq / k - mean * mean).max(0.0)) * k / (k - 1.0);
        parts.push(w * mean);
        vars.push(w * w * var / k);
        if outer {
            outer_parts.push(w * mean);
        }
    }
    let total = pairwise_sum(&parts);
    let mean = pref * total;
    let stderr = pref * libm::sqrt(pairwise_sum(&vars));
    let truncation = if total > 0.0 { pairwise_sum(&outer_parts) / total } else { 0.0 };
    Ok(FkEstimate {
        mean,
        stderr,
        t,
        paths: mc.paths,
        steps,
        seed: mc.seed,
        paths_kept: kept as f64 / mc.paths as f64,
        truncation,
        cells,
        convention: CONVENTION.into(),
    })
}

/// Monte Carlo Z(t) with path-level standard error.
///
/// Refuses (`Error::Sampling`) when the standard error exceeds a quarter of
/// the mean.
pub fn fk_trace(potential: &FkPotential, t: f64, mc: &McParams) -> Result<FkEstimate> {
    let extents = potential.extents(t)?;
    let est = estimate(Integrand::Full(potential), potential.dim(), &extents, t, mc)?;
    if !(est.stderr <= 0.25 * est.mean) {
        return Err(Error::Sampling(alloc::format!(
            "standard error {:.3e} exceeds 25% of the mean {:.3e}",
            est.stderr,
            est.mean
        )));
    }
    Ok(est)
}

/// Lower bound on Z(t) from the confined paths, on the same bridges and
/// grid as [`fk_trace`] with the same parameters.
pub fn fk_confined_lower(alpha: &ExponentVector, t: f64, policy: ConfinementPolicy, mc: &McParams) -> Result<FkEstimate> {
    let n = alpha.n();
    let potential = FkPotential::Product(alpha.clone());
    let extents = potential.extents(t)?;
    let integrand = match policy.mode {
        ConfinementMode::None => return Err(invalid!("a confinement mode is required")),
        ConfinementMode::XnBand => Integrand::XnBand(alpha),
        ConfinementMode::AllBand => {
            if !(t < 1.0) {
                return Err(invalid!("the all-band policy needs t < 1"));
            }
            if !(policy.c > 0.0) {
                return Err(invalid!("κ constant must be positive"));
            }
            let lt = libm::fabs(libm::log(t));
            // |b_i| ≤ |x_i|(1 + 1/|ln t|) ≤ |x_i| e^{1/|ln t|} on kept paths,
            // so V(b) ≤ exp(c·Σα_i/(n|ln t|)) V(x); c = n is the sharp choice
            let factor = libm::exp(policy.c * alpha.degree() / (n as f64 * lt));
            Integrand::AllBand { alpha, a: libm::sqrt(t) * lt * lt, band: libm::sqrt(t) * lt, factor }
        }
    };
    let est = estimate(integrand, n, &extents, t, mc)?;
    if est.paths_kept == 0.0 {
        return Err(Error::Sampling("no path survived the confinement".into()));
    }
    Ok(est)
}
