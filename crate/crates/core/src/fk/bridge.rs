use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};

/// Generator for path `index`: stream `index` of the seed's ChaCha key, so
/// every path is reproducible on its own.
pub(crate) fn path_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Fill `out` (length steps+1) with a standard Brownian bridge on [0, T]
/// pinned to 0 at both ends: W_k − (k/N) W_N from N(0, T/N) increments.
pub(crate) fn bridge_into(rng: &mut ChaCha12Rng, horizon: f64, out: &mut [f64]) {
    let steps = out.len() - 1;
    let sd = libm::sqrt(horizon / steps as f64);
    out[0] = 0.0;
    for k in 1..=steps {
        let z: f64 = StandardNormal.sample(rng);
        out[k] = out[k - 1] + sd * z;
    }
    let end = out[steps];
    for (k, v) in out.iter_mut().enumerate() {
        *v -= end * k as f64 / steps as f64;
    }
    out[steps] = 0.0;
}

/// Brownian bridges from x back to x over [0, 2t], sampled at `steps + 1`
/// equally spaced times. The motion has variance s at time s.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub anchor: Vec<f64>,
    pub horizon: f64,
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
    /// Path-major, then axis, then time node.
    samples: Vec<f64>,
}

impl PathEnsemble {
    /// Positions b_axis(s_k), k = 0..=steps, of path `p`.
    pub fn path(&self, p: usize, axis: usize) -> &[f64] {
        let m = self.steps + 1;
        let start = (p * self.anchor.len() + axis) * m;
        &self.samples[start..start + m]
    }

    /// Sample mean and variance of b(t), the midpoint, along `axis`.
    pub fn midpoint_moments(&self, axis: usize) -> (f64, f64) {
        let mid = self.steps / 2;
        let xs: Vec<f64> = (0..self.paths).map(|p| self.path(p, axis)[mid] - self.anchor[axis]).collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
        (mean, var)
    }
}

pub fn sample_bridges(x: &[f64], t: f64, steps: usize, count: usize, seed: u64) -> Result<PathEnsemble> {
    if x.is_empty() || !(t > 0.0 && t.is_finite()) {
        return Err(invalid!("need a point and t > 0"));
    }
    if steps < 16 || count == 0 {
        return Err(invalid!("need steps >= 16 and count >= 1"));
    }
    let n = x.len();
    let m = steps + 1;
    let mut samples = vec![0.0; count * n * m];
    for p in 0..count {
        let mut rng = path_rng(seed, p as u64);
        for (i, &xi) in x.iter().enumerate() {
            let out = &mut samples[(p * n + i) * m..(p * n + i + 1) * m];
            bridge_into(&mut rng, 2.0 * t, out);
            out.iter_mut().for_each(|v| *v += xi);
        }
    }
    Ok(PathEnsemble { anchor: x.to_vec(), horizon: 2.0 * t, steps, paths: count, seed, samples })
}

/// Excursion statistics of one-dimensional bridges over [0, 2t].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExitReport {
    /// Fraction of bridges with max_k |b(s_k) − x| > band.
    pub empirical: f64,
    pub stderr: f64,
    /// C(ε) e^{−(1−ε) band²/(4t)} with C(ε) = 2.
    pub bound: f64,
    /// P(sup|b − x| > band) for the continuous bridge.
    pub bridge_exact: f64,
    pub paths: usize,
    pub steps: usize,
}

/// ρ(t): how often a bridge leaves the band |b − x| ≤ `band`.
///
/// The bound is the free-motion estimate P(sup_{s ≤ 2t}|W_s| > r) ≤
/// 4P(W_{2t} > r) ≤ 2e^{−r²/(4t)}, valid with C(ε) = 2 for every ε in [0, 1).
/// Bridges are monitored at the time nodes only, which undercounts exits.
pub fn exit_probability(t: f64, band: f64, samples: usize, seed: u64, eps: f64, steps: usize) -> Result<ExitReport> {
    if !(t > 0.0 && band > 0.0) || samples == 0 || steps < 16 {
        return Err(invalid!("need t > 0, band > 0, samples >= 1, steps >= 16"));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(invalid!("need 0 <= eps < 1"));
    }
    let mut buf = vec![0.0; steps + 1];
    let mut exits = 0usize;
    for p in 0..samples {
        let mut rng = path_rng(seed, p as u64);
        bridge_into(&mut rng, 2.0 * t, &mut buf);
        if buf.iter().any(|b| b.abs() > band) {
            exits += 1;
        }
    }
    let n = samples as f64;
    let rho = exits as f64 / n;
    Ok(ExitReport {
        empirical: rho,
        stderr: libm::sqrt(rho * (1.0 - rho) / n),
        bound: 2.0 * libm::exp(-(1.0 - eps) * band * band / (4.0 * t)),
        bridge_exact: bridge_exit_exact(t, band),
        paths: samples,
        steps,
    })
}

/// 2 Σ_{k≥1} (−1)^{k+1} e^{−2k²r²/T} with T = 2t.
fn bridge_exit_exact(t: f64, band: f64) -> f64 {
    let mut s = 0.0;
    for k in 1..200 {
        let term = libm::exp(-(k * k) as f64 * band * band / t);
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bridges_are_pinned_and_reproducible() {
        let e = sample_bridges(&[0.3, -1.0], 0.7, 32, 50, 9).unwrap();
        for p in 0..50 {
            for axis in 0..2 {
                let b = e.path(p, axis);
                assert_eq!(b[0], e.anchor[axis]);
                assert_eq!(b[32], e.anchor[axis]);
            }
        }
        assert_eq!(e, sample_bridges(&[0.3, -1.0], 0.7, 32, 50, 9).unwrap());
        assert_ne!(e, sample_bridges(&[0.3, -1.0], 0.7, 32, 50, 10).unwrap());
    }

    #[test]
    fn midpoint_variance_is_t_over_two() {
        // Var b(t) = t(2t − t)/(2t) = t/2 for a bridge over [0, 2t]
        let t = 0.8;
        let count = 100_000;
        let e = sample_bridges(&[0.0], t, 16, count, 1).unwrap();
        let (mean, var) = e.midpoint_moments(0);
        let sd_var = var * libm::sqrt(2.0 / count as f64);
        assert!(mean.abs() < 4.0 * libm::sqrt(0.4 / count as f64));
        assert!((var - 0.4).abs() < 4.0 * sd_var, "{var}");
    }

    #[test]
    fn exit_probability_regimes() {
        let r = exit_probability(0.05, 1.0, 100_000, 3, 0.1, 128).unwrap();
        assert!(r.empirical <= r.bound);
        assert!(r.bridge_exact < 1e-8);
        let r = exit_probability(0.05, 1e6, 1000, 3, 0.1, 64).unwrap();
        assert_eq!(r.empirical, 0.0);
        let r = exit_probability(10.0, 1.0, 2000, 3, 0.1, 256).unwrap();
        assert!(r.empirical > 0.9, "{}", r.empirical);
        // discrete monitoring sees slightly fewer exits than the continuum
        let r = exit_probability(0.5, 1.0, 40_000, 5, 0.0, 512).unwrap();
        assert!(r.empirical <= r.bridge_exact + 4.0 * r.stderr);
        assert!(r.empirical > 0.85 * r.bridge_exact, "{} vs {}", r.empirical, r.bridge_exact);
    }
}
