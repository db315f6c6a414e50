use rand_distr::{Distribution, Exp1};

use crate::error::{invalid, Error, Result};
use crate::quad::{integrate_to_infinity, QuadOptions};
use crate::special::gamma;

use super::bridge::path_rng;

/// How to evaluate the left-hand side of the log-volume identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LhsMethod {
    /// Nested adaptive quadrature, n ≤ 3.
    Quadrature,
    /// Monte Carlo with `samples` points.
    MonteCarlo { samples: usize, seed: u64 },
}

const TIGHT: QuadOptions = QuadOptions { abs_tol: 0.0, rel_tol: 1e-12, max_intervals: 4000 };

fn check(a: f64, n: usize) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) || n == 0 {
        return Err(invalid!("need a > 0 and n >= 1"));
    }
    Ok(())
}

/// 2ⁿ ∫_{aⁿ}^∞ f(p) log(p/aⁿ)^{n−1}/(n−1)! dp.
pub fn log_volume_rhs<F: Fn(f64) -> f64>(f: F, a: f64, n: usize) -> Result<f64> {
    check(a, n)?;
    let an = libm::pow(a, n as f64);
    let fact = gamma(n as f64);
    let r = integrate_to_infinity(|p| f(p) * libm::pow(libm::log(p / an), (n - 1) as f64) / fact, an, TIGHT)?;
    Ok(libm::pow(2.0, n as f64) * r.value)
}

/// ∫ f(|x_1⋯x_n|) dx over the points with every |x_i| ≥ a: (value, error).
pub fn log_volume_lhs<F: Fn(f64) -> f64>(f: F, a: f64, n: usize, method: LhsMethod) -> Result<(f64, f64)> {
    check(a, n)?;
    let scale = libm::pow(2.0, n as f64);
    match method {
        LhsMethod::Quadrature => {
            if n > 3 {
                return Err(invalid!("quadrature is limited to n <= 3"));
            }
            let r = nested(&f, a, n, 1.0)?;
            Ok((scale * r.0, scale * r.1))
        }
        LhsMethod::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(invalid!("need at least two samples"));
            }
            // x_i = a e^{E_i}, E_i ~ Exp(1): density a/x² on [a, ∞)
            let mut rng = path_rng(seed, 0);
            let mut sum = 0.0;
            let mut sq = 0.0;
            for _ in 0..samples {
                let mut p = 1.0;
                let mut w = 1.0;
                for _ in 0..n {
                    let e: f64 = Exp1.sample(&mut rng);
                    let x = a * libm::exp(e);
                    p *= x;
                    w *= x * x / a;
                }
                let y = f(p) * w;
                sum += y;
                sq += y * y;
            }
            let m = samples as f64;
            let mean = sum / m;
            let var = (sq / m - mean * mean).max(0.0) * m / (m - 1.0);
            Ok((scale * mean, scale * libm::sqrt(var / m)))
        }
    }
}

/// ∫_a^∞ ⋯ ∫_a^∞ f(c·x_1⋯x_k) dx, one adaptive rule per level.
fn nested<F: Fn(f64) -> f64>(f: &F, a: f64, k: usize, c: f64) -> Result<(f64, f64)> {
    if k == 1 {
        let r = integrate_to_infinity(|x| f(c * x), a, TIGHT)?;
        return Ok((r.value, r.error));
    }
    let mut failure = None;
    let mut inner_err = 0.0f64;
    let r = integrate_to_infinity(
        |x| match nested(f, a, k - 1, c * x) {
            Ok((v, e)) => {
                inner_err = inner_err.max(e / v.abs().max(1e-300));
                v
            }
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        a,
        QuadOptions { rel_tol: 1e-10, ..TIGHT },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    if !r.value.is_finite() {
        return Err(Error::Convergence("log-volume quadrature produced a non-finite value".into()));
    }
    Ok((r.value, r.error + inner_err * r.value.abs()))
}
