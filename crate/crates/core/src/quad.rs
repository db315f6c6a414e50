//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Nodes are interior to every subinterval, so integrable endpoint
//! singularities are tolerated; callers with strong singularities should
//! still substitute them away first.

use alloc::collections::BinaryHeap;
use alloc::format;
use core::cmp::Ordering;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-10, max_intervals: 4000 }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// ∫_a^b f(x) dx with global adaptive bisection.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let (v, e) = gk15(&mut f, a, b);
    if !v.is_finite() {
        return Err(Error::Convergence(format!("non-finite integrand on [{a}, {b}]")));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, error: e });
    let mut total = v;
    let mut err = e;
    let mut evals = 15;
    while err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::Convergence(format!(
                "quadrature on [{a}, {b}] stalled at error {err:.3e} (value {total:.6e})"
            )));
        }
        let worst = heap.pop().expect("heap never empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // interval cannot be split further in floating point
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&mut f, worst.a, m);
        let (v2, e2) = gk15(&mut f, m, worst.b);
        evals += 30;
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::Convergence(format!("non-finite integrand near {m}")));
        }
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: m, value: v1, error: e1 });
        heap.push(Piece { a: m, b: worst.b, value: v2, error: e2 });
    }
    // recompute sums from the pieces to shed accumulated cancellation
    let mut value = 0.0;
    let mut error = 0.0;
    for p in heap.iter() {
        value += p.value;
        error += p.error;
    }
    Ok(QuadResult { value, error, evaluations: evals })
}

/// ∫_a^∞ f(x) dx through x = a + u/(1-u).
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, opts: QuadOptions) -> Result<QuadResult> {
    integrate(
        |u| {
            let w = 1.0 - u;
            let x = a + u / w;
            let v = f(x);
            if v == 0.0 { 0.0 } else { v / (w * w) }
        },
        0.0,
        1.0,
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x * x * x - x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x| 1.0 / libm::sqrt(x), 0.0, 1.0, QuadOptions::rel(1e-10)).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn semi_infinite_gaussian() {
        let r = integrate_to_infinity(|x| libm::exp(-x * x), 0.0, QuadOptions::rel(1e-12)).unwrap();
        assert_relative_eq!(r.value, 0.5 * libm::sqrt(core::f64::consts::PI), max_relative = 1e-11);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-15, max_intervals: 3 };
        assert!(integrate(|x| libm::sin(1.0 / x), 0.001, 1.0, opts).is_err());
    }
}
