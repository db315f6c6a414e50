//! −d²/dx² + g|x|^γ by Prüfer-angle shooting.
//!
//! Finite differences converge slowly here once γ < 2 because the potential
//! is not smooth at the origin. Shooting splits the line into the even and
//! odd sectors on [0, X], writes ψ = ρ sin θ, ψ'/s = ρ cos θ and matches the
//! angle integrated from 0 with the one integrated back from X.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::special::gamma as gamma_fn;
use crate::spectral::Spectrum;

const MAX_STEPS: usize = 1_000_000;

/// y(x1) for y' = f(x, y), y(x0) = y0, by adaptive Dormand–Prince 5(4).
fn dopri5<F: Fn(f64, f64) -> f64>(f: F, x0: f64, y0: f64, x1: f64, rtol: f64) -> Result<f64> {
    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 6] = [
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const E: [f64; 7] =
        [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut h = span / 64.0;
    let (mut x, mut y) = (x0, y0);
    let mut k = [0.0f64; 7];
    k[0] = f(x, y);
    for _ in 0..MAX_STEPS {
        if (x1 - x) * dir <= 0.0 {
            return Ok(y);
        }
        if (x + h - x1) * dir > 0.0 {
            h = x1 - x;
        }
        for s in 0..6 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(s + 1) {
                yi += h * A[s][j] * kj;
            }
            k[s + 1] = f(x + C[s] * h, yi);
        }
        // the last stage is evaluated at the new point with the 5th-order weights
        let y_new = y + h * A[5].iter().zip(&k[..6]).map(|(a, b)| a * b).sum::<f64>();
        let err = (h * E.iter().zip(&k).map(|(e, b)| e * b).sum::<f64>()).abs();
        let scale = rtol * (1.0 + y.abs().max(y_new.abs()));
        let ratio = err / scale;
        if ratio <= 1.0 {
            x += h;
            y = y_new;
            k[0] = k[6];
        }
        let grow = if ratio == 0.0 { 5.0 } else { (0.9 * libm::pow(ratio, -0.2)).clamp(0.2, 5.0) };
        h *= grow;
        if h.abs() < 1e-14 * (1.0 + x.abs()) {
            return Err(Error::Convergence(format!("step size underflow at x = {x}")));
        }
    }
    Err(Error::Convergence(format!("more than {MAX_STEPS} ODE steps on [{x0}, {x1}]")))
}

struct Sector {
    gamma: f64,
    coupling: f64,
    /// θ(0): 0 for odd states, π/2 for even ones.
    theta0: f64,
    x_end: f64,
    rtol: f64,
}

impl Sector {
    fn rhs(&self, lambda: f64) -> impl Fn(f64, f64) -> f64 + '_ {
        let s = libm::sqrt(lambda.max(1.0));
        move |x, th| {
            let (sn, cs) = libm::sincos(th);
            s * cs * cs + (lambda - self.coupling * libm::pow(x, self.gamma)) / s * sn * sn
        }
    }

    fn turning(&self, lambda: f64) -> f64 {
        libm::pow(lambda.max(0.0) / self.coupling, 1.0 / self.gamma).min(self.x_end)
    }

    /// θ_L(x_m) − θ_R(x_m) with θ_R(X) = (j+1)π; increasing in λ.
    fn mismatch(&self, j: usize, lambda: f64, x_m: f64) -> Result<f64> {
        let f = self.rhs(lambda);
        let left = dopri5(&f, 0.0, self.theta0, x_m, self.rtol)?;
        let right = dopri5(&f, self.x_end, (j + 1) as f64 * PI, x_m, self.rtol)?;
        Ok(left - right)
    }

    /// Eigenvalue j of the sector, bracketed below by `lo`.
    fn eigenvalue(&self, j: usize, lo: f64, hi: f64) -> Result<f64> {
        let x_m = self.turning(0.5 * (lo + hi));
        let (mut a, mut b) = (lo, hi);
        let mut fa = self.mismatch(j, a, x_m)?;
        let mut fb = self.mismatch(j, b, x_m)?;
        if !(fa < 0.0 && fb > 0.0) {
            return Err(Error::Convergence(format!("no sign change for level {j} in [{lo}, {hi}]")));
        }
        // Illinois regula falsi
        let mut side = 0i8;
        for _ in 0..200 {
            let c = (a * fb - b * fa) / (fb - fa);
            let c = if c > a && c < b { c } else { 0.5 * (a + b) };
            if (b - a) <= 1e-14 * b {
                return Ok(c);
            }
            let fc = self.mismatch(j, c, x_m)?;
            if fc == 0.0 {
                return Ok(c);
            }
            if fc < 0.0 {
                a = c;
                fa = fc;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                b = c;
                fb = fc;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
            if (b - a) <= 1e-13 * b {
                return Ok(0.5 * (a + b));
            }
        }
        Err(Error::Convergence(format!("level {j} did not converge")))
    }
}

/// X beyond which ψ_λ has decayed by e^{−depth}, from the WKB exponent
/// ∫√(V − λ) dx past the turning point.
fn decay_length(gamma: f64, coupling: f64, lambda: f64, depth: f64) -> f64 {
    let xt = libm::pow(lambda / coupling, 1.0 / gamma).max(1e-3);
    let dx = xt / 200.0;
    let mut x = xt;
    let mut acc = 0.0;
    while acc < depth {
        x += dx;
        acc += libm::sqrt((coupling * libm::pow(x, gamma) - lambda).max(0.0)) * dx;
    }
    x
}

/// Bohr–Sommerfeld guess for level i: 2∫√(λ − g|x|^γ)dx = (i + 1/2)π.
fn wkb_guess(gamma: f64, coupling: f64, i: usize) -> f64 {
    let c = gamma_fn(1.0 + 1.0 / gamma) * gamma_fn(1.5) / gamma_fn(1.5 + 1.0 / gamma);
    let mu = 0.5 + 1.0 / gamma;
    // ∫√(λ − g|x|^γ) = 2c g^{−1/γ} λ^μ
    libm::pow((i as f64 + 0.5) * PI * libm::pow(coupling, 1.0 / gamma) / (4.0 * c), 1.0 / mu)
}

fn shoot(gamma: f64, coupling: f64, k: usize, rtol: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(k);
    let mut last = [0.0f64; 2];
    for i in 0..k {
        let parity = i % 2;
        let g = wkb_guess(gamma, coupling, i);
        let mut lo = (g / 1.3).max(last[parity]);
        let mut hi = g * 1.3;
        let mut found = None;
        for _ in 0..60 {
            let x_end = decay_length(gamma, coupling, hi, 25.0);
            let sec = Sector { gamma, coupling, theta0: theta0(parity), x_end, rtol };
            let x_m = sec.turning(0.5 * (lo + hi));
            let fa = sec.mismatch(i / 2, lo, x_m)?;
            let fb = sec.mismatch(i / 2, hi, x_m)?;
            if fa >= 0.0 {
                lo = (lo / 1.5).max(last[parity]);
            } else if fb <= 0.0 {
                hi *= 1.5;
            } else {
                found = Some(sec.eigenvalue(i / 2, lo, hi)?);
                break;
            }
        }
        let lam = found.ok_or_else(|| Error::Convergence(format!("could not bracket level {i}")))?;
        last[parity] = lam;
        out.push(lam);
    }
    Ok(out)
}

fn theta0(parity: usize) -> f64 {
    if parity == 0 {
        0.5 * PI
    } else {
        0.0
    }
}

/// Re-solve at tolerance `rtol` starting from good estimates: each level is
/// bracketed within a relative `width` of its previous value.
fn polish(gamma: f64, coupling: f64, prev: &[f64], rtol: f64, width: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(prev.len());
    for (i, &l) in prev.iter().enumerate() {
        // the coarse value can sit outside a tight bracket; widen until it holds
        let mut w = width;
        let lam = loop {
            let (lo, hi) = (l * (1.0 - w), l * (1.0 + w));
            let x_end = decay_length(gamma, coupling, hi, 25.0);
            let sec = Sector { gamma, coupling, theta0: theta0(i % 2), x_end, rtol };
            match sec.eigenvalue(i / 2, lo, hi) {
                Err(Error::Convergence(_)) if w < 0.05 => w *= 8.0,
                r => break r?,
            }
        };
        out.push(lam);
    }
    Ok(out)
}

/// Lowest `k` eigenvalues of −d²/dx² + g|x|^γ on the line, each converged
/// to relative accuracy `rel_tol` (the estimate compares two ODE tolerances).
pub fn power1d_spectrum(gamma: f64, coupling: f64, k: usize, rel_tol: f64) -> Result<Spectrum> {
    if !(gamma > 0.0 && gamma.is_finite() && coupling > 0.0 && coupling.is_finite()) {
        return Err(invalid!("need gamma > 0 and coupling > 0"));
    }
    if k == 0 || !(rel_tol > 0.0) {
        return Err(invalid!("need k ≥ 1 and rel_tol > 0"));
    }
    let mut tol = 1e-7;
    let mut prev = shoot(gamma, coupling, k, tol)?;
    for _ in 0..5 {
        tol *= 1e-2;
        let next = polish(gamma, coupling, &prev, tol.max(1e-15), 1e-4)?;
        let conv: Vec<f64> = next.iter().zip(&prev).map(|(a, b)| ((a - b) / a).abs()).collect();
        if conv.iter().all(|&c| c < rel_tol) {
            let mut vals = next;
            vals.sort_by(f64::total_cmp);
            return Spectrum::new(vals, conv, f64::INFINITY);
        }
        prev = next;
    }
    Err(Error::Convergence(format!("shooting did not reach relative accuracy {rel_tol:.1e}")))
}
