use alloc::vec::Vec;

use crate::discretize::power1d_spectrum;
use crate::error::{invalid, Error, Result};
use crate::special::{gamma, upper_gamma};

/// Spectrum of −d²/dx² + |x|^γ for every index: converged finite-difference
/// eigenvalues below `K`, Bohr–Sommerfeld values above with the relative
/// mismatch at `K−1` faded out like k⁻².
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OneDimModel {
    pub gamma: f64,
    pub numeric: Vec<f64>,
    /// λ_k^{BS} = a (k + 1/2)^p.
    a: f64,
    p: f64,
    mismatch: f64,
}

/// Terms summed one by one past the numeric eigenvalues before switching to
/// the Euler–Maclaurin integral.
const DIRECT_TERMS: usize = 4096;

impl OneDimModel {
    /// Converge `k` eigenvalues numerically (relative tolerance `rel_tol`).
    pub fn compute(gamma_exp: f64, k: usize, rel_tol: f64) -> Result<Self> {
        if k < 2 {
            return Err(invalid!("need at least two numeric eigenvalues"));
        }
        let s = power1d_spectrum(gamma_exp, 1.0, k, rel_tol)?;
        Self::from_eigenvalues(gamma_exp, s.eigenvalues)
    }

    /// Model from known low eigenvalues (at least two).
    pub fn from_eigenvalues(gamma_exp: f64, numeric: Vec<f64>) -> Result<Self> {
        if !(gamma_exp > 0.0 && gamma_exp.is_finite()) {
            return Err(invalid!("gamma must be positive"));
        }
        if numeric.len() < 2 || numeric.windows(2).any(|w| !(w[1] >= w[0])) || numeric[0] <= 0.0 {
            return Err(invalid!("need at least two ascending positive eigenvalues"));
        }
        let (a, p) = bohr_sommerfeld(gamma_exp);
        let k = numeric.len() - 1;
        let bs = a * libm::pow(k as f64 + 0.5, p);
        let mismatch = numeric[k] / bs - 1.0;
        Ok(Self { gamma: gamma_exp, numeric, a, p, mismatch })
    }

    pub fn mismatch(&self) -> f64 {
        self.mismatch
    }

    /// λ_k.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        if k < self.numeric.len() {
            return self.numeric[k];
        }
        let kk = self.numeric.len() as f64 - 0.5;
        let x = k as f64 + 0.5;
        self.a * libm::pow(x, self.p) * (1.0 + self.mismatch * (kk / x) * (kk / x))
    }

    /// (F(s), −F'(s)) with F(s) = Σ_k e^{−sλ_k}.
    pub fn trace_and_slope(&self, s: f64) -> (f64, f64) {
        let mut f = 0.0;
        let mut df = 0.0;
        for &l in &self.numeric {
            let e = libm::exp(-s * l);
            f += e;
            df += l * e;
        }
        let k0 = self.numeric.len();
        for k in k0..k0 + DIRECT_TERMS {
            let l = self.eigenvalue(k);
            let e = libm::exp(-s * l);
            f += e;
            df += l * e;
            if e < 1e-18 * f {
                return (f, df);
            }
        }
        // tail in closed form with λ = a(k+½)^p
        let k2 = (k0 + DIRECT_TERMS) as f64;
        let sa = s * self.a;
        let y0 = sa * libm::pow(k2 + 0.5, self.p);
        let ip = 1.0 / self.p;
        let scale = ip * libm::pow(sa, -ip);
        let l2 = self.a * libm::pow(k2 + 0.5, self.p);
        let e2 = libm::exp(-s * l2);
        // Σ_{k ≥ K2} g = ∫ g + g(K2)/2 − g'(K2)/12 + …
        let dl = self.a * self.p * libm::pow(k2 + 0.5, self.p - 1.0);
        f += scale * upper_gamma(ip, y0) + 0.5 * e2 + s * dl * e2 / 12.0;
        df += scale / s * upper_gamma(ip + 1.0, y0) + 0.5 * l2 * e2 - dl * (1.0 - s * l2) * e2 / 12.0;
        (f, df)
    }

    pub fn trace(&self, s: f64) -> f64 {
        self.trace_and_slope(s).0
    }
}

/// λ_k ≈ a (k+½)^p from 2∫√(λ − |x|^γ)dx = (k+½)π.
pub fn bohr_sommerfeld(gamma_exp: f64) -> (f64, f64) {
    let mu = 0.5 + 1.0 / gamma_exp;
    let c = gamma(1.0 + 1.0 / gamma_exp) * gamma(1.5) / gamma(1.5 + 1.0 / gamma_exp);
    let p = 1.0 / mu;
    (libm::pow(core::f64::consts::PI / (2.0 * c), p), p)
}

/// F^{(γ)} tabulated on a logarithmic grid of s, interpolated by cubic
/// Hermite in (ln s, ln F) with exact slopes. Arguments above the table are
/// summed directly; arguments below are refused.
#[derive(Debug, Clone)]
pub struct TraceTable {
    model: OneDimModel,
    log_s: Vec<f64>,
    log_f: Vec<f64>,
    slope: Vec<f64>,
    s_direct: f64,
    /// Largest relative interpolation error seen at interval midpoints.
    pub interpolation_error: f64,
}

impl TraceTable {
    /// Table on [s_min, s_direct] with `per_decade` nodes per decade, where
    /// s_direct is the argument beyond which direct summation needs no tail.
    pub fn new(model: OneDimModel, s_min: f64, per_decade: usize) -> Result<Self> {
        if !(s_min > 0.0) || per_decade < 4 {
            return Err(invalid!("need s_min > 0 and at least 4 nodes per decade"));
        }
        let l0 = model.numeric[0];
        let lk = *model.numeric.last().unwrap_or(&l0);
        // e^{−s(λ_K − λ_0)} < 1e−17 once s exceeds this
        let s_direct = (40.0 / (lk - l0).max(1e-12)).max(s_min * 10.0);
        let decades = libm::log10(s_direct / s_min);
        let m = (libm::ceil(decades * per_decade as f64) as usize).max(2);
        let du = libm::log(s_direct / s_min) / m as f64;
        let mut log_s = Vec::with_capacity(m + 1);
        let mut log_f = Vec::with_capacity(m + 1);
        let mut slope = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let u = libm::log(s_min) + du * i as f64;
            let s = libm::exp(u);
            let (f, df) = model.trace_and_slope(s);
            log_s.push(u);
            log_f.push(libm::log(f));
            slope.push(-s * df / f);
        }
        let mut t = Self { model, log_s, log_f, slope, s_direct, interpolation_error: 0.0 };
        let mut worst = 0.0f64;
        for i in 0..m {
            let s = libm::exp(0.5 * (t.log_s[i] + t.log_s[i + 1]));
            let exact = t.model.trace(s);
            worst = worst.max((t.interpolate(s) / exact - 1.0).abs());
        }
        t.interpolation_error = worst;
        Ok(t)
    }

    pub fn model(&self) -> &OneDimModel {
        &self.model
    }

    pub fn s_min(&self) -> f64 {
        libm::exp(self.log_s[0])
    }

    fn interpolate(&self, s: f64) -> f64 {
        let u = libm::log(s);
        let du = self.log_s[1] - self.log_s[0];
        let m = self.log_s.len() - 1;
        let i = (libm::floor((u - self.log_s[0]) / du) as usize).min(m - 1);
        let x = (u - self.log_s[i]) / du;
        let (y0, y1) = (self.log_f[i], self.log_f[i + 1]);
        let (d0, d1) = (self.slope[i] * du, self.slope[i + 1] * du);
        let h00 = (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x);
        let h10 = x * (1.0 - x) * (1.0 - x);
        let h01 = x * x * (3.0 - 2.0 * x);
        let h11 = x * x * (x - 1.0);
        libm::exp(h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1)
    }

    /// (F(s), error).
    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        if !(s > 0.0) {
            return Err(invalid!("trace argument must be positive"));
        }
        if s >= self.s_direct {
            return Ok((self.model.trace(s), 0.0));
        }
        if s < self.s_min() * (1.0 - 1e-12) {
            return Err(Error::Untrusted(alloc::format!(
                "argument {s:.3e} below the tabulated range (s_min = {:.3e})",
                self.s_min()
            )));
        }
        let v = self.interpolate(s.max(self.s_min()));
        Ok((v, v * self.interpolation_error))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn harmonic() -> OneDimModel {
        OneDimModel::from_eigenvalues(2.0, (0..50).map(|k| (2 * k + 1) as f64).collect()).unwrap()
    }

    #[test]
    fn bohr_sommerfeld_is_exact_for_the_oscillator() {
        let (a, p) = bohr_sommerfeld(2.0);
        assert_relative_eq!(a, 2.0, max_relative = 1e-14);
        assert_relative_eq!(p, 1.0, max_relative = 1e-14);
        let m = harmonic();
        assert!(m.mismatch().abs() < 1e-13);
        assert_relative_eq!(m.eigenvalue(10_000), 20_001.0, max_relative = 1e-12);
    }

    #[test]
    fn oscillator_trace_at_all_scales() {
        let m = harmonic();
        for &s in &[1e-5, 1e-3, 0.01, 0.3, 1.0, 5.0] {
            let exact = 0.5 / libm::sinh(s);
            let (f, df) = m.trace_and_slope(s);
            assert_relative_eq!(f, exact, max_relative = 1e-9);
            let dexact = 0.5 * libm::cosh(s) / (libm::sinh(s) * libm::sinh(s));
            assert_relative_eq!(df, dexact, max_relative = 1e-8);
        }
    }

    #[test]
    fn table_interpolates_within_its_error() {
        let t = TraceTable::new(harmonic(), 1e-4, 24).unwrap();
        assert!(t.interpolation_error < 1e-7, "{}", t.interpolation_error);
        for &s in &[1.3e-4, 0.0271, 0.55, 0.8, 3.3, 40.0] {
            let (v, e) = t.eval(s).unwrap();
            let exact = 0.5 / libm::sinh(s);
            assert!((v - exact).abs() <= e + 1e-12 * exact, "s = {s}");
        }
        assert!(matches!(t.eval(1e-5), Err(Error::Untrusted(_))));
    }

    #[test]
    fn airy_model_matches_weyl_at_small_s() {
        // F(s) → π^{-1/2} Γ(1 + 1/γ) s^{-μ} as s → 0
        let m = OneDimModel::compute(1.0, 60, 1e-8).unwrap();
        assert!(m.mismatch().abs() < 1e-3);
        let s = 1e-4;
        let cl = gamma(2.0) / core::f64::consts::PI.sqrt() * libm::pow(s, -1.5);
        assert_relative_eq!(m.trace(s), cl, max_relative = 1e-3);
    }
}
