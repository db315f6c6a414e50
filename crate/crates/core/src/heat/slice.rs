use alloc::format;

use crate::error::{invalid, Error, Result};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};
use crate::spectral::{dim_exponent, ExponentVector, Spectrum};

use super::bounds::DivergenceCertificate;
use super::onedim::{OneDimModel, TraceTable};
use super::{heat_trace, TraceValue};

/// Spectrum of H_{n−1} at unit coupling, the ε_j of the slices.
#[derive(Debug, Clone)]
pub enum BaseTrace {
    /// One-dimensional base −d²/dx² + |x|^{α_1} (n = 2).
    Model(TraceTable),
    /// Any computed spectrum; traces carry the geometric tail bound.
    Spectrum(Spectrum),
}

impl BaseTrace {
    fn trace(&self, s: f64) -> Result<TraceValue> {
        match self {
            BaseTrace::Model(t) => {
                let (v, e) = t.eval(s)?;
                Ok(TraceValue { value: v, error: e })
            }
            BaseTrace::Spectrum(sp) => heat_trace(sp, s),
        }
    }

    /// Trace with no lower limit on the argument (exact model sum).
    fn trace_any(&self, s: f64) -> Result<f64> {
        match self {
            BaseTrace::Model(t) => Ok(t.model().trace(s)),
            BaseTrace::Spectrum(sp) => heat_trace(sp, s).map(|v| v.value),
        }
    }

    fn eigenvalue(&self, j: usize) -> Option<f64> {
        match self {
            BaseTrace::Model(t) => Some(t.model().eigenvalue(j)),
            BaseTrace::Spectrum(sp) => sp.eigenvalues.get(j).copied(),
        }
    }
}

/// F(x_n, t) = Tr exp(−t(−Δ + |x_n|^{α_n} Π_{i<n}|x_i|^{α_i})) over the
/// first n−1 coordinates, evaluated as the base trace at t|x_n|^{1/d_n}.
#[derive(Debug, Clone)]
pub struct SliceFunction {
    pub alpha: ExponentVector,
    pub d_n: f64,
    pub base: BaseTrace,
}

impl SliceFunction {
    pub fn new(alpha: &ExponentVector, base: BaseTrace) -> Result<Self> {
        let d_n = dim_exponent(alpha)?;
        if let BaseTrace::Model(t) = &base {
            if alpha.n() != 2 || (t.model().gamma - alpha.alphas()[0]).abs() > 1e-12 {
                return Err(invalid!("a one-dimensional base needs n = 2 and γ = α_1"));
            }
        }
        Ok(Self { alpha: alpha.clone(), d_n, base })
    }

    /// n = 2 slice with a base model of `k` converged eigenvalues, tabulated
    /// down to `s_min`.
    pub fn two_dim(alpha: &ExponentVector, k: usize, s_min: f64) -> Result<Self> {
        if alpha.n() != 2 {
            return Err(invalid!("two_dim needs n = 2"));
        }
        let model = OneDimModel::compute(alpha.alphas()[0], k, 1e-9)?;
        Self::new(alpha, BaseTrace::Model(TraceTable::new(model, s_min, 32)?))
    }

    /// F(x_n, t).
    pub fn value(&self, x_n: f64, t: f64) -> Result<TraceValue> {
        if !(t > 0.0) || x_n == 0.0 {
            return Err(invalid!("need t > 0 and x_n ≠ 0"));
        }
        self.base.trace(t * libm::pow(x_n.abs(), 1.0 / self.d_n))
    }

    /// F(x_n t^{d_n}, 1), the first form of the scaling relation.
    pub fn value_rescaled(&self, x_n: f64, t: f64) -> Result<TraceValue> {
        self.value(x_n * libm::pow(t, self.d_n), 1.0)
    }

    /// ∫_0^X F(x, t) dx for X = `upper` (∞ if None). The endpoint
    /// singularity x^{−β}, β = α_n/α_{n−1}, is removed by u = x^{1−β}.
    pub fn integral(&self, t: f64, upper: Option<f64>) -> Result<TraceValue> {
        let n = self.alpha.n();
        let beta = self.alpha.last() / self.alpha.alphas()[n - 2];
        if beta >= 1.0 {
            return Err(Error::Divergent("∫F(x_n, t)dx_n diverges logarithmically at x_n = 0".into()));
        }
        let d = self.d_n;
        let f = |x: f64| self.base.trace_any(t * libm::pow(x, 1.0 / d));
        let mut failure = None;
        let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-10, max_intervals: 4000 };
        let x1 = upper.unwrap_or(1.0).min(1.0);
        let u1 = libm::pow(x1, 1.0 - beta);
        let head = integrate(
            |u| {
                if u <= 0.0 {
                    return 0.0;
                }
                let x = libm::pow(u, 1.0 / (1.0 - beta));
                match f(x) {
                    Ok(v) => v * libm::pow(x, beta) / (1.0 - beta),
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            },
            0.0,
            u1,
            opts,
        )?;
        let mut value = head.value;
        let mut error = head.error;
        let rest = match upper {
            Some(x) if x <= 1.0 => None,
            Some(x) => Some(integrate(|y| f(y).unwrap_or(f64::NAN), 1.0, x, opts)?),
            None => Some(integrate_to_infinity(|y| f(y).unwrap_or(f64::NAN), 1.0, opts)?),
        };
        if let Some(e) = failure {
            return Err(e);
        }
        if let Some(r) = rest {
            if !r.value.is_finite() {
                return Err(Error::Untrusted("slice trace failed on [1, X]".into()));
            }
            value += r.value;
            error += r.error;
        }
        Ok(TraceValue { value, error })
    }
}

/// F(x_n, t) as a number; refuses arguments outside the trusted range.
pub fn slice_value(slice: &SliceFunction, x_n: f64, t: f64) -> Result<f64> {
    slice.value(x_n, t).map(|v| v.value)
}

/// Z_SB(t) = Σ_j F^{(1/d_n)}(t ε_j^{b_n}), b_n = d_n/(d_n + 1/2).
///
/// `one_d` tabulates F^{(γ)} for γ = 1/d_n. With a model base the sum runs
/// until the terms are negligible; with a finite base spectrum the missing
/// slices are modelled as ε_J + m·g (g the mean of the last gaps) and their
/// sum is added to the error, refusing above 10% of the value.
pub fn z_sliced_bread(alpha: &ExponentVector, t: f64, slice: &SliceFunction, one_d: &TraceTable) -> Result<TraceValue> {
    if !(t > 0.0) {
        return Err(invalid!("t must be positive"));
    }
    let d = dim_exponent(alpha)?;
    if (one_d.model().gamma - 1.0 / d).abs() > 1e-12 {
        return Err(invalid!("slice table has γ = {}, need 1/d_n = {}", one_d.model().gamma, 1.0 / d));
    }
    let b = d / (d + 0.5);
    let mut value = 0.0;
    let mut error = 0.0;
    let mut j = 0usize;
    while let Some(eps) = slice.base.eigenvalue(j) {
        let (v, e) = one_d.eval(t * libm::pow(eps, b))?;
        value += v;
        error += e;
        if v < 1e-17 * value {
            return Ok(TraceValue { value, error });
        }
        j += 1;
        if j > 50_000_000 {
            return Err(Error::Convergence("sliced-bread sum does not terminate".into()));
        }
    }
    // finite base spectrum: continue with a constant gap
    let BaseTrace::Spectrum(sp) = &slice.base else { unreachable!() };
    let ev = &sp.eigenvalues;
    let k = ev.len();
    let m = (k - 1).min(8);
    if m == 0 {
        return Err(Error::Untrusted("need at least two base eigenvalues".into()));
    }
    let g = (ev[k - 1] - ev[k - 1 - m]) / m as f64;
    let mut tail = 0.0;
    for i in 1..50_000_000usize {
        let eps = ev[k - 1] + g * i as f64;
        let (v, e) = one_d.eval(t * libm::pow(eps, b))?;
        tail += v + e;
        if v < 1e-17 * (value + tail) {
            break;
        }
    }
    if tail > 0.1 * value {
        return Err(Error::Untrusted(format!(
            "base spectrum too short: slice tail {tail:.3e} vs sum {value:.3e} at t = {t}"
        )));
    }
    Ok(TraceValue { value, error: error + tail })
}

/// Result of the sliced Golden–Thompson trace.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case", tag = "kind"))]
pub enum SgtOutcome {
    Value(TraceValue),
    Divergent(DivergenceCertificate),
}

/// Z_SGT(t) = (πt)^{−1/2} ∫_0^∞ F(x_n, t) dx_n, slicing in the direction of
/// the smallest exponent. Equal smallest exponents give a certificate.
pub fn z_sliced_gt(alpha: &ExponentVector, t: f64, slice: &SliceFunction) -> Result<SgtOutcome> {
    if !(t > 0.0) {
        return Err(invalid!("t must be positive"));
    }
    let n = alpha.n();
    if n < 2 {
        return Err(invalid!("slicing needs n >= 2"));
    }
    if !alpha.last_is_strict() {
        return Ok(SgtOutcome::Divergent(DivergenceCertificate {
            exponents: alloc::vec![-1.0],
            divergent_at_zero: alloc::vec![true],
            divergent_at_infinity: alloc::vec![false],
            reason: "α_n = α_(n−1): F(x_n, t) ~ 1/x_n near x_n = 0, logarithmic divergence".into(),
        }));
    }
    let i = slice.integral(t, None)?;
    let pre = 1.0 / libm::sqrt(core::f64::consts::PI * t);
    Ok(SgtOutcome::Value(TraceValue { value: pre * i.value, error: pre * i.error }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    fn oscillator_base() -> SliceFunction {
        let alpha = ExponentVector::new(&[2.0, 1.0]).unwrap();
        let m = OneDimModel::from_eigenvalues(2.0, (0..40).map(|k| (2 * k + 1) as f64).collect()).unwrap();
        SliceFunction::new(&alpha, BaseTrace::Model(TraceTable::new(m, 1e-6, 32).unwrap())).unwrap()
    }

    #[test]
    fn slice_of_the_oscillator_base() {
        let s = oscillator_base();
        assert_relative_eq!(s.d_n, 2.0);
        for &t in &[0.1, 0.7, 2.0] {
            assert_relative_eq!(slice_value(&s, 1.0, t).unwrap(), 0.5 / libm::sinh(t), max_relative = 1e-8);
            // x_n = 2^{d_n} doubles the argument
            let a = slice_value(&s, 4.0, t).unwrap();
            assert_relative_eq!(a, slice_value(&s, 1.0, 2.0 * t).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn sgt_equals_zeta_formula() {
        // Γ(d+1) Tr(H_1^{-d}) t^{-d} (πt)^{-1/2} with Tr = Σ(2k+1)^{-2} = π²/8
        let s = oscillator_base();
        let alpha = s.alpha.clone();
        for &t in &[0.2, 0.5, 1.0] {
            let SgtOutcome::Value(v) = z_sliced_gt(&alpha, t, &s).unwrap() else { panic!() };
            let expect = gamma(3.0) * PI * PI / 8.0 * libm::pow(t, -2.0) / libm::sqrt(PI * t);
            assert_relative_eq!(v.value, expect, max_relative = 1e-8);
        }
    }

    #[test]
    fn equal_exponents_give_a_certificate() {
        let alpha = ExponentVector::new(&[1.0, 1.0]).unwrap();
        let m = OneDimModel::from_eigenvalues(1.0, alloc::vec![1.0188, 2.3381, 3.2482]).unwrap();
        let s = SliceFunction::new(&alpha, BaseTrace::Model(TraceTable::new(m, 1e-3, 8).unwrap())).unwrap();
        assert!(matches!(z_sliced_gt(&alpha, 0.5, &s).unwrap(), SgtOutcome::Divergent(_)));
        assert!(matches!(s.integral(0.5, None), Err(Error::Divergent(_))));
    }

    #[test]
    fn scale_out_identity() {
        let s = oscillator_base();
        let a = s.integral(0.3, None).unwrap().value * libm::pow(0.3, 2.0);
        let b = s.integral(1.1, None).unwrap().value * libm::pow(1.1, 2.0);
        assert_relative_eq!(a, b, max_relative = 1e-8);
    }

    #[test]
    fn near_origin_share_vanishes() {
        // t^{d} ∫_0^1 F(x, t) dx decreases as t decreases
        let s = oscillator_base();
        let mut prev = f64::INFINITY;
        for &t in &[1.0, 0.5, 0.2, 0.1] {
            let v = s.integral(t, Some(1.0)).unwrap().value * t * t;
            assert!(v < prev, "t = {t}");
            prev = v;
        }
    }

    #[test]
    fn sliced_bread_is_decreasing_and_below_sgt() {
        let s = oscillator_base();
        let alpha = s.alpha.clone();
        let m = OneDimModel::compute(0.5, 60, 1e-8).unwrap();
        let table = TraceTable::new(m, 1e-3, 32).unwrap();
        let mut prev = f64::INFINITY;
        for &t in &[0.2, 0.5, 1.0] {
            let sb = z_sliced_bread(&alpha, t, &s, &table).unwrap();
            let SgtOutcome::Value(sgt) = z_sliced_gt(&alpha, t, &s).unwrap() else { panic!() };
            assert!(sb.value < sgt.value, "t = {t}: {} vs {}", sb.value, sgt.value);
            assert!(sb.value < prev);
            prev = sb.value;
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(20))]
        #[test]
        fn scaling_forms_agree(x in 0.05f64..20.0, t in 0.05f64..3.0) {
            let s = oscillator_base();
            let a = s.value(x, t).unwrap();
            let b = s.value_rescaled(x, t).unwrap();
            proptest::prop_assert!((a.value - b.value).abs() <= a.error + b.error + 1e-12 * a.value);
        }
    }
}
