//! Partition functions and the trace bounds
//! Z_Q ≤ Z_SB ≤ Z_SGT ≤ Z_cl.
//!
//! Every trace goes through eigenvalues. One-dimensional traces
//! F^{(γ)}(s) = Tr e^{−s(−d²/dx² + |x|^γ)} come from [`OneDimModel`], which
//! continues a converged finite-difference spectrum with Bohr–Sommerfeld
//! eigenvalues, and are tabulated in [`TraceTable`].

mod bounds;
mod onedim;
mod slice;

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::numeric::pairwise_sum;
use crate::spectral::Spectrum;

pub use bounds::{
    check_chain, separable_upper_bound, z_classical_1d, z_classical_product_divergence, BoundReport, ChainRecord,
    DivergenceCertificate, SeparableFactor, UpperBound, Violation,
};
pub use onedim::{bohr_sommerfeld, OneDimModel, TraceTable};
pub use slice::{slice_value, z_sliced_bread, z_sliced_gt, BaseTrace, SgtOutcome, SliceFunction};

/// A trace value with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceValue {
    pub value: f64,
    pub error: f64,
}

/// Where a curve came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum HeatSource {
    SpectrumSum,
    SlicedBread,
    SlicedGt,
    Classical,
    FeynmanKac,
    ProductBound,
}

impl HeatSource {
    pub fn name(self) -> &'static str {
        match self {
            HeatSource::SpectrumSum => "spectrum-sum",
            HeatSource::SlicedBread => "sliced-bread",
            HeatSource::SlicedGt => "sliced-GT",
            HeatSource::Classical => "classical",
            HeatSource::FeynmanKac => "feynman-kac",
            HeatSource::ProductBound => "product-bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HeatSample {
    pub t: f64,
    pub value: f64,
    pub error: f64,
}

/// Sampled Z(t), ascending in t.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HeatTraceCurve {
    pub samples: Vec<HeatSample>,
    pub source: HeatSource,
}

impl HeatTraceCurve {
    pub fn new(source: HeatSource) -> Self {
        Self { samples: Vec::new(), source }
    }

    /// Append a sample; t must increase and the value must be positive.
    pub fn push(&mut self, t: f64, v: TraceValue) -> Result<()> {
        if !(t > 0.0 && v.value > 0.0 && v.error >= 0.0) {
            return Err(invalid!("sample needs t > 0, value > 0, error >= 0"));
        }
        if self.samples.last().is_some_and(|s| s.t >= t) {
            return Err(invalid!("t values must be strictly ascending"));
        }
        self.samples.push(HeatSample { t, value: v.value, error: v.error });
        Ok(())
    }

    /// Evaluate `f` on every t; t must be ascending.
    pub fn sample<F: FnMut(f64) -> Result<TraceValue>>(source: HeatSource, ts: &[f64], mut f: F) -> Result<Self> {
        let mut c = Self::new(source);
        for &t in ts {
            c.push(t, f(t)?)?;
        }
        Ok(c)
    }

    /// Whether the values are nonincreasing in t within their errors.
    pub fn is_monotone(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].value <= w[0].value + w[0].error + w[1].error)
    }
}

/// Σ_k e^{−tλ_k} over the computed eigenvalues, with a geometric bound on
/// the missing terms: they are modelled as λ_K + m·g, m ≥ 1, where λ_K is
/// the last eigenvalue and g the mean of the last (up to eight) gaps.
///
/// The value is the partial sum and the error the tail bound. Refuses when
/// the bound exceeds 10% of the sum.
pub fn heat_trace(spectrum: &Spectrum, t: f64) -> Result<TraceValue> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid!("t must be positive, got {t}"));
    }
    let ev = &spectrum.eigenvalues;
    if ev.is_empty() {
        return Err(invalid!("empty spectrum"));
    }
    let terms: Vec<f64> = ev.iter().map(|l| libm::exp(-t * l)).collect();
    let sum = pairwise_sum(&terms);
    let tail = geometric_tail(ev, t);
    if !(tail <= 0.1 * sum) {
        return Err(Error::Untrusted(alloc::format!(
            "tail bound {tail:.3e} exceeds 10% of the partial sum {sum:.3e} at t = {t}; need more eigenvalues"
        )));
    }
    Ok(TraceValue { value: sum, error: tail })
}

fn geometric_tail(ev: &[f64], t: f64) -> f64 {
    let k = ev.len();
    let last = ev[k - 1];
    let m = (k - 1).min(8);
    let g = if m == 0 { last } else { (last - ev[k - 1 - m]) / m as f64 };
    if !(g > 0.0) {
        return f64::INFINITY;
    }
    let q = libm::exp(-t * g);
    libm::exp(-t * last) * q / (1.0 - q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn oscillator(k: usize) -> Spectrum {
        Spectrum::exact((0..k).map(|j| (2 * j + 1) as f64).collect()).unwrap()
    }

    #[test]
    fn oscillator_trace_and_exact_tail() {
        let s = oscillator(30);
        let v = heat_trace(&s, 1.0).unwrap();
        let exact = 0.5 / libm::sinh(1.0);
        assert_relative_eq!(exact, 0.425_459_06, max_relative = 1e-7);
        // for equally spaced levels the geometric tail is the exact remainder
        assert_relative_eq!(v.value + v.error, exact, max_relative = 1e-13);
        assert!(v.value <= exact * (1.0 + 1e-15));
    }

    #[test]
    fn three_levels() {
        let s = Spectrum::exact(alloc::vec![1.0, 2.0, 4.0]).unwrap();
        let v = heat_trace(&s, 1.0).unwrap();
        assert_relative_eq!(v.value, libm::exp(-1.0) + libm::exp(-2.0) + libm::exp(-4.0), max_relative = 1e-15);
    }

    #[test]
    fn ground_state_dominates_at_large_t() {
        let s = oscillator(5).scaled(0.5);
        let t = 40.0;
        let v = heat_trace(&s, t).unwrap();
        assert_relative_eq!(v.value / libm::exp(-0.5 * t), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn small_t_is_refused() {
        let s = oscillator(10);
        assert!(matches!(heat_trace(&s, 0.05), Err(Error::Untrusted(_))));
        assert!(heat_trace(&s, 0.0).is_err());
    }

    #[test]
    fn curve_checks_order() {
        let mut c = HeatTraceCurve::new(HeatSource::SpectrumSum);
        c.push(0.5, TraceValue { value: 2.0, error: 0.0 }).unwrap();
        assert!(c.push(0.5, TraceValue { value: 1.0, error: 0.0 }).is_err());
        assert!(c.push(0.7, TraceValue { value: -1.0, error: 0.0 }).is_err());
        c.push(1.0, TraceValue { value: 1.0, error: 0.0 }).unwrap();
        assert!(c.is_monotone());
    }

    proptest::proptest! {
        #[test]
        fn trace_is_decreasing_and_log_convex(mut v in proptest::collection::vec(0.5f64..50.0, 40..80), t in 0.3f64..3.0) {
            v.sort_by(f64::total_cmp);
            v.dedup();
            let s = Spectrum::exact(v).unwrap();
            let h = 0.05;
            let (a, b, c) = (heat_trace(&s, t), heat_trace(&s, t + h), heat_trace(&s, t + 2.0 * h));
            if let (Ok(a), Ok(b), Ok(c)) = (a, b, c) {
                proptest::prop_assert!(b.value <= a.value);
                proptest::prop_assert!(b.value * b.value <= a.value * c.value * (1.0 + 1e-12));
            }
        }
    }
}
