use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::discretize::ground_energy_1d;
use crate::error::{invalid, Result};
use crate::special::gamma;
use crate::spectral::ExponentVector;

use super::onedim::{OneDimModel, TraceTable};
use super::slice::{z_sliced_bread, z_sliced_gt, SgtOutcome, SliceFunction};
use super::TraceValue;

/// Z_cl(t) = (2π)⁻¹∫∫e^{−t(ξ² + |x|^γ)} = π^{−1/2} Γ(1 + 1/γ) t^{−μ},
/// μ = (γ+2)/(2γ).
pub fn z_classical_1d(gamma_exp: f64, t: f64) -> Result<f64> {
    if !(gamma_exp > 0.0 && t > 0.0) {
        return Err(invalid!("need gamma > 0 and t > 0"));
    }
    let mu = (gamma_exp + 2.0) / (2.0 * gamma_exp);
    Ok(gamma(1.0 + 1.0 / gamma_exp) / libm::sqrt(core::f64::consts::PI) * libm::pow(t, -mu))
}

/// Record of a trace that is +∞: the power integrals ∫_0^∞ x^{e} dx behind it
/// and the end where each one blows up.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DivergenceCertificate {
    pub exponents: Vec<f64>,
    pub divergent_at_zero: Vec<bool>,
    pub divergent_at_infinity: Vec<bool>,
    pub reason: String,
}

/// The classical trace of −Δ + Π|x_i|^{α_i} factors into
/// Π_{j<n} ∫_0^∞ x_j^{−α_j/α_n} dx_j, and each factor diverges: at 0 when
/// the exponent is ≤ −1, at ∞ when it is ≥ −1.
pub fn z_classical_product_divergence(alpha: &ExponentVector) -> Result<DivergenceCertificate> {
    let n = alpha.n();
    if n < 2 {
        return Err(invalid!("the one-dimensional classical trace is finite; use z_classical_1d"));
    }
    let an = alpha.last();
    let exponents: Vec<f64> = alpha.alphas()[..n - 1].iter().map(|a| -a / an).collect();
    let divergent_at_zero = exponents.iter().map(|&e| e <= -1.0).collect();
    let divergent_at_infinity = exponents.iter().map(|&e| e >= -1.0).collect();
    Ok(DivergenceCertificate {
        exponents,
        divergent_at_zero,
        divergent_at_infinity,
        reason: "Z_cl ∝ t^{(1−n)/α_n} Π_j ∫_0^∞ x_j^{−α_j/α_n} dx_j and no such integral converges".into(),
    })
}

/// One factor Tr e^{−tT_j}, T_j = (−d²/dx_j² + c_j|x_j|^{η_j})/n.
#[derive(Debug, Clone)]
pub struct SeparableFactor {
    pub axis: usize,
    pub coupling: f64,
    pub eta: f64,
    pub model: OneDimModel,
}

/// The product bound Z_Q ≤ Π_j Tr e^{−tT_j}.
#[derive(Debug, Clone)]
pub struct UpperBound {
    pub factors: Vec<SeparableFactor>,
}

impl UpperBound {
    /// For each axis j, remove the other axes one at a time with
    /// −d²/dx_a² + C|x_a|^{e_a} ≥ λ_0(e_a) C^{2/(2+e_a)}, then average the n
    /// resulting inequalities.
    pub fn new(alpha: &ExponentVector, numeric_levels: usize) -> Result<Self> {
        let n = alpha.n();
        if !(2..=3).contains(&n) {
            return Err(invalid!("the separable bound is built for n = 2 or 3"));
        }
        let mut factors = Vec::with_capacity(n);
        for j in 0..n {
            let mut e: Vec<f64> = alpha.alphas().to_vec();
            let mut c = 1.0;
            for a in (0..n).filter(|&a| a != j) {
                let ea = e[a];
                let l0 = ground_energy_1d(ea)?;
                let r = 2.0 / (2.0 + ea);
                c = l0 * libm::pow(c, r);
                for (i, ei) in e.iter_mut().enumerate() {
                    if i != a {
                        *ei *= r;
                    }
                }
                e[a] = 0.0;
            }
            let model = OneDimModel::compute(e[j], numeric_levels, 1e-9)?;
            factors.push(SeparableFactor { axis: j, coupling: c, eta: e[j], model });
        }
        Ok(Self { factors })
    }

    pub fn eval(&self, t: f64) -> Result<TraceValue> {
        if !(t > 0.0) {
            return Err(invalid!("t must be positive"));
        }
        let n = self.factors.len() as f64;
        let mut v = 1.0;
        for f in &self.factors {
            // spectrum of −d² + c|x|^η is c^{2/(η+2)} times that of c = 1
            let s = t / n * libm::pow(f.coupling, 2.0 / (f.eta + 2.0));
            v *= f.model.trace(s);
        }
        Ok(TraceValue { value: v, error: 1e-8 * v })
    }
}

/// Π_j Tr e^{−tT_j} for the separable minorant of H.
pub fn separable_upper_bound(alpha: &ExponentVector, t: f64) -> Result<TraceValue> {
    UpperBound::new(alpha, 200)?.eval(t)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainRecord {
    pub t: f64,
    pub z_q: TraceValue,
    pub z_sb: TraceValue,
    /// None when divergent.
    pub z_sgt: Option<TraceValue>,
    pub z_cl: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Violation {
    pub t: f64,
    pub lower: String,
    pub upper: String,
    /// lower − upper beyond the combined error.
    pub excess: f64,
}

/// Per-t check of Z_Q ≤ Z_SB ≤ Z_SGT ≤ Z_cl; divergent members count as +∞.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundReport {
    pub records: Vec<ChainRecord>,
    pub violations: Vec<Violation>,
    pub sgt_certificate: Option<DivergenceCertificate>,
    pub cl_certificate: DivergenceCertificate,
    pub passed: bool,
}

/// Check the chain at every t. `z_q[i]` is the quantum trace at `ts[i]`;
/// `slice` and `one_d` feed the sliced traces.
pub fn check_chain(
    alpha: &ExponentVector,
    ts: &[f64],
    z_q: &[TraceValue],
    slice: &SliceFunction,
    one_d: &TraceTable,
) -> Result<BoundReport> {
    if ts.len() != z_q.len() {
        return Err(invalid!("one Z_Q value per t is required"));
    }
    let cl_certificate = z_classical_product_divergence(alpha)?;
    let mut records = Vec::with_capacity(ts.len());
    let mut violations = Vec::new();
    let mut sgt_certificate = None;
    let mut check = |t: f64, lo: (&str, TraceValue), hi: (&str, TraceValue)| {
        let excess = lo.1.value - hi.1.value - (lo.1.error + hi.1.error);
        if excess > 0.0 {
            violations.push(Violation { t, lower: lo.0.into(), upper: hi.0.into(), excess });
        }
    };
    for (&t, &q) in ts.iter().zip(z_q) {
        let sb = z_sliced_bread(alpha, t, slice, one_d)?;
        check(t, ("Z_Q", q), ("Z_SB", sb));
        let sgt = match z_sliced_gt(alpha, t, slice)? {
            SgtOutcome::Value(v) => {
                check(t, ("Z_SB", sb), ("Z_SGT", v));
                Some(v)
            }
            SgtOutcome::Divergent(c) => {
                sgt_certificate = Some(c);
                None
            }
        };
        records.push(ChainRecord { t, z_q: q, z_sb: sb, z_sgt: sgt, z_cl: None });
    }
    let passed = violations.is_empty();
    Ok(BoundReport { records, violations, sgt_certificate, cl_certificate, passed })
}

impl BoundReport {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            let sgt = r.z_sgt.map_or("inf".into(), |v| format!("{:.6}", v.value));
            s.push_str(&format!("t={} Z_Q={:.6} Z_SB={:.6} Z_SGT={} Z_cl=inf\n", r.t, r.z_q.value, r.z_sb.value, sgt));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat::{heat_trace, BaseTrace};
    use crate::spectral::Spectrum;
    use approx::assert_relative_eq;

    #[test]
    fn classical_1d_values() {
        assert_relative_eq!(z_classical_1d(2.0, 1.0).unwrap(), 0.5, max_relative = 1e-14);
        assert_relative_eq!(
            z_classical_1d(1.0, 1.0).unwrap(),
            1.0 / libm::sqrt(core::f64::consts::PI),
            max_relative = 1e-14
        );
        // Golden–Thompson direction for the oscillator
        let s = Spectrum::exact((0..40).map(|k| (2 * k + 1) as f64).collect()).unwrap();
        let q = heat_trace(&s, 1.0).unwrap();
        assert!(q.value + q.error <= z_classical_1d(2.0, 1.0).unwrap());
    }

    #[test]
    fn product_classical_trace_diverges() {
        let c = z_classical_product_divergence(&ExponentVector::new(&[2.0, 1.0]).unwrap()).unwrap();
        assert_eq!(c.exponents, alloc::vec![-2.0]);
        assert_eq!(c.divergent_at_zero, alloc::vec![true]);
        let c = z_classical_product_divergence(&ExponentVector::new(&[1.0, 1.0]).unwrap()).unwrap();
        assert!(c.divergent_at_zero[0] && c.divergent_at_infinity[0]);
        assert!(z_classical_product_divergence(&ExponentVector::new(&[2.0]).unwrap()).is_err());
    }

    #[test]
    fn separable_reduction_exponents() {
        let alpha = ExponentVector::new(&[2.0, 1.0]).unwrap();
        let ub = UpperBound::new(&alpha, 60).unwrap();
        // axis 1 (α = 1): transverse exponent 2α_2/(2+α_1) = 1/2, coupling λ_0(2) = 1
        assert_relative_eq!(ub.factors[1].eta, 0.5, max_relative = 1e-14);
        assert_relative_eq!(ub.factors[1].coupling, 1.0, max_relative = 1e-8);
        assert_relative_eq!(ub.factors[0].eta, 4.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(ub.factors[0].coupling, 1.018_792_971_647_471, max_relative = 1e-8);
    }

    #[test]
    fn separable_bound_exceeds_sliced_bread() {
        let alpha = ExponentVector::new(&[2.0, 1.0]).unwrap();
        let ub = UpperBound::new(&alpha, 60).unwrap();
        let m = OneDimModel::from_eigenvalues(2.0, (0..40).map(|k| (2 * k + 1) as f64).collect()).unwrap();
        let slice = SliceFunction::new(&alpha, BaseTrace::Model(TraceTable::new(m, 1e-6, 32).unwrap())).unwrap();
        let table = TraceTable::new(OneDimModel::compute(0.5, 60, 1e-8).unwrap(), 1e-3, 32).unwrap();
        let mut logs = Vec::new();
        for &t in &[0.05, 0.1, 0.2, 0.5, 1.0] {
            let u = ub.eval(t).unwrap();
            let sb = z_sliced_bread(&alpha, t, &slice, &table).unwrap();
            assert!(u.value > sb.value, "t = {t}");
            logs.push((libm::log(t), libm::log(u.value)));
        }
        // small-t power of the bound is steeper than d_n + 1/2 = 2.5
        let slope = -(logs[1].1 - logs[0].1) / (logs[1].0 - logs[0].0);
        assert!(slope > 2.5, "slope {slope}");
    }
}
