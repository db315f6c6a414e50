//! Heat-trace and counting-function asymptotics: Karamata conversion,
//! Laplace–Stieltjes transforms of step data, law fits and spectral zeta
//! values with fitted tails.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::numeric::{least_squares, pairwise_sum};
use crate::special::{gamma, upper_gamma};
use crate::spectral::{AsymptoticLaw, Regime, Spectrum};

/// Heat law c Γ(l+1) t^{−l}|ln t|^d ↔ counting law c E^l (ln E)^d.
pub fn karamata_convert(law: &AsymptoticLaw) -> Result<AsymptoticLaw> {
    if !(law.power > 0.0) {
        return Err(invalid!("Karamata conversion needs a positive power"));
    }
    let g = gamma(law.power + 1.0);
    match law.regime {
        Regime::HeatTraceSmallT => AsymptoticLaw::new(law.power, law.log_power, law.constant / g, Regime::CountingLargeE),
        Regime::CountingLargeE => AsymptoticLaw::new(law.power, law.log_power, law.constant * g, Regime::HeatTraceSmallT),
    }
}

/// Samples (E_i, N(E_i)) of a counting function, E ascending.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepData {
    pub energies: Vec<f64>,
    pub counts: Vec<f64>,
    /// Largest energy at which the counts are trusted.
    pub reliability_cutoff: f64,
}

impl StepData {
    pub fn new(energies: Vec<f64>, counts: Vec<f64>, reliability_cutoff: f64) -> Result<Self> {
        if energies.len() != counts.len() {
            return Err(invalid!("energies and counts differ in length"));
        }
        if energies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid!("energies must be strictly ascending"));
        }
        if counts.windows(2).any(|w| w[1] < w[0]) || counts.iter().any(|c| !(*c >= 0.0)) {
            return Err(invalid!("counts must be nonnegative and nondecreasing"));
        }
        Ok(Self { energies, counts, reliability_cutoff })
    }

    /// One sample per eigenvalue: N(λ_j) = j + 1.
    pub fn from_spectrum(s: &Spectrum) -> Self {
        let mut energies = Vec::with_capacity(s.k());
        let mut counts = Vec::with_capacity(s.k());
        for (j, &l) in s.eigenvalues.iter().enumerate() {
            if energies.last() == Some(&l) {
                *counts.last_mut().unwrap() = (j + 1) as f64;
            } else {
                energies.push(l);
                counts.push((j + 1) as f64);
            }
        }
        Self { energies, counts, reliability_cutoff: s.reliability_cutoff }
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

/// ∫ e^{−tE} dN(E) from step data.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StieltjesValue {
    /// Σ ΔN_i e^{−t E_i}: exact when every jump sits on a sample.
    pub partial: f64,
    /// Σ ΔN_i (e^{−t E_{i−1}} − e^{−t E_i}): how much the sum can move when
    /// the jumps are anywhere inside their bins.
    pub bin_spread: f64,
    /// ∫_{E_max}^∞ e^{−tE} dN for N continued as N(E_max)(E/E_max)^l.
    pub remainder: f64,
    /// The l used for the continuation.
    pub tail_power: f64,
}

impl StieltjesValue {
    pub fn total(&self) -> f64 {
        self.partial + self.remainder
    }
}

/// Log-slope of N over the upper half (in log E) of the positive samples.
fn tail_power(data: &StepData) -> Option<f64> {
    let pts: Vec<(f64, f64)> = data
        .energies
        .iter()
        .zip(&data.counts)
        .filter(|(e, c)| **e > 0.0 && **c > 0.0)
        .map(|(e, c)| (libm::log(*e), libm::log(*c)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let (lo, hi) = (pts[0].0, pts[pts.len() - 1].0);
    let mid = 0.5 * (lo + hi);
    let upper: Vec<&(f64, f64)> = pts.iter().filter(|p| p.0 >= mid).collect();
    let sel: Vec<&(f64, f64)> = if upper.len() >= 2 { upper } else { pts.iter().collect() };
    let n = sel.len() as f64;
    let mx = sel.iter().map(|p| p.0).sum::<f64>() / n;
    let my = sel.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = sel.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = sel.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    Some((sxy / sxx).max(1e-6))
}

/// Laplace–Stieltjes transform of step data at t. Refuses when the
/// continuation beyond the last sample carries more than 5% of the total.
pub fn laplace_stieltjes(data: &StepData, t: f64) -> Result<StieltjesValue> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid!("t must be positive"));
    }
    if data.is_empty() || data.counts.iter().all(|&c| c == 0.0) {
        return Ok(StieltjesValue { partial: 0.0, bin_spread: 0.0, remainder: 0.0, tail_power: 0.0 });
    }
    let mut terms = Vec::with_capacity(data.len());
    let mut spread = Vec::with_capacity(data.len());
    let mut prev_n = 0.0;
    let mut prev_e: Option<f64> = None;
    for (&e, &n) in data.energies.iter().zip(&data.counts) {
        let dn = n - prev_n;
        if dn > 0.0 {
            let here = libm::exp(-t * e);
            terms.push(dn * here);
            let left = prev_e.map_or(here, |p| libm::exp(-t * p));
            spread.push(dn * (left - here));
        }
        prev_n = n;
        prev_e = Some(e);
    }
    let partial = pairwise_sum(&terms);
    let e_max = *data.energies.last().unwrap_or(&0.0);
    let n_max = *data.counts.last().unwrap_or(&0.0);
    let l = tail_power(data).unwrap_or(1.0);
    // ∫_{E_max}^∞ e^{−tE} d[N_max (E/E_max)^l] = N_max l (t E_max)^{−l} Γ(l, t E_max)
    let remainder = if e_max > 0.0 {
        n_max * l * libm::pow(t * e_max, -l) * upper_gamma(l, t * e_max)
    } else {
        0.0
    };
    let total = partial + remainder;
    if remainder > 0.05 * total {
        return Err(Error::Untrusted(format!(
            "cutoff remainder {remainder:.3e} is {:.1}% of the transform at t = {t}; extend the data past E = {e_max}",
            100.0 * remainder / total
        )));
    }
    Ok(StieltjesValue { partial, bin_spread: pairwise_sum(&spread), remainder, tail_power: l })
}

/// One candidate model in a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelFit {
    pub log_power: u32,
    pub power: f64,
    pub constant: f64,
    /// rms residual in log y.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitResult {
    pub law: AsymptoticLaw,
    pub residual: f64,
    pub window: (f64, f64),
    pub samples: usize,
    /// Every candidate, in the order given.
    pub model_comparison: Vec<ModelFit>,
}

impl FitResult {
    pub fn candidate(&self, d: u32) -> Option<&ModelFit> {
        self.model_comparison.iter().find(|m| m.log_power == d)
    }
}

/// Fit log y = log c ± l log x + d log|log x| for each candidate d.
///
/// For counting data x = E and the sign is +; for heat data x = t and the
/// sign is −. Samples outside `window` (inclusive) are ignored. The window
/// must contain at least 10 samples, and when a log candidate is present
/// the spread of log|log x| must be at least 0.1.
pub fn fit_asymptotic(xs: &[f64], ys: &[f64], regime: Regime, d_candidates: &[u32], window: (f64, f64)) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(invalid!("x and y differ in length"));
    }
    if d_candidates.is_empty() {
        return Err(invalid!("no candidate log powers"));
    }
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, _)| **x >= window.0 && **x <= window.1).map(|(x, y)| (*x, *y)).collect();
    if pts.len() < 10 {
        return Err(invalid!("only {} samples in the fit window, need 10", pts.len()));
    }
    if pts.iter().any(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(invalid!("fit data must be positive"));
    }
    let needs_log = d_candidates.iter().any(|&d| d > 0);
    let llx: Vec<f64> = pts.iter().map(|(x, _)| libm::log(libm::fabs(libm::log(*x)))).collect();
    if needs_log {
        if pts.iter().any(|(x, _)| *x == 1.0) {
            return Err(invalid!("log model undefined at x = 1"));
        }
        let (lo, hi) = llx.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if hi - lo < 0.1 {
            return Err(Error::Untrusted(format!(
                "log log range {:.3} in the window is too small to separate log models",
                hi - lo
            )));
        }
    }
    let sign = match regime {
        Regime::CountingLargeE => 1.0,
        Regime::HeatTraceSmallT => -1.0,
    };
    let lx: Vec<f64> = pts.iter().map(|(x, _)| libm::log(*x)).collect();
    let ly: Vec<f64> = pts.iter().map(|(_, y)| libm::log(*y)).collect();
    let ones = alloc::vec![1.0; pts.len()];
    let mut fits = Vec::with_capacity(d_candidates.len());
    for &d in d_candidates {
        let target: Vec<f64> = ly.iter().zip(&llx).map(|(y, ll)| y - d as f64 * ll).collect();
        let (beta, _) = least_squares(&[ones.clone(), lx.clone()], &target)
            .ok_or_else(|| Error::Untrusted("degenerate fit window".into()))?;
        let resid: Vec<f64> =
            target.iter().zip(&lx).map(|(y, x)| (y - beta[0] - beta[1] * x) * (y - beta[0] - beta[1] * x)).collect();
        let rms = libm::sqrt(pairwise_sum(&resid) / pts.len() as f64);
        fits.push(ModelFit { log_power: d, power: sign * beta[1], constant: libm::exp(beta[0]), residual: rms });
    }
    let best = *fits.iter().min_by(|a, b| a.residual.total_cmp(&b.residual)).unwrap_or(&fits[0]);
    let law = AsymptoticLaw::new(best.power, best.log_power, best.constant, regime)?;
    let wlo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let whi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(FitResult { law, residual: best.residual, window: (wlo, whi), samples: pts.len(), model_comparison: fits })
}

/// Fit counting data, with the window clipped to the reliability cutoff and
/// the lowest decade of the sampled energies dropped.
pub fn fit_counting(data: &StepData, d_candidates: &[u32]) -> Result<FitResult> {
    let e_top = data.energies.last().copied().unwrap_or(0.0).min(data.reliability_cutoff);
    let e_first = data.energies.iter().copied().find(|&e| e > 0.0).unwrap_or(0.0);
    let lo = (10.0 * e_first).min(e_top / 3.0);
    fit_asymptotic(&data.energies, &data.counts, Regime::CountingLargeE, d_candidates, (lo, e_top))
}

/// Tail model for [`spectral_zeta`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ZetaTail {
    None,
    WeylPower,
    WeylPowerLog,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZetaValue {
    pub s: f64,
    pub partial_sum: f64,
    pub tail_estimate: f64,
    pub total: f64,
    pub error: f64,
    /// Counting power l of the tail fit (0 without a tail).
    pub tail_power: f64,
}

/// Σ λ_k^{−s} over the spectrum plus ∫_{E_max}^∞ E^{−s} dN_fit(E).
///
/// The tail law is fitted to the upper quarter of the eigenvalue counts.
/// Its error is the change against a fit on the upper half, plus the tail
/// times 3× the fit residual and the relative count mismatch at E_max.
pub fn spectral_zeta(spectrum: &Spectrum, s: f64, tail: ZetaTail) -> Result<ZetaValue> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(invalid!("s must be positive"));
    }
    if spectrum.is_empty() {
        return Err(invalid!("empty spectrum"));
    }
    let terms: Vec<f64> = spectrum.eigenvalues.iter().map(|l| libm::pow(*l, -s)).collect();
    let partial = pairwise_sum(&terms);
    let d = match tail {
        ZetaTail::None => {
            return Ok(ZetaValue { s, partial_sum: partial, tail_estimate: 0.0, total: partial, error: 0.0, tail_power: 0.0 })
        }
        ZetaTail::WeylPower => 0,
        ZetaTail::WeylPowerLog => 1,
    };
    let k = spectrum.k();
    if k < 20 {
        return Err(invalid!("a tail fit needs at least 20 eigenvalues, got {k}"));
    }
    let data = StepData::from_spectrum(spectrum);
    let e_hi = data.energies[data.len() - 1];
    let near = zeta_tail(&data, s, d, data.energies[3 * data.len() / 4], e_hi)?;
    let wide = zeta_tail(&data, s, d, data.energies[data.len() / 2], e_hi)?;
    let tail_value = near.0;
    let error = (near.0 - wide.0).abs() + tail_value * near.1;
    Ok(ZetaValue {
        s,
        partial_sum: partial,
        tail_estimate: tail_value,
        total: partial + tail_value,
        error,
        tail_power: near.2,
    })
}

/// Tail ∫_{E_max}^∞ E^{−s} dN for the law fitted on [e_lo, e_max]:
/// (value, relative spread, power).
fn zeta_tail(data: &StepData, s: f64, d: u32, e_lo: f64, em: f64) -> Result<(f64, f64, f64)> {
    let fit = fit_asymptotic(&data.energies, &data.counts, Regime::CountingLargeE, &[d], (e_lo, em))?;
    let m = fit.model_comparison[0];
    let (c, l) = (m.constant, m.power);
    if !(s > l) {
        return Err(Error::Divergent(format!("Σλ^(−s) diverges: s = {s} but the counting power is {l:.4}")));
    }
    let beta = s - l;
    let emb = libm::pow(em, -beta);
    // dN = c(l E^{l−1} (ln E)^d + d E^{l−1} (ln E)^{d−1}) dE
    let value = if d == 0 {
        c * l * emb / beta
    } else {
        let lnm = libm::log(em);
        c * (l * emb * (lnm / beta + 1.0 / (beta * beta)) + emb / beta)
    };
    let n_fit = c * libm::pow(em, l) * libm::pow(libm::log(em), d as f64);
    let n_max = *data.counts.last().unwrap_or(&1.0);
    Ok((value, 3.0 * fit.residual + (n_fit / n_max - 1.0).abs(), l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat::heat_trace;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    #[test]
    fn karamata_examples() {
        let heat = AsymptoticLaw::new(2.0, 0, 2.0, Regime::HeatTraceSmallT).unwrap();
        let c = karamata_convert(&heat).unwrap();
        assert_eq!((c.power, c.log_power, c.regime), (2.0, 0, Regime::CountingLargeE));
        assert_relative_eq!(c.constant, 1.0, max_relative = 1e-15);
        let back = karamata_convert(&c).unwrap();
        assert_eq!(back.regime, heat.regime);
        assert_relative_eq!(back.constant, heat.constant, max_relative = 1e-15);
    }

    #[test]
    fn geometric_series_from_integer_steps() {
        let e: Vec<f64> = (1..=60).map(|j| j as f64).collect();
        let n = e.clone();
        let d = StepData::new(e, n, f64::INFINITY).unwrap();
        let v = laplace_stieltjes(&d, 1.0).unwrap();
        assert_relative_eq!(v.total(), 1.0 / (core::f64::consts::E - 1.0), max_relative = 1e-12);
    }

    #[test]
    fn transform_of_e_squared() {
        let de = 0.02;
        let e: Vec<f64> = (1..=200_000).map(|j| j as f64 * de).collect();
        let n: Vec<f64> = e.iter().map(|x| x * x).collect();
        let d = StepData::new(e, n, f64::INFINITY).unwrap();
        for t in [2e-3, 1e-2, 1e-1] {
            let v = laplace_stieltjes(&d, t).unwrap();
            assert_relative_eq!(v.total(), 2.0 / (t * t), max_relative = 0.01);
        }
        assert!(laplace_stieltjes(&d, 1e-3).is_err());
    }

    #[test]
    fn empty_data_transforms_to_zero() {
        let d = StepData::new(Vec::new(), Vec::new(), f64::INFINITY).unwrap();
        assert_eq!(laplace_stieltjes(&d, 1.0).unwrap().total(), 0.0);
    }

    #[test]
    fn short_data_is_refused() {
        let e: Vec<f64> = (1..=5).map(|j| j as f64).collect();
        let d = StepData::new(e.clone(), e, f64::INFINITY).unwrap();
        assert!(matches!(laplace_stieltjes(&d, 0.01), Err(Error::Untrusted(_))));
    }

    #[test]
    fn stieltjes_matches_heat_trace() {
        let s = Spectrum::exact((0..200).map(|k| libm::pow(k as f64 + 0.7, 1.3)).collect()).unwrap();
        let h = heat_trace(&s, 0.3).unwrap();
        let v = laplace_stieltjes(&StepData::from_spectrum(&s), 0.3).unwrap();
        assert_relative_eq!(v.partial, h.value, max_relative = 1e-14);
    }

    fn synthetic(c: f64, l: f64, d: u32) -> (Vec<f64>, Vec<f64>) {
        let e: Vec<f64> = (0..60).map(|i| libm::pow(10.0, 1.0 + 2.0 * i as f64 / 59.0)).collect();
        let n = e.iter().map(|x| c * libm::pow(*x, l) * libm::pow(libm::log(*x), d as f64)).collect();
        (e, n)
    }

    #[test]
    fn fit_recovers_pure_power() {
        let (e, n) = synthetic(3.0, 1.5, 0);
        let f = fit_asymptotic(&e, &n, Regime::CountingLargeE, &[0, 1], (1.0, 1e4)).unwrap();
        assert_eq!(f.law.log_power, 0);
        assert_relative_eq!(f.law.power, 1.5, max_relative = 1e-4);
        assert_relative_eq!(f.law.constant, 3.0, max_relative = 1e-4);
        assert!(f.candidate(1).unwrap().residual > f.residual);
    }

    #[test]
    fn fit_recovers_log_model() {
        let (e, n) = synthetic(0.3, 1.5, 1);
        let f = fit_asymptotic(&e, &n, Regime::CountingLargeE, &[0, 1], (1.0, 1e4)).unwrap();
        assert_eq!(f.law.log_power, 1);
        assert!((f.law.power - 1.5).abs() < 1e-3);
    }

    #[test]
    fn fit_needs_log_range() {
        let e: Vec<f64> = (0..20).map(|i| 100.0 + i as f64).collect();
        let n: Vec<f64> = e.iter().map(|x| x * x).collect();
        assert!(fit_asymptotic(&e, &n, Regime::CountingLargeE, &[0, 1], (1.0, 1e3)).is_err());
        assert!(fit_asymptotic(&e[..5], &n[..5], Regime::CountingLargeE, &[0], (1.0, 1e3)).is_err());
    }

    #[test]
    fn zeta_examples() {
        let s = Spectrum::exact(alloc::vec![1.0, 2.0, 4.0]).unwrap();
        assert_relative_eq!(spectral_zeta(&s, 1.0, ZetaTail::None).unwrap().total, 1.75, max_relative = 1e-15);
        let h = Spectrum::exact((0..200).map(|k| (2 * k + 1) as f64).collect()).unwrap();
        let z = spectral_zeta(&h, 2.0, ZetaTail::WeylPower).unwrap();
        assert!((z.total - PI * PI / 8.0).abs() <= z.error.max(1e-6), "{z:?}");
        assert!(z.tail_estimate > 0.0);
        assert!(matches!(spectral_zeta(&h, 0.9, ZetaTail::WeylPower), Err(Error::Divergent(_))));
    }

    proptest::proptest! {
        #[test]
        fn karamata_is_an_involution(l in 0.1f64..6.0, d in 0u32..3, c in 0.01f64..100.0) {
            let law = AsymptoticLaw::new(l, d, c, Regime::CountingLargeE).unwrap();
            let back = karamata_convert(&karamata_convert(&law).unwrap()).unwrap();
            proptest::prop_assert_eq!(back.power, l);
            proptest::prop_assert_eq!(back.log_power, d);
            proptest::prop_assert!((back.constant / c - 1.0).abs() < 1e-14);
        }

        #[test]
        fn zeta_decreases_and_is_log_convex(s in 1.2f64..3.0) {
            let h = Spectrum::exact((0..100).map(|k| (2 * k + 1) as f64).collect()).unwrap();
            let ds = 0.05;
            let a = spectral_zeta(&h, s, ZetaTail::WeylPower).unwrap().total;
            let b = spectral_zeta(&h, s + ds, ZetaTail::WeylPower).unwrap().total;
            let c = spectral_zeta(&h, s + 2.0 * ds, ZetaTail::WeylPower).unwrap().total;
            proptest::prop_assert!(b < a);
            proptest::prop_assert!(b * b <= a * c * (1.0 + 1e-12));
        }
    }
}
