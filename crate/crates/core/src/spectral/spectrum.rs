use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

/// Ascending lowest eigenvalues with per-eigenvalue convergence estimates.
///
/// `reliability_cutoff` is the energy above which box truncation makes the
/// list untrustworthy; exact spectra use +∞.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub convergence: Vec<f64>,
    pub reliability_cutoff: f64,
}

impl Spectrum {
    pub fn new(eigenvalues: Vec<f64>, convergence: Vec<f64>, reliability_cutoff: f64) -> Result<Self> {
        if eigenvalues.len() != convergence.len() {
            return Err(invalid!("eigenvalue and convergence lists differ in length"));
        }
        if eigenvalues.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(invalid!("eigenvalues must be finite and positive"));
        }
        if eigenvalues.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid!("eigenvalues must be ascending"));
        }
        if convergence.iter().any(|c| !c.is_finite()) {
            return Err(invalid!("convergence estimates must be finite"));
        }
        if reliability_cutoff.is_nan() {
            return Err(invalid!("reliability cutoff is NaN"));
        }
        Ok(Self { eigenvalues, convergence, reliability_cutoff })
    }

    /// Known exact eigenvalues (zero convergence estimate, no cutoff).
    pub fn exact(eigenvalues: Vec<f64>) -> Result<Self> {
        let n = eigenvalues.len();
        Self::new(eigenvalues, alloc::vec![0.0; n], f64::INFINITY)
    }

    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn last(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }

    /// N(E) = #{λ_j ≤ E}; refuses energies above the reliability cutoff.
    pub fn counting(&self, e: f64) -> Result<usize> {
        if e > self.reliability_cutoff {
            return Err(Error::Untrusted(alloc::format!(
                "E = {e} exceeds the reliability cutoff {}",
                self.reliability_cutoff
            )));
        }
        Ok(self.eigenvalues.partition_point(|&l| l <= e))
    }

    /// Multiply every eigenvalue (and the cutoff) by a positive factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            eigenvalues: self.eigenvalues.iter().map(|e| e * factor).collect(),
            convergence: self.convergence.clone(),
            reliability_cutoff: self.reliability_cutoff * factor,
        }
    }

    /// First `k` eigenvalues.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.k());
        Self {
            eigenvalues: self.eigenvalues[..k].to_vec(),
            convergence: self.convergence[..k].to_vec(),
            reliability_cutoff: self.reliability_cutoff,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn counting_examples() {
        let s = Spectrum::exact(vec![1.0, 3.0, 5.0, 7.0]).unwrap();
        assert_eq!(s.counting(4.0).unwrap(), 2);
        assert_eq!(s.counting(0.5).unwrap(), 0);
        assert_eq!(s.counting(3.0).unwrap(), 2);
    }

    #[test]
    fn counting_respects_cutoff() {
        let s = Spectrum::new(vec![1.0, 2.0], vec![0.0, 0.0], 1.5).unwrap();
        assert!(matches!(s.counting(1.7), Err(Error::Untrusted(_))));
    }

    #[test]
    fn rejects_bad_lists() {
        assert!(Spectrum::exact(vec![2.0, 1.0]).is_err());
        assert!(Spectrum::exact(vec![-1.0]).is_err());
        assert!(Spectrum::new(vec![1.0], vec![f64::NAN], 1.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn counting_is_monotone(mut v in proptest::collection::vec(0.1f64..100.0, 1..40), a in 0.0f64..120.0, b in 0.0f64..120.0) {
            v.sort_by(f64::total_cmp);
            let s = Spectrum::exact(v.clone()).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            proptest::prop_assert!(s.counting(lo).unwrap() <= s.counting(hi).unwrap());
            if lo < v[0] {
                proptest::prop_assert_eq!(s.counting(lo).unwrap(), 0);
            }
        }
    }
}
