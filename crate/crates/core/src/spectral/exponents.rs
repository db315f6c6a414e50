use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Potential exponents α = (α_1, …, α_n), stored in descending order.
///
/// `permutation()[i]` is the caller's index of the i-th stored entry, so
/// unsorted input can be mapped back.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExponentVector {
    alphas: Vec<f64>,
    permutation: Vec<usize>,
}

impl ExponentVector {
    pub fn new(alphas: &[f64]) -> Result<Self> {
        if alphas.is_empty() {
            return Err(invalid!("exponent vector must have n >= 1 entries"));
        }
        if let Some(a) = alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(invalid!("exponents must be finite and strictly positive, got {a}"));
        }
        let mut permutation: Vec<usize> = (0..alphas.len()).collect();
        // stable: ties keep caller order
        permutation.sort_by(|&i, &j| alphas[j].total_cmp(&alphas[i]));
        let sorted = permutation.iter().map(|&i| alphas[i]).collect();
        Ok(Self { alphas: sorted, permutation })
    }

    /// n copies of α_0.
    pub fn uniform(alpha0: f64, n: usize) -> Result<Self> {
        Self::new(&alloc::vec![alpha0; n])
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// Smallest exponent α_n (the slicing direction).
    pub fn last(&self) -> f64 {
        self.alphas[self.alphas.len() - 1]
    }

    /// α_n < α_{n-1}: the hypothesis of the distinct-exponent theorems.
    pub fn last_is_strict(&self) -> bool {
        let n = self.n();
        n >= 2 && self.alphas[n - 1] < self.alphas[n - 2]
    }

    /// All exponents strictly decreasing.
    pub fn is_strictly_decreasing(&self) -> bool {
        self.alphas.windows(2).all(|w| w[0] > w[1])
    }

    pub fn all_equal(&self) -> bool {
        self.alphas.iter().all(|&a| a == self.alphas[0])
    }

    /// Exponents of `(V_α)^j`, i.e. (jα_1, …, jα_n).
    pub fn powered(&self, j: f64) -> Result<Self> {
        let v: Vec<f64> = self.alphas.iter().map(|a| a * j).collect();
        Self::new(&v)
    }

    /// Drop the last (smallest) exponent: the exponents of H_{n-1}.
    pub fn base(&self) -> Result<Self> {
        if self.n() < 2 {
            return Err(invalid!("base operator needs n >= 2"));
        }
        Self::new(&self.alphas[..self.n() - 1])
    }

    /// Σ α_i: the homogeneity degree of the product potential.
    pub fn degree(&self) -> f64 {
        self.alphas.iter().sum()
    }

    /// Π |x_i|^{α_i}, with |0|^α = 0 exactly.
    pub fn potential(&self, x: &[f64]) -> f64 {
        let mut v = 1.0;
        for (xi, a) in x.iter().zip(&self.alphas) {
            v *= abs_pow(*xi, *a);
            if v == 0.0 {
                return 0.0;
            }
        }
        v
    }
}

/// |x|^a with fast paths for the common small integer exponents.
#[inline]
pub fn abs_pow(x: f64, a: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        0.0
    } else if a == 1.0 {
        ax
    } else if a == 2.0 {
        ax * ax
    } else if a == 0.5 {
        libm::sqrt(ax)
    } else if a == 3.0 {
        ax * ax * ax
    } else if a == 4.0 {
        let s = ax * ax;
        s * s
    } else {
        libm::pow(ax, a)
    }
}

/// d_n = (α_1 + … + α_{n-1} + 2) / (2α_n).
pub fn dim_exponent(alpha: &ExponentVector) -> Result<f64> {
    let n = alpha.n();
    if n < 2 {
        return Err(invalid!("d_n needs n >= 2, got n = {n}"));
    }
    let s: f64 = alpha.alphas()[..n - 1].iter().sum();
    Ok((s + 2.0) / (2.0 * alpha.last()))
}

/// q = (α_1 + … + α_{n-1}) / (2α_n).
pub fn q_exponent(alpha: &ExponentVector) -> Result<f64> {
    let n = alpha.n();
    if n < 2 {
        return Err(invalid!("q needs n >= 2, got n = {n}"));
    }
    let s: f64 = alpha.alphas()[..n - 1].iter().sum();
    Ok(s / (2.0 * alpha.last()))
}

/// Exponents of the one-dimensional slice lemma and of the equal-exponent
/// induction.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingExponents {
    pub d_n: f64,
    pub q: f64,
    pub tau: f64,
    pub eta: f64,
    pub mu: f64,
    pub b_n: f64,
}

/// τ = 2/(γ+2), μ = (γ+2)/(2γ) for the slice exponent γ; η, d_n, b_n and q
/// for n equal exponents α_0.
pub fn lemma_exponents(gamma: f64, n: usize, alpha0: f64) -> Result<ScalingExponents> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(invalid!("gamma must be positive, got {gamma}"));
    }
    if !(alpha0.is_finite() && alpha0 > 0.0) || n == 0 {
        return Err(invalid!("need n >= 1 and alpha0 > 0"));
    }
    let nm1 = (n - 1) as f64;
    let d_n = nm1 / 2.0 + 1.0 / alpha0;
    Ok(ScalingExponents {
        d_n,
        q: nm1 / 2.0,
        tau: 2.0 / (gamma + 2.0),
        eta: (nm1 * alpha0 + 2.0) / 2.0,
        mu: (gamma + 2.0) / (2.0 * gamma),
        b_n: d_n / (d_n + 0.5),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sorts_and_records_permutation() {
        let a = ExponentVector::new(&[1.0, 3.0, 2.0]).unwrap();
        assert_eq!(a.alphas(), &[3.0, 2.0, 1.0]);
        assert_eq!(a.permutation(), &[1, 2, 0]);
        assert!(ExponentVector::new(&[1.0, 0.0]).is_err());
        assert!(ExponentVector::new(&[]).is_err());
    }

    #[test]
    fn dimension_exponents() {
        let e = |v: &[f64]| ExponentVector::new(v).unwrap();
        assert_eq!(dim_exponent(&e(&[2.0, 1.0])).unwrap(), 2.0);
        assert_eq!(dim_exponent(&e(&[1.0, 1.0])).unwrap(), 1.5);
        assert_eq!(dim_exponent(&e(&[3.0, 2.0, 1.0])).unwrap(), 3.5);
        assert_eq!(q_exponent(&e(&[2.0, 1.0])).unwrap(), 1.0);
        assert_eq!(q_exponent(&e(&[3.0, 2.0, 1.0])).unwrap(), 2.5);
        assert_eq!(q_exponent(&e(&[1.0; 5])).unwrap(), 2.0);
        assert!(dim_exponent(&e(&[2.0])).is_err());
        assert!(q_exponent(&e(&[2.0])).is_err());
    }

    #[test]
    fn lemma_examples() {
        let s = lemma_exponents(2.0, 2, 1.0).unwrap();
        assert_eq!((s.tau, s.mu), (0.5, 1.0));
        let s = lemma_exponents(1.0, 2, 1.0).unwrap();
        assert_eq!(s.tau, 2.0 / 3.0);
        assert_eq!(s.mu, 1.5);
        assert_eq!((s.eta, s.d_n, s.b_n), (1.5, 1.5, 0.75));
        assert!(lemma_exponents(0.0, 2, 1.0).is_err());
    }

    #[test]
    fn potential_vanishes_on_axes() {
        let a = ExponentVector::new(&[1.0, 1.0]).unwrap();
        for y in [-3.0, 0.0, 5.0] {
            assert_eq!(a.potential(&[0.0, y]), 0.0);
        }
        assert_eq!(a.potential(&[-2.0, 3.0]), 6.0);
    }

    proptest! {
        #[test]
        fn equal_exponents_agree(a0 in 0.1f64..6.0, n in 2usize..6) {
            let d = dim_exponent(&ExponentVector::uniform(a0, n).unwrap()).unwrap();
            let l = lemma_exponents(1.0, n, a0).unwrap();
            prop_assert!((d - l.d_n).abs() <= 1e-12 * d);
            prop_assert!((d - ((n - 1) as f64 / 2.0 + 1.0 / a0)).abs() <= 1e-12 * d);
        }

        #[test]
        fn mu_and_b_ranges(g in 0.01f64..50.0, n in 1usize..6, a0 in 0.05f64..10.0) {
            let s = lemma_exponents(g, n, a0).unwrap();
            prop_assert!((s.mu - (0.5 + 1.0 / g)).abs() < 1e-12 * s.mu);
            prop_assert!(s.b_n > 0.0 && s.b_n < 1.0);
        }

        #[test]
        fn sorted_descending(v in proptest::collection::vec(0.01f64..10.0, 1..5)) {
            let a = ExponentVector::new(&v).unwrap();
            prop_assert!(a.alphas().windows(2).all(|w| w[0] >= w[1]));
            for (i, &p) in a.permutation().iter().enumerate() {
                prop_assert_eq!(a.alphas()[i], v[p]);
            }
        }
    }
}
