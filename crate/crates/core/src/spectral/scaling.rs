use crate::error::{invalid, Result};

use super::spectrum::Spectrum;

fn check(c: f64, p: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(invalid!("scaling constant must be positive, got {c}"));
    }
    if p == -2.0 || !p.is_finite() {
        return Err(invalid!("homogeneity degree p = {p} is excluded"));
    }
    Ok(())
}

/// σ(-Δ + cV) = c^{2/(p+2)} σ(-Δ + V) for V homogeneous of degree p.
pub fn scale_potential_spectrum(spectrum: &Spectrum, c: f64, p: f64) -> Result<Spectrum> {
    check(c, p)?;
    Ok(spectrum.scaled(libm::pow(c, 2.0 / (p + 2.0))))
}

/// σ(-cΔ + V) = c^{p/(p+2)} σ(-Δ + V) for V homogeneous of degree p.
pub fn scale_laplacian_spectrum(spectrum: &Spectrum, c: f64, p: f64) -> Result<Spectrum> {
    check(c, p)?;
    Ok(spectrum.scaled(libm::pow(c, p / (p + 2.0))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use approx::assert_relative_eq;

    fn sp(v: &[f64]) -> Spectrum {
        Spectrum::exact(v.to_vec()).unwrap()
    }

    #[test]
    fn harmonic_examples() {
        let s = sp(&[1.0, 3.0, 5.0]);
        assert_eq!(scale_potential_spectrum(&s, 4.0, 2.0).unwrap().eigenvalues, vec![2.0, 6.0, 10.0]);
        assert_eq!(scale_laplacian_spectrum(&s, 4.0, 2.0).unwrap().eigenvalues, vec![2.0, 6.0, 10.0]);
        assert_eq!(scale_potential_spectrum(&s, 1.0, 3.0).unwrap(), s);
        assert_eq!(scale_laplacian_spectrum(&s, 1.0, 0.7).unwrap(), s);
    }

    #[test]
    fn linear_potential_examples() {
        let s = sp(&[1.018_793]);
        assert_relative_eq!(scale_potential_spectrum(&s, 8.0, 1.0).unwrap().eigenvalues[0], 4.075_172, max_relative = 1e-12);
        assert_relative_eq!(scale_laplacian_spectrum(&s, 8.0, 1.0).unwrap().eigenvalues[0], 2.037_586, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = sp(&[1.0]);
        assert!(scale_potential_spectrum(&s, 2.0, -2.0).is_err());
        assert!(scale_potential_spectrum(&s, 0.0, 1.0).is_err());
        assert!(scale_laplacian_spectrum(&s, -1.0, 1.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn composes_multiplicatively(c1 in 0.01f64..100.0, c2 in 0.01f64..100.0, p in -1.9f64..8.0) {
            let s = sp(&[0.5, 1.5, 2.25]);
            let two = scale_potential_spectrum(&scale_potential_spectrum(&s, c1, p).unwrap(), c2, p).unwrap();
            let one = scale_potential_spectrum(&s, c1 * c2, p).unwrap();
            let a: Vec<f64> = two.eigenvalues;
            for (x, y) in a.iter().zip(&one.eigenvalues) {
                proptest::prop_assert!((x - y).abs() <= 1e-12 * y.abs());
            }
        }
    }
}
