//! Spectrum → heat trace → Tauberian fit, and Monte Carlo against the
//! spectral side, on one-dimensional problems with known answers.

use hypercross_core::discretize::power1d_spectrum;
use hypercross_core::fk::{fk_trace, FkPotential, McParams};
use hypercross_core::heat::heat_trace;
use hypercross_core::tauberian::{fit_counting, laplace_stieltjes, StepData};

#[test]
fn quartic_counting_power_and_stieltjes_agree() {
    // N(E) ~ c E^{1/2 + 1/γ} for -d²/dx² + x^4
    let s = power1d_spectrum(4.0, 1.0, 120, 1e-10).unwrap();
    let data = StepData::from_spectrum(&s);
    let fit = fit_counting(&data, &[0]).unwrap();
    assert!((fit.law.power - 0.75).abs() < 0.02, "power {}", fit.law.power);
    // c = (2/π)∫₀¹ √(1-u⁴) du
    let c = 2.0 / std::f64::consts::PI * 0.874_019_184_764_039_1;
    // Bohr–Sommerfeld: N(λ_j) = j + 1 ≈ c λ_j^{3/4} + 1/2
    let (j, top) = (s.k() - 1, *s.eigenvalues.last().unwrap());
    let ratio = (j as f64 + 0.5) / (c * top.powf(0.75));
    assert!((ratio - 1.0).abs() < 1e-3, "N/Weyl = {ratio}, fitted constant {}", fit.law.constant);
    for t in [0.2, 0.5, 1.0] {
        let h = heat_trace(&s, t).unwrap();
        let ls = laplace_stieltjes(&data, t).unwrap();
        assert!((ls.total() - h.value).abs() <= h.error + ls.remainder + 1e-12, "t = {t}");
    }
}

#[test]
fn harmonic_path_integral_matches_the_spectrum() {
    let s = power1d_spectrum(2.0, 1.0, 60, 1e-10).unwrap();
    let mc = McParams { paths: 40_000, steps: 128, seed: 11, cells_per_axis: None };
    for t in [0.5, 1.0] {
        let z = heat_trace(&s, t).unwrap().value;
        let exact = 0.5 / t.sinh();
        assert!((z - exact).abs() < 1e-8);
        let e = fk_trace(&FkPotential::Power { gamma: 2.0, coupling: 1.0 }, t, &mc).unwrap();
        assert!((e.mean - exact).abs() < 4.0 * e.stderr + 2e-3 * exact, "t = {t}: {} ± {} vs {exact}", e.mean, e.stderr);
    }
}

#[test]
fn path_integral_is_reproducible_from_the_seed() {
    let mc = McParams { paths: 5_000, steps: 32, seed: 3, cells_per_axis: None };
    let p = FkPotential::Power { gamma: 1.0, coupling: 1.0 };
    let a = fk_trace(&p, 0.7, &mc).unwrap();
    let b = fk_trace(&p, 0.7, &mc).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    let c = fk_trace(&p, 0.7, &McParams { seed: 4, ..mc }).unwrap();
    assert_ne!(a.mean.to_bits(), c.mean.to_bits());
}
