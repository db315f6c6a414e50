//! Direction of the coupling scaling for the cross-section operator
//! B_r = -d²/dy² + r|y|^{α0} of a two-dimensional problem (n = 2).
//!
//! Both solvers take the coupling r directly, so no rescaling identity is
//! assumed. The eigenvalues scale by r^{1/η}, i.e. N_r(E) = N_1(r^{-1/η} E);
//! the reading N_r(E) = N_1(r^η E) is ruled out.

use hypercross_core::discretize::{converge_problem, power1d_spectrum, BoxOptions, ConvergeOptions, Problem};
use hypercross_core::spectral::lemma_exponents;

const K: usize = 12;

fn shooting(alpha0: f64, r: f64) -> Vec<f64> {
    power1d_spectrum(alpha0, r, K, 1e-10).unwrap().eigenvalues
}

fn finite_difference(alpha0: f64, r: f64) -> Vec<f64> {
    let p = Problem::Power1d { gamma: alpha0, coupling: r };
    converge_problem(&p, K, &ConvergeOptions::new(1e-6, 8), &BoxOptions::default()).unwrap().eigenvalues
}

fn count(s: &[f64], e: f64) -> usize {
    s.iter().filter(|&&l| l <= e).count()
}

#[test]
fn eigenvalues_scale_with_r_to_the_inverse_eta() {
    for &alpha0 in &[1.0, 2.0, 3.0] {
        let eta = lemma_exponents(1.0, 2, alpha0).unwrap().eta;
        for &r in &[0.25, 3.0, 10.0] {
            let base = shooting(alpha0, 1.0);
            for solver in [shooting as fn(f64, f64) -> Vec<f64>, finite_difference] {
                let sr = solver(alpha0, r);
                for (a, b) in base.iter().zip(&sr) {
                    let ratio = b / a;
                    let want = r.powf(1.0 / eta);
                    assert!((ratio - want).abs() < 1e-5 * want, "α0 {alpha0} r {r}: {ratio} vs {want}");
                    let other = r.powf(-eta);
                    assert!((ratio - other).abs() > 0.1 * want);
                }
            }
        }
    }
}

#[test]
fn counting_functions_match_under_the_inverse_eta_map() {
    let (alpha0, r) = (1.0, 5.0);
    let eta = lemma_exponents(1.0, 2, alpha0).unwrap().eta;
    let base = shooting(alpha0, 1.0);
    let sr = shooting(alpha0, r);
    let mut mismatched_other = 0;
    for w in sr.windows(2) {
        let e = 0.5 * (w[0] + w[1]);
        assert_eq!(count(&sr, e), count(&base, r.powf(-1.0 / eta) * e), "E = {e}");
        if count(&sr, e) != count(&base, r.powf(eta) * e) {
            mismatched_other += 1;
        }
    }
    assert_eq!(mismatched_other, K - 1);
}
