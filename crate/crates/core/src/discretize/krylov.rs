use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::sym_eigen;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Want {
    /// Largest |θ| (shift-invert).
    LargestMagnitude,
    /// Smallest θ (plain).
    Smallest,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct KrylovOptions {
    pub(crate) ncv: usize,
    pub(crate) tol: f64,
    pub(crate) max_restarts: usize,
    pub(crate) seed: u64,
}

pub(crate) struct RitzSet {
    pub(crate) values: Vec<f64>,
    pub(crate) residuals: Vec<f64>,
    pub(crate) vectors: Vec<Vec<f64>>,
}

fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four independent accumulators so the loop vectorizes
    let mut acc = [0.0f64; 4];
    let (ca, ra) = a.split_at(a.len() - a.len() % 4);
    let (cb, rb) = b.split_at(ca.len());
    for (x, y) in ca.chunks_exact(4).zip(cb.chunks_exact(4)) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

const CHUNK: usize = 2048;

/// out_i = Σ_j basis_j c[j][i], computed in row chunks so each basis
/// vector is streamed once.
fn combine(basis: &[Vec<f64>], coef: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = coef.iter().map(|_| vec![0.0; n]).collect();
    let mut lo = 0;
    while lo < n {
        let hi = (lo + CHUNK).min(n);
        for (j, v) in basis.iter().enumerate() {
            let vc = &v[lo..hi];
            for (o, c) in out.iter_mut().zip(coef) {
                let cj = c[j];
                if cj != 0.0 {
                    axpy(cj, vc, &mut o[lo..hi]);
                }
            }
        }
        lo = hi;
    }
    out
}

fn normalize(v: &mut [f64]) -> f64 {
    let nrm = libm::sqrt(dot(v, v));
    if nrm > 0.0 {
        v.iter_mut().for_each(|x| *x /= nrm);
    }
    nrm
}

/// Classical Gram–Schmidt against `basis`, applied twice; returns the
/// summed coefficients.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut h = vec![0.0; basis.len()];
    let mut c = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (ci, v) in c.iter_mut().zip(basis) {
            *ci = dot(v, w);
        }
        let n = w.len();
        let mut lo = 0;
        while lo < n {
            let hi = (lo + CHUNK).min(n);
            for (ci, v) in c.iter().zip(basis) {
                axpy(-ci, &v[lo..hi], &mut w[lo..hi]);
            }
            lo = hi;
        }
        for (hi, ci) in h.iter_mut().zip(&c) {
            *hi += ci;
        }
    }
    h
}

fn random_start(n: usize, seed: &mut u64, locked: &[Vec<f64>], basis: &[Vec<f64>]) -> Result<Vec<f64>> {
    for _ in 0..5 {
        let mut v: Vec<f64> = (0..n).map(|_| splitmix(seed)).collect();
        orthogonalize(&mut v, locked);
        orthogonalize(&mut v, basis);
        if normalize(&mut v) > 1e-8 {
            return Ok(v);
        }
    }
    Err(Error::Convergence("could not draw a new Krylov start vector".into()))
}

/// Krylov–Schur iteration for `nev` eigenpairs of the symmetric operator
/// `op`, with full reorthogonalization against the basis and the `locked`
/// vectors.
pub(crate) fn krylov_schur<F>(
    n: usize,
    mut op: F,
    want: Want,
    nev: usize,
    locked: &[Vec<f64>],
    opts: KrylovOptions,
) -> Result<RitzSet>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let room = n.saturating_sub(locked.len());
    if nev == 0 {
        return Ok(RitzSet { values: Vec::new(), residuals: Vec::new(), vectors: Vec::new() });
    }
    if nev > room {
        return Err(Error::InvalidInput(format!("{nev} eigenpairs requested from a space of dimension {room}")));
    }
    let ncv = opts.ncv.max(nev + 2).min(room);
    let mut seed = opts.seed;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(ncv + 1);
    basis.push(random_start(n, &mut seed, locked, &[])?);
    // projected matrix, ncv × ncv row-major
    let mut t = vec![0.0; ncv * ncv];
    let mut kept = 0usize;
    let mut w = vec![0.0; n];
    for restart in 0..=opts.max_restarts {
        let mut beta = 0.0;
        for j in kept..ncv {
            op(&basis[j], &mut w);
            orthogonalize(&mut w, locked);
            let h = orthogonalize(&mut w, &basis);
            for (i, hi) in h.iter().enumerate().take(j + 1) {
                t[i * ncv + j] = *hi;
                t[j * ncv + i] = *hi;
            }
            beta = normalize(&mut w);
            if j + 1 < ncv {
                if beta < 1e-13 * libm::fabs(t[j * ncv + j]).max(1e-300) {
                    // invariant subspace: continue with a fresh direction
                    beta = 0.0;
                    basis.push(random_start(n, &mut seed, locked, &basis)?);
                } else {
                    basis.push(w.clone());
                }
                t[(j + 1) * ncv + j] = 0.0;
                t[j * ncv + j + 1] = 0.0;
            } else {
                basis.push(w.clone());
            }
        }
        let eig = sym_eigen(&t, ncv);
        let mut order: Vec<usize> = (0..ncv).collect();
        match want {
            Want::LargestMagnitude => {
                order.sort_by(|&a, &b| eig.values[b].abs().total_cmp(&eig.values[a].abs()));
            }
            Want::Smallest => order.sort_by(|&a, &b| eig.values[a].total_cmp(&eig.values[b])),
        }
        let scale = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let res = |i: usize| libm::fabs(beta * eig.vectors[(ncv - 1) * ncv + i]);
        let converged = order[..nev]
            .iter()
            .filter(|&&i| {
                let r = res(i);
                match want {
                    Want::LargestMagnitude => r <= opts.tol * eig.values[i].abs(),
                    Want::Smallest => r <= opts.tol * scale.max(eig.values[i].abs()),
                }
            })
            .count();
        let keep = if converged == nev { nev } else { (nev + (ncv - nev) / 2).min(ncv - 1) };
        // Ritz vectors for the kept set
        let coef: Vec<Vec<f64>> =
            order[..keep].iter().map(|&i| (0..ncv).map(|j| eig.vectors[j * ncv + i]).collect()).collect();
        let newbasis = combine(&basis[..ncv], &coef, n);
        if converged == nev {
            let values: Vec<f64> = order[..nev].iter().map(|&i| eig.values[i]).collect();
            let residuals: Vec<f64> = order[..nev].iter().map(|&i| res(i)).collect();
            return Ok(RitzSet { values, residuals, vectors: newbasis });
        }
        if restart == opts.max_restarts {
            break;
        }
        let resid = basis.pop().expect("basis holds ncv + 1 vectors");
        t.iter_mut().for_each(|x| *x = 0.0);
        for (a, &i) in order[..keep].iter().enumerate() {
            t[a * ncv + a] = eig.values[i];
        }
        basis = newbasis;
        basis.push(resid);
        kept = keep;
    }
    Err(Error::Convergence(format!(
        "Krylov-Schur: {nev} eigenpairs not converged after {} restarts",
        opts.max_restarts
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(x: &[f64], y: &mut [f64]) {
        let n = x.len();
        for i in 0..n {
            let mut s = 2.0 * x[i];
            if i > 0 {
                s -= x[i - 1];
            }
            if i + 1 < n {
                s -= x[i + 1];
            }
            y[i] = s;
        }
    }

    #[test]
    fn smallest_of_path_laplacian() {
        let n = 200;
        let opts = KrylovOptions { ncv: 40, tol: 1e-10, max_restarts: 400, seed: 3 };
        let r = krylov_schur(n, laplacian, Want::Smallest, 5, &[], opts).unwrap();
        for (k, v) in r.values.iter().enumerate() {
            let exact = 2.0 - 2.0 * libm::cos((k + 1) as f64 * core::f64::consts::PI / (n as f64 + 1.0));
            assert!((v - exact).abs() < 1e-8, "{v} vs {exact}");
        }
    }

    #[test]
    fn locked_vectors_are_skipped() {
        let n = 60;
        let opts = KrylovOptions { ncv: 30, tol: 1e-11, max_restarts: 500, seed: 9 };
        let r1 = krylov_schur(n, laplacian, Want::Smallest, 2, &[], opts).unwrap();
        let r2 = krylov_schur(n, laplacian, Want::Smallest, 2, &r1.vectors, opts).unwrap();
        let exact = |k: usize| 2.0 - 2.0 * libm::cos(k as f64 * core::f64::consts::PI / (n as f64 + 1.0));
        assert!((r2.values[0] - exact(3)).abs() < 1e-8);
        assert!((r2.values[1] - exact(4)).abs() < 1e-8);
    }

    #[test]
    fn largest_magnitude_of_diagonal() {
        let d: Vec<f64> = (0..50).map(|i| (i as f64) - 24.5).collect();
        let op = |x: &[f64], y: &mut [f64]| {
            for i in 0..x.len() {
                y[i] = d[i] * x[i];
            }
        };
        let opts = KrylovOptions { ncv: 20, tol: 1e-12, max_restarts: 200, seed: 1 };
        let r = krylov_schur(50, op, Want::LargestMagnitude, 2, &[], opts).unwrap();
        let mut v = r.values.clone();
        v.sort_by(f64::total_cmp);
        assert!((v[0] + 24.5).abs() < 1e-10 && (v[1] - 24.5).abs() < 1e-10);
    }
}
