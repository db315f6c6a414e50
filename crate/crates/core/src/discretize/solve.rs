use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::linalg::{sturm_count, tridiag_lowest};
use crate::spectral::Spectrum;

use super::krylov::{krylov_schur, KrylovOptions, Want};
use super::operator::DiscreteOperator;
use super::sector::{Sector, ShiftedFactor, FACTOR_ENTRY_CAP};

/// Knobs for the sparse eigensolvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Largest k as a fraction of the number of unknowns.
    pub max_fraction: f64,
    /// Eigenvalues per shift-invert window.
    pub window: usize,
    /// Relative residual tolerance for Ritz pairs.
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { max_fraction: 0.25, window: 48, tol: 1e-10, max_restarts: 300, seed: 0x5eed }
    }
}

/// The k lowest eigenvalues of the discrete operator.
pub fn eigenvalues(op: &DiscreteOperator, k: usize) -> Result<Spectrum> {
    eigenvalues_with(op, k, &EigenOptions::default())
}

pub fn eigenvalues_with(op: &DiscreteOperator, k: usize, opts: &EigenOptions) -> Result<Spectrum> {
    if k == 0 {
        return Err(invalid!("k must be positive"));
    }
    let limit = libm::floor(op.size() as f64 * opts.max_fraction) as usize;
    if k > limit {
        return Err(invalid!("k = {k} exceeds {} of the {} unknowns", opts.max_fraction, op.size()));
    }
    if op.dim() == 1 {
        let t = op.tridiagonal()?;
        let vals = tridiag_lowest(&t, k, 1e-14);
        let conv = vec![1e-14; vals.len()];
        return Spectrum::new(vals, conv, f64::INFINITY);
    }
    let sectors = sectors_of(op)?;
    let (vals, conv) = if sectors.iter().all(|s| s.factor_entries() <= FACTOR_ENTRY_CAP) {
        lowest_by_slicing(&sectors, k, opts)?
    } else {
        lowest_by_plain_krylov(&sectors, k, opts)?
    };
    Spectrum::new(vals, conv, f64::INFINITY)
}

/// Every eigenvalue below `e` (sorted), by inertia-checked spectrum slicing.
pub fn eigenvalues_below(op: &DiscreteOperator, e: f64, opts: &EigenOptions) -> Result<Vec<f64>> {
    if op.dim() == 1 {
        let t = op.tridiagonal()?;
        let k = count_tridiag(&t.d, &t.e, e);
        return Ok(if k == 0 { Vec::new() } else { tridiag_lowest(&t, k, 1e-14) });
    }
    let sectors = sectors_of(op)?;
    let mut all = Vec::new();
    for (i, s) in sectors.iter().enumerate() {
        let m = s.factor(e)?.negatives;
        let (v, _) = window_eigs(s, 0.0, e, 0, m, opts, i as u64)?;
        all.extend(v);
    }
    all.sort_by(f64::total_cmp);
    Ok(all)
}

/// N(E) = #{λ < E} of the discrete operator from Sylvester's law of inertia.
pub fn count_below(op: &DiscreteOperator, e: f64) -> Result<usize> {
    if op.dim() == 1 {
        let t = op.tridiagonal()?;
        return Ok(count_tridiag(&t.d, &t.e, e));
    }
    let mut total = 0;
    for s in sectors_of(op)? {
        total += s.factor(e)?.negatives;
    }
    Ok(total)
}

fn count_tridiag(d: &[f64], e: &[f64], sigma: f64) -> usize {
    let e2: Vec<f64> = e.iter().map(|x| x * x).collect();
    let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    sturm_count(d, &e2, sigma, f64::MIN_POSITIVE.max(scale * 1e-300))
}

fn sectors_of(op: &DiscreteOperator) -> Result<Vec<Sector>> {
    Sector::parities(op.dim()).iter().map(|odd| Sector::build(op, odd)).collect()
}

fn factor_nonsingular(s: &Sector, sigma: f64, width: f64) -> Result<ShiftedFactor> {
    let mut sg = sigma;
    for attempt in 0..4 {
        let f = s.factor(sg)?;
        if f.zeros == 0 {
            return Ok(f);
        }
        sg = sigma + width * 1e-7 * (attempt + 1) as f64;
    }
    Err(Error::Convergence(format!("shift {sigma} stays singular")))
}

fn lowest_by_slicing(sectors: &[Sector], k: usize, opts: &EigenOptions) -> Result<(Vec<f64>, Vec<f64>)> {
    let count = |e: f64| -> Result<usize> {
        let mut c = 0;
        for s in sectors {
            c += s.factor(e)?.negatives;
        }
        Ok(c)
    };
    // bracket an energy with at least k eigenvalues below it, but not many more
    let mut hi = 1.0;
    let mut n_hi = count(hi)?;
    let mut lo = 0.0;
    while n_hi < k {
        lo = hi;
        hi *= 2.0;
        n_hi = count(hi)?;
        if hi > 1e300 {
            return Err(Error::Convergence("no energy bracket holds k eigenvalues".into()));
        }
    }
    let slack = (k / 2).max(16);
    for _ in 0..40 {
        if n_hi <= k + slack {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let n_mid = count(mid)?;
        if n_mid >= k {
            hi = mid;
            n_hi = n_mid;
        } else {
            lo = mid;
        }
    }
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for (i, s) in sectors.iter().enumerate() {
        let m = s.factor(hi)?.negatives;
        let (v, c) = window_eigs(s, 0.0, hi, 0, m, opts, i as u64)?;
        pairs.extend(v.into_iter().zip(c));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.truncate(k);
    Ok(pairs.into_iter().unzip())
}

/// Eigenvalues of one sector in [lo, hi) given the counts below both ends.
fn window_eigs(
    s: &Sector,
    lo: f64,
    hi: f64,
    n_lo: usize,
    n_hi: usize,
    opts: &EigenOptions,
    salt: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = n_hi.saturating_sub(n_lo);
    if m == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if m > opts.window && hi - lo > 1e-12 * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        let n_mid = s.factor(mid)?.negatives;
        let (mut v1, mut c1) = window_eigs(s, lo, mid, n_lo, n_mid, opts, salt.wrapping_mul(31).wrapping_add(1))?;
        let (v2, c2) = window_eigs(s, mid, hi, n_mid, n_hi, opts, salt.wrapping_mul(31).wrapping_add(2))?;
        v1.extend(v2);
        c1.extend(c2);
        return Ok((v1, c1));
    }
    let sigma = 0.5 * (lo + hi);
    let f = factor_nonsingular(s, sigma, hi - lo)?;
    let sigma = f.sigma;
    let n = s.size;
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut vals = Vec::new();
    let mut conv = Vec::new();
    let mut buf = vec![0.0; n];
    for attempt in 0..4u64 {
        let need = m - vals.len();
        let extra = 4.min(n.saturating_sub(locked.len() + need));
        let nev = need + extra;
        let ko = KrylovOptions {
            ncv: (2 * nev + 20).max(40),
            tol: opts.tol,
            max_restarts: opts.max_restarts,
            seed: opts.seed ^ salt.wrapping_mul(0x9e37_79b9) ^ (attempt << 40),
        };
        let r = krylov_schur(
            n,
            |x, y| {
                buf.copy_from_slice(x);
                s.solve(&f, &buf, y);
            },
            Want::LargestMagnitude,
            nev,
            &locked,
            ko,
        )?;
        for ((theta, res), vec) in r.values.iter().zip(&r.residuals).zip(r.vectors) {
            let lam = sigma + 1.0 / theta;
            if lam >= lo && lam < hi && vals.len() < m {
                vals.push(lam);
                // |δλ| ≲ ‖r‖/θ²
                conv.push(res / (theta * theta * lam.abs().max(1e-300)));
                locked.push(vec);
            }
        }
        if vals.len() == m {
            return Ok((vals, conv));
        }
    }
    Err(Error::Convergence(format!(
        "window [{lo}, {hi}) holds {m} eigenvalues by inertia, Krylov found {}",
        vals.len()
    )))
}

fn lowest_by_plain_krylov(sectors: &[Sector], k: usize, opts: &EigenOptions) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for (i, s) in sectors.iter().enumerate() {
        let nev = k.min(s.size / 2).max(1);
        let ko = KrylovOptions {
            ncv: (2 * nev + 30).max(60),
            tol: opts.tol,
            max_restarts: opts.max_restarts * 20,
            seed: opts.seed ^ (i as u64 + 1),
        };
        let r = krylov_schur(s.size, |x, y| s.matvec(x, y), Want::Smallest, nev, &[], ko)?;
        for (v, res) in r.values.iter().zip(&r.residuals) {
            pairs.push((*v, res / v.abs().max(1e-300)));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.truncate(k);
    Ok(pairs.into_iter().unzip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{build_dirichlet_nd, build_operator_1d, build_operator_nd, GridSpec};
    use crate::linalg::sym_eigen;
    use crate::spectral::ExponentVector;

    #[test]
    fn harmonic_1d() {
        let g = GridSpec::uniform_1d(12.0, 2399).unwrap();
        let op = build_operator_1d(2.0, 1.0, &g).unwrap();
        let s = eigenvalues(&op, 3).unwrap();
        for (k, v) in s.eigenvalues.iter().enumerate() {
            assert!((v - (2 * k + 1) as f64).abs() < 1e-4 * (2 * k + 1) as f64);
        }
        assert_eq!(count_below(&op, 4.0).unwrap(), 2);
    }

    #[test]
    fn k_fraction_is_enforced() {
        let g = GridSpec::uniform_1d(5.0, 39).unwrap();
        let op = build_operator_1d(2.0, 1.0, &g).unwrap();
        assert!(eigenvalues(&op, 11).is_err());
        assert!(eigenvalues(&op, 9).is_ok());
    }

    #[test]
    fn slicing_matches_dense_2d() {
        let alpha = ExponentVector::new(&[2.0, 1.0]).unwrap();
        let g = GridSpec::new(&[4.0, 6.0], &[31, 45]).unwrap();
        let op = build_operator_nd(&alpha, &g).unwrap();
        let dense = sym_eigen(&op.to_dense().unwrap(), op.size()).values;
        let opts = EigenOptions { window: 10, ..EigenOptions::default() };
        let s = eigenvalues_with(&op, 60, &opts).unwrap();
        for (a, b) in s.eigenvalues.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-8 * b, "{a} vs {b}");
        }
        let below = eigenvalues_below(&op, dense[30] + 1e-6, &opts).unwrap();
        assert_eq!(below.len(), 31);
        assert_eq!(count_below(&op, dense[30] + 1e-6).unwrap(), 31);
    }

    #[test]
    fn dirichlet_and_plain_krylov_agree_with_dense() {
        let alpha = ExponentVector::new(&[1.0, 1.0]).unwrap();
        let g = GridSpec::new(&[3.0, 3.0], &[29, 29]).unwrap();
        let op = build_dirichlet_nd(&alpha, &g).unwrap();
        let dense = sym_eigen(&op.to_dense().unwrap(), op.size()).values;
        let sectors = sectors_of(&op).unwrap();
        let (plain, _) = lowest_by_plain_krylov(&sectors, 8, &EigenOptions::default()).unwrap();
        let s = eigenvalues(&op, 8).unwrap();
        for k in 0..8 {
            assert!((s.eigenvalues[k] - dense[k]).abs() < 1e-8 * dense[k]);
            assert!((plain[k] - dense[k]).abs() < 1e-7 * dense[k]);
        }
    }
}
