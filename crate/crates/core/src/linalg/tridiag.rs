use alloc::vec;
use alloc::vec::Vec;

/// Symmetric tridiagonal matrix: diagonal `d` and off-diagonal `e`
/// (`e.len() == d.len() - 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.d.len()
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.d.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.e[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.e[i].abs() } else { 0.0 };
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n {
            let mut s = self.d[i] * x[i];
            if i > 0 {
                s += self.e[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.e[i] * x[i + 1];
            }
            y[i] = s;
        }
    }
}

/// Number of eigenvalues strictly below `sigma` (Sturm sequence / LDLᵀ
/// inertia), given the squared off-diagonal.
pub fn sturm_count(d: &[f64], e2: &[f64], sigma: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - sigma;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        q = d[i] - sigma - e2[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The k lowest eigenvalues by bisection with shared brackets, to relative
/// accuracy `rel_tol` (absolute floor from the matrix norm).
pub fn tridiag_lowest(t: &Tridiagonal, k: usize, rel_tol: f64) -> Vec<f64> {
    let n = t.dim();
    let k = k.min(n);
    if k == 0 {
        return Vec::new();
    }
    let e2: Vec<f64> = t.e.iter().map(|x| x * x).collect();
    let (glo, ghi) = t.gershgorin();
    let scale = glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
    let pivmin = f64::MIN_POSITIVE.max(scale * 1e-300).max(e2.iter().copied().fold(0.0, f64::max) * 1e-290);
    let abs_floor = 4.0 * f64::EPSILON * scale;
    let mut lo = vec![glo; k];
    let mut hi = vec![ghi; k];
    for j in 0..k {
        while hi[j] - lo[j] > (rel_tol * 0.5 * (lo[j].abs() + hi[j].abs())).max(abs_floor) {
            let mid = 0.5 * (lo[j] + hi[j]);
            if mid <= lo[j] || mid >= hi[j] {
                break;
            }
            let c = sturm_count(&t.d, &e2, mid, pivmin);
            for i in j..k {
                if i < c {
                    if mid < hi[i] {
                        hi[i] = mid;
                    }
                } else if mid > lo[i] {
                    lo[i] = mid;
                }
            }
        }
    }
    (0..k).map(|j| 0.5 * (lo[j] + hi[j])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eigen;

    #[test]
    fn free_laplacian_closed_form() {
        // -u'' on m interior points, h = 1/(m+1): 4/h² sin²(jπh/2)
        let m = 50;
        let h = 1.0 / (m as f64 + 1.0);
        let t = Tridiagonal { d: vec![2.0 / (h * h); m], e: vec![-1.0 / (h * h); m - 1] };
        let ev = tridiag_lowest(&t, 5, 1e-14);
        for (j, v) in ev.iter().enumerate() {
            let s = libm::sin((j as f64 + 1.0) * core::f64::consts::PI * h / 2.0);
            let want = 4.0 / (h * h) * s * s;
            assert!((v - want).abs() < 1e-10 * want);
        }
    }

    #[test]
    fn matches_dense_on_random() {
        let n = 30;
        let d: Vec<f64> = (0..n).map(|i| ((i * 7 % 11) as f64) - 3.0).collect();
        let e: Vec<f64> = (0..n - 1).map(|i| ((i * 5 % 7) as f64) * 0.3 + 0.1).collect();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = d[i];
            if i + 1 < n {
                a[i * n + i + 1] = e[i];
                a[(i + 1) * n + i] = e[i];
            }
        }
        let dense = sym_eigen(&a, n).values;
        let ours = tridiag_lowest(&Tridiagonal { d, e }, n, 1e-15);
        for (x, y) in ours.iter().zip(&dense) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
