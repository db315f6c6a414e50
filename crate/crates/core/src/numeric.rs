//! Small numerical utilities: summation, root bracketing, least squares.

use alloc::vec::Vec;

/// Pairwise (cascade) summation; error grows like log n instead of n.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Bisection for a sign change of `f` on [a, b]; returns the midpoint of
/// the final bracket.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol * (1.0 + m.abs()) {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Ordinary least squares for y ≈ X β with a few columns, via the normal
/// equations solved by Cholesky with column scaling. Returns (β, rms residual).
pub fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let p = cols.len();
    let n = y.len();
    if n < p || cols.iter().any(|c| c.len() != n) {
        return None;
    }
    let scale: Vec<f64> = cols
        .iter()
        .map(|c| {
            let s = libm::sqrt(c.iter().map(|v| v * v).sum::<f64>());
            if s > 0.0 { s } else { 1.0 }
        })
        .collect();
    let mut a = alloc::vec![0.0; p * p];
    let mut rhs = alloc::vec![0.0; p];
    for i in 0..p {
        for j in 0..p {
            let mut s = 0.0;
            for k in 0..n {
                s += cols[i][k] * cols[j][k];
            }
            a[i * p + j] = s / (scale[i] * scale[j]);
        }
        let mut s = 0.0;
        for k in 0..n {
            s += cols[i][k] * y[k];
        }
        rhs[i] = s / scale[i];
    }
    // Cholesky
    let mut l = alloc::vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let mut s = a[i * p + j];
            for k in 0..j {
                s -= l[i * p + k] * l[j * p + k];
            }
            if i == j {
                if s <= 1e-14 {
                    return None;
                }
                l[i * p + i] = libm::sqrt(s);
            } else {
                l[i * p + j] = s / l[j * p + j];
            }
        }
    }
    let mut z = alloc::vec![0.0; p];
    for i in 0..p {
        let mut s = rhs[i];
        for k in 0..i {
            s -= l[i * p + k] * z[k];
        }
        z[i] = s / l[i * p + i];
    }
    let mut beta = alloc::vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = z[i];
        for k in i + 1..p {
            s -= l[k * p + i] * beta[k];
        }
        beta[i] = s / l[i * p + i];
    }
    for i in 0..p {
        beta[i] /= scale[i];
    }
    let mut ss = 0.0;
    for k in 0..n {
        let mut fit = 0.0;
        for i in 0..p {
            fit += beta[i] * cols[i][k];
        }
        ss += (y[k] - fit) * (y[k] - fit);
    }
    Some((beta, libm::sqrt(ss / n as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-14);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-12).is_none());
    }

    #[test]
    fn least_squares_recovers_line() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 2.0 * v).collect();
        let (b, r) = least_squares(&[vec![1.0; 20], x], &y).unwrap();
        assert!((b[0] - 3.0).abs() < 1e-12 && (b[1] + 2.0).abs() < 1e-12 && r < 1e-12);
    }
}
