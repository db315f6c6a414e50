use alloc::vec;
use alloc::vec::Vec;

/// Symmetric indefinite factorization P A Pᵀ = L D Lᵀ with Bunch–Kaufman
/// pivoting (1×1 and 2×2 diagonal blocks). Gives the inertia of A and
/// solves with it.
#[derive(Debug, Clone)]
pub struct SymLdl {
    n: usize,
    // lower triangle: L below the block diagonal, D on it
    a: Vec<f64>,
    // (k, swapped index) for every step, applied in order
    swaps: Vec<(usize, usize)>,
    // 1 or 2 at the first index of each block, 0 at the second row of a 2×2
    block: Vec<u8>,
    negatives: usize,
    zeros: usize,
}

impl SymLdl {
    /// Factor the symmetric matrix whose lower triangle is given row-major
    /// in `a` (n×n; the upper triangle is ignored).
    pub fn factor(mut a: Vec<f64>, n: usize) -> Self {
        assert_eq!(a.len(), n * n);
        let alpha = (1.0 + libm::sqrt(17.0)) / 8.0;
        let mut norm: f64 = 0.0;
        for i in 0..n {
            for j in 0..=i {
                norm = norm.max(a[i * n + j].abs());
            }
        }
        let pivmin = f64::MIN_POSITIVE.max(norm * f64::EPSILON * 1e-3);
        let mut swaps = Vec::with_capacity(n);
        let mut block = vec![0u8; n];
        let mut negatives = 0;
        let mut zeros = 0;
        let mut w1 = vec![0.0; n];
        let mut w2 = vec![0.0; n];
        let get = |a: &[f64], i: usize, j: usize| if i >= j { a[i * n + j] } else { a[j * n + i] };
        let mut k = 0;
        while k < n {
            let absakk = a[k * n + k].abs();
            let mut imax = k;
            let mut colmax = 0.0;
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > colmax {
                    colmax = v;
                    imax = i;
                }
            }
            let (kp, kstep) = if absakk.max(colmax) <= pivmin || absakk >= alpha * colmax {
                (k, 1)
            } else {
                let mut rowmax: f64 = 0.0;
                for j in k..n {
                    if j != imax {
                        rowmax = rowmax.max(get(&a, imax, j).abs());
                    }
                }
                if absakk * rowmax >= alpha * colmax * colmax {
                    (k, 1)
                } else if a[imax * n + imax].abs() >= alpha * rowmax {
                    (imax, 1)
                } else {
                    (imax, 2)
                }
            };
            let kk = k + kstep - 1;
            if kp != kk {
                sym_swap(&mut a, n, kk, kp);
            }
            swaps.push((kk, kp));
            if kstep == 1 {
                let mut d = a[k * n + k];
                if d.abs() <= pivmin {
                    // singular direction: perturb so solves stay finite
                    zeros += 1;
                    d = pivmin;
                    a[k * n + k] = d;
                } else if d < 0.0 {
                    negatives += 1;
                }
                block[k] = 1;
                let inv = 1.0 / d;
                for j in k + 1..n {
                    w1[j] = a[j * n + k];
                }
                for i in k + 1..n {
                    let li = w1[i] * inv;
                    if li != 0.0 {
                        // rank-one update of the trailing lower triangle
                        let row = &mut a[i * n + k + 1..=i * n + i];
                        for (r, w) in row.iter_mut().zip(&w1[k + 1..=i]) {
                            *r -= li * w;
                        }
                    }
                }
                for i in k + 1..n {
                    a[i * n + k] *= inv;
                }
            } else {
                let d11 = a[k * n + k];
                let d21 = a[(k + 1) * n + k];
                let d22 = a[(k + 1) * n + k + 1];
                let det = d11 * d22 - d21 * d21;
                let tr = d11 + d22;
                if det < 0.0 {
                    negatives += 1;
                } else if tr < 0.0 {
                    negatives += 2;
                }
                block[k] = 2;
                let inv = 1.0 / det;
                for j in k + 2..n {
                    w1[j] = a[j * n + k];
                    w2[j] = a[j * n + k + 1];
                }
                for i in k + 2..n {
                    let l1 = (w1[i] * d22 - w2[i] * d21) * inv;
                    let l2 = (w2[i] * d11 - w1[i] * d21) * inv;
                    let row = &mut a[i * n + k + 2..=i * n + i];
                    for ((r, v1), v2) in row.iter_mut().zip(&w1[k + 2..=i]).zip(&w2[k + 2..=i]) {
                        *r -= l1 * v1 + l2 * v2;
                    }
                }
                // second pass: overwrite with multipliers (rows below i still
                // needed the raw values above, hence the separate loop)
                for i in k + 2..n {
                    let w1 = a[i * n + k];
                    let w2 = a[i * n + k + 1];
                    a[i * n + k] = (w1 * d22 - w2 * d21) * inv;
                    a[i * n + k + 1] = (w2 * d11 - w1 * d21) * inv;
                }
            }
            k += kstep;
        }
        Self { n, a, swaps, block, negatives, zeros }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of negative eigenvalues of A.
    pub fn negatives(&self) -> usize {
        self.negatives
    }

    /// Number of pivots that were numerically zero (and perturbed).
    pub fn zeros(&self) -> usize {
        self.zeros
    }

    /// Solve A x = b in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for &(p, q) in &self.swaps {
            if p != q {
                b.swap(p, q);
            }
        }
        // forward with unit L
        let mut k = 0;
        while k < n {
            if self.block[k] == 1 {
                let bk = b[k];
                if bk != 0.0 {
                    for i in k + 1..n {
                        b[i] -= self.a[i * n + k] * bk;
                    }
                }
                k += 1;
            } else {
                let (b1, b2) = (b[k], b[k + 1]);
                for i in k + 2..n {
                    b[i] -= self.a[i * n + k] * b1 + self.a[i * n + k + 1] * b2;
                }
                k += 2;
            }
        }
        // D
        let mut k = 0;
        while k < n {
            if self.block[k] == 1 {
                b[k] /= self.a[k * n + k];
                k += 1;
            } else {
                let d11 = self.a[k * n + k];
                let d21 = self.a[(k + 1) * n + k];
                let d22 = self.a[(k + 1) * n + k + 1];
                let det = d11 * d22 - d21 * d21;
                let (b1, b2) = (b[k], b[k + 1]);
                b[k] = (d22 * b1 - d21 * b2) / det;
                b[k + 1] = (d11 * b2 - d21 * b1) / det;
                k += 2;
            }
        }
        // backward with Lᵀ
        let mut k = n;
        while k > 0 {
            let start = if k >= 2 && self.block[k - 1] == 0 { k - 2 } else { k - 1 };
            for c in start..k {
                let mut s = 0.0;
                for i in k..n {
                    s += self.a[i * n + c] * b[i];
                }
                b[c] -= s;
            }
            k = start;
        }
        for &(p, q) in self.swaps.iter().rev() {
            if p != q {
                b.swap(p, q);
            }
        }
    }

    /// Dense inverse, row-major. All right-hand sides are carried at once so
    /// the inner loops run over contiguous rows.
    pub fn inverse(&self) -> Vec<f64> {
        let n = self.n;
        let mut x = vec![0.0; n * n];
        // P applied to the identity
        let mut perm: Vec<usize> = (0..n).collect();
        for &(p, q) in &self.swaps {
            if p != q {
                perm.swap(p, q);
            }
        }
        for (i, &p) in perm.iter().enumerate() {
            x[i * n + p] = 1.0;
        }
        // forward with unit L
        let mut k = 0;
        while k < n {
            let w = self.block[k] as usize;
            let (head, tail) = x.split_at_mut((k + w) * n);
            for i in k + w..n {
                let row = &mut tail[(i - k - w) * n..(i - k - w + 1) * n];
                for c in k..k + w {
                    let l = self.a[i * n + c];
                    if l != 0.0 {
                        for (r, v) in row.iter_mut().zip(&head[c * n..(c + 1) * n]) {
                            *r -= l * v;
                        }
                    }
                }
            }
            k += w;
        }
        // D
        let mut k = 0;
        while k < n {
            if self.block[k] == 1 {
                let inv = 1.0 / self.a[k * n + k];
                x[k * n..(k + 1) * n].iter_mut().for_each(|v| *v *= inv);
                k += 1;
            } else {
                let d11 = self.a[k * n + k];
                let d21 = self.a[(k + 1) * n + k];
                let d22 = self.a[(k + 1) * n + k + 1];
                let det = d11 * d22 - d21 * d21;
                for j in 0..n {
                    let (b1, b2) = (x[k * n + j], x[(k + 1) * n + j]);
                    x[k * n + j] = (d22 * b1 - d21 * b2) / det;
                    x[(k + 1) * n + j] = (d11 * b2 - d21 * b1) / det;
                }
                k += 2;
            }
        }
        // backward with Lᵀ: row c -= Σ_{i ≥ end of its block} L[i][c] row i
        let mut k = n;
        while k > 0 {
            let start = if k >= 2 && self.block[k - 1] == 0 { k - 2 } else { k - 1 };
            let (head, tail) = x.split_at_mut(k * n);
            for c in start..k {
                let row = &mut head[c * n..(c + 1) * n];
                for i in k..n {
                    let l = self.a[i * n + c];
                    if l != 0.0 {
                        for (r, v) in row.iter_mut().zip(&tail[(i - k) * n..(i - k + 1) * n]) {
                            *r -= l * v;
                        }
                    }
                }
            }
            k = start;
        }
        // undo P on the rows; columns already carry it
        for &(p, q) in self.swaps.iter().rev() {
            if p != q {
                for j in 0..n {
                    x.swap(p * n + j, q * n + j);
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                let m = 0.5 * (x[i * n + j] + x[j * n + i]);
                x[i * n + j] = m;
                x[j * n + i] = m;
            }
        }
        x
    }
}

/// Symmetric interchange of indices p < q in lower-triangular storage,
/// including the already-computed columns of L.
fn sym_swap(a: &mut [f64], n: usize, p: usize, q: usize) {
    debug_assert!(p < q);
    for j in 0..p {
        a.swap(p * n + j, q * n + j);
    }
    for j in p + 1..q {
        a.swap(j * n + p, q * n + j);
    }
    for i in q + 1..n {
        a.swap(i * n + p, i * n + q);
    }
    a.swap(p * n + p, q * n + q);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eigen;

    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
        ((*state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    fn random_sym(n: usize, seed: u64, shift: f64) -> Vec<f64> {
        let mut s = seed;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let x = lcg(&mut s);
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
            a[i * n + i] -= shift;
        }
        a
    }

    #[test]
    fn inertia_matches_eigenvalues() {
        for (n, seed, shift) in [(1, 1, 0.3), (2, 5, 0.0), (9, 2, 0.1), (30, 3, -0.2), (60, 4, 0.05)] {
            let a = random_sym(n, seed, shift);
            let f = SymLdl::factor(a.clone(), n);
            let neg = sym_eigen(&a, n).values.iter().filter(|&&v| v < 0.0).count();
            assert_eq!(f.negatives(), neg, "n = {n}");
        }
    }

    #[test]
    fn solve_and_inverse() {
        let n = 25;
        let a = random_sym(n, 11, 0.0);
        let f = SymLdl::factor(a.clone(), n);
        let x0: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                b[i] += a[i * n + j] * x0[j];
            }
        }
        f.solve(&mut b);
        for i in 0..n {
            assert!((b[i] - x0[i]).abs() < 1e-9, "{} vs {}", b[i], x0[i]);
        }
        let inv = f.inverse();
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += a[i * n + k] * inv[k * n + j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn forces_two_by_two_pivots() {
        // zero diagonal: Bunch–Kaufman must take 2×2 blocks
        let a = vec![0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 2.0, 3.0, 0.0];
        let f = SymLdl::factor(a.clone(), 3);
        let neg = sym_eigen(&a, 3).values.iter().filter(|&&v| v < 0.0).count();
        assert_eq!(f.negatives(), neg);
        let mut b = vec![1.0, 2.0, 3.0];
        f.solve(&mut b);
        let r: Vec<f64> = (0..3).map(|i| (0..3).map(|j| a[i * 3 + j] * b[j]).sum::<f64>()).collect();
        for (x, y) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
