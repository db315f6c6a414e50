use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::SymLdl;

use super::operator::DiscreteOperator;

/// Cap on Σ b² over the dense level blocks of one factorization.
pub(crate) const FACTOR_ENTRY_CAP: usize = 80_000_000;

/// One reflection-parity block of an operator whose node set and potential
/// are symmetric under every sign flip x_a → -x_a. Nodes with r_a ≥ 0 carry
/// the even combinations, nodes with r_a ≥ 1 the odd ones; the first
/// coupling of an even axis picks up a factor √2.
///
/// Nodes are stored level by level, a level being a fixed Σ_a r_a. A
/// neighbour differs in one coordinate by one, so every coupling joins two
/// adjacent levels and the level blocks of the operator are diagonal.
#[derive(Debug, Clone)]
pub(crate) struct Sector {
    pub(crate) size: usize,
    diag: Vec<f64>,
    // level offsets into the node order
    level_start: Vec<usize>,
    // neighbours in the previous level: (local index, coupling), CSR by node
    lower_start: Vec<usize>,
    lower: Vec<(u32, f64)>,
}

impl Sector {
    pub(crate) fn parities(n: usize) -> Vec<Vec<bool>> {
        (0..1usize << n).map(|mask| (0..n).map(|a| mask >> a & 1 == 1).collect()).collect()
    }

    /// `odd[a]` selects the parity along axis a.
    pub(crate) fn build(op: &DiscreteOperator, odd: &[bool]) -> Result<Self> {
        let grid = op.grid();
        let n = grid.dim();
        assert_eq!(odd.len(), n);
        let centers: Vec<usize> = (0..n)
            .map(|a| grid.center(a).ok_or_else(|| crate::error::invalid!("parity sectors need odd point counts")))
            .collect::<Result<_>>()?;
        let last = n - 1;
        let ns = &op.nodes;
        let k: Vec<f64> = (0..n).map(|a| op.kinetic() / (grid.spacing(a) * grid.spacing(a))).collect();
        let diag_k: f64 = 2.0 * k.iter().sum::<f64>();
        let first = |a: usize| usize::from(odd[a]);
        let sqrt2 = core::f64::consts::SQRT_2;
        let weight = |a: usize, lo: usize| if lo == 0 && !odd[a] { -sqrt2 * k[a] } else { -k[a] };
        let r0 = first(last);

        // sector columns and the node range r0..=top in each
        let mut slot_by_col = vec![u32::MAX; ns.columns()];
        let mut cols: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        let mut cbase = Vec::new();
        let mut total = 0usize;
        for col in 0..ns.columns() {
            let idx = ns.column_index(col);
            if ns.col_len[col] == 0 || !(0..last).all(|a| idx[a] >= centers[a] + first(a)) {
                continue;
            }
            let top = ns.col_lo[col] as usize + ns.col_len[col] as usize - 1 - centers[last];
            if top < r0 {
                continue;
            }
            slot_by_col[col] = cols.len() as u32;
            let r: Vec<usize> = (0..last).map(|a| idx[a] - centers[a]).collect();
            cbase.push(total);
            total += top + 1 - r0;
            cols.push((col, r, top));
        }
        if total == 0 {
            return Err(crate::error::invalid!("empty parity sector"));
        }
        let offset: usize = (0..n).map(first).sum();
        let mut level = Vec::with_capacity(total);
        let mut owner = Vec::with_capacity(total);
        for (sl, (_, r, top)) in cols.iter().enumerate() {
            let base: usize = r.iter().sum();
            for rl in r0..=*top {
                level.push((base + rl - offset) as u32);
                owner.push((sl as u32, rl as u32));
            }
        }
        let mut perm: Vec<u32> = (0..total as u32).collect();
        perm.sort_by_key(|&c| level[c as usize]);
        let mut pos = vec![0u32; total];
        for (i, &c) in perm.iter().enumerate() {
            pos[c as usize] = i as u32;
        }
        let nl = level[perm[total - 1] as usize] as usize + 1;
        let mut level_start = vec![0usize; nl + 1];
        for &l in &level {
            level_start[l as usize + 1] += 1;
        }
        for l in 0..nl {
            level_start[l + 1] += level_start[l];
        }
        let mut strides = vec![1usize; last];
        for a in (0..last.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * ns.col_dims[a + 1];
        }
        let cid = |sl: usize, rl: usize| -> Option<usize> {
            let (_, _, top) = &cols[sl];
            (rl >= r0 && rl <= *top).then(|| cbase[sl] + rl - r0)
        };
        let mut diag = Vec::with_capacity(total);
        let mut lower_start = Vec::with_capacity(total + 1);
        let mut lower = Vec::new();
        lower_start.push(0);
        for p in 0..total {
            let c = perm[p] as usize;
            let l = level[c] as usize;
            let (sl, rl) = (owner[c].0 as usize, owner[c].1 as usize);
            let (col, r, _) = &cols[sl];
            let node = ns.col_start[*col] + (centers[last] + rl - ns.col_lo[*col] as usize);
            diag.push(diag_k + op.v[node]);
            let mut push = |q: usize, w: f64| {
                lower.push(((pos[q] as usize - level_start[l - 1]) as u32, w));
            };
            if rl > r0 {
                if let Some(q) = cid(sl, rl - 1) {
                    push(q, weight(last, rl - 1));
                }
            }
            for a in 0..last {
                if r[a] > first(a) {
                    let nb = slot_by_col[col - strides[a]];
                    if nb != u32::MAX {
                        if let Some(q) = cid(nb as usize, rl) {
                            push(q, weight(a, r[a] - 1));
                        }
                    }
                }
            }
            lower_start.push(lower.len());
        }
        Ok(Self { size: total, diag, level_start, lower_start, lower })
    }

    pub(crate) fn levels(&self) -> usize {
        self.level_start.len() - 1
    }

    fn level_range(&self, l: usize) -> (usize, usize) {
        (self.level_start[l], self.level_start[l + 1])
    }

    fn lower_of(&self, p: usize) -> &[(u32, f64)] {
        &self.lower[self.lower_start[p]..self.lower_start[p + 1]]
    }

    /// Σ b² over the level blocks.
    pub(crate) fn factor_entries(&self) -> usize {
        (0..self.levels())
            .map(|l| {
                let (a, b) = self.level_range(l);
                (b - a) * (b - a)
            })
            .sum()
    }

    pub(crate) fn max_block(&self) -> usize {
        (0..self.levels()).map(|l| self.level_range(l).1 - self.level_range(l).0).max().unwrap_or(0)
    }

    pub(crate) fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.size {
            y[i] = self.diag[i] * x[i];
        }
        for l in 1..self.levels() {
            let (a, b) = self.level_range(l);
            let pa = self.level_range(l - 1).0;
            for p in a..b {
                for &(q, w) in self.lower_of(p) {
                    let q = pa + q as usize;
                    y[p] += w * x[q];
                    y[q] += w * x[p];
                }
            }
        }
    }

    /// Block LDLᵀ of A - σ, eliminating from the outermost level inwards.
    pub(crate) fn factor(&self, sigma: f64) -> Result<ShiftedFactor> {
        let entries = self.factor_entries();
        if entries > FACTOR_ENTRY_CAP {
            return Err(Error::MemoryCap { needed: entries, cap: FACTOR_ENTRY_CAP });
        }
        let nl = self.levels();
        let mut inv: Vec<Vec<f64>> = vec![Vec::new(); nl];
        let mut negatives = 0;
        let mut zeros = 0;
        let mut update: Option<Vec<f64>> = None;
        let mut t = Vec::new();
        for l in (0..nl).rev() {
            let (a, b) = self.level_range(l);
            let m = b - a;
            let mut s = update.take().unwrap_or_else(|| vec![0.0; m * m]);
            for i in 0..m {
                s[i * m + i] += self.diag[a + i] - sigma;
            }
            let f = SymLdl::factor(s, m);
            negatives += f.negatives();
            zeros += f.zeros();
            let sinv = f.inverse();
            if l > 0 {
                // U = -B S⁻¹ Bᵀ with B the sparse coupling to level l-1
                let (pa, pb) = self.level_range(l - 1);
                let pm = pb - pa;
                let mut u = vec![0.0; pm * pm];
                t.clear();
                t.resize(pm, 0.0);
                for i in 0..m {
                    if self.lower_of(a + i).is_empty() {
                        continue;
                    }
                    t.iter_mut().for_each(|v| *v = 0.0);
                    let row = &sinv[i * m..(i + 1) * m];
                    for (j, &sij) in row.iter().enumerate() {
                        for &(q, w) in self.lower_of(a + j) {
                            t[q as usize] += w * sij;
                        }
                    }
                    for &(p, w) in self.lower_of(a + i) {
                        let urow = &mut u[p as usize * pm..(p as usize + 1) * pm];
                        for (uv, tv) in urow.iter_mut().zip(&t) {
                            *uv -= w * tv;
                        }
                    }
                }
                update = Some(u);
            }
            inv[l] = sinv;
        }
        Ok(ShiftedFactor { sigma, inv, negatives, zeros })
    }

    /// x = (A - σ)⁻¹ b.
    pub(crate) fn solve(&self, f: &ShiftedFactor, b: &[f64], x: &mut [f64]) {
        let nl = self.levels();
        let mut z = b.to_vec();
        let mut y = vec![0.0; self.max_block()];
        for l in (1..nl).rev() {
            let (a, bb) = self.level_range(l);
            let m = bb - a;
            dense_mv(&f.inv[l], m, &z[a..bb], &mut y[..m]);
            let pa = self.level_range(l - 1).0;
            for i in 0..m {
                for &(q, w) in self.lower_of(a + i) {
                    z[pa + q as usize] -= w * y[i];
                }
            }
        }
        let (a0, b0) = self.level_range(0);
        dense_mv(&f.inv[0], b0 - a0, &z[a0..b0], &mut x[a0..b0]);
        for l in 1..nl {
            let (a, bb) = self.level_range(l);
            let m = bb - a;
            let pa = self.level_range(l - 1).0;
            for i in 0..m {
                let mut v = z[a + i];
                for &(q, w) in self.lower_of(a + i) {
                    v -= w * x[pa + q as usize];
                }
                y[i] = v;
            }
            dense_mv(&f.inv[l], m, &y[..m], &mut x[a..bb]);
        }
    }
}

fn dense_mv(a: &[f64], m: usize, x: &[f64], y: &mut [f64]) {
    for i in 0..m {
        let row = &a[i * m..(i + 1) * m];
        let mut acc = [0.0f64; 4];
        let split = m - m % 4;
        for (r, v) in row[..split].chunks_exact(4).zip(x[..split].chunks_exact(4)) {
            acc[0] += r[0] * v[0];
            acc[1] += r[1] * v[1];
            acc[2] += r[2] * v[2];
            acc[3] += r[3] * v[3];
        }
        let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
        for j in split..m {
            s += row[j] * x[j];
        }
        y[i] = s;
    }
}

/// Dense inverses of the Schur complements of A - σ, level by level.
#[derive(Debug, Clone)]
pub(crate) struct ShiftedFactor {
    pub(crate) sigma: f64,
    inv: Vec<Vec<f64>>,
    /// Number of eigenvalues of the sector below σ (Sylvester inertia).
    pub(crate) negatives: usize,
    pub(crate) zeros: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{build_dirichlet_nd, build_operator_nd, GridSpec};
    use crate::linalg::sym_eigen;
    use crate::spectral::ExponentVector;

    fn sector_dense(s: &Sector) -> Vec<f64> {
        let n = s.size;
        let mut a = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        let mut c = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            s.matvec(&e, &mut c);
            for i in 0..n {
                a[i * n + j] = c[i];
            }
            e[j] = 0.0;
        }
        a
    }

    #[test]
    fn sectors_partition_the_spectrum() {
        let alpha = ExponentVector::new(&[2.0, 1.0]).unwrap();
        let g = GridSpec::new(&[3.0, 4.0], &[15, 19]).unwrap();
        let op = build_operator_nd(&alpha, &g).unwrap();
        let full = sym_eigen(&op.to_dense().unwrap(), op.size()).values;
        let mut parts = Vec::new();
        for odd in Sector::parities(2) {
            let s = Sector::build(&op, &odd).unwrap();
            let a = sector_dense(&s);
            for i in 0..s.size {
                for j in 0..i {
                    assert!((a[i * s.size + j] - a[j * s.size + i]).abs() < 1e-12);
                }
            }
            parts.extend(sym_eigen(&a, s.size).values);
        }
        parts.sort_by(f64::total_cmp);
        assert_eq!(parts.len(), full.len());
        for (a, b) in parts.iter().zip(&full) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn inertia_and_solve_match_dense() {
        let alpha = ExponentVector::new(&[1.0, 1.0]).unwrap();
        let g = GridSpec::new(&[3.0, 3.0], &[21, 21]).unwrap();
        for op in [build_operator_nd(&alpha, &g).unwrap(), build_dirichlet_nd(&alpha, &g).unwrap()] {
            for odd in Sector::parities(2) {
                let s = Sector::build(&op, &odd).unwrap();
                let a = sector_dense(&s);
                let ev = sym_eigen(&a, s.size).values;
                for sigma in [ev[0] * 0.5, ev[3] + 1e-3, 0.5 * (ev[10] + ev[11]), ev[ev.len() - 1] + 1.0] {
                    let f = s.factor(sigma).unwrap();
                    let below = ev.iter().filter(|&&v| v < sigma).count();
                    assert_eq!(f.negatives, below);
                    let b: Vec<f64> = (0..s.size).map(|i| libm::cos(i as f64)).collect();
                    let mut x = vec![0.0; s.size];
                    s.solve(&f, &b, &mut x);
                    let mut r = vec![0.0; s.size];
                    s.matvec(&x, &mut r);
                    let err: f64 = r.iter().zip(&x).zip(&b).map(|((r, x), b)| (r - sigma * x - b).abs()).fold(0.0, f64::max);
                    let scale: f64 = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                    assert!(err < 1e-8 * scale.max(1.0), "residual {err}");
                }
            }
        }
    }
}
