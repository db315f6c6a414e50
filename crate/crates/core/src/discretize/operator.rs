use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::linalg::Tridiagonal;
use crate::spectral::{abs_pow, ExponentVector};

use super::grid::{DomainMask, GridSpec, DEFAULT_NODE_CAP};

/// What the diagonal part of the operator is.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case", tag = "kind"))]
pub enum PotentialDescriptor {
    /// g|x|^γ in one dimension.
    Power { gamma: f64, coupling: f64 },
    /// Σ c_m |x|^{η_m} in one dimension.
    PowerSum { terms: Vec<(f64, f64)> },
    /// (Π|x_i|^{α_i})^power.
    Product { alpha: ExponentVector, power: f64 },
    /// No potential; Dirichlet conditions outside Ω^α_n.
    Dirichlet { alpha: ExponentVector },
}

/// Build options shared by every operator constructor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorOptions {
    /// Coefficient c of -cΔ.
    pub kinetic: f64,
    /// Nodes with V above the cap are removed (Dirichlet there).
    pub potential_cap: Option<f64>,
    pub node_cap: usize,
}

impl Default for OperatorOptions {
    fn default() -> Self {
        Self { kinetic: 1.0, potential_cap: None, node_cap: DEFAULT_NODE_CAP }
    }
}

/// Active nodes stored as intervals along the last axis, one per column
/// (a column is a fixed index on all other axes). Masks here are symmetric
/// intervals because every admissible potential/domain is monotone in |x_n|.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct NodeSet {
    pub(crate) col_dims: Vec<usize>,
    pub(crate) col_lo: Vec<u32>,
    pub(crate) col_len: Vec<u32>,
    pub(crate) col_start: Vec<usize>,
    pub(crate) total: usize,
}

impl NodeSet {
    pub(crate) fn columns(&self) -> usize {
        self.col_lo.len()
    }

    /// Index of node (column, k) if active.
    #[inline]
    pub(crate) fn find(&self, col: usize, k: usize) -> Option<usize> {
        let lo = self.col_lo[col] as usize;
        let len = self.col_len[col] as usize;
        (k >= lo && k < lo + len).then(|| self.col_start[col] + (k - lo))
    }

    pub(crate) fn column_index(&self, col: usize) -> Vec<usize> {
        let mut idx = vec![0; self.col_dims.len()];
        let mut r = col;
        for a in (0..self.col_dims.len()).rev() {
            idx[a] = r % self.col_dims[a];
            r /= self.col_dims[a];
        }
        idx
    }
}

/// Finite-difference operator -cΔ_h + V on the active nodes of a grid.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    grid: GridSpec,
    kinetic: f64,
    potential: PotentialDescriptor,
    cap: Option<f64>,
    capped: bool,
    pub(crate) nodes: NodeSet,
    pub(crate) v: Vec<f64>,
}

/// 3-point Laplacian with Dirichlet ends plus g|x|^γ at the nodes.
pub fn build_operator_1d(gamma: f64, g: f64, grid: &GridSpec) -> Result<DiscreteOperator> {
    if !(gamma > 0.0 && g > 0.0 && gamma.is_finite() && g.is_finite()) {
        return Err(invalid!("need gamma > 0 and g > 0"));
    }
    DiscreteOperator::build(PotentialDescriptor::Power { gamma, coupling: g }, grid, OperatorOptions::default())
}

/// -Δ_h + Π|x_i|^{α_i} on the full box.
pub fn build_operator_nd(alpha: &ExponentVector, grid: &GridSpec) -> Result<DiscreteOperator> {
    DiscreteOperator::build(
        PotentialDescriptor::Product { alpha: alpha.clone(), power: 1.0 },
        grid,
        OperatorOptions::default(),
    )
}

/// -Δ_h restricted to the grid points of Ω^α_n.
pub fn build_dirichlet_nd(alpha: &ExponentVector, grid: &GridSpec) -> Result<DiscreteOperator> {
    DiscreteOperator::build(PotentialDescriptor::Dirichlet { alpha: alpha.clone() }, grid, OperatorOptions::default())
}

impl DiscreteOperator {
    pub fn build(potential: PotentialDescriptor, grid: &GridSpec, opts: OperatorOptions) -> Result<Self> {
        let n = grid.dim();
        if !(opts.kinetic > 0.0 && opts.kinetic.is_finite()) {
            return Err(invalid!("kinetic coefficient must be positive"));
        }
        if let Some(c) = opts.potential_cap {
            if !(c > 0.0) {
                return Err(invalid!("potential cap must be positive"));
            }
        }
        match &potential {
            PotentialDescriptor::Power { gamma, coupling } => {
                if n != 1 || !(*gamma > 0.0 && *coupling > 0.0) {
                    return Err(invalid!("power potential is one-dimensional with gamma, g > 0"));
                }
            }
            PotentialDescriptor::PowerSum { terms } => {
                if n != 1 || terms.is_empty() || terms.iter().any(|(c, e)| !(*c > 0.0 && *e > 0.0)) {
                    return Err(invalid!("power-sum potential is one-dimensional with positive terms"));
                }
            }
            PotentialDescriptor::Product { alpha, power } => {
                if alpha.n() != n || !(*power > 0.0) {
                    return Err(invalid!("exponent vector has n = {}, grid has {}", alpha.n(), n));
                }
                if n > 3 {
                    return Err(invalid!("only n <= 3 is supported"));
                }
            }
            PotentialDescriptor::Dirichlet { alpha } => {
                if alpha.n() != n || !(2..=3).contains(&n) {
                    return Err(invalid!("Dirichlet domains need n in {{2, 3}} matching the grid"));
                }
            }
        }
        if n > 1 {
            grid.require_centered()?;
        }
        let pot = |x: &[f64]| -> f64 {
            match &potential {
                PotentialDescriptor::Power { gamma, coupling } => coupling * abs_pow(x[0], *gamma),
                PotentialDescriptor::PowerSum { terms } => terms.iter().map(|(c, e)| c * abs_pow(x[0], *e)).sum(),
                PotentialDescriptor::Product { alpha, power } => {
                    let v = alpha.potential(x);
                    if *power == 1.0 { v } else { libm::pow(v, *power) }
                }
                PotentialDescriptor::Dirichlet { .. } => 0.0,
            }
        };
        let mask = match &potential {
            PotentialDescriptor::Dirichlet { alpha } => Some(DomainMask::new(alpha, grid)?),
            _ => None,
        };
        let coord = |a: usize, i: usize| -> f64 {
            match grid.center(a) {
                Some(c) => (i as f64 - c as f64) * grid.spacing(a),
                None => grid.coord(a, i),
            }
        };
        let active = |x: &[f64]| -> bool {
            if let Some(m) = &mask {
                if !m.contains_point(x) {
                    return false;
                }
            }
            match opts.potential_cap {
                Some(cap) => pot(x) <= cap,
                None => true,
            }
        };

        let m = grid.points();
        let last = n - 1;
        let col_dims: Vec<usize> = m[..last].to_vec();
        let ncols: usize = col_dims.iter().product();
        let mut col_lo = Vec::with_capacity(ncols);
        let mut col_len = Vec::with_capacity(ncols);
        let mut col_start = Vec::with_capacity(ncols);
        let mut total = 0usize;
        let mut capped = false;
        let mut x = vec![0.0; n];
        let ml = m[last];
        for col in 0..ncols {
            let mut r = col;
            for a in (0..last).rev() {
                x[a] = coord(a, r % m[a]);
                r /= m[a];
            }
            let (lo, len) = if n == 1 || grid.center(last).is_none() {
                // 1D: every node (potential is finite everywhere)
                (0usize, ml)
            } else {
                let c = grid.center(last).unwrap();
                x[last] = 0.0;
                if !active(&x) {
                    (c, 0)
                } else {
                    // largest r with (.., c ± r) active; predicate monotone in r
                    let (mut good, mut bad) = (0usize, c + 1);
                    while bad - good > 1 {
                        let mid = (good + bad) / 2;
                        x[last] = coord(last, c + mid);
                        if active(&x) {
                            good = mid;
                        } else {
                            bad = mid;
                        }
                    }
                    (c - good, 2 * good + 1)
                }
            };
            if len < ml && mask.is_none() {
                capped = true;
            }
            if let (Some(_), Some(m)) = (opts.potential_cap, mask.as_ref()) {
                // distinguish cap exclusions from domain exclusions
                let c = grid.center(last).unwrap_or(0);
                let probe = lo + len;
                if len < ml && probe < ml && probe > c {
                    x[last] = coord(last, probe);
                    if m.contains_point(&x) {
                        capped = true;
                    }
                }
            }
            col_lo.push(lo as u32);
            col_len.push(len as u32);
            col_start.push(total);
            total += len;
            grid.check_cap(total, opts.node_cap)?;
        }
        if total == 0 {
            return Err(invalid!("operator has no active nodes (empty mask)"));
        }
        let nodes = NodeSet { col_dims, col_lo, col_len, col_start, total };
        let mut v = vec![0.0; total];
        for col in 0..nodes.columns() {
            let idx = nodes.column_index(col);
            for (a, &i) in idx.iter().enumerate() {
                x[a] = coord(a, i);
            }
            let lo = nodes.col_lo[col] as usize;
            for j in 0..nodes.col_len[col] as usize {
                x[last] = coord(last, lo + j);
                v[nodes.col_start[col] + j] = pot(&x);
            }
        }
        Ok(Self {
            grid: grid.clone(),
            kinetic: opts.kinetic,
            potential,
            cap: opts.potential_cap,
            capped: capped && opts.potential_cap.is_some(),
            nodes,
            v,
        })
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn potential(&self) -> &PotentialDescriptor {
        &self.potential
    }

    pub fn kinetic(&self) -> f64 {
        self.kinetic
    }

    pub fn potential_cap(&self) -> Option<f64> {
        self.cap
    }

    /// Whether the potential cap removed any node.
    pub fn cap_active(&self) -> bool {
        self.capped
    }

    /// Number of unknowns (active nodes).
    pub fn size(&self) -> usize {
        self.nodes.total
    }

    /// Potential values at the active nodes.
    pub fn potential_values(&self) -> &[f64] {
        &self.v
    }

    /// Grid multi-index of every active node, in unknown order.
    pub fn node_indices(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.size());
        for col in 0..self.nodes.columns() {
            let idx = self.nodes.column_index(col);
            let lo = self.nodes.col_lo[col] as usize;
            for j in 0..self.nodes.col_len[col] as usize {
                let mut full = idx.clone();
                full.push(lo + j);
                out.push(full);
            }
        }
        out
    }

    /// y = A x on the active nodes.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.size());
        assert_eq!(y.len(), self.size());
        let n = self.dim();
        let last = n - 1;
        let inv_h2: Vec<f64> = (0..n).map(|a| self.kinetic / (self.grid.spacing(a) * self.grid.spacing(a))).collect();
        let diag_k: f64 = 2.0 * inv_h2.iter().sum::<f64>();
        let ns = &self.nodes;
        let mut strides = vec![1usize; last];
        for a in (0..last.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * ns.col_dims[a + 1];
        }
        for col in 0..ns.columns() {
            let lo = ns.col_lo[col] as usize;
            let len = ns.col_len[col] as usize;
            let start = ns.col_start[col];
            let idx = if last > 0 { ns.column_index(col) } else { Vec::new() };
            for j in 0..len {
                let p = start + j;
                let mut s = (diag_k + self.v[p]) * x[p];
                if j > 0 {
                    s -= inv_h2[last] * x[p - 1];
                }
                if j + 1 < len {
                    s -= inv_h2[last] * x[p + 1];
                }
                let k = lo + j;
                for a in 0..last {
                    if idx[a] > 0 {
                        if let Some(q) = ns.find(col - strides[a], k) {
                            s -= inv_h2[a] * x[q];
                        }
                    }
                    if idx[a] + 1 < ns.col_dims[a] {
                        if let Some(q) = ns.find(col + strides[a], k) {
                            s -= inv_h2[a] * x[q];
                        }
                    }
                }
                y[p] = s;
            }
        }
    }

    /// The symmetric tridiagonal matrix of a one-dimensional operator.
    pub fn tridiagonal(&self) -> Result<Tridiagonal> {
        if self.dim() != 1 {
            return Err(invalid!("tridiagonal form exists only in 1D"));
        }
        let h = self.grid.spacing(0);
        let k = self.kinetic / (h * h);
        let d: Vec<f64> = self.v.iter().map(|v| 2.0 * k + v).collect();
        let e = vec![-k; d.len().saturating_sub(1)];
        Ok(Tridiagonal { d, e })
    }

    /// Dense row-major matrix (small operators only; used by oracles).
    pub fn to_dense(&self) -> Result<Vec<f64>> {
        let n = self.size();
        if n > 6000 {
            return Err(invalid!("dense form refused for {n} unknowns"));
        }
        let mut a = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.matvec(&e, &mut col);
            for i in 0..n {
                a[i * n + j] = col[i];
            }
            e[j] = 0.0;
        }
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
        ((*state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn nd_matvec_is_symmetric_and_positive() {
        let alpha = ExponentVector::new(&[2.0, 1.0]).unwrap();
        let g = GridSpec::new(&[3.0, 5.0], &[31, 41]).unwrap();
        let op = build_operator_nd(&alpha, &g).unwrap();
        let n = op.size();
        let mut s = 7u64;
        let mut ax = vec![0.0; n];
        let mut aw = vec![0.0; n];
        for _ in 0..100 {
            let x: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
            let w: Vec<f64> = (0..n).map(|_| lcg(&mut s)).collect();
            op.matvec(&x, &mut ax);
            op.matvec(&w, &mut aw);
            let (l, r) = (dot(&ax, &w), dot(&x, &aw));
            assert!((l - r).abs() < 1e-12 * l.abs().max(1.0));
            assert!(dot(&ax, &x) > 0.0);
        }
    }

    #[test]
    fn potential_vanishes_on_axes() {
        let alpha = ExponentVector::new(&[1.0, 1.0]).unwrap();
        let g = GridSpec::new(&[4.0, 4.0], &[21, 21]).unwrap();
        let op = build_operator_nd(&alpha, &g).unwrap();
        for (i, idx) in op.node_indices().iter().enumerate() {
            if idx[0] == 10 || idx[1] == 10 {
                assert_eq!(op.potential_values()[i], 0.0);
            }
        }
    }

    #[test]
    fn dirichlet_mask_shape() {
        let alpha = ExponentVector::new(&[1.0, 1.0]).unwrap();
        let g = GridSpec::new(&[4.0, 4.0], &[39, 39]).unwrap();
        let op = build_dirichlet_nd(&alpha, &g).unwrap();
        let h = g.spacing(0);
        for idx in op.node_indices() {
            let x = (idx[0] as f64 - 19.0) * h;
            let y = (idx[1] as f64 - 19.0) * h;
            assert!((x * y).abs() < 1.0);
        }
        // every in-domain node is active
        let mut count = 0;
        for i in 0..39 {
            for j in 0..39 {
                let x = (i as f64 - 19.0) * h;
                let y = (j as f64 - 19.0) * h;
                if (x * y).abs() < 1.0 {
                    count += 1;
                }
            }
        }
        assert_eq!(count, op.size());
    }

    #[test]
    fn cap_removes_nodes_and_flags() {
        let alpha = ExponentVector::new(&[1.0, 1.0]).unwrap();
        let g = GridSpec::new(&[4.0, 4.0], &[21, 21]).unwrap();
        let opts = OperatorOptions { potential_cap: Some(2.0), ..OperatorOptions::default() };
        let op = DiscreteOperator::build(PotentialDescriptor::Product { alpha: alpha.clone(), power: 1.0 }, &g, opts).unwrap();
        assert!(op.cap_active());
        assert!(op.potential_values().iter().all(|&v| v <= 2.0));
        let full = build_operator_nd(&alpha, &g).unwrap();
        assert!(!full.cap_active());
        assert!(op.size() < full.size());
    }

    #[test]
    fn node_cap_is_enforced() {
        let alpha = ExponentVector::new(&[1.0, 1.0]).unwrap();
        let g = GridSpec::new(&[4.0, 4.0], &[101, 101]).unwrap();
        let opts = OperatorOptions { node_cap: 1000, ..OperatorOptions::default() };
        let r = DiscreteOperator::build(PotentialDescriptor::Product { alpha, power: 1.0 }, &g, opts);
        assert!(matches!(r, Err(crate::Error::MemoryCap { .. })));
    }

    #[test]
    fn tridiagonal_matches_matvec() {
        let g = GridSpec::uniform_1d(5.0, 49).unwrap();
        let op = build_operator_1d(1.5, 2.0, &g).unwrap();
        let t = op.tridiagonal().unwrap();
        let x: Vec<f64> = (0..49).map(|i| libm::sin(i as f64)).collect();
        let mut y1 = vec![0.0; 49];
        let mut y2 = vec![0.0; 49];
        op.matvec(&x, &mut y1);
        t.matvec(&x, &mut y2);
        for (a, b) in y1.iter().zip(&y2) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
