use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::spectral::ExponentVector;

/// Default cap on the number of active grid nodes of one operator.
pub const DEFAULT_NODE_CAP: usize = 4_000_000;

/// Tensor grid on the box Π[-L_i, L_i] with m_i interior points per axis;
/// the box faces carry Dirichlet conditions. h_i = 2L_i/(m_i+1).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    half_widths: Vec<f64>,
    points: Vec<usize>,
}

impl GridSpec {
    pub fn new(half_widths: &[f64], points: &[usize]) -> Result<Self> {
        if half_widths.is_empty() || half_widths.len() != points.len() {
            return Err(invalid!("grid needs one half-width and one point count per axis"));
        }
        if half_widths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(invalid!("half-widths must be positive"));
        }
        if points.iter().any(|&m| m < 3) {
            return Err(invalid!("need at least 3 points per axis"));
        }
        Ok(Self { half_widths: half_widths.to_vec(), points: points.to_vec() })
    }

    pub fn uniform_1d(half_width: f64, points: usize) -> Result<Self> {
        Self::new(&[half_width], &[points])
    }

    /// Grid with spacing at most `h` per axis and an odd point count, so that
    /// x = 0 is a node.
    pub fn with_spacing(half_widths: &[f64], h: &[f64]) -> Result<Self> {
        if h.len() != half_widths.len() || h.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(invalid!("spacings must be positive, one per axis"));
        }
        let points: Vec<usize> = half_widths
            .iter()
            .zip(h)
            .map(|(l, h)| {
                let mut m = libm::ceil(2.0 * l / h - 1.0).max(3.0) as usize;
                if m % 2 == 0 {
                    m += 1;
                }
                m
            })
            .collect();
        Self::new(half_widths, &points)
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_widths[axis] / (self.points[axis] as f64 + 1.0)
    }

    pub fn coord(&self, axis: usize, index: usize) -> f64 {
        -self.half_widths[axis] + (index as f64 + 1.0) * self.spacing(axis)
    }

    /// Index of x = 0 if it is a node.
    pub fn center(&self, axis: usize) -> Option<usize> {
        let m = self.points[axis];
        (m % 2 == 1).then_some((m - 1) / 2)
    }

    pub fn total_points(&self) -> f64 {
        self.points.iter().map(|&m| m as f64).product()
    }

    /// Same box, spacing halved on every axis (nodes nested).
    pub fn refined(&self) -> Self {
        Self { half_widths: self.half_widths.clone(), points: self.points.iter().map(|m| 2 * m + 1).collect() }
    }

    pub(crate) fn require_centered(&self) -> Result<()> {
        if (0..self.dim()).any(|a| self.center(a).is_none()) {
            return Err(invalid!("multi-dimensional grids need odd point counts (a node at 0)"));
        }
        Ok(())
    }

    pub(crate) fn check_cap(&self, nodes: usize, cap: usize) -> Result<()> {
        if nodes > cap {
            return Err(Error::MemoryCap { needed: nodes, cap });
        }
        Ok(())
    }
}

/// Indicator of Ω^α_n = {Π|x_j|^{α_j/α_n} < 1} on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMask {
    ratios: Vec<f64>,
    grid: GridSpec,
}

impl DomainMask {
    pub fn new(alpha: &ExponentVector, grid: &GridSpec) -> Result<Self> {
        if alpha.n() != grid.dim() {
            return Err(invalid!("exponent vector and grid dimensions differ"));
        }
        let last = alpha.last();
        Ok(Self { ratios: alpha.alphas().iter().map(|a| a / last).collect(), grid: grid.clone() })
    }

    /// Π|x_j|^{α_j/α_n} at a point.
    pub fn level(&self, x: &[f64]) -> f64 {
        let mut p = 1.0;
        for (xi, r) in x.iter().zip(&self.ratios) {
            p *= crate::spectral::abs_pow(*xi, *r);
        }
        p
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        self.level(x) < 1.0
    }

    pub fn contains(&self, index: &[usize]) -> bool {
        let x: Vec<f64> = index.iter().enumerate().map(|(a, &i)| self.grid.coord(a, i)).collect();
        self.contains_point(&x)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Checks sign-flip symmetry on every node (small grids only).
    pub fn is_symmetric(&self) -> bool {
        let m = self.grid.points();
        let total = self.grid.total_points() as usize;
        let mut idx = alloc::vec![0usize; m.len()];
        for lin in 0..total {
            let mut r = lin;
            for a in (0..m.len()).rev() {
                idx[a] = r % m[a];
                r /= m[a];
            }
            let here = self.contains(&idx);
            for a in 0..m.len() {
                let mut f = idx.clone();
                f[a] = m[a] - 1 - idx[a];
                if self.contains(&f) != here {
                    return false;
                }
            }
        }
        true
    }

    /// Every coordinate axis is inside the mask out to the box edge.
    pub fn reaches_box_edges(&self) -> bool {
        let n = self.grid.dim();
        let centers: Option<Vec<usize>> = (0..n).map(|a| self.grid.center(a)).collect();
        let Some(c) = centers else { return false };
        (0..n).all(|a| {
            let mut lo = c.clone();
            let mut hi = c.clone();
            lo[a] = 0;
            hi[a] = self.grid.points()[a] - 1;
            self.contains(&lo) && self.contains(&hi)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_center() {
        let g = GridSpec::uniform_1d(12.0, 2399).unwrap();
        assert!((g.spacing(0) - 0.01).abs() < 1e-15);
        assert_eq!(g.center(0), Some(1199));
        assert!(g.coord(0, 1199).abs() < 1e-12);
        let r = g.refined();
        assert!((r.spacing(0) - 0.005).abs() < 1e-15);
        assert!(GridSpec::uniform_1d(1.0, 2).is_err());
        assert!(GridSpec::new(&[1.0, -1.0], &[5, 5]).is_err());
    }

    #[test]
    fn with_spacing_is_odd_and_fine_enough() {
        let g = GridSpec::with_spacing(&[3.0, 7.5], &[0.1, 0.25]).unwrap();
        for a in 0..2 {
            assert_eq!(g.points()[a] % 2, 1);
            assert!(g.spacing(a) <= [0.1, 0.25][a] + 1e-12);
        }
    }

    #[test]
    fn hyperbolic_mask() {
        let a = ExponentVector::new(&[1.0, 1.0]).unwrap();
        let g = GridSpec::new(&[4.0, 4.0], &[41, 41]).unwrap();
        let m = DomainMask::new(&a, &g).unwrap();
        assert!(m.contains_point(&[0.5, 0.5]));
        assert!(!m.contains_point(&[2.0, 2.0]));
        assert!(m.is_symmetric());
        assert!(m.reaches_box_edges());
    }
}
