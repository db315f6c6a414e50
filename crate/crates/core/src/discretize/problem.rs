use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::spectral::{ExponentVector, Spectrum};

use super::grid::{GridSpec, DEFAULT_NODE_CAP};
use super::operator::{DiscreteOperator, OperatorOptions, PotentialDescriptor};
use super::solve::{eigenvalues_with, EigenOptions};

/// A continuum operator together with the recipe for truncating it.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    /// -d²/dx² + g|x|^γ.
    Power1d { gamma: f64, coupling: f64 },
    /// -Δ + (Π|x_i|^{α_i})^power.
    Product { alpha: ExponentVector, power: f64 },
    /// Dirichlet Laplacian on Ω^α_n.
    Dirichlet { alpha: ExponentVector },
}

/// Box-size heuristic parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxOptions {
    /// Channel thresholds at the box faces exceed the largest wanted
    /// eigenvalue by this factor.
    pub factor: f64,
    /// Grid spacing h = h_coef / √E_max.
    pub h_coef: f64,
    /// Nodes with V > cap_factor·E_max are dropped (Dirichlet there).
    pub cap_factor: f64,
    pub node_cap: usize,
}

impl Default for BoxOptions {
    fn default() -> Self {
        Self { factor: 2.0, h_coef: 0.3, cap_factor: 8.0, node_cap: DEFAULT_NODE_CAP }
    }
}

/// Truncation chosen for a target energy.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoxPlan {
    pub grid: GridSpec,
    pub potential_cap: Option<f64>,
    /// Transverse ground energy at the box face, per axis channel.
    pub thresholds: Vec<f64>,
    pub reliability_cutoff: f64,
    pub e_max: f64,
}

/// Refinement loop settings for [`converge_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergeOptions {
    pub rel_tol: f64,
    pub max_refinements: usize,
    /// Extrapolate in h² between successive grids.
    pub richardson: bool,
    pub eigen: EigenOptions,
}

impl ConvergeOptions {
    pub fn new(rel_tol: f64, max_refinements: usize) -> Self {
        Self { rel_tol, max_refinements, richardson: true, eigen: EigenOptions::default() }
    }
}

/// λ_0 of −d²/dx² + |x|^ν.
pub fn ground_energy_1d(nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(invalid!("need nu > 0"));
    }
    Ok(super::shooting::power1d_spectrum(nu, 1.0, 1, 1e-11)?.eigenvalues[0])
}

/// Refine h (halving, nested grids) until every one of the k lowest
/// eigenvalues moves by less than `rel_tol` between successive estimates.
/// With Richardson on, estimates past the first grid are (4λ_{h/2} − λ_h)/3.
pub fn converge_spectrum<B>(
    mut builder: B,
    grid: &GridSpec,
    k: usize,
    reliability_cutoff: f64,
    opts: &ConvergeOptions,
) -> Result<Spectrum>
where
    B: FnMut(&GridSpec) -> Result<DiscreteOperator>,
{
    if !(opts.rel_tol > 0.0) {
        return Err(invalid!("rel_tol must be positive"));
    }
    let mut g = grid.clone();
    let mut prev_raw: Option<Vec<f64>> = None;
    let mut prev_est: Option<Vec<f64>> = None;
    let mut last_change = f64::INFINITY;
    for level in 0..=opts.max_refinements {
        if level > 0 {
            g = g.refined();
        }
        let op = builder(&g)?;
        let raw = eigenvalues_with(&op, k, &opts.eigen)?.eigenvalues;
        let est: Vec<f64> = match (&prev_raw, opts.richardson) {
            (Some(p), true) => raw.iter().zip(p).map(|(f, c)| (4.0 * f - c) / 3.0).collect(),
            _ => raw.clone(),
        };
        if let Some(pe) = &prev_est {
            let changes: Vec<f64> = est.iter().zip(pe).map(|(a, b)| ((a - b) / a).abs()).collect();
            last_change = changes.iter().copied().fold(0.0, f64::max);
            if last_change < opts.rel_tol {
                let mut vals = est;
                // extrapolation can reorder near-degenerate pairs
                vals.sort_by(f64::total_cmp);
                return Spectrum::new(vals, changes, reliability_cutoff);
            }
        }
        prev_raw = Some(raw);
        prev_est = Some(est);
    }
    Err(Error::Convergence(format!(
        "eigenvalues still moving by {last_change:.3e} (relative) after {} refinements, tolerance {:.1e}",
        opts.max_refinements, opts.rel_tol
    )))
}

/// Plan a box for `k` eigenvalues, then converge on nested grids.
pub fn converge_problem(problem: &Problem, k: usize, copts: &ConvergeOptions, bopts: &BoxOptions) -> Result<Spectrum> {
    let plan = problem.plan_for_count(k, bopts)?;
    let cap = plan.potential_cap;
    let spec = converge_spectrum(|g| problem.build(g, cap, bopts.node_cap), &plan.grid, k, plan.reliability_cutoff, copts)?;
    if spec.last().is_some_and(|l| l > plan.reliability_cutoff) {
        return Err(Error::Untrusted(format!(
            "λ_{} = {} lies above the reliability cutoff {}",
            k - 1,
            spec.last().unwrap_or(0.0),
            plan.reliability_cutoff
        )));
    }
    Ok(spec)
}

/// Spectra of −Δ + (V_α)^j on one grid, for each j; the potential is capped
/// (nodes above `cap` dropped, reported through `DiscreteOperator::cap_active`).
pub fn homotopy_to_dirichlet(
    alpha: &ExponentVector,
    j_list: &[f64],
    grid: &GridSpec,
    k: usize,
    cap: f64,
) -> Result<Vec<(Spectrum, bool)>> {
    if j_list.is_empty() || j_list.windows(2).any(|w| !(w[1] > w[0])) || j_list[0] <= 0.0 {
        return Err(invalid!("j_list must be positive and strictly ascending"));
    }
    let mut out = Vec::with_capacity(j_list.len());
    for &j in j_list {
        let p = Problem::Product { alpha: alpha.clone(), power: j };
        let op = p.build(grid, Some(cap), DEFAULT_NODE_CAP)?;
        let s = eigenvalues_with(&op, k, &EigenOptions::default())?;
        out.push((s, op.cap_active()));
    }
    Ok(out)
}

/// N(E) = #{λ_j ≤ E}; refuses E above the spectrum's reliability cutoff.
pub fn counting_function(spectrum: &Spectrum, e: f64) -> Result<usize> {
    spectrum.counting(e)
}

impl Problem {
    pub fn dim(&self) -> usize {
        match self {
            Problem::Power1d { .. } => 1,
            Problem::Product { alpha, .. } | Problem::Dirichlet { alpha } => alpha.n(),
        }
    }

    pub fn build(&self, grid: &GridSpec, potential_cap: Option<f64>, node_cap: usize) -> Result<DiscreteOperator> {
        let desc = match self {
            Problem::Power1d { gamma, coupling } => PotentialDescriptor::Power { gamma: *gamma, coupling: *coupling },
            Problem::Product { alpha, power } => PotentialDescriptor::Product { alpha: alpha.clone(), power: *power },
            Problem::Dirichlet { alpha } => PotentialDescriptor::Dirichlet { alpha: alpha.clone() },
        };
        let cap = match self {
            Problem::Product { .. } => potential_cap,
            _ => None,
        };
        DiscreteOperator::build(desc, grid, OperatorOptions { kinetic: 1.0, potential_cap: cap, node_cap })
    }

    /// Per-axis channel law threshold_i(x) = λ0_⊥ |x|^{e_i}: the ground energy
    /// of the cross-section at distance x along axis i.
    pub fn channel_laws(&self) -> Result<Vec<(f64, f64)>> {
        match self {
            Problem::Power1d { .. } => Err(invalid!("one-dimensional problems have no channels")),
            Problem::Product { alpha, power } => {
                let a: Vec<f64> = alpha.alphas().iter().map(|x| x * power).collect();
                let n = a.len();
                (0..n)
                    .map(|i| {
                        let rest: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| a[j]).collect();
                        let p_perp: f64 = rest.iter().sum();
                        let lam = if rest.len() == 1 {
                            ground_energy_1d(rest[0])?
                        } else {
                            let sub = Problem::Product { alpha: ExponentVector::new(&rest)?, power: 1.0 };
                            sub.ground_energy()?
                        };
                        Ok((lam, a[i] * 2.0 / (p_perp + 2.0)))
                    })
                    .collect()
            }
            Problem::Dirichlet { alpha } => {
                let n = alpha.n();
                let last = alpha.last();
                let r: Vec<f64> = alpha.alphas().iter().map(|x| x / last).collect();
                (0..n)
                    .map(|i| {
                        let rest: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| r[j]).collect();
                        let total: f64 = rest.iter().sum();
                        let lam = if rest.len() == 1 {
                            core::f64::consts::PI * core::f64::consts::PI / 4.0
                        } else {
                            Problem::Dirichlet { alpha: ExponentVector::new(&rest)? }.ground_energy()?
                        };
                        Ok((lam, 2.0 * r[i] / total))
                    })
                    .collect()
            }
        }
    }

    /// λ_0 of a two-dimensional problem, from a box planned around it.
    fn ground_energy(&self) -> Result<f64> {
        let opts = ConvergeOptions::new(1e-5, 3);
        let s = converge_problem(self, 1, &opts, &BoxOptions::default())?;
        Ok(s.eigenvalues[0])
    }

    /// Box, spacing and cap for eigenvalues up to `e_max`.
    pub fn plan_box(&self, e_max: f64, opts: &BoxOptions) -> Result<BoxPlan> {
        if !(e_max > 0.0 && e_max.is_finite()) {
            return Err(invalid!("e_max must be positive"));
        }
        if !(opts.factor >= 1.0 && opts.h_coef > 0.0 && opts.cap_factor > 0.0) {
            return Err(invalid!("box options out of range"));
        }
        let h = opts.h_coef / libm::sqrt(e_max);
        match self {
            Problem::Power1d { gamma, coupling } => {
                let (g, gm) = (*coupling, *gamma);
                let v = |x: f64| g * libm::pow(x, gm);
                let turning = libm::pow(e_max / g, 1.0 / gm);
                // march until V exceeds factor·E and the WKB action past the
                // turning point is large enough to make the box wall invisible
                let mut x = turning;
                let mut action = 0.0;
                let dx = (turning * 1e-3).max(h * 0.1);
                while !(action > 25.0 && v(x) >= opts.factor * e_max) {
                    let mid = x + 0.5 * dx;
                    action += libm::sqrt((v(mid) - e_max).max(0.0)) * dx;
                    x += dx;
                }
                let grid = GridSpec::with_spacing(&[x], &[h])?;
                let cutoff = v(x) / opts.factor;
                Ok(BoxPlan { grid, potential_cap: None, thresholds: vec![v(x)], reliability_cutoff: cutoff, e_max })
            }
            Problem::Product { .. } | Problem::Dirichlet { .. } => {
                let laws = self.channel_laws()?;
                let l: Vec<f64> = laws.iter().map(|(lam, e)| libm::pow(opts.factor * e_max / lam, 1.0 / e)).collect();
                let hs: Vec<f64> = l.iter().map(|li| h.min(li / 4.0)).collect();
                let grid = GridSpec::with_spacing(&l, &hs)?;
                let thresholds: Vec<f64> =
                    laws.iter().zip(grid.half_widths()).map(|((lam, e), li)| lam * libm::pow(*li, *e)).collect();
                let cutoff = thresholds.iter().copied().fold(f64::INFINITY, f64::min) / opts.factor;
                let cap = match self {
                    Problem::Product { .. } => Some(opts.cap_factor * e_max),
                    _ => None,
                };
                Ok(BoxPlan { grid, potential_cap: cap, thresholds, reliability_cutoff: cutoff, e_max })
            }
        }
    }

    /// Plan a box whose cutoff sits comfortably above λ_{k-1}.
    pub fn plan_for_count(&self, k: usize, opts: &BoxOptions) -> Result<BoxPlan> {
        let mut e = 4.0;
        for _ in 0..40 {
            let plan = self.plan_box(e, opts)?;
            // coarse look at the spectrum: double spacing
            let coarse = BoxOptions { h_coef: opts.h_coef * 2.0, ..*opts };
            let cplan = self.plan_box(e, &coarse)?;
            let op = self.build(&cplan.grid, cplan.potential_cap, opts.node_cap)?;
            let eo = EigenOptions::default();
            let limit = (op.size() as f64 * eo.max_fraction) as usize;
            if k <= limit {
                let s = eigenvalues_with(&op, k, &eo)?;
                let top = s.last().unwrap_or(0.0);
                if top < 0.7 * e {
                    return Ok(plan);
                }
                e = (top / 0.7) * 1.2;
            } else {
                e *= 2.0;
            }
        }
        Err(Error::Convergence(format!("no box found for {k} eigenvalues")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const AIRY_PRIME: [f64; 3] = [1.018_792_972, 3.248_197_582, 4.820_099_211];
    const AIRY: [f64; 3] = [2.338_107_410, 4.087_949_444, 5.520_559_828];

    #[test]
    fn harmonic_converges() {
        let p = Problem::Power1d { gamma: 2.0, coupling: 1.0 };
        let s = converge_problem(&p, 10, &ConvergeOptions::new(1e-5, 8), &BoxOptions::default()).unwrap();
        for (k, v) in s.eigenvalues.iter().enumerate() {
            let want = (2 * k + 1) as f64;
            assert!(((v - want) / want).abs() < 1e-4, "{v} vs {want}");
        }
    }

    #[test]
    fn linear_potential_hits_airy_zeros() {
        let p = Problem::Power1d { gamma: 1.0, coupling: 1.0 };
        let s = converge_problem(&p, 6, &ConvergeOptions::new(1e-7, 8), &BoxOptions::default()).unwrap();
        for k in 0..3 {
            assert!((s.eigenvalues[2 * k] - AIRY_PRIME[k]).abs() < 1e-6);
            assert!((s.eigenvalues[2 * k + 1] - AIRY[k]).abs() < 1e-6);
        }
    }

    #[test]
    fn ground_energies() {
        assert!((ground_energy_1d(2.0).unwrap() - 1.0).abs() < 1e-8);
        assert!((ground_energy_1d(1.0).unwrap() - AIRY_PRIME[0]).abs() < 1e-8);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let p = Problem::Power1d { gamma: 2.0, coupling: 1.0 };
        let r = converge_problem(&p, 3, &ConvergeOptions::new(1e-12, 2), &BoxOptions::default());
        assert!(matches!(r, Err(Error::Convergence(_))));
    }

    #[test]
    fn dirichlet_channel_law_in_2d() {
        let p = Problem::Dirichlet { alpha: ExponentVector::new(&[1.0, 1.0]).unwrap() };
        let laws = p.channel_laws().unwrap();
        for (lam, e) in laws {
            assert!((lam - core::f64::consts::PI * core::f64::consts::PI / 4.0).abs() < 1e-15);
            assert_eq!(e, 2.0);
        }
        let plan = p.plan_box(50.0, &BoxOptions::default()).unwrap();
        assert!((plan.reliability_cutoff - 50.0).abs() < 1.0);
    }
}
