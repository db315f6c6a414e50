//! One function per subcommand. Each computes, writes its artifacts and
//! returns the `outputs` block of the run summary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use hypercross_core::discretize::{
    converge_problem, eigenvalues_below, homotopy_to_dirichlet, power1d_spectrum, BoxOptions, BoxPlan,
    ConvergeOptions, EigenOptions, GridSpec, Problem,
};
use hypercross_core::fk::{
    fk_confined_lower, fk_trace, log_volume_lhs, log_volume_rhs, ConfinementMode, ConfinementPolicy, FkEstimate,
    FkPotential, LhsMethod, McParams,
};
use hypercross_core::heat::{
    check_chain, heat_trace, separable_upper_bound, z_classical_1d, z_classical_product_divergence, z_sliced_bread,
    z_sliced_gt, BaseTrace, HeatSource, HeatTraceCurve, OneDimModel, SgtOutcome, SliceFunction, TraceTable,
    TraceValue,
};
use hypercross_core::spectral::{dim_exponent, theorem_constant, ExponentVector, Regime, Spectrum, Theorem, TheoremConstant};
use hypercross_core::tauberian::{fit_asymptotic, spectral_zeta, FitResult, StepData, ZetaTail};
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::io::{self, curve_rows, num, spectrum_rows, Artifacts, CURVE_HEADER, SPECTRUM_HEADER};
use crate::verify;
use crate::LabError;

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary_path: PathBuf,
    pub files: Vec<PathBuf>,
    pub outputs: Value,
}

/// Run the subcommand named in `cfg.subcommand`, write every artifact and the
/// summary. Acceptance failures are reported after the files are written.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, LabError> {
    let start = Instant::now();
    let mut art = Artifacts::new(cfg, &cfg.subcommand)?;
    art.config(cfg)?;
    let outputs = match cfg.subcommand.as_str() {
        "constants" => constants(cfg, &mut art)?,
        "eig" => eig(cfg, &mut art, false)?,
        "dirichlet" => eig(cfg, &mut art, true)?,
        "trace" => trace(cfg, &mut art)?,
        "fk" => fk(cfg, &mut art)?,
        "lemma-logvol" => lemma_logvol(cfg, &mut art)?,
        "zeta" => zeta(cfg, &mut art)?,
        "fit" => fit(cfg, &mut art)?,
        "homotopy" => homotopy(cfg, &mut art)?,
        "verify" => verify_cmd(cfg, &mut art)?,
        other => return Err(LabError::Config(format!("unknown subcommand {other:?}"))),
    };
    let summary = io::summary(cfg, outputs.clone(), start.elapsed(), &art.written);
    let summary_path = art.json("summary", &summary)?;
    if cfg.subcommand == "verify" && !outputs["passed"].as_bool().unwrap_or(false) {
        let failed: Vec<String> = outputs["criteria"]
            .as_array()
            .map(|a| {
                a.iter()
                    .filter(|c| !c["passed"].as_bool().unwrap_or(false))
                    .map(|c| c["id"].to_string())
                    .collect()
            })
            .unwrap_or_default();
        return Err(LabError::Acceptance(format!(
            "criteria {} failed; report in {}",
            failed.join(", "),
            summary_path.display()
        )));
    }
    Ok(RunOutput { summary_path, files: art.written.clone(), outputs })
}

/// A finite number, or the string "inf"/"nan".
pub fn jnum(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(format!("{v}"))
    }
}

fn alpha_of(cfg: &ExperimentConfig) -> Result<ExponentVector, LabError> {
    Ok(ExponentVector::new(&cfg.alpha)?)
}

fn box_options(cfg: &ExperimentConfig) -> BoxOptions {
    BoxOptions { factor: cfg.box_factor, h_coef: cfg.h_coef, cap_factor: cfg.cap_factor, node_cap: cfg.node_cap }
}

fn problem_of(cfg: &ExperimentConfig, dirichlet: bool) -> Result<Problem, LabError> {
    if dirichlet {
        if cfg.alpha.len() < 2 {
            return Err(LabError::Config("the Dirichlet problem needs n >= 2".into()));
        }
        return Ok(Problem::Dirichlet { alpha: alpha_of(cfg)? });
    }
    if cfg.alpha.len() == 1 {
        return Ok(Problem::Power1d { gamma: cfg.alpha[0], coupling: cfg.coupling });
    }
    Ok(Problem::Product { alpha: alpha_of(cfg)?, power: cfg.power })
}

/// A spectrum and the grid it came from (None for shooting).
pub struct Computed {
    pub spectrum: Spectrum,
    pub plan: Option<BoxPlan>,
    pub method: String,
}

/// Every eigenvalue below `e` on the box planned for `e`, with an h² error
/// estimate from the same box at twice the spacing.
pub fn spectrum_below(problem: &Problem, e: f64, bopts: &BoxOptions) -> Result<(Spectrum, BoxPlan), LabError> {
    let plan = problem.plan_box(e, bopts)?;
    let eo = EigenOptions::default();
    let op = problem.build(&plan.grid, plan.potential_cap, bopts.node_cap)?;
    let fine = eigenvalues_below(&op, e, &eo)?;
    let coarse_plan = problem.plan_box(e, &BoxOptions { h_coef: 2.0 * bopts.h_coef, ..*bopts })?;
    let cop = problem.build(&coarse_plan.grid, coarse_plan.potential_cap, bopts.node_cap)?;
    let coarse = eigenvalues_below(&cop, e, &eo)?;
    let conv: Vec<f64> = fine
        .iter()
        .enumerate()
        .map(|(i, f)| coarse.get(i).map_or(f64::NAN, |c| ((f - c) / f).abs() / 3.0))
        .collect();
    if fine.is_empty() {
        return Err(LabError::Core(hypercross_core::Error::InvalidInput(format!("no eigenvalues below {e}"))));
    }
    let cutoff = plan.reliability_cutoff.min(e);
    Ok((Spectrum::new(fine, conv, cutoff)?, plan))
}

pub fn compute_spectrum(cfg: &ExperimentConfig, dirichlet: bool) -> Result<Computed, LabError> {
    let problem = problem_of(cfg, dirichlet)?;
    let bopts = box_options(cfg);
    let one_d = matches!(problem, Problem::Power1d { .. });
    let method = cfg.method_or(if one_d { "shooting" } else { "fd" });
    if let Some(e) = cfg.e_max {
        let (spectrum, plan) = spectrum_below(&problem, e, &bopts)?;
        return Ok(Computed { spectrum, plan: Some(plan), method: "fd-window".into() });
    }
    match method.as_str() {
        "shooting" => {
            let Problem::Power1d { gamma, coupling } = problem else {
                return Err(LabError::Config("shooting is one-dimensional".into()));
            };
            let spectrum = power1d_spectrum(gamma, coupling, cfg.k, cfg.rel_tol)?;
            Ok(Computed { spectrum, plan: None, method })
        }
        "fd" => {
            let copts = ConvergeOptions::new(cfg.rel_tol, cfg.max_refinements);
            let plan = problem.plan_for_count(cfg.k, &bopts)?;
            let spectrum = converge_problem(&problem, cfg.k, &copts, &bopts)?;
            Ok(Computed { spectrum, plan: Some(plan), method })
        }
        other => Err(LabError::Config(format!("unknown eigen method {other:?}"))),
    }
}

fn grid_json(g: &GridSpec) -> Value {
    json!({ "half_widths": g.half_widths(), "points": g.points() })
}

fn spectrum_json(c: &Computed) -> Value {
    json!({
        "method": c.method,
        "grid": c.plan.as_ref().map(|p| grid_json(&p.grid)),
        "k": c.spectrum.k(),
        "reliability_cutoff": jnum(c.spectrum.reliability_cutoff),
        "max_convergence_estimate": jnum(c.spectrum.convergence.iter().copied().fold(0.0, f64::max)),
        "lowest": c.spectrum.eigenvalues.iter().take(10).collect::<Vec<_>>(),
    })
}

fn eig(cfg: &ExperimentConfig, art: &mut Artifacts, dirichlet: bool) -> Result<Value, LabError> {
    let c = compute_spectrum(cfg, dirichlet)?;
    art.csv("", &SPECTRUM_HEADER, &spectrum_rows(&c.spectrum))?;
    let info = spectrum_json(&c);
    art.json("", &info)?;
    let rows: Vec<Vec<f64>> = c.spectrum.eigenvalues.iter().enumerate().map(|(i, l)| vec![i as f64, *l]).collect();
    art.dat("levels", &["index", "eigenvalue"], &rows)?;
    let steps: Vec<Vec<f64>> =
        c.spectrum.eigenvalues.iter().enumerate().map(|(i, l)| vec![*l, (i + 1) as f64]).collect();
    art.dat("counting", &["E", "N"], &steps)?;
    Ok(info)
}

fn theorem_of(cfg: &ExperimentConfig) -> Result<Theorem, LabError> {
    Theorem::parse(&cfg.theorem).ok_or_else(|| LabError::Config(format!("unknown theorem {:?}", cfg.theorem)))
}

/// Tr(H_1^{-s}) for the one-dimensional base −d²/dx² + |x|^γ.
pub fn base_zeta(gamma: f64, s: f64, levels: usize) -> Result<hypercross_core::tauberian::ZetaValue, LabError> {
    let spec = power1d_spectrum(gamma, 1.0, levels, 1e-10)?;
    Ok(spectral_zeta(&spec, s, ZetaTail::WeylPower)?)
}

fn constants(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Value, LabError> {
    let th = theorem_of(cfg)?;
    let alpha = match th {
        Theorem::T2 | Theorem::T4 | Theorem::T6 | Theorem::T7 => ExponentVector::uniform(cfg.alpha0, cfg.n)?,
        _ => alpha_of(cfg)?,
    };
    let mut zeta_info = Value::Null;
    let z = match (th.needs_zeta(), cfg.zeta_value) {
        (false, _) => None,
        (true, Some(z)) => Some(z),
        (true, None) if th != Theorem::T5 && alpha.n() == 2 => {
            let d = dim_exponent(&alpha)?;
            let zv = base_zeta(alpha.alphas()[0], d, 400)?;
            zeta_info = serde_json::to_value(zv).unwrap_or(Value::Null);
            Some(zv.total)
        }
        (true, None) => return Err(LabError::Config(format!("{} needs zeta_value for this alpha", th.name()))),
    };
    let tc = theorem_constant(th, &alpha, z)?;
    let out = match tc {
        TheoremConstant::Single { law } => json!({
            "theorem": th.name(),
            "alpha": alpha.alphas(),
            "c": law.constant,
            "law": law,
        }),
        TheoremConstant::Pair { pi_minus_half, pi_minus_n_half } => json!({
            "theorem": th.name(),
            "alpha": alpha.alphas(),
            "zeta_value": z,
            "zeta": zeta_info,
            "c_pi_minus_half": pi_minus_half.constant,
            "c_pi_minus_n_half": pi_minus_n_half.constant,
            "laws": { "pi_minus_half": pi_minus_half, "pi_minus_n_half": pi_minus_n_half },
        }),
    };
    art.json("", &out)?;
    Ok(out)
}

fn mc_of(cfg: &ExperimentConfig) -> McParams {
    McParams { paths: cfg.paths, steps: cfg.steps, seed: cfg.seed, cells_per_axis: cfg.cells }
}

fn fk_potential(cfg: &ExperimentConfig) -> Result<FkPotential, LabError> {
    if cfg.alpha.len() == 1 {
        Ok(FkPotential::Power { gamma: cfg.alpha[0], coupling: cfg.coupling })
    } else {
        Ok(FkPotential::Product(alpha_of(cfg)?))
    }
}

fn sorted_ts(cfg: &ExperimentConfig) -> Result<Vec<f64>, LabError> {
    let mut ts = cfg.t.clone();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    if ts.is_empty() {
        return Err(LabError::Config("no t values".into()));
    }
    Ok(ts)
}

/// Slice function and the F^{(1/d_n)} table for the sliced traces, good
/// down to `t_min`. Two dimensions use the exact base model; higher
/// dimensions use the base spectrum below `base_e`.
pub fn sliced_setup(alpha: &ExponentVector, t_min: f64, base_e: f64) -> Result<(SliceFunction, TraceTable), LabError> {
    let d = dim_exponent(alpha)?;
    let b = d / (d + 0.5);
    let (slice, eps0) = if alpha.n() == 2 {
        let s = SliceFunction::two_dim(alpha, 60, 1e-6)?;
        let e0 = hypercross_core::discretize::ground_energy_1d(alpha.alphas()[0])?;
        (s, e0)
    } else {
        let base = Problem::Product { alpha: alpha.base()?, power: 1.0 };
        let (sp, _) = spectrum_below(&base, base_e, &BoxOptions::default())?;
        let e0 = sp.eigenvalues[0];
        (SliceFunction::new(alpha, BaseTrace::Spectrum(sp))?, e0)
    };
    let table = TraceTable::new(OneDimModel::compute(1.0 / d, 60, 1e-8)?, 0.5 * t_min * eps0.powf(b), 32)?;
    Ok((slice, table))
}

fn fk_curve(pot: &FkPotential, ts: &[f64], mc: &McParams) -> Result<(HeatTraceCurve, Vec<FkEstimate>), LabError> {
    let mut curve = HeatTraceCurve::new(HeatSource::FeynmanKac);
    let mut ests = Vec::new();
    for &t in ts {
        let e = fk_trace(pot, t, mc)?;
        curve.push(t, TraceValue { value: e.mean, error: e.stderr })?;
        ests.push(e);
    }
    Ok((curve, ests))
}

fn trace(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Value, LabError> {
    let ts = sorted_ts(cfg)?;
    let method = cfg.method_or("chain");
    let n = cfg.alpha.len();
    let needs_n2 = |m: &str| -> Result<ExponentVector, LabError> {
        if n < 2 {
            return Err(LabError::Config(format!("{m} needs n >= 2")));
        }
        alpha_of(cfg)
    };
    let mut curves: Vec<HeatTraceCurve> = Vec::new();
    let mut extra = json!({});
    match method.as_str() {
        "spectrum" => {
            let c = compute_spectrum(cfg, false)?;
            curves.push(HeatTraceCurve::sample(HeatSource::SpectrumSum, &ts, |t| heat_trace(&c.spectrum, t))?);
            extra = json!({ "spectrum": spectrum_json(&c) });
        }
        "fk" => {
            let (curve, ests) = fk_curve(&fk_potential(cfg)?, &ts, &mc_of(cfg))?;
            curves.push(curve);
            extra = json!({ "estimates": ests });
        }
        "classical" => {
            if n == 1 {
                // g|x|^γ rescales t by g^{1/γ}
                let g = cfg.coupling.powf(1.0 / cfg.alpha[0]);
                curves.push(HeatTraceCurve::sample(HeatSource::Classical, &ts, |t| {
                    Ok(TraceValue { value: z_classical_1d(cfg.alpha[0], t)? / g, error: 0.0 })
                })?);
            } else {
                let cert = z_classical_product_divergence(&alpha_of(cfg)?)?;
                extra = json!({ "divergence_certificate": cert });
            }
        }
        "separable" => {
            let alpha = needs_n2("separable")?;
            curves.push(HeatTraceCurve::sample(HeatSource::ProductBound, &ts, |t| separable_upper_bound(&alpha, t))?);
        }
        "sliced-bread" | "sliced-gt" | "chain" => {
            let alpha = needs_n2(&method)?;
            let (slice, table) = sliced_setup(&alpha, ts[0], cfg.e_max.unwrap_or(40.0))?;
            if method == "sliced-bread" {
                curves.push(HeatTraceCurve::sample(HeatSource::SlicedBread, &ts, |t| {
                    z_sliced_bread(&alpha, t, &slice, &table)
                })?);
            } else if method == "sliced-gt" {
                let mut c = HeatTraceCurve::new(HeatSource::SlicedGt);
                for &t in &ts {
                    match z_sliced_gt(&alpha, t, &slice)? {
                        SgtOutcome::Value(v) => c.push(t, v)?,
                        SgtOutcome::Divergent(cert) => {
                            extra = json!({ "divergence_certificate": cert });
                            break;
                        }
                    }
                }
                curves.push(c);
            } else {
                let (zq, ests) = fk_curve(&FkPotential::Product(alpha.clone()), &ts, &mc_of(cfg))?;
                let zq_vals: Vec<TraceValue> =
                    zq.samples.iter().map(|s| TraceValue { value: s.value, error: 3.0 * s.error }).collect();
                let report = check_chain(&alpha, &ts, &zq_vals, &slice, &table)?;
                let mut sb = HeatTraceCurve::new(HeatSource::SlicedBread);
                let mut sgt = HeatTraceCurve::new(HeatSource::SlicedGt);
                for r in &report.records {
                    sb.push(r.t, r.z_sb)?;
                    if let Some(v) = r.z_sgt {
                        sgt.push(r.t, v)?;
                    }
                }
                curves.push(zq);
                curves.push(sb);
                if !sgt.samples.is_empty() {
                    curves.push(sgt);
                }
                extra = json!({ "chain": report, "z_q_estimates": ests, "z_q_error": "3 standard errors" });
            }
        }
        other => return Err(LabError::Config(format!("unknown trace method {other:?}"))),
    }
    let rows: Vec<Vec<String>> = curves.iter().flat_map(curve_rows).collect();
    art.csv("", &CURVE_HEADER, &rows)?;
    for c in &curves {
        let d: Vec<Vec<f64>> = c.samples.iter().map(|s| vec![s.t, s.value, s.error]).collect();
        art.dat(c.source.name(), &["t", "value", "error"], &d)?;
    }
    let out = json!({ "method": method, "curves": curves, "details": extra });
    art.json("", &out)?;
    Ok(out)
}

fn confinement_of(cfg: &ExperimentConfig, n: usize) -> Result<Option<ConfinementPolicy>, LabError> {
    let mode = match cfg.confinement.as_str() {
        "none" => return Ok(None),
        "xn-band" => ConfinementMode::XnBand,
        "all-band" => ConfinementMode::AllBand,
        other => return Err(LabError::Config(format!("unknown confinement {other:?}"))),
    };
    let mut p = ConfinementPolicy::new(mode, n);
    if let Some(c) = cfg.kappa_c {
        p.c = c;
    }
    Ok(Some(p))
}

fn fk(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Value, LabError> {
    let ts = sorted_ts(cfg)?;
    let pot = fk_potential(cfg)?;
    let mc = mc_of(cfg);
    let (curve, ests) = fk_curve(&pot, &ts, &mc)?;
    let mut confined = Vec::new();
    if let Some(policy) = confinement_of(cfg, cfg.alpha.len())? {
        let alpha = alpha_of(cfg)?;
        for &t in &ts {
            confined.push(fk_confined_lower(&alpha, t, policy, &mc)?);
        }
    }
    art.csv("", &CURVE_HEADER, &curve_rows(&curve))?;
    let d: Vec<Vec<f64>> = curve.samples.iter().map(|s| vec![s.t, s.value, s.error]).collect();
    art.dat("trace", &["t", "mean", "stderr"], &d)?;
    let out = json!({
        "estimates": ests,
        "confined": confined,
        "confinement": cfg.confinement,
        "kappa_c": cfg.kappa_c.unwrap_or(cfg.alpha.len() as f64),
    });
    art.json("", &out)?;
    Ok(out)
}

/// The log-volume test integrands.
pub fn integrand(name: &str) -> Result<fn(f64) -> f64, LabError> {
    match name {
        "exp" => Ok(|p| (-p).exp()),
        "gauss" => Ok(|p| (-p * p).exp()),
        "cubic" => Ok(|p| 1.0 / ((1.0 + p) * (1.0 + p) * (1.0 + p))),
        other => Err(LabError::Config(format!("unknown integrand {other:?}"))),
    }
}

fn lemma_logvol(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Value, LabError> {
    let f = integrand(&cfg.integrand)?;
    let method = match cfg.lhs.as_str() {
        "quadrature" => LhsMethod::Quadrature,
        "mc" => LhsMethod::MonteCarlo { samples: cfg.samples, seed: cfg.seed },
        other => return Err(LabError::Config(format!("unknown lhs method {other:?}"))),
    };
    let rhs = log_volume_rhs(f, cfg.a, cfg.n)?;
    let (lhs, err) = log_volume_lhs(f, cfg.a, cfg.n, method)?;
    let out = json!({
        "integrand": cfg.integrand,
        "n": cfg.n,
        "a": cfg.a,
        "lhs": lhs,
        "lhs_error": err,
        "rhs": rhs,
        "relative_difference": (lhs - rhs).abs() / rhs.abs(),
    });
    art.json("", &out)?;
    Ok(out)
}

fn tail_of(name: &str) -> Result<ZetaTail, LabError> {
    match name {
        "none" => Ok(ZetaTail::None),
        "weyl-power" => Ok(ZetaTail::WeylPower),
        "weyl-power-log" => Ok(ZetaTail::WeylPowerLog),
        other => Err(LabError::Config(format!("unknown zeta tail {other:?}"))),
    }
}

fn spectrum_from_input(path: &Path) -> Result<Spectrum, LabError> {
    let (x, _) = io::read_xy(path)?;
    Ok(Spectrum::exact(x)?)
}

fn zeta(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Value, LabError> {
    let spec = match &cfg.input {
        Some(p) => spectrum_from_input(Path::new(p))?,
        None => compute_spectrum(cfg, false)?.spectrum,
    };
    let z = spectral_zeta(&spec, cfg.s, tail_of(&cfg.tail)?)?;
    let out = json!({ "zeta": z, "levels": spec.k() });
    art.json("", &out)?;
    Ok(out)
}

/// N(E) at `m` log-spaced energies in [lo, hi], all on the box planned for hi.
pub fn counting_samples(
    problem: &Problem,
    lo: f64,
    hi: f64,
    m: usize,
    bopts: &BoxOptions,
) -> Result<(StepData, BoxPlan), LabError> {
    let plan = problem.plan_box(hi, bopts)?;
    let op = problem.build(&plan.grid, plan.potential_cap, bopts.node_cap)?;
    let mut es = Vec::with_capacity(m);
    let mut ns = Vec::with_capacity(m);
    for i in 0..m {
        let e = lo * (hi / lo).powf(i as f64 / (m - 1) as f64);
        es.push(e);
        ns.push(hypercross_core::discretize::count_below(&op, e)? as f64);
    }
    let cutoff = plan.reliability_cutoff.min(hi);
    Ok((StepData::new(es, ns, cutoff)?, plan))
}

fn fit(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Value, LabError> {
    let regime = match cfg.regime.as_str() {
        "counting" => Regime::CountingLargeE,
        "heat" => Regime::HeatTraceSmallT,
        other => return Err(LabError::Config(format!("unknown regime {other:?}"))),
    };
    let (xs, ys) = match &cfg.input {
        Some(p) => io::read_xy(Path::new(p))?,
        None => {
            if regime != Regime::CountingLargeE {
                return Err(LabError::Config("heat fits need an input file".into()));
            }
            let e = cfg.e_max.unwrap_or(16.0);
            let lo = cfg.window.first().copied().unwrap_or(e / 5.0);
            let (d, _) = counting_samples(&problem_of(cfg, false)?, lo, e, 14, &box_options(cfg))?;
            (d.energies, d.counts)
        }
    };
    let window = if cfg.window.len() == 2 { (cfg.window[0], cfg.window[1]) } else { default_window(&xs, regime) };
    let f: FitResult = fit_asymptotic(&xs, &ys, regime, &cfg.d, window)?;
    let rows: Vec<Vec<String>> =
        xs.iter().zip(&ys).map(|(x, y)| vec![num(*x), num(*y), num(f.law.eval(*x))]).collect();
    art.csv("data", &["x", "y", "model"], &rows)?;
    let d: Vec<Vec<f64>> = xs.iter().zip(&ys).map(|(x, y)| vec![*x, *y, f.law.eval(*x)]).collect();
    art.dat("data", &["x", "y", "model"], &d)?;
    let out = serde_json::to_value(&f).map_err(|e| LabError::Io(e.to_string()))?;
    art.json("", &out)?;
    Ok(out)
}

/// Drop the preasymptotic decade: the lowest one for counting data, the
/// highest one for small-t heat data.
fn default_window(xs: &[f64], regime: Regime) -> (f64, f64) {
    let pos = || xs.iter().copied().filter(|&x| x > 0.0);
    let (lo, hi) = (pos().fold(f64::INFINITY, f64::min), pos().fold(0.0, f64::max));
    match regime {
        Regime::CountingLargeE => ((10.0 * lo).min(hi / 3.0), hi),
        _ => (lo, (hi / 10.0).max(3.0 * lo)),
    }
}

/// Homotopy spectra and the Dirichlet spectrum on the same grid.
pub struct HomotopyRun {
    pub js: Vec<f64>,
    pub spectra: Vec<Vec<f64>>,
    pub cap_active: Vec<bool>,
    pub dirichlet: Vec<f64>,
    pub grid: GridSpec,
}

impl HomotopyRun {
    /// λ_i(j) nondecreasing in j for every i.
    pub fn monotone(&self) -> bool {
        self.spectra.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| *b >= a * (1.0 - 1e-10)))
    }

    /// |λ_i(j_max) − λ_i^D|/λ_i^D.
    pub fn deviations(&self) -> Vec<f64> {
        let last = self.spectra.last().cloned().unwrap_or_default();
        last.iter().zip(&self.dirichlet).map(|(a, d)| ((a - d) / d).abs()).collect()
    }

    /// 2λ(j_max) − λ(j_max/2): removes an O(1/j) approach.
    pub fn extrapolated(&self) -> Vec<f64> {
        let m = self.spectra.len();
        if m < 2 {
            return Vec::new();
        }
        self.spectra[m - 1].iter().zip(&self.spectra[m - 2]).map(|(a, b)| 2.0 * a - b).collect()
    }
}

pub fn run_homotopy(alpha: &ExponentVector, js: &[f64], e: f64, k: usize, bopts: &BoxOptions) -> Result<HomotopyRun, LabError> {
    let dp = Problem::Dirichlet { alpha: alpha.clone() };
    let plan = dp.plan_box(e, bopts)?;
    let dop = dp.build(&plan.grid, None, bopts.node_cap)?;
    let dirichlet = hypercross_core::discretize::eigenvalues(&dop, k)?.eigenvalues;
    let h = homotopy_to_dirichlet(alpha, js, &plan.grid, k, bopts.cap_factor * e)?;
    Ok(HomotopyRun {
        js: js.to_vec(),
        spectra: h.iter().map(|(s, _)| s.eigenvalues.clone()).collect(),
        cap_active: h.iter().map(|(_, c)| *c).collect(),
        dirichlet,
        grid: plan.grid,
    })
}

fn homotopy(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Value, LabError> {
    let alpha = alpha_of(cfg)?;
    let e = cfg.e_max.unwrap_or(40.0);
    let r = run_homotopy(&alpha, &cfg.j, e, cfg.k.min(20), &box_options(cfg))?;
    let mut rows = Vec::new();
    let mut dat = Vec::new();
    for ((j, s), cap) in r.js.iter().zip(&r.spectra).zip(&r.cap_active) {
        for (i, l) in s.iter().enumerate() {
            rows.push(vec![num(*j), i.to_string(), num(*l), cap.to_string()]);
        }
        let mut line = vec![*j];
        line.extend(s);
        dat.push(line);
    }
    for (i, l) in r.dirichlet.iter().enumerate() {
        rows.push(vec!["inf".into(), i.to_string(), num(*l), "false".into()]);
    }
    art.csv("", &["j", "index", "eigenvalue", "cap_active"], &rows)?;
    art.dat("levels", &["j", "lambda_0", "lambda_1", "..."], &dat)?;
    let out = json!({
        "grid": grid_json(&r.grid),
        "monotone": r.monotone(),
        "dirichlet": r.dirichlet,
        "relative_deviation_at_last_j": r.deviations(),
        "extrapolated_in_1_over_j": r.extrapolated(),
    });
    art.json("", &out)?;
    Ok(out)
}

fn verify_cmd(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<Value, LabError> {
    let ids = verify::suite_ids(&cfg.suite)?;
    let outcomes = verify::run_criteria(cfg, &ids, |o| eprintln!("{}", o.line()));
    let passed = outcomes.iter().all(|o| o.passed);
    let report: String = outcomes.iter().map(|o| o.line() + "\n").collect();
    let out = json!({ "passed": passed, "criteria": outcomes, "report": report });
    art.json("report", &out)?;
    Ok(out)
}
