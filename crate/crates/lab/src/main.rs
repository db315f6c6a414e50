use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hypercross_lab::{run, ExperimentConfig, LabError};

/// Spectra, heat traces, path integrals and asymptotic fits for
/// −Δ + Π|x_i|^{α_i} and hyperbolic-cross Dirichlet problems.
#[derive(Parser)]
#[command(name = "hypercross", version)]
struct Cli {
    /// key = value config file; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: $HYPERCROSS_OUT, else ./hypercross-out).
    #[arg(long, global = true)]
    out: Option<String>,
    /// Extra override, repeatable: --set key=value.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form asymptotic constants of a theorem.
    Constants(Params),
    /// Eigenvalues of −Δ + (Π|x_i|^{α_i})^power, or of −d²/dx² + g|x|^γ.
    Eig(Params),
    /// Eigenvalues of the Dirichlet Laplacian on {Π|x_i|^{α_i/α_n} < 1}.
    Dirichlet(Params),
    /// Heat traces: spectrum, sliced-bread, sliced-gt, classical, separable, fk or chain.
    Trace(Params),
    /// Feynman–Kac Monte Carlo traces, optionally with a confined lower bound.
    Fk(Params),
    /// Both sides of the log-volume identity.
    LemmaLogvol(Params),
    /// Spectral zeta value with a fitted tail.
    Zeta(Params),
    /// Fit c x^{±l} (ln x)^d to counting or heat data.
    Fit(Params),
    /// Spectra along −Δ + V^j toward the Dirichlet problem.
    Homotopy(Params),
    /// Run the acceptance suite.
    Verify(Params),
}

/// Config keys as flags. Defaults are listed under ExperimentConfig.
#[derive(Args, Default)]
struct Params {
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    coupling: Option<String>,
    #[arg(long)]
    power: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    e_max: Option<String>,
    #[arg(long)]
    h_coef: Option<String>,
    #[arg(long)]
    rel_tol: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    paths: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    cells: Option<String>,
    #[arg(long)]
    confinement: Option<String>,
    #[arg(long)]
    kappa_c: Option<String>,
    #[arg(long)]
    theorem: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    alpha0: Option<String>,
    #[arg(long)]
    zeta_value: Option<String>,
    #[arg(long)]
    integrand: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    lhs: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    tail: Option<String>,
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    regime: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    j: Option<String>,
    #[arg(long)]
    suite: Option<String>,
}

impl Params {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        let all = [
            ("alpha", &self.alpha),
            ("coupling", &self.coupling),
            ("power", &self.power),
            ("k", &self.k),
            ("e_max", &self.e_max),
            ("h_coef", &self.h_coef),
            ("rel_tol", &self.rel_tol),
            ("t", &self.t),
            ("method", &self.method),
            ("paths", &self.paths),
            ("steps", &self.steps),
            ("seed", &self.seed),
            ("cells", &self.cells),
            ("confinement", &self.confinement),
            ("kappa_c", &self.kappa_c),
            ("theorem", &self.theorem),
            ("n", &self.n),
            ("alpha0", &self.alpha0),
            ("zeta_value", &self.zeta_value),
            ("integrand", &self.integrand),
            ("a", &self.a),
            ("lhs", &self.lhs),
            ("samples", &self.samples),
            ("s", &self.s),
            ("tail", &self.tail),
            ("input", &self.input),
            ("regime", &self.regime),
            ("d", &self.d),
            ("window", &self.window),
            ("j", &self.j),
            ("suite", &self.suite),
        ];
        all.into_iter().filter_map(|(k, v)| v.as_deref().map(|v| (k, v))).collect()
    }
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, LabError> {
    let (name, params) = match &cli.command {
        Command::Constants(p) => ("constants", p),
        Command::Eig(p) => ("eig", p),
        Command::Dirichlet(p) => ("dirichlet", p),
        Command::Trace(p) => ("trace", p),
        Command::Fk(p) => ("fk", p),
        Command::LemmaLogvol(p) => ("lemma-logvol", p),
        Command::Zeta(p) => ("zeta", p),
        Command::Fit(p) => ("fit", p),
        Command::Homotopy(p) => ("homotopy", p),
        Command::Verify(p) => ("verify", p),
    };
    let base = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let mut pairs = vec![("subcommand", name)];
    pairs.extend(params.pairs());
    let mut extra = Vec::new();
    for s in &cli.set {
        let (k, v) = s.split_once('=').ok_or_else(|| LabError::Config(format!("--set {s:?}: expected key=value")))?;
        extra.push((k, v));
    }
    pairs.extend(extra);
    if let Some(o) = &cli.out {
        pairs.push(("out", o.as_str()));
    }
    base.apply(pairs)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build_config(&cli).and_then(|cfg| run(&cfg));
    match result {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.outputs).unwrap_or_default());
            eprintln!("summary: {}", out.summary_path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hypercross: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
