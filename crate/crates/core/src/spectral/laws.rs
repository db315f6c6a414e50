use core::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::special::{gamma, zeta};

use super::exponents::{dim_exponent, q_exponent, ExponentVector};

/// Which limit a law describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Regime {
    /// Z(t) ~ c t^{-l} |ln t|^d as t → 0⁺.
    HeatTraceSmallT,
    /// N(E) ~ c E^l (ln E)^d as E → ∞.
    CountingLargeE,
}

/// c·E^l·(ln E)^d or c·t^{-l}·|ln t|^d.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AsymptoticLaw {
    pub power: f64,
    pub log_power: u32,
    pub constant: f64,
    pub regime: Regime,
}

impl AsymptoticLaw {
    pub fn new(power: f64, log_power: u32, constant: f64, regime: Regime) -> Result<Self> {
        if !(power.is_finite() && power > 0.0) {
            return Err(invalid!("law power must be positive, got {power}"));
        }
        if !(constant.is_finite() && constant > 0.0) {
            return Err(invalid!("law constant must be positive, got {constant}"));
        }
        Ok(Self { power, log_power, constant, regime })
    }

    /// Value of the leading term at E (counting) or t (heat trace).
    pub fn eval(&self, x: f64) -> f64 {
        let lg = libm::pow(libm::log(x).abs(), self.log_power as f64);
        match self.regime {
            Regime::CountingLargeE => self.constant * libm::pow(x, self.power) * lg,
            Regime::HeatTraceSmallT => self.constant * libm::pow(x, -self.power) * lg,
        }
    }
}

/// Theorem identifiers for [`theorem_constant`].
///
/// T1/T3 are the distinct-exponent heat/counting laws, T2/T4 the
/// equal-exponent ones, T5 the Dirichlet law for distinct exponents, T7 the
/// Dirichlet law on {Π|x_i| < 1} and T6 its heat-trace form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Theorem {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    Simon2DPower,
    Simon2DLog,
}

impl Theorem {
    pub const ALL: [Theorem; 9] = [
        Theorem::T1,
        Theorem::T2,
        Theorem::T3,
        Theorem::T4,
        Theorem::T5,
        Theorem::T6,
        Theorem::T7,
        Theorem::Simon2DPower,
        Theorem::Simon2DLog,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::T1 => "T1",
            Theorem::T2 => "T2",
            Theorem::T3 => "T3",
            Theorem::T4 => "T4",
            Theorem::T5 => "T5",
            Theorem::T6 => "T6",
            Theorem::T7 => "T7",
            Theorem::Simon2DPower => "Simon2D-power",
            Theorem::Simon2DLog => "Simon2D-log",
        }
    }

    pub fn parse(s: &str) -> Option<Theorem> {
        Theorem::ALL.iter().copied().find(|t| t.name().eq_ignore_ascii_case(s))
    }

    /// Whether the constant contains a spectral zeta value.
    pub fn needs_zeta(self) -> bool {
        matches!(self, Theorem::T1 | Theorem::T3 | Theorem::T5)
    }
}

/// Which power of π multiplies a zeta-type constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Prefactor {
    /// π^{-1/2}, the form obtained from the sliced Golden–Thompson trace.
    PiMinusHalf,
    /// π^{-n/2}, the form printed in the theorem statements.
    PiMinusNHalf,
}

/// A closed-form law, or for zeta-type theorems both prefactor readings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case", tag = "kind"))]
pub enum TheoremConstant {
    Single { law: AsymptoticLaw },
    Pair { pi_minus_half: AsymptoticLaw, pi_minus_n_half: AsymptoticLaw },
}

impl TheoremConstant {
    /// The single law, or the requested reading of a pair.
    pub fn law(&self, pick: Prefactor) -> AsymptoticLaw {
        match *self {
            TheoremConstant::Single { law } => law,
            TheoremConstant::Pair { pi_minus_half, pi_minus_n_half } => match pick {
                Prefactor::PiMinusHalf => pi_minus_half,
                Prefactor::PiMinusNHalf => pi_minus_n_half,
            },
        }
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |a, i| a * i as f64)
}

fn require_equal(alpha: &ExponentVector, th: Theorem) -> Result<f64> {
    if alpha.n() < 2 || !alpha.all_equal() {
        return Err(invalid!("{} needs n >= 2 equal exponents", th.name()));
    }
    Ok(alpha.alphas()[0])
}

fn require_strict(alpha: &ExponentVector, th: Theorem) -> Result<()> {
    if !alpha.last_is_strict() {
        return Err(invalid!(
            "{} needs alpha_n < alpha_(n-1); got {:?}",
            th.name(),
            alpha.alphas()
        ));
    }
    Ok(())
}

fn pair(l: f64, zeta_value: Option<f64>, core: f64, n: usize, regime: Regime, th: Theorem) -> Result<TheoremConstant> {
    let z = zeta_value.ok_or_else(|| invalid!("{} needs a spectral zeta value", th.name()))?;
    if !(z.is_finite() && z > 0.0) {
        return Err(invalid!("spectral zeta value must be positive, got {z}"));
    }
    let half = AsymptoticLaw::new(l, 0, z * core / libm::sqrt(PI), regime)?;
    let nhalf = AsymptoticLaw::new(l, 0, z * core / libm::pow(PI, n as f64 / 2.0), regime)?;
    Ok(TheoremConstant::Pair { pi_minus_half: half, pi_minus_n_half: nhalf })
}

fn t2_constant(n: usize, a0: f64) -> f64 {
    let l = n as f64 / 2.0 + 1.0 / a0;
    gamma(1.0 + 1.0 / a0) * libm::pow(l, (n - 1) as f64) / (libm::pow(PI, n as f64 / 2.0) * factorial(n - 1))
}

fn t7_constant(n: usize) -> f64 {
    let nf = n as f64;
    libm::pow(nf, nf - 1.0)
        / (gamma(nf / 2.0) * libm::pow(PI, nf / 2.0) * libm::pow(2.0, nf - 1.0) * factorial(n - 1))
}

/// Closed-form law of a theorem.
///
/// For T1/T3/T5 `zeta_value` is Tr(H_{n-1}^{-d_n}) (resp. the Dirichlet
/// analogue at q) and both prefactor readings are returned. For the Simon
/// laws, α must be two-dimensional and the domain is |x|^r |y| < 1 with
/// r = α_1/α_2.
pub fn theorem_constant(theorem: Theorem, alpha: &ExponentVector, zeta_value: Option<f64>) -> Result<TheoremConstant> {
    use Regime::*;
    let n = alpha.n();
    if n < 2 {
        return Err(invalid!("theorem constants need n >= 2"));
    }
    let single = |law: AsymptoticLaw| Ok(TheoremConstant::Single { law });
    match theorem {
        Theorem::T1 | Theorem::T3 => {
            require_strict(alpha, theorem)?;
            let d = dim_exponent(alpha)?;
            let l = d + 0.5;
            let (core, regime) = if theorem == Theorem::T1 {
                (gamma(d + 1.0), HeatTraceSmallT)
            } else {
                (gamma(d + 1.0) / gamma(d + 1.5), CountingLargeE)
            };
            pair(l, zeta_value, core, n, regime, theorem)
        }
        Theorem::T5 => {
            require_strict(alpha, theorem)?;
            let q = q_exponent(alpha)?;
            pair(q + 0.5, zeta_value, gamma(q + 1.0) / gamma(q + 1.5), n, CountingLargeE, theorem)
        }
        Theorem::T2 | Theorem::T4 => {
            let a0 = require_equal(alpha, theorem)?;
            let l = n as f64 / 2.0 + 1.0 / a0;
            let c = t2_constant(n, a0);
            if theorem == Theorem::T2 {
                single(AsymptoticLaw::new(l, (n - 1) as u32, c, HeatTraceSmallT)?)
            } else {
                single(AsymptoticLaw::new(l, (n - 1) as u32, c / gamma(l + 1.0), CountingLargeE)?)
            }
        }
        Theorem::T6 | Theorem::T7 => {
            require_equal(alpha, theorem)?;
            let l = n as f64 / 2.0;
            let c = t7_constant(n);
            if theorem == Theorem::T7 {
                single(AsymptoticLaw::new(l, (n - 1) as u32, c, CountingLargeE)?)
            } else {
                single(AsymptoticLaw::new(l, (n - 1) as u32, c * gamma(l + 1.0), HeatTraceSmallT)?)
            }
        }
        Theorem::Simon2DPower => {
            if n != 2 {
                return Err(invalid!("Simon2D-power is two-dimensional"));
            }
            let r = alpha.alphas()[0] / alpha.alphas()[1];
            if r <= 1.0 {
                return Err(invalid!("Simon2D-power needs distinct exponents; use Simon2D-log"));
            }
            let c = zeta(r) * libm::pow(PI / 2.0, -r) * gamma(r / 2.0 + 1.0)
                / (libm::sqrt(PI) * gamma(r / 2.0 + 1.5));
            single(AsymptoticLaw::new((r + 1.0) / 2.0, 0, c, CountingLargeE)?)
        }
        Theorem::Simon2DLog => {
            if n != 2 || !alpha.all_equal() {
                return Err(invalid!("Simon2D-log is the two-dimensional equal-exponent law"));
            }
            single(simon_log_law())
        }
    }
}

/// (1/π) E ln E.
pub fn simon_log_law() -> AsymptoticLaw {
    AsymptoticLaw { power: 1.0, log_power: 1, constant: 1.0 / PI, regime: Regime::CountingLargeE }
}
