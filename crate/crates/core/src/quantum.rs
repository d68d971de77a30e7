//! Measurement-optimized error probabilities and the quantum Chernoff
//! exponent.
//!
//! Conditioned on `L` detected photons, the one-source state is the pure
//! product `|ψ₁⟩^{⊗L}` and the two-source state has eigenvalues `λ₊`, `λ₋`.
//! The minimum average error then has a closed form in `λ₊` and
//! `χ = ⟨ψ₊|ψ₁⟩`; [`gamma_trace_norm_oracle`] recomputes it from the 2×2
//! Gram-matrix representation as an independent check.

use crate::chernoff::{ChernoffResult, Diagnostics};
use crate::error::{Error, Result};
use crate::logspace::{binomial_mixture, pow_nonneg};
use crate::psf::OverlapStats;
use crate::Scheme;

/// Photon rates per temporal mode above this leave the weak-source
/// regime where multi-photon terms are negligible.
pub const HIGH_EPSILON: f64 = 0.1;
/// Remaining binomial mass below which the photon-number sum is truncated.
pub const BINOMIAL_TAIL: f64 = 1e-15;

/// Prior probabilities of the one- and two-source hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Priors {
    pub p1: f64,
    pub p2: f64,
}

impl Priors {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p1) || !(0.0..=1.0).contains(&p2) {
            return Err(Error::domain(format!("priors must lie in [0, 1], got ({p1}, {p2})")));
        }
        if (p1 + p2 - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("priors must sum to 1, got {p1} + {p2}")));
        }
        Ok(Priors { p1, p2 })
    }

    /// `(p1, 1 - p1)`.
    pub fn from_p1(p1: f64) -> Result<Self> {
        Self::new(p1, 1.0 - p1)
    }

    pub fn equal() -> Self {
        Priors { p1: 0.5, p2: 0.5 }
    }

    pub fn is_equal(&self) -> bool {
        (self.p1 - self.p2).abs() <= 1e-12
    }

    pub fn min(&self) -> f64 {
        self.p1.min(self.p2)
    }
}

/// Full experiment: separation, priors, photon rate per temporal mode and
/// number of temporal modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub d: f64,
    pub priors: Priors,
    pub epsilon: f64,
    pub modes: u64,
}

impl Scenario {
    pub fn new(d: f64, priors: Priors, epsilon: f64, modes: u64) -> Result<Self> {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::domain(format!("separation must be finite and >= 0, got {d}")));
        }
        check_photon_rate(epsilon, modes)?;
        Ok(Scenario { d, priors, epsilon, modes })
    }

    /// True outside the weak-source regime (`ε > 0.1`).
    pub fn high_epsilon(&self) -> bool {
        self.epsilon > HIGH_EPSILON
    }

    pub fn conditioning(&self) -> Conditioning {
        Conditioning::Modes { modes: self.modes, epsilon: self.epsilon }
    }
}

pub(crate) fn check_photon_rate(epsilon: f64, modes: u64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if modes == 0 {
        return Err(Error::domain("number of temporal modes must be positive"));
    }
    Ok(())
}

/// What an error probability is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conditioning {
    /// Exactly `L` photons detected.
    Photons(u64),
    /// `M` temporal modes, each carrying a photon with probability `ε`.
    Modes { modes: u64, epsilon: f64 },
}

/// Error probabilities of one scheme in one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Type-I (false alarm) probability; `None` where only the average
    /// error is defined.
    pub alpha: Option<f64>,
    /// Type-II (miss) probability.
    pub beta: Option<f64>,
    pub p_error: f64,
    pub conditioning: Conditioning,
    pub scheme: Scheme,
    /// For the simplified B-SPADE/SLIVER rules: whether the rule coincides
    /// with the likelihood-ratio test in this configuration.
    pub rule_matches_lrt: Option<bool>,
    /// Photon rate outside the weak-source regime.
    pub high_epsilon: bool,
}

/// Minimum error probability over all measurements given `L` detected photons.
///
/// Evaluated as `2 p1 p2 χ^{2L} / (a (1 + sqrt(1 - r)))` with
/// `a = p1 + p2 λ₊^L` and `r = 4 p1 p2 χ^{2L} / a²`, which equals
/// `a/2 · (1 - sqrt(1 - r))` without cancellation at large `L`. The
/// discriminant `a²(1 - r)` is formed as
/// `(p1 - p2 λ₊^L)² - 4 p1 p2 λ₊^L expm1(L ln(χ²/λ₊))`, a sum of two
/// nonnegative terms since `λ₊ ≥ χ²`, so nearly equal priors at small `d`
/// lose no digits.
pub fn min_error_conditional(stats: &OverlapStats, priors: Priors, photons: u64) -> ErrorReport {
    ErrorReport {
        alpha: None,
        beta: None,
        p_error: conditional_value(stats, priors, photons),
        conditioning: Conditioning::Photons(photons),
        scheme: Scheme::QuantumLimit,
        rule_matches_lrt: None,
        high_epsilon: false,
    }
}

fn conditional_value(stats: &OverlapStats, priors: Priors, photons: u64) -> f64 {
    let Priors { p1, p2 } = priors;
    let l = photons as f64;
    let lp_l = pow_nonneg(stats.lambda_plus, l);
    let chi_2l = pow_nonneg(stats.chi.abs(), 2.0 * l);
    let a = p1 + p2 * lp_l;
    if a <= 0.0 {
        return 0.0;
    }
    let num = p1 * p2 * chi_2l;
    let chi = stats.chi.abs();
    let disc = if chi > 0.0 && stats.lambda_plus > 0.0 {
        let gap = p1 - p2 * lp_l;
        gap * gap - 4.0 * p1 * p2 * lp_l * (l * (2.0 * chi.ln() - stats.lambda_plus.ln())).exp_m1()
    } else {
        a * a - 4.0 * num
    };
    2.0 * num / (a + disc.max(0.0).sqrt())
}

/// Minimum error probability over `M` temporal modes: the binomial mixture
/// of the conditional minimum over the detected photon number.
pub fn min_error_unconditional(stats: &OverlapStats, scenario: &Scenario) -> Result<ErrorReport> {
    check_photon_rate(scenario.epsilon, scenario.modes)?;
    let sum = binomial_mixture(scenario.modes, scenario.epsilon, BINOMIAL_TAIL, |l| {
        Ok(conditional_value(stats, scenario.priors, l))
    })?;
    Ok(ErrorReport {
        alpha: None,
        beta: None,
        p_error: sum.value,
        conditioning: scenario.conditioning(),
        scheme: Scheme::QuantumLimit,
        rule_matches_lrt: None,
        high_epsilon: scenario.high_epsilon(),
    })
}

/// Large-`L` approximation of the conditional minimum error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxMinError {
    /// `p1 p2 χ^{2L} / (p1 + p2 λ₊^L)`.
    pub approx: f64,
    /// `p2 χ^{2L}`.
    pub loose_bound: f64,
    /// `L ≫ ln(p1/p2) / (2 ln|χ|)`, read as "at least ten times".
    pub precondition_holds: bool,
}

/// How many times the photon threshold `L` must exceed to count as `≫`.
pub const APPROX_MARGIN: f64 = 10.0;

pub fn min_error_approx(stats: &OverlapStats, priors: Priors, photons: u64) -> Result<ApproxMinError> {
    let Priors { p1, p2 } = priors;
    let l = photons as f64;
    let ln_chi = stats.chi.abs().ln();
    let precondition_holds = if ln_chi == 0.0 {
        if !priors.is_equal() {
            return Err(Error::domain(
                "|chi| = 1 with unequal priors: the large-L condition can never hold",
            ));
        }
        false
    } else {
        let threshold = (p1 / p2).ln() / (2.0 * ln_chi);
        photons > 0 && (threshold.is_nan() || l >= APPROX_MARGIN * threshold.max(0.0))
    };
    let chi_2l = pow_nonneg(stats.chi.abs(), 2.0 * l);
    let lp_l = pow_nonneg(stats.lambda_plus, l);
    Ok(ApproxMinError {
        approx: p1 * p2 * chi_2l / (p1 + p2 * lp_l),
        loose_bound: p2 * chi_2l,
        precondition_holds,
    })
}

/// Quantum Chernoff exponent `-2 ln χ` (nats per detected photon).
///
/// `χ = 0` gives an infinite exponent; negative `χ` is rejected.
pub fn quantum_chernoff(stats: &OverlapStats) -> Result<ChernoffResult> {
    if stats.chi < 0.0 {
        return Err(Error::domain(format!(
            "quantum Chernoff exponent needs chi >= 0, got {}",
            stats.chi
        )));
    }
    let exponent = if stats.chi == 0.0 { f64::INFINITY } else { (-2.0 * stats.chi.ln()).max(0.0) };
    Ok(ChernoffResult {
        exponent,
        s_star: 0.5,
        scheme: Scheme::QuantumLimit,
        diagnostics: Diagnostics::closed_form(),
    })
}

/// Largest photon number accepted by [`gamma_trace_norm_oracle`].
pub const ORACLE_MAX_PHOTONS: u64 = 8;

/// Minimum conditional error rebuilt from the trace norm of
/// `Γ = p2 λ₊^L |φ₊⟩⟨φ₊|^{⊗L} - p1 |ψ₁⟩⟨ψ₁|^{⊗L}`.
///
/// `Γ` is written in an orthonormal basis of the span of `|φ₊⟩^{⊗L}` and
/// `|ψ₁⟩^{⊗L}` using the Gram entry `⟨φ₊|ψ₁⟩^L = (χ/√λ₊)^L`; its trace norm
/// is the sum of the absolute eigenvalues of that 2×2 matrix. The result is
/// `½[1 - ‖Γ‖₁ - p2 (1 - λ₊^L)]`.
pub fn gamma_trace_norm_oracle(stats: &OverlapStats, priors: Priors, photons: u64) -> Result<f64> {
    if !(1..=ORACLE_MAX_PHOTONS).contains(&photons) {
        return Err(Error::domain(format!(
            "oracle supports 1..={ORACLE_MAX_PHOTONS} photons, got {photons}"
        )));
    }
    let Priors { p1, p2 } = priors;
    let l = photons as i32;
    let lp_l = stats.lambda_plus.powi(l);
    let gram = (stats.chi / stats.lambda_plus.sqrt()).powi(l);
    if gram.abs() > 1.0 + 1e-12 {
        return Err(Error::domain(format!(
            "inconsistent overlap stats: |<phi+|psi1>| = {} > 1",
            gram.abs()
        )));
    }
    let gram = gram.clamp(-1.0, 1.0);
    let orth = (1.0 - gram * gram).max(0.0).sqrt();

    // |φ₊⟩^{⊗L} = (1, 0), |ψ₁⟩^{⊗L} = (gram, orth)
    let a = p2 * lp_l - p1 * gram * gram;
    let b = -p1 * gram * orth;
    let c = -p1 * orth * orth;
    let mean = 0.5 * (a + c);
    let radius = (0.5 * (a - c)).hypot(b);
    let trace_norm = (mean + radius).abs() + (mean - radius).abs();

    Ok(0.5 * (1.0 - trace_norm - p2 * (1.0 - lp_l)))
}
