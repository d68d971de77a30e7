//! Error models and error exponents of the concrete measurement schemes.
//!
//! B-SPADE sorts each photon into the one-source mode or its orthogonal
//! complement; SLIVER splits the field into parts symmetric and
//! antisymmetric under reflection about the y-axis. Both are scored with
//! the simplified rule "declare two sources iff a photon lands in the port
//! that one source can never reach", which has no false alarms. Direct
//! imaging records photon positions; only bounds on its error are
//! available.

use crate::chernoff::{
    chernoff_pow, exponent_from_minimum, minimize_unit_interval, ChernoffResult, Diagnostics,
};
use crate::error::{Error, Result};
use crate::logspace::{binomial_mixture, pow_nonneg};
use crate::psf::{OverlapStats, PointSpreadFunction};
use crate::quadrature::{normal_expectation, AdaptiveLegendre};
use crate::quantum::{
    check_photon_rate, quantum_chernoff, Conditioning, ErrorReport, Priors, Scenario,
    BINOMIAL_TAIL, HIGH_EPSILON,
};
use crate::Scheme;

/// Error report of a simplified-rule scheme whose single photon lands in
/// the "two sources" port with probability `1 - stay` under H2 and never
/// under H1.
fn simplified_rule_error(
    scheme: Scheme,
    stay: f64,
    priors: Priors,
    conditioning: Conditioning,
) -> Result<ErrorReport> {
    let (beta, rule_matches_lrt, high_epsilon) = match conditioning {
        Conditioning::Photons(l) => {
            let beta = pow_nonneg(stay, l as f64);
            let matches = priors.p2 == 0.0 || beta <= priors.p1 / priors.p2;
            (beta, Some(matches), false)
        }
        Conditioning::Modes { modes, epsilon } => {
            check_photon_rate(epsilon, modes)?;
            // (1 - ε + ε·stay)^M
            let beta = (modes as f64 * (-epsilon * (1.0 - stay)).ln_1p()).exp();
            (beta, None, epsilon > HIGH_EPSILON)
        }
    };
    Ok(ErrorReport {
        alpha: Some(0.0),
        beta: Some(beta),
        p_error: priors.p2 * beta,
        conditioning,
        scheme,
        rule_matches_lrt,
        high_epsilon,
    })
}

/// B-SPADE with the simplified rule: `α = 0`, `β = χ^{2L}` given `L`
/// photons, `p2 (1 - ε + ε χ²)^M` over `M` modes.
pub fn bspade_error(stats: &OverlapStats, priors: Priors, conditioning: Conditioning) -> Result<ErrorReport> {
    simplified_rule_error(Scheme::BSpade, stats.chi * stats.chi, priors, conditioning)
}

/// SLIVER with the simplified rule: `α = 0`, `β = λ₊^L` given `L` photons,
/// `p2 (1 - ε + ε λ₊)^M` over `M` modes.
pub fn sliver_error(stats: &OverlapStats, priors: Priors, conditioning: Conditioning) -> Result<ErrorReport> {
    simplified_rule_error(Scheme::Sliver, stats.lambda_plus, priors, conditioning)
}

/// Likelihood-ratio test on the click count of B-SPADE (`scheme =
/// BSpade`) or SLIVER. A click proves H2; with no clicks the test declares
/// H2 only when `stay^L > p1/p2`, which the simplified rule never does.
pub fn click_lrt_error(
    scheme: Scheme,
    stats: &OverlapStats,
    priors: Priors,
    conditioning: Conditioning,
) -> Result<ErrorReport> {
    let stay = match scheme {
        Scheme::BSpade => stats.chi * stats.chi,
        Scheme::Sliver => stats.lambda_plus,
        other => return Err(Error::domain(format!("{other} has no click-count test"))),
    };
    let threshold = (priors.p1 / priors.p2).ln();
    // (alpha, beta) given L photons; ties go to H1
    let given = |l: u64| {
        if l as f64 * stay.ln() > threshold {
            (1.0, 0.0)
        } else {
            (0.0, pow_nonneg(stay, l as f64))
        }
    };
    let (alpha, beta, high_epsilon) = match conditioning {
        Conditioning::Photons(l) => {
            let (a, b) = given(l);
            (a, b, false)
        }
        Conditioning::Modes { modes, epsilon } => {
            check_photon_rate(epsilon, modes)?;
            let a = binomial_mixture(modes, epsilon, BINOMIAL_TAIL, |l| Ok(given(l).0))?;
            let b = binomial_mixture(modes, epsilon, BINOMIAL_TAIL, |l| Ok(given(l).1))?;
            (a.value, b.value, epsilon > HIGH_EPSILON)
        }
    };
    Ok(ErrorReport {
        alpha: Some(alpha),
        beta: Some(beta),
        p_error: priors.p1 * alpha + priors.p2 * beta,
        conditioning,
        scheme,
        rule_matches_lrt: Some(true),
        high_epsilon,
    })
}

/// B-SPADE error exponent `-2 ln χ`, identical to the quantum Chernoff
/// exponent.
pub fn bspade_exponent(stats: &OverlapStats) -> Result<ChernoffResult> {
    quantum_chernoff(stats).map(|r| ChernoffResult { scheme: Scheme::BSpade, ..r })
}

/// SLIVER error exponent `-ln λ₊`. The Chernoff infimum of the induced
/// Bernoulli pair sits at the `s = 0` boundary.
pub fn sliver_exponent(stats: &OverlapStats) -> Result<ChernoffResult> {
    if stats.lambda_plus.is_nan() || stats.lambda_plus <= 0.0 {
        return Err(Error::domain(format!(
            "SLIVER exponent needs lambda_plus > 0, got {}",
            stats.lambda_plus
        )));
    }
    Ok(ChernoffResult {
        exponent: (-stats.lambda_plus.ln()).max(0.0),
        s_star: 0.0,
        scheme: Scheme::Sliver,
        diagnostics: Diagnostics::closed_form(),
    })
}

/// `ln cosh z` without overflow: `|z| + ln(1 + e^{-2|z|}) - ln 2`.
pub fn ln_cosh(z: f64) -> f64 {
    let a = z.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Absolute accuracy requested for `ζ`.
pub const ZETA_TOLERANCE: f64 = 1e-14;

/// `ζ(s) = exp(-s d²/8) E[cosh^s(x d/2)]` for the unit-σ Gaussian PSF,
/// which equals `∫ Λ₁^{1-s} Λ₂^s`.
///
/// For fractional `s`, `cosh^s(x d/2)` has branch points at `x = ±iπ/d`,
/// so Gauss–Hermite converges slowly once `d` exceeds a few widths. The
/// expectation is instead integrated adaptively over `|x| ≤ d/2 + 14`,
/// which covers both shifted peaks of the integrand.
pub fn direct_imaging_zeta(d: f64, s: f64) -> Result<f64> {
    check_d(d)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::domain(format!("s = {s} outside [0, 1]")));
    }
    let h = 0.5 * d + 14.0;
    let ln_norm = -0.5 * (2.0 * std::f64::consts::PI).ln() - s * d * d / 8.0;
    let e = AdaptiveLegendre::with_tolerance(ZETA_TOLERANCE)
        .integrate(|x| Ok((ln_norm - 0.5 * x * x + s * ln_cosh(0.5 * x * d)).exp()), -h, h)?;
    Ok(e.value)
}

/// `ζ(s)` by 64-point Gauss–Hermite; agrees with [`direct_imaging_zeta`]
/// to about 1e-12 for `d ≤ 2` and degrades to ~1e-5 by `d = 10`.
pub fn direct_imaging_zeta_hermite(d: f64, s: f64) -> f64 {
    (-s * d * d / 8.0).exp() * normal_expectation(|x| (s * ln_cosh(0.5 * x * d)).exp())
}

/// Direct-imaging error exponent: Gauss–Hermite evaluation of `ζ` for the
/// Gaussian PSF, planar quadrature otherwise.
pub fn direct_imaging_exponent(psf: &PointSpreadFunction, d: f64) -> Result<ChernoffResult> {
    check_d(d)?;
    if psf.is_gaussian() {
        let min = minimize_unit_interval(|s| direct_imaging_zeta(d, 1.0 - s))?;
        exponent_from_minimum(min, Scheme::DirectImaging)
    } else {
        direct_imaging_exponent_by_quadrature(psf, d, &AdaptiveLegendre::default())
    }
}

/// Direct-imaging exponent from planar quadrature of `∫ Λ₁^s Λ₂^{1-s}`,
/// valid for any PSF.
pub fn direct_imaging_exponent_by_quadrature(
    psf: &PointSpreadFunction,
    d: f64,
    rule: &AdaptiveLegendre,
) -> Result<ChernoffResult> {
    check_d(d)?;
    let min = minimize_unit_interval(|s| {
        psf.integrate_densities(d, rule, |p, q| chernoff_pow(p, s) * chernoff_pow(q, 1.0 - s))
    })?;
    exponent_from_minimum(min, Scheme::DirectImaging)
}

/// Bhattacharyya coefficient `F = ∬ sqrt(Λ₁ Λ₂)` of the direct-imaging
/// densities; `ζ(½)` for the Gaussian PSF.
pub fn bhattacharyya(psf: &PointSpreadFunction, d: f64) -> Result<f64> {
    check_d(d)?;
    if psf.is_gaussian() {
        Ok(direct_imaging_zeta(d, 0.5)?.min(1.0))
    } else {
        bhattacharyya_by_quadrature(psf, d, &AdaptiveLegendre::default())
    }
}

/// Bhattacharyya coefficient by planar quadrature, for any PSF.
pub fn bhattacharyya_by_quadrature(psf: &PointSpreadFunction, d: f64, rule: &AdaptiveLegendre) -> Result<f64> {
    check_d(d)?;
    let f = psf.integrate_densities(d, rule, |p, q| (p * q).sqrt())?;
    Ok(f.min(1.0))
}

/// Bounds on the minimum direct-imaging error with equal priors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectImagingBounds {
    /// `½(1 - sqrt(1 - F^{2L}))`.
    pub lower: f64,
    /// `½ exp(-L ξ)`.
    pub upper: f64,
    pub bhattacharyya: f64,
}

fn check_bound_inputs(f: f64, exponent: f64, priors: Priors) -> Result<f64> {
    if !priors.is_equal() {
        return Err(Error::domain("direct-imaging bounds hold for equal priors only"));
    }
    if !(f > 0.0 && f <= 1.0 + 1e-12) {
        return Err(Error::domain(format!("Bhattacharyya coefficient must lie in (0, 1], got {f}")));
    }
    if exponent.is_nan() || exponent < 0.0 {
        return Err(Error::domain(format!("exponent must be >= 0, got {exponent}")));
    }
    Ok(f.min(1.0))
}

fn bounds_given_photons(f: f64, exponent: f64, photons: u64) -> (f64, f64) {
    let l = photons as f64;
    let f2l = pow_nonneg(f, 2.0 * l);
    // ½(1 - sqrt(1 - x)) = ½ x / (1 + sqrt(1 - x))
    let lower = 0.5 * f2l / (1.0 + (1.0 - f2l).max(0.0).sqrt());
    let upper = if photons == 0 { 0.5 } else { 0.5 * (-l * exponent).exp() };
    (lower, upper)
}

/// Bounds on the direct-imaging minimum error given `L` photons.
pub fn direct_imaging_bounds(f: f64, exponent: f64, photons: u64, priors: Priors) -> Result<DirectImagingBounds> {
    let f = check_bound_inputs(f, exponent, priors)?;
    let (lower, upper) = bounds_given_photons(f, exponent, photons);
    Ok(DirectImagingBounds { lower, upper, bhattacharyya: f })
}

/// Conditional bounds averaged over the binomial photon number of `M`
/// temporal modes.
pub fn direct_imaging_bounds_unconditional(
    f: f64,
    exponent: f64,
    scenario: &Scenario,
) -> Result<DirectImagingBounds> {
    let f = check_bound_inputs(f, exponent, scenario.priors)?;
    check_photon_rate(scenario.epsilon, scenario.modes)?;
    let lower = binomial_mixture(scenario.modes, scenario.epsilon, BINOMIAL_TAIL, |l| {
        Ok(bounds_given_photons(f, exponent, l).0)
    })?;
    let upper = binomial_mixture(scenario.modes, scenario.epsilon, BINOMIAL_TAIL, |l| {
        Ok(bounds_given_photons(f, exponent, l).1)
    })?;
    Ok(DirectImagingBounds { lower: lower.value, upper: upper.value, bhattacharyya: f })
}

fn check_d(d: f64) -> Result<()> {
    if d >= 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("separation must be finite and >= 0, got {d}")))
    }
}
