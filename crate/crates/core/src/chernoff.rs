//! Classical Chernoff distance between two outcome distributions.
//!
//! The exponent is `-ln min_{0≤s≤1} C(s)` with `C(s) = ∫ Λ₁^s Λ₂^{1-s}`.
//! Terms where either density vanishes are dropped for every `s`, so `C` at
//! the endpoints is its limit from inside the interval. For degenerate
//! pairs (one outcome impossible under H1) the infimum sits at an endpoint
//! and is picked up there.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::AdaptiveLegendre;
use crate::Scheme;

/// Golden-section stage stops once the bracket is this narrow.
pub const GOLDEN_WIDTH: f64 = 1e-6;
/// Target resolution in `s` of the parabolic refinement.
pub const S_TOLERANCE: f64 = 1e-10;
/// `C(s)` above `1 + NORMALIZATION_SLACK` means unnormalized inputs.
pub const NORMALIZATION_SLACK: f64 = 1e-9;

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_PARABOLIC_STEPS: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub iterations: u32,
    /// Width of the final bracket in `s` (0 for closed forms).
    pub tolerance: f64,
}

impl Diagnostics {
    pub fn closed_form() -> Self {
        Diagnostics { iterations: 0, tolerance: 0.0 }
    }
}

/// Asymptotic error exponent of a scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffResult {
    /// Nats per detected photon.
    pub exponent: f64,
    /// Minimizing `s`, with `s` the power on the H1 density.
    pub s_star: f64,
    pub scheme: Scheme,
    pub diagnostics: Diagnostics,
}

/// Minimum of a function on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitMinimum {
    pub s: f64,
    pub value: f64,
    pub iterations: u32,
    pub width: f64,
}

/// Minimizes a smooth, unimodal-in-the-interior function over `[0, 1]`:
/// golden-section search down to [`GOLDEN_WIDTH`], successive parabolic
/// interpolation to [`S_TOLERANCE`], then comparison with both endpoints.
///
/// A function that is flat to rounding across the interval reports
/// `s = 0.5`.
pub fn minimize_unit_interval<F>(mut f: F) -> Result<UnitMinimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut iterations = 0u32;
    let mut eval = |s: f64, it: &mut u32| -> Result<f64> {
        *it += 1;
        let v = f(s)?;
        if !v.is_finite() {
            return Err(Error::OptimizationFailure(format!("objective is {v} at s = {s}")));
        }
        Ok(v)
    };

    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1, &mut iterations)?;
    let mut f2 = eval(x2, &mut iterations)?;
    while b - a > GOLDEN_WIDTH {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1, &mut iterations)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2, &mut iterations)?;
        }
    }

    // bracket (a, m, c) with f(m) no larger than the outer points
    let (mut m, mut fm) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let mut fa = eval(a, &mut iterations)?;
    let mut c = b;
    let mut fc = eval(c, &mut iterations)?;
    let mut width = c - a;
    for _ in 0..MAX_PARABOLIC_STEPS {
        if width <= S_TOLERANCE || fm > fa || fm > fc {
            break;
        }
        let p = (m - a) * (m - a) * (fm - fc) - (m - c) * (m - c) * (fm - fa);
        let q = (m - a) * (fm - fc) - (m - c) * (fm - fa);
        if q == 0.0 {
            break;
        }
        let u = m - 0.5 * p / q;
        if !(u > a && u < c) || (u - m).abs() < 0.5 * S_TOLERANCE {
            break;
        }
        let fu = eval(u, &mut iterations)?;
        if fu <= fm {
            if u < m {
                c = m;
                fc = fm;
            } else {
                a = m;
                fa = fm;
            }
            m = u;
            fm = fu;
        } else if u < m {
            a = u;
            fa = fu;
        } else {
            c = u;
            fc = fu;
        }
        width = c - a;
    }

    let f0 = eval(0.0, &mut iterations)?;
    let f1_end = eval(1.0, &mut iterations)?;
    let flat = |v: f64| (v - fm).abs() <= 4.0 * f64::EPSILON * fm.abs().max(1.0);
    let (s, value) = if flat(f0) && flat(f1_end) && flat(fa) && flat(fc) {
        (0.5, eval(0.5, &mut iterations)?.min(fm))
    } else if f0 < fm && f0 <= f1_end {
        (0.0, f0)
    } else if f1_end < fm {
        (1.0, f1_end)
    } else {
        (m, fm)
    };
    Ok(UnitMinimum { s, value, iterations, width })
}

/// `a^e` with the convention that a vanishing density contributes nothing.
pub(crate) fn chernoff_pow(a: f64, e: f64) -> f64 {
    if a <= 0.0 {
        0.0
    } else if e == 0.0 {
        1.0
    } else {
        (e * a.ln()).exp()
    }
}

/// Converts the minimum of `C(s)` into an exponent, rejecting `C > 1`.
pub(crate) fn exponent_from_minimum(min: UnitMinimum, scheme: Scheme) -> Result<ChernoffResult> {
    if min.value > 1.0 + NORMALIZATION_SLACK {
        return Err(Error::OptimizationFailure(format!(
            "Chernoff coefficient {} exceeds 1; inputs are not normalized",
            min.value
        )));
    }
    if min.value <= 0.0 {
        return Ok(ChernoffResult {
            exponent: f64::INFINITY,
            s_star: min.s,
            scheme,
            diagnostics: Diagnostics { iterations: min.iterations, tolerance: min.width },
        });
    }
    // coefficients within rounding of 1 mean indistinguishable hypotheses
    let exponent = if min.value >= 1.0 - 8.0 * f64::EPSILON { 0.0 } else { -min.value.ln() };
    Ok(ChernoffResult {
        exponent,
        s_star: min.s,
        scheme,
        diagnostics: Diagnostics { iterations: min.iterations, tolerance: min.width },
    })
}

/// Planar density `(x, y) ↦ Λ(x, y)`.
pub type PlaneDensity = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Outcome distribution of a measurement.
#[derive(Clone)]
pub enum OutcomeDistribution {
    /// Probabilities of a finite outcome list.
    Discrete(Vec<f64>),
    /// A density on the rectangle `x × y`, integrated by adaptive
    /// Gauss–Legendre quadrature.
    Plane {
        density: PlaneDensity,
        x: (f64, f64),
        y: (f64, f64),
        rule: AdaptiveLegendre,
    },
}

impl std::fmt::Debug for OutcomeDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OutcomeDistribution::Discrete(p) => f.debug_tuple("Discrete").field(p).finish(),
            OutcomeDistribution::Plane { x, y, .. } => {
                f.debug_struct("Plane").field("x", x).field("y", y).finish_non_exhaustive()
            }
        }
    }
}

impl OutcomeDistribution {
    /// Two-outcome distribution `(p, 1 - p)`.
    pub fn bernoulli(p: f64) -> Self {
        OutcomeDistribution::Discrete(vec![p, 1.0 - p])
    }
}

/// Chernoff distance between two outcome distributions on the same space.
pub fn classical_chernoff(first: &OutcomeDistribution, second: &OutcomeDistribution) -> Result<ChernoffResult> {
    classical_chernoff_for(first, second, Scheme::QuantumLimit)
        .map(|r| ChernoffResult { scheme: Scheme::QuantumLimit, ..r })
}

pub(crate) fn classical_chernoff_for(
    first: &OutcomeDistribution,
    second: &OutcomeDistribution,
    scheme: Scheme,
) -> Result<ChernoffResult> {
    use OutcomeDistribution::*;
    let min = match (first, second) {
        (Discrete(p), Discrete(q)) => {
            if p.len() != q.len() || p.is_empty() {
                return Err(Error::domain("discrete distributions must have equal, nonzero length"));
            }
            if p.iter().chain(q).any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::domain("probabilities must be finite and nonnegative"));
            }
            minimize_unit_interval(|s| {
                Ok(p.iter()
                    .zip(q)
                    .map(|(&a, &b)| chernoff_pow(a, s) * chernoff_pow(b, 1.0 - s))
                    .sum())
            })?
        }
        (Plane { density: d1, x, y, rule }, Plane { density: d2, x: x2, y: y2, .. }) => {
            if x != x2 || y != y2 {
                return Err(Error::domain("densities must share an integration region"));
            }
            minimize_unit_interval(|s| {
                rule.integrate_rect(
                    |xv, yv| Ok(chernoff_pow(d1(xv, yv), s) * chernoff_pow(d2(xv, yv), 1.0 - s)),
                    *x,
                    *y,
                )
                .map(|e| e.value)
            })?
        }
        _ => return Err(Error::domain("cannot mix discrete and continuous distributions")),
    };
    exponent_from_minimum(min, scheme)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Grid search over s, independent of the golden/parabolic path.
    fn grid_search(p: &[f64], q: &[f64]) -> f64 {
        let c = |s: f64| -> f64 {
            p.iter().zip(q).map(|(&a, &b)| chernoff_pow(a, s) * chernoff_pow(b, 1.0 - s)).sum()
        };
        let mut best = f64::INFINITY;
        for k in 0..=100_000 {
            best = best.min(c(k as f64 / 100_000.0));
        }
        -best.ln()
    }

    #[test]
    fn identical_distributions() {
        let p = OutcomeDistribution::Discrete(vec![0.2, 0.3, 0.5]);
        let r = classical_chernoff(&p, &p).unwrap();
        assert_eq!(r.exponent, 0.0);
        assert_eq!(r.s_star, 0.5);
    }

    #[test]
    fn bspade_outcomes() {
        let chi2 = (-0.25f64).exp();
        let r = classical_chernoff(
            &OutcomeDistribution::bernoulli(1.0),
            &OutcomeDistribution::bernoulli(chi2),
        )
        .unwrap();
        assert!((r.exponent - 0.25).abs() < 1e-12);
        assert_eq!(r.s_star, 0.0);
        assert!((grid_search(&[1.0, 0.0], &[chi2, 1.0 - chi2]) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn sliver_outcomes() {
        let lp = 0.5 + 0.5 * (-0.5f64).exp();
        let r = classical_chernoff(
            &OutcomeDistribution::bernoulli(1.0),
            &OutcomeDistribution::bernoulli(lp),
        )
        .unwrap();
        let oracle = grid_search(&[1.0, 0.0], &[lp, 1.0 - lp]);
        assert!((r.exponent - oracle).abs() < 1e-12);
        assert!((r.exponent - 0.219_070_196_379_838_63).abs() < 1e-12);
    }

    #[test]
    fn interior_minimum_matches_grid() {
        let p = [0.1, 0.4, 0.5];
        let q = [0.6, 0.3, 0.1];
        let r = classical_chernoff(
            &OutcomeDistribution::Discrete(p.to_vec()),
            &OutcomeDistribution::Discrete(q.to_vec()),
        )
        .unwrap();
        assert!(r.s_star > 0.0 && r.s_star < 1.0);
        assert!((r.exponent - grid_search(&p, &q)).abs() < 1e-9);
        assert!(r.diagnostics.tolerance <= GOLDEN_WIDTH);
    }

    #[test]
    fn unnormalized_is_rejected() {
        let r = classical_chernoff(
            &OutcomeDistribution::Discrete(vec![1.0, 1.0]),
            &OutcomeDistribution::Discrete(vec![1.0, 1.0]),
        );
        assert!(matches!(r, Err(Error::OptimizationFailure(_))));
    }

    #[test]
    fn mismatched_inputs() {
        assert!(classical_chernoff(
            &OutcomeDistribution::Discrete(vec![1.0]),
            &OutcomeDistribution::bernoulli(0.5)
        )
        .is_err());
    }

    #[test]
    fn plane_gaussians() {
        // N((0,0), I) vs N((1,0), I): Chernoff distance is |Δμ|²/8 at s = 1/2
        let g = |mx: f64| -> PlaneDensity {
            Arc::new(move |x: f64, y: f64| {
                (-((x - mx).powi(2) + y * y) / 2.0).exp() / (2.0 * std::f64::consts::PI)
            })
        };
        let mk = |mx| OutcomeDistribution::Plane {
            density: g(mx),
            x: (-9.0, 10.0),
            y: (-9.0, 9.0),
            rule: AdaptiveLegendre::with_tolerance(1e-11),
        };
        let r = classical_chernoff(&mk(0.0), &mk(1.0)).unwrap();
        assert!((r.exponent - 0.125).abs() < 1e-9, "{}", r.exponent);
        assert!((r.s_star - 0.5).abs() < 1e-4);
    }
}
