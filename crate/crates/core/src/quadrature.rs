//! Quadrature rules: adaptive Gauss–Legendre panels on finite intervals and
//! rectangles, and Gauss–Hermite expectations over a standard normal.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::{GaussHermite, GaussLegendre};

use crate::error::{Error, Result};

const LEGENDRE_ORDER: usize = 16;

fn legendre_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Box<[(f64, f64)]>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(NonZeroUsize::new(LEGENDRE_ORDER).unwrap())
            .as_node_weight_pairs()
            .to_vec()
            .into_boxed_slice()
    })
}

/// Highest order whose generated weights stay accurate in double precision;
/// beyond it the tail weights degrade and exponential moments drift.
pub const HERMITE_ORDER: usize = 64;

fn hermite_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Box<[(f64, f64)]>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussHermite::new(NonZeroUsize::new(HERMITE_ORDER).unwrap())
            .as_node_weight_pairs()
            .to_vec()
            .into_boxed_slice()
    })
}

/// Value and diagnostics of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Adaptive composite Gauss–Legendre quadrature.
///
/// The interval is cut into unit-width panels; a panel is accepted when its
/// 16-point estimate agrees with the sum over its two halves to within the
/// panel's share of `tolerance`, and is bisected otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveLegendre {
    pub tolerance: f64,
    pub max_evaluations: usize,
    pub max_depth: u32,
    pub initial_panel_width: f64,
}

impl Default for AdaptiveLegendre {
    fn default() -> Self {
        AdaptiveLegendre {
            tolerance: 1e-10,
            max_evaluations: 2_000_000,
            max_depth: 40,
            initial_panel_width: 1.0,
        }
    }
}

impl AdaptiveLegendre {
    pub fn with_tolerance(tolerance: f64) -> Self {
        AdaptiveLegendre { tolerance, ..Default::default() }
    }

    fn panel<F>(f: &mut F, a: f64, b: f64) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for &(x, w) in legendre_rule() {
            sum += w * f(mid + half * x)?;
        }
        Ok(sum * half)
    }

    /// Integrates a fallible integrand over `[a, b]`.
    pub fn integrate<F>(&self, mut f: F, a: f64, b: f64) -> Result<Estimate>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::domain("integration limits must be finite"));
        }
        if a == b {
            return Ok(Estimate { value: 0.0, error: 0.0, evaluations: 0 });
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let width = hi - lo;
        let n0 = (width / self.initial_panel_width).ceil().max(1.0) as usize;
        let step = width / n0 as f64;
        let per_panel = legendre_rule().len();
        let fail = |evaluations| Error::QuadratureFailure { tolerance: self.tolerance, evaluations };

        let mut evaluations = 0;
        let mut stack = Vec::with_capacity(n0 + 64);
        for i in (0..n0).rev() {
            let pa = lo + i as f64 * step;
            let pb = if i + 1 == n0 { hi } else { lo + (i + 1) as f64 * step };
            let whole = Self::panel(&mut f, pa, pb)?;
            evaluations += per_panel;
            stack.push((pa, pb, whole, 0u32));
        }

        let mut value = 0.0;
        let mut error = 0.0;
        while let Some((pa, pb, whole, depth)) = stack.pop() {
            let pm = 0.5 * (pa + pb);
            let left = Self::panel(&mut f, pa, pm)?;
            let right = Self::panel(&mut f, pm, pb)?;
            evaluations += 2 * per_panel;
            let diff = (left + right - whole).abs();
            let allowed = self.tolerance * (pb - pa) / width;
            if diff <= allowed || diff <= 4.0 * f64::EPSILON * (left.abs() + right.abs()) {
                value += left + right;
                error += diff;
            } else if depth >= self.max_depth || evaluations >= self.max_evaluations {
                return Err(fail(evaluations));
            } else {
                stack.push((pm, pb, right, depth + 1));
                stack.push((pa, pm, left, depth + 1));
            }
        }
        Ok(Estimate { value: sign * value, error, evaluations })
    }

    /// Integrates `f(x, y)` over a rectangle as nested one-dimensional
    /// adaptive rules (outer in x, inner in y).
    pub fn integrate_rect<F>(&self, f: F, x: (f64, f64), y: (f64, f64)) -> Result<Estimate>
    where
        F: Fn(f64, f64) -> Result<f64>,
    {
        let inner = AdaptiveLegendre {
            tolerance: self.tolerance / (x.1 - x.0).abs().max(1.0),
            ..*self
        };
        let mut evaluations = 0;
        let mut inner_error: f64 = 0.0;
        let outer = self.integrate(
            |xv| {
                let e = inner.integrate(|yv| f(xv, yv), y.0, y.1)?;
                evaluations += e.evaluations;
                inner_error = inner_error.max(e.error);
                Ok(e.value)
            },
            x.0,
            x.1,
        )?;
        Ok(Estimate {
            value: outer.value,
            error: outer.error + inner_error * (x.1 - x.0).abs(),
            evaluations,
        })
    }
}

/// `E[g(X)]` for `X ~ N(0, 1)` by Gauss–Hermite quadrature. Accurate for
/// `g` analytic in a wide strip around the real axis.
pub fn normal_expectation<F>(g: F) -> f64
where
    F: Fn(f64) -> f64,
{
    let scale = std::f64::consts::SQRT_2;
    let sum: f64 = hermite_rule().iter().map(|&(t, w)| w * g(scale * t)).sum();
    sum / std::f64::consts::PI.sqrt()
}
