//! Log-domain helpers for large powers and binomial photon-count weights.

use statrs::function::gamma::ln_gamma;

use crate::error::Result;

/// `base^exp` for `base >= 0`, evaluated as `exp(exp * ln base)`.
///
/// `0^0` is 1; `0^exp` is 0 for any positive exponent.
pub fn pow_nonneg(base: f64, exp: f64) -> f64 {
    debug_assert!(base >= 0.0);
    if exp == 0.0 {
        1.0
    } else if base == 0.0 {
        0.0
    } else {
        (exp * base.ln()).exp()
    }
}

/// Up to this many factors `ln C(m, l)` is summed term by term; the
/// log-gamma difference cancels badly once `ln Γ(m+1)` is large.
const DIRECT_BINOMIAL_TERMS: u64 = 100_000;

/// `ln C(m, l)`.
pub fn ln_choose(m: u64, l: u64) -> f64 {
    debug_assert!(l <= m);
    let k = l.min(m - l);
    if k <= DIRECT_BINOMIAL_TERMS {
        (1..=k).map(|i| ((m - k + i) as f64 / i as f64).ln()).sum()
    } else {
        let (mf, lf) = (m as f64, l as f64);
        ln_gamma(mf + 1.0) - ln_gamma(lf + 1.0) - ln_gamma(mf - lf + 1.0)
    }
}

/// `ln C(m, l) + (m - l) ln(1 - eps) + l ln(eps)`.
///
/// Each factor `C(m,l)`-ratio is combined with the odds before taking its
/// log, so the summands stay small near the mode and the large
/// `l ln(eps)` and `ln C(m, l)` terms never cancel against each other.
pub fn ln_binomial_pmf(m: u64, l: u64, eps: f64) -> f64 {
    debug_assert!(l <= m);
    let (mf, lf) = (m as f64, l as f64);
    let odds = eps / (1.0 - eps);
    if l.min(m - l) > DIRECT_BINOMIAL_TERMS {
        return ln_choose(m, l) + (mf - lf) * (-eps).ln_1p() + lf * eps.ln();
    }
    if l <= m - l {
        let s: f64 = (1..=l).map(|i| ((m - l + i) as f64 / i as f64 * odds).ln()).sum();
        s + mf * (-eps).ln_1p()
    } else {
        let s: f64 = (1..=m - l).map(|i| ((l + i) as f64 / i as f64 / odds).ln()).sum();
        s + mf * eps.ln()
    }
}

/// Result of a truncated binomial mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialSum {
    pub value: f64,
    /// Total probability mass of the terms actually summed.
    pub mass: f64,
    pub terms: u64,
}

/// Computes `sum_{l=0}^{m} C(m,l) (1-eps)^(m-l) eps^l f(l)` for `f` bounded by 1.
///
/// Terms are visited from the mode of Binomial(m, eps) outward. Each
/// direction stops once a geometric bound on its remaining mass drops
/// below `tail_tol / 2`.
pub fn binomial_mixture<F>(m: u64, eps: f64, tail_tol: f64, mut f: F) -> Result<BinomialSum>
where
    F: FnMut(u64) -> Result<f64>,
{
    debug_assert!(eps > 0.0 && eps < 1.0);
    let odds_ln = eps.ln() - (-eps).ln_1p();
    let mode = (((m + 1) as f64 * eps).floor() as u64).min(m);
    let ln_w_mode = ln_binomial_pmf(m, mode, eps);

    let w = ln_w_mode.exp();
    let mut value = w * f(mode)?;
    let mut mass = w;
    let mut terms = 1;

    // upward: w(l+1) = w(l) * (m-l)/(l+1) * eps/(1-eps)
    let mut ln_w = ln_w_mode;
    let mut l = mode;
    while l < m {
        let ln_ratio = ((m - l) as f64).ln() - ((l + 1) as f64).ln() + odds_ln;
        let ratio = ln_ratio.exp();
        if ratio < 1.0 && ln_w.exp() * ratio / (1.0 - ratio) < 0.5 * tail_tol {
            break;
        }
        ln_w += ln_ratio;
        l += 1;
        let w = ln_w.exp();
        value += w * f(l)?;
        mass += w;
        terms += 1;
    }

    // downward: w(l-1) = w(l) * l/(m-l+1) * (1-eps)/eps
    let mut ln_w = ln_w_mode;
    let mut l = mode;
    while l > 0 {
        let ln_ratio = (l as f64).ln() - ((m - l + 1) as f64).ln() - odds_ln;
        let ratio = ln_ratio.exp();
        if ratio < 1.0 && ln_w.exp() * ratio / (1.0 - ratio) < 0.5 * tail_tol {
            break;
        }
        ln_w += ln_ratio;
        l -= 1;
        let w = ln_w.exp();
        value += w * f(l)?;
        mass += w;
        terms += 1;
    }

    Ok(BinomialSum { value, mass, terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_pmf(m: u64, l: u64, eps: f64) -> f64 {
        // product form, no gamma functions
        let mut c = 1.0;
        for k in 0..l {
            c *= (m - k) as f64 / (k + 1) as f64;
        }
        c * (1.0 - eps).powi((m - l) as i32) * eps.powi(l as i32)
    }

    #[test]
    fn pmf_matches_product_form() {
        for &(m, l) in &[(10, 0), (10, 3), (100, 1), (100, 7), (1000, 10)] {
            let a = ln_binomial_pmf(m, l, 0.01).exp();
            let b = brute_pmf(m, l, 0.01);
            assert!((a - b).abs() <= 1e-12 * b.max(1e-300), "{m} {l}: {a} vs {b}");
        }
    }

    #[test]
    fn choose_paths_agree() {
        let m = 300_000u64;
        let l = 120_000u64;
        let direct: f64 = (1..=l).map(|i| ((m - l + i) as f64 / i as f64).ln()).sum();
        assert!((ln_choose(m, l) - direct).abs() < 1e-8 * direct);
        assert_eq!(ln_choose(10, 0), 0.0);
        assert!((ln_choose(10, 3) - 120f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn mass_is_one() {
        for &m in &[1u64, 2, 10, 100, 1000, 10_000] {
            let s = binomial_mixture(m, 0.01, 1e-15, |_| Ok(1.0)).unwrap();
            assert!((s.mass - 1.0).abs() < 1e-13, "m={m} mass={}", s.mass);
        }
    }

    #[test]
    fn mean_of_binomial() {
        let s = binomial_mixture(1000, 0.01, 1e-15, |l| Ok(l as f64 / 1000.0)).unwrap();
        assert!((s.value - 0.01).abs() < 1e-14);
    }

    #[test]
    fn truncates_large_m() {
        let s = binomial_mixture(10_000, 0.01, 1e-15, |_| Ok(1.0)).unwrap();
        assert!(s.terms < 400, "terms={}", s.terms);
    }

    #[test]
    fn pow_edges() {
        assert_eq!(pow_nonneg(0.0, 0.0), 1.0);
        assert_eq!(pow_nonneg(0.0, 3.0), 0.0);
        assert!((pow_nonneg(0.5, 10.0) - 0.5f64.powi(10)).abs() < 1e-16);
    }
}
