//! One table per subcommand. Rows are computed independently and
//! collected in sweep order.

use twosource_core::exec::try_map_indexed;
use twosource_core::measurements::{click_lrt_error, direct_imaging_bounds_unconditional};
use twosource_core::montecarlo::SourceModel;
use twosource_core::quantum::{min_error_unconditional, quantum_chernoff, Conditioning, Scenario};
use twosource_core::{
    bhattacharyya, bspade_error, bspade_exponent, direct_imaging_bounds, direct_imaging_exponent, estimate_error,
    estimate_error_conditional, min_error_conditional, sliver_error, sliver_exponent, Execution, PointSpreadFunction,
    Priors, Rule, Scheme,
};

use crate::args::{Command, ConditionalArgs, ExponentsArgs, PhotonsArgs, Range, SimulateArgs, UnconditionalArgs};
use crate::output::{number, optional, Table};
use crate::CliError;

/// Grid points `lo, lo + step, …` up to `hi` (inclusive within rounding).
pub fn grid(name: &str, lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err(CliError::Input(format!("{name} range must be finite")));
    }
    if step <= 0.0 {
        return Err(CliError::Input(format!("{name} step must be positive")));
    }
    if hi < lo {
        return Err(CliError::Input(format!("{name} range is empty: {lo} > {hi}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

fn separations(r: &Range) -> Result<Vec<f64>, CliError> {
    let ds = if r.d.is_empty() { grid("d", r.d_min, r.d_max, r.d_step)? } else { r.d.clone() };
    check_separations(&ds)?;
    Ok(ds)
}

fn check_separations(ds: &[f64]) -> Result<(), CliError> {
    match ds.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
        Some(d) => Err(CliError::Input(format!("separation must be finite and nonnegative, got {d}"))),
        None => Ok(()),
    }
}

pub fn load_psf(spec: &str) -> Result<PointSpreadFunction, CliError> {
    match spec.trim() {
        "gaussian" => Ok(PointSpreadFunction::gaussian()),
        s => match s.strip_prefix("file:") {
            Some(path) => Ok(PointSpreadFunction::load(path)?),
            None => Err(CliError::Input(format!("--psf must be `gaussian` or `file:<path>`, got {s:?}"))),
        },
    }
}

struct Context {
    psf: PointSpreadFunction,
    priors: Priors,
    exec: Execution,
}

impl Context {
    fn new(psf: &str, p1: f64, exec: Execution) -> Result<Self, CliError> {
        Ok(Context { psf: load_psf(psf)?, priors: Priors::from_p1(p1)?, exec })
    }

    fn rows<F>(&self, n: usize, f: F) -> Result<Vec<Vec<String>>, CliError>
    where
        F: Fn(usize) -> Result<Vec<String>, CliError> + Sync + Send,
    {
        try_map_indexed(self.exec, n, f)
    }

    /// Direct-imaging Bhattacharyya coefficient and exponent, or `None`
    /// with unequal priors where the bounds do not apply.
    fn direct_terms(&self, d: f64) -> Result<Option<(f64, f64)>, CliError> {
        if !self.priors.is_equal() {
            return Ok(None);
        }
        let f = bhattacharyya(&self.psf, d)?;
        let xi = direct_imaging_exponent(&self.psf, d)?.exponent;
        Ok(Some((f, xi)))
    }

    fn conditional_row(&self, d: f64, photons: u64, direct: Option<(f64, f64)>) -> Result<[String; 5], CliError> {
        let stats = self.psf.overlap_stats(d)?;
        let c = Conditioning::Photons(photons);
        let (lower, upper) = match direct {
            Some((f, xi)) => {
                let b = direct_imaging_bounds(f, xi, photons, self.priors)?;
                (Some(b.lower), Some(b.upper))
            }
            None => (None, None),
        };
        Ok([
            number(min_error_conditional(&stats, self.priors, photons).p_error),
            number(bspade_error(&stats, self.priors, c)?.p_error),
            number(sliver_error(&stats, self.priors, c)?.p_error),
            optional(lower),
            optional(upper),
        ])
    }
}

pub fn render(cmd: &Command, exec: Execution) -> Result<Table, CliError> {
    match cmd {
        Command::Exponents(a) => exponents(a, exec),
        Command::Conditional(a) => conditional(a, exec),
        Command::Photons(a) => photons(a, exec),
        Command::Unconditional(a) => unconditional(a, exec),
        Command::Simulate(a) => simulate(a, exec),
    }
}

fn exponents(a: &ExponentsArgs, exec: Execution) -> Result<Table, CliError> {
    let ctx = Context::new(&a.common.psf, a.common.p1, exec)?;
    let ds = separations(&a.range)?;
    let mut t = Table::new(vec!["d", "xi_quantum", "xi_bspade", "xi_sliver", "xi_direct"]);
    t.rows = ctx.rows(ds.len(), |i| {
        let d = ds[i];
        let stats = ctx.psf.overlap_stats(d)?;
        Ok(vec![
            number(d),
            number(quantum_chernoff(&stats)?.exponent),
            number(bspade_exponent(&stats)?.exponent),
            number(sliver_exponent(&stats)?.exponent),
            number(direct_imaging_exponent(&ctx.psf, d)?.exponent),
        ])
    })?;
    Ok(t)
}

fn conditional(a: &ConditionalArgs, exec: Execution) -> Result<Table, CliError> {
    let ctx = Context::new(&a.common.psf, a.common.p1, exec)?;
    let d2: Vec<f64> = if a.d.is_empty() {
        grid("d2", a.d2_min, a.d2_max, a.d2_step)?
    } else {
        check_separations(&a.d)?;
        a.d.iter().map(|d| d * d).collect()
    };
    if let Some(v) = d2.iter().find(|v| **v < 0.0) {
        return Err(CliError::Input(format!("d² must be nonnegative, got {v}")));
    }
    let mut t = Table::new(vec!["d_squared", "p_min", "p_bspade", "p_sliver", "p_direct_lower", "p_direct_upper"]);
    t.rows = ctx.rows(d2.len(), |i| {
        let d = d2[i].sqrt();
        let mut row = vec![number(d2[i])];
        row.extend(ctx.conditional_row(d, a.photons, ctx.direct_terms(d)?)?);
        Ok(row)
    })?;
    Ok(t)
}

fn photons(a: &PhotonsArgs, exec: Execution) -> Result<Table, CliError> {
    let ctx = Context::new(&a.common.psf, a.common.p1, exec)?;
    check_separations(&a.d)?;
    let ls: Vec<u64> = if a.photons.is_empty() {
        if a.l_max < a.l_min {
            return Err(CliError::Input(format!("L range is empty: {} > {}", a.l_min, a.l_max)));
        }
        (a.l_min..=a.l_max).collect()
    } else {
        a.photons.clone()
    };
    let direct: Vec<_> = a.d.iter().map(|&d| ctx.direct_terms(d)).collect::<Result<_, _>>()?;
    let mut t = Table::new(vec!["d", "L", "p_min", "p_bspade", "p_sliver", "p_direct_lower", "p_direct_upper"]);
    t.rows = ctx.rows(a.d.len() * ls.len(), |i| {
        let (k, l) = (i / ls.len(), ls[i % ls.len()]);
        let mut row = vec![number(a.d[k]), l.to_string()];
        row.extend(ctx.conditional_row(a.d[k], l, direct[k])?);
        Ok(row)
    })?;
    Ok(t)
}

fn unconditional(a: &UnconditionalArgs, exec: Execution) -> Result<Table, CliError> {
    let ctx = Context::new(&a.common.psf, a.common.p1, exec)?;
    let ds = separations(&a.range)?;
    if a.modes.is_empty() {
        return Err(CliError::Input("at least one M is required".into()));
    }
    let mut t = Table::new(vec!["d", "M", "p_min_uncond", "p_bspade_uncond", "p_sliver_uncond"]);
    t.rows = ctx.rows(a.modes.len() * ds.len(), |i| {
        let (m, d) = (a.modes[i / ds.len()], ds[i % ds.len()]);
        let sc = Scenario::new(d, ctx.priors, a.epsilon, m)?;
        let stats = ctx.psf.overlap_stats(d)?;
        Ok(vec![
            number(d),
            m.to_string(),
            number(min_error_unconditional(&stats, &sc)?.p_error),
            number(bspade_error(&stats, ctx.priors, sc.conditioning())?.p_error),
            number(sliver_error(&stats, ctx.priors, sc.conditioning())?.p_error),
        ])
    })?;
    Ok(t)
}

pub const SIMULATE_HEADER: [&str; 23] = [
    "scheme",
    "rule",
    "d",
    "L",
    "M",
    "epsilon",
    "p1",
    "trials",
    "seed",
    "rng_id",
    "false_alarms",
    "misses",
    "empirical_alpha",
    "empirical_beta",
    "empirical_p_error",
    "p_error_ci_lo",
    "p_error_ci_hi",
    "standard_error",
    "analytic_p_error",
    "analytic_lower",
    "analytic_upper",
    "in_ci",
    "simplified_matches_lrt",
];

fn parse_scheme(s: &str) -> Result<Scheme, CliError> {
    let scheme: Scheme = s.parse().map_err(|e: twosource_core::Error| CliError::Input(e.to_string()))?;
    if scheme == Scheme::QuantumLimit {
        return Err(CliError::Input("the quantum limit cannot be simulated".into()));
    }
    Ok(scheme)
}

fn simulate(a: &SimulateArgs, exec: Execution) -> Result<Table, CliError> {
    let ctx = Context::new(&a.common.psf, a.common.p1, exec)?;
    check_separations(&a.d)?;
    let schemes: Vec<Scheme> = a.scheme.iter().map(|s| parse_scheme(s)).collect::<Result<_, _>>()?;
    let rule: Option<Rule> = a.rule.as_deref().map(str::parse).transpose()?;
    if a.trials == 0 {
        return Err(CliError::Input("--trials must be positive".into()));
    }
    if !a.photons.is_empty() && !a.modes.is_empty() {
        return Err(CliError::Input("give either --L or --M, not both".into()));
    }
    let conditions: Vec<Conditioning> = if !a.modes.is_empty() {
        a.modes.iter().map(|&m| Conditioning::Modes { modes: m, epsilon: a.epsilon }).collect()
    } else if !a.photons.is_empty() {
        a.photons.iter().map(|&l| Conditioning::Photons(l)).collect()
    } else {
        vec![Conditioning::Photons(5)]
    };

    let mut t = Table::new(SIMULATE_HEADER.to_vec());
    for &scheme in &schemes {
        let rule = rule.unwrap_or(if scheme == Scheme::DirectImaging { Rule::LikelihoodRatio } else { Rule::Simplified });
        for &d in &a.d {
            let model = SourceModel::new(ctx.psf.clone(), d)?;
            let direct = if scheme == Scheme::DirectImaging { ctx.direct_terms(d)? } else { None };
            for &c in &conditions {
                t.rows.push(simulate_row(&ctx, &model, scheme, rule, c, direct, a)?);
            }
        }
    }
    Ok(t)
}

fn simulate_row(
    ctx: &Context,
    model: &SourceModel,
    scheme: Scheme,
    rule: Rule,
    c: Conditioning,
    direct: Option<(f64, f64)>,
    a: &SimulateArgs,
) -> Result<Vec<String>, CliError> {
    let d = model.d();
    let stats = model.stats;
    let summary = match c {
        Conditioning::Photons(l) => {
            estimate_error_conditional(model, ctx.priors, scheme, rule, l, a.trials, a.seed, ctx.exec)?
        }
        Conditioning::Modes { modes, epsilon } => {
            let sc = Scenario::new(d, ctx.priors, epsilon, modes)?;
            estimate_error(model, &sc, scheme, rule, a.trials, a.seed, ctx.exec)?
        }
    };

    let (exact, lower, upper, matches) = match (scheme, rule) {
        (Scheme::DirectImaging, _) => {
            let bounds = match (direct, c) {
                (None, _) => None,
                (Some((f, xi)), Conditioning::Photons(l)) => Some(direct_imaging_bounds(f, xi, l, ctx.priors)?),
                (Some((f, xi)), Conditioning::Modes { modes, epsilon }) => Some(direct_imaging_bounds_unconditional(
                    f,
                    xi,
                    &Scenario::new(d, ctx.priors, epsilon, modes)?,
                )?),
            };
            (None, bounds.map(|b| b.lower), bounds.map(|b| b.upper), None)
        }
        (_, Rule::Simplified) => {
            let r = if scheme == Scheme::BSpade {
                bspade_error(&stats, ctx.priors, c)?
            } else {
                sliver_error(&stats, ctx.priors, c)?
            };
            (Some(r.p_error), Some(r.p_error), Some(r.p_error), r.rule_matches_lrt)
        }
        (_, Rule::LikelihoodRatio) => {
            let p = click_lrt_error(scheme, &stats, ctx.priors, c)?.p_error;
            (Some(p), Some(p), Some(p), None)
        }
    };
    let in_ci = match (lower, upper) {
        (Some(lo), Some(hi)) => Some(summary.p_error_ci.overlaps(lo, hi)),
        _ => None,
    };
    let (l, m, eps) = match c {
        Conditioning::Photons(l) => (l.to_string(), String::new(), String::new()),
        Conditioning::Modes { modes, epsilon } => (String::new(), modes.to_string(), number(epsilon)),
    };
    let flag = |b: Option<bool>| b.map(|v| v.to_string()).unwrap_or_default();
    Ok(vec![
        scheme.name().to_string(),
        rule.name().to_string(),
        number(d),
        l,
        m,
        eps,
        number(ctx.priors.p1),
        summary.trials.to_string(),
        summary.seed.to_string(),
        summary.rng_id.to_string(),
        summary.false_alarms.to_string(),
        summary.misses.to_string(),
        number(summary.empirical_alpha),
        number(summary.empirical_beta),
        number(summary.empirical_p_error),
        number(summary.p_error_ci.lo),
        number(summary.p_error_ci.hi),
        number(summary.standard_error),
        optional(exact),
        optional(lower),
        optional(upper),
        flag(in_ci),
        flag(matches),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive() {
        let g = grid("d", 0.0, 6.0, 0.1).unwrap();
        assert_eq!(g.len(), 61);
        assert!((g[60] - 6.0).abs() < 1e-12);
        assert_eq!(grid("d", 1.0, 1.0, 0.5).unwrap(), vec![1.0]);
        assert!(grid("d", 1.0, 0.0, 0.1).is_err());
        assert!(grid("d", 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn psf_specs() {
        assert!(load_psf("gaussian").unwrap().is_gaussian());
        assert!(matches!(load_psf("airy"), Err(CliError::Input(_))));
        assert!(matches!(load_psf("file:/nonexistent/psf.csv"), Err(CliError::Input(_))));
    }
}
