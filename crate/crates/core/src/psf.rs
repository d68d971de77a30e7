//! Point-spread functions, their shifted overlaps, and the photon-arrival
//! densities seen by direct imaging.
//!
//! Lengths are in units of the Gaussian width parameter σ throughout.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::AdaptiveLegendre;
use crate::Hypothesis;

/// Tolerance on the squared norm of a sampled PSF.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;
/// Pointwise tolerance on `ψ(x, y) = ψ(-x, y)`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;
/// A sampled grid must reach this far (in σ) from the origin in every
/// direction before points beyond it may be treated as zero density.
pub const COVERAGE_SIGMAS: f64 = 6.0;

/// Half-width of the square integration box for separation `d`.
pub fn truncation_half_width(d: f64) -> f64 {
    (d / 2.0 + 8.0).max(8.0)
}

/// One-dimensional factor of the unit-σ Gaussian amplitude,
/// `(2π)^{-1/4} exp(-x²/4)`.
pub fn gaussian_factor(x: f64) -> f64 {
    (2.0 * PI).powf(-0.25) * (-0.25 * x * x).exp()
}

/// Rectangular grid of amplitude samples.
///
/// Node `(i, j)` sits at `(x_min + i·dx, y_min + j·dy)` and its value is
/// stored at `values[j * nx + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGrid {
    pub x_min: f64,
    pub y_min: f64,
    pub dx: f64,
    pub dy: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
    /// Imaginary parts, if the source carried any.
    pub imag: Option<Vec<f64>>,
}

impl SampledGrid {
    /// Samples `f` on the nodes of a grid spanning `[x_min, x_max] × [y_min, y_max]`.
    pub fn from_fn<F>(x: (f64, f64), y: (f64, f64), dx: f64, dy: f64, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64,
    {
        let nx = ((x.1 - x.0) / dx).round() as usize + 1;
        let ny = ((y.1 - y.0) / dy).round() as usize + 1;
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            let yv = y.0 + j as f64 * dy;
            for i in 0..nx {
                values.push(f(x.0 + i as f64 * dx, yv));
            }
        }
        SampledGrid { x_min: x.0, y_min: y.0, dx, dy, nx, ny, values, imag: None }
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + (self.nx - 1) as f64 * self.dx
    }

    pub fn y_max(&self) -> f64 {
        self.y_min + (self.ny - 1) as f64 * self.dy
    }

    fn node(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    fn x_at(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    fn y_at(&self, j: usize) -> f64 {
        self.y_min + j as f64 * self.dy
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        let slack_x = 1e-9 * self.dx;
        let slack_y = 1e-9 * self.dy;
        x >= self.x_min - slack_x
            && x <= self.x_max() + slack_x
            && y >= self.y_min - slack_y
            && y <= self.y_max() + slack_y
    }

    /// Linear interpolation weights along one axis; `None` outside the grid.
    fn locate(min: f64, step: f64, n: usize, v: f64) -> Option<(usize, f64)> {
        let t = (v - min) / step;
        let max_t = (n - 1) as f64;
        if t < -1e-9 || t > max_t + 1e-9 {
            return None;
        }
        let t = t.clamp(0.0, max_t);
        let k = (t.floor() as usize).min(n.saturating_sub(2));
        Some((k, t - k as f64))
    }

    /// Bilinear interpolation; zero outside the grid.
    pub fn interpolate(&self, x: f64, y: f64) -> f64 {
        if self.nx < 2 || self.ny < 2 {
            return 0.0;
        }
        let (Some((i, fx)), Some((j, fy))) = (
            Self::locate(self.x_min, self.dx, self.nx, x),
            Self::locate(self.y_min, self.dy, self.ny, y),
        ) else {
            return 0.0;
        };
        let v00 = self.node(i, j);
        let v10 = self.node(i + 1, j);
        let v01 = self.node(i, j + 1);
        let v11 = self.node(i + 1, j + 1);
        (1.0 - fy) * ((1.0 - fx) * v00 + fx * v10) + fy * ((1.0 - fx) * v01 + fx * v11)
    }

    /// Interpolation along x only, at node row `j`.
    fn interpolate_row(&self, x: f64, j: usize) -> f64 {
        match Self::locate(self.x_min, self.dx, self.nx, x) {
            Some((i, fx)) => (1.0 - fx) * self.node(i, j) + fx * self.node(i + 1, j),
            None => 0.0,
        }
    }

    fn squared_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.dx * self.dy
    }

    fn covers_six_sigma(&self) -> bool {
        self.x_min <= -COVERAGE_SIGMAS
            && self.x_max() >= COVERAGE_SIGMAS
            && self.y_min <= -COVERAGE_SIGMAS
            && self.y_max() >= COVERAGE_SIGMAS
    }

    /// Reads a grid from a `x,y,psi` CSV file plus its `<file>.meta` sidecar.
    ///
    /// An optional `psi_im` column carries imaginary parts.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut meta_path = path.as_os_str().to_owned();
        meta_path.push(".meta");
        let meta = GridMeta::parse(&fs::read_to_string(&meta_path)?)?;

        let nx = ((meta.x_max - meta.x_min) / meta.dx).round() as usize + 1;
        let ny = ((meta.y_max - meta.y_min) / meta.dy).round() as usize + 1;
        let mut values = vec![f64::NAN; nx * ny];
        let mut imag: Option<Vec<f64>> = None;

        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        let headers = reader.headers()?.clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let (Some(cx), Some(cy), Some(cpsi)) = (col("x"), col("y"), col("psi")) else {
            return Err(Error::Parse(format!(
                "{}: header must contain x,y,psi",
                path.display()
            )));
        };
        let cim = col("psi_im");
        if cim.is_some() {
            imag = Some(vec![0.0; nx * ny]);
        }

        let field = |rec: &csv::StringRecord, c: usize, line: u64| -> Result<f64> {
            let s = rec.get(c).unwrap_or("");
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("line {line}: bad number {s:?}")))
        };
        let index = |v: f64, min: f64, step: f64, n: usize, line: u64| -> Result<usize> {
            let t = (v - min) / step;
            let k = t.round();
            if (t - k).abs() > 1e-6 || k < 0.0 || k as usize >= n {
                return Err(Error::Parse(format!("line {line}: coordinate {v} is off the grid")));
            }
            Ok(k as usize)
        };

        for (row, rec) in reader.records().enumerate() {
            let rec = rec?;
            let line = row as u64 + 2;
            let i = index(field(&rec, cx, line)?, meta.x_min, meta.dx, nx, line)?;
            let j = index(field(&rec, cy, line)?, meta.y_min, meta.dy, ny, line)?;
            let slot = &mut values[j * nx + i];
            if !slot.is_nan() {
                return Err(Error::Parse(format!("line {line}: duplicate grid node")));
            }
            *slot = field(&rec, cpsi, line)?;
            if let (Some(c), Some(im)) = (cim, imag.as_mut()) {
                im[j * nx + i] = field(&rec, c, line)?;
            }
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Parse(format!("{}: grid has missing nodes", path.display())));
        }
        Ok(SampledGrid { x_min: meta.x_min, y_min: meta.y_min, dx: meta.dx, dy: meta.dy, nx, ny, values, imag })
    }

    /// Writes the grid in the format read by [`SampledGrid::load`].
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
        w.write_record(["x", "y", "psi"])?;
        for j in 0..self.ny {
            for i in 0..self.nx {
                w.write_record([
                    self.x_at(i).to_string(),
                    self.y_at(j).to_string(),
                    self.node(i, j).to_string(),
                ])?;
            }
        }
        w.flush()?;
        let mut meta_path = path.as_os_str().to_owned();
        meta_path.push(".meta");
        fs::write(
            meta_path,
            format!(
                "dx={}\ndy={}\nx_min={}\nx_max={}\ny_min={}\ny_max={}\n",
                self.dx,
                self.dy,
                self.x_min,
                self.x_max(),
                self.y_min,
                self.y_max()
            ),
        )?;
        Ok(())
    }
}

struct GridMeta {
    dx: f64,
    dy: f64,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl GridMeta {
    fn parse(text: &str) -> Result<Self> {
        let mut get = std::collections::HashMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("metadata line {line:?} is not key=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("metadata value {v:?} is not a number")))?;
            get.insert(k.trim().to_string(), v);
        }
        let req = |k: &str| {
            get.get(k)
                .copied()
                .ok_or_else(|| Error::Parse(format!("metadata is missing {k}")))
        };
        let m = GridMeta {
            dx: req("dx")?,
            dy: req("dy")?,
            x_min: req("x_min")?,
            x_max: req("x_max")?,
            y_min: req("y_min")?,
            y_max: req("y_max")?,
        };
        if !(m.dx > 0.0 && m.dy > 0.0 && m.x_max > m.x_min && m.y_max > m.y_min) {
            return Err(Error::Parse("metadata describes an empty grid".into()));
        }
        Ok(m)
    }
}

/// Unvalidated description of a point-spread function.
#[derive(Debug, Clone, PartialEq)]
pub enum PsfSpec {
    GaussianUnitSigma,
    Sampled(SampledGrid),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsfKind {
    GaussianUnitSigma,
    Sampled,
}

/// A validated, immutable, real and mirror-symmetric point-spread function.
#[derive(Debug, Clone)]
pub struct PointSpreadFunction {
    inner: Inner,
}

#[derive(Debug, Clone)]
enum Inner {
    Gaussian,
    Sampled(Arc<SampledGrid>),
}

/// Checks a PSF description and returns a validated handle.
///
/// Sampled grids must be real, mirror symmetric about the y-axis and have
/// unit squared norm (node sum) within [`NORMALIZATION_TOLERANCE`]; the
/// accepted grid is rescaled to unit norm.
pub fn validate(spec: PsfSpec) -> Result<PointSpreadFunction> {
    let grid = match spec {
        PsfSpec::GaussianUnitSigma => return Ok(PointSpreadFunction::gaussian()),
        PsfSpec::Sampled(g) => g,
    };
    if grid.nx < 2 || grid.ny < 2 || grid.values.len() != grid.nx * grid.ny {
        return Err(Error::Parse("sampled grid needs at least 2×2 nodes".into()));
    }
    if grid.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parse("sampled grid contains non-finite values".into()));
    }
    if let Some(im) = &grid.imag {
        let worst = im.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if worst > 0.0 {
            return Err(Error::ComplexAmplitude(worst));
        }
    }

    let mut worst = 0.0f64;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let mirrored = grid.interpolate(-grid.x_at(i), grid.y_at(j));
            worst = worst.max((grid.node(i, j) - mirrored).abs());
        }
    }
    if worst > SYMMETRY_TOLERANCE {
        return Err(Error::AsymmetricPsf(worst));
    }

    let norm = grid.squared_norm();
    if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    let scale = norm.sqrt().recip();
    let mut grid = grid;
    grid.imag = None;
    grid.values.iter_mut().for_each(|v| *v *= scale);
    Ok(PointSpreadFunction { inner: Inner::Sampled(Arc::new(grid)) })
}

/// Overlap-derived quantities for one separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapStats {
    pub d: f64,
    /// `δ(d)`.
    pub delta: f64,
    /// `(1 + δ(d)) / 2`.
    pub lambda_plus: f64,
    /// `(1 - δ(d)) / 2`.
    pub lambda_minus: f64,
    /// `δ(d/2)`.
    pub chi: f64,
}

impl OverlapStats {
    /// Builds the stats from `δ(d)` and `χ = δ(d/2)`.
    ///
    /// The smaller eigenvalue is formed directly and the larger as its
    /// complement, so `λ₊ + λ₋ == 1` holds in floating point.
    pub fn new(d: f64, delta: f64, chi: f64) -> Result<Self> {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::domain(format!("separation must be finite and >= 0, got {d}")));
        }
        for (name, v) in [("delta", delta), ("chi", chi)] {
            if !(v > -1.0 && v <= 1.0) {
                return Err(Error::domain(format!("{name} must lie in (-1, 1], got {v}")));
            }
        }
        let (lambda_plus, lambda_minus) = if delta >= 0.0 {
            let lm = 0.5 * (1.0 - delta);
            (1.0 - lm, lm)
        } else {
            let lp = 0.5 * (1.0 + delta);
            (lp, 1.0 - lp)
        };
        Ok(OverlapStats { d, delta, lambda_plus, lambda_minus, chi })
    }

    /// Stats of the unit-σ Gaussian PSF in closed form.
    pub fn gaussian(d: f64) -> Result<Self> {
        Self::new(d, (-d * d / 8.0).exp(), (-d * d / 32.0).exp())
    }

    /// Coincident sources.
    pub fn coincident() -> Self {
        OverlapStats { d: 0.0, delta: 1.0, lambda_plus: 1.0, lambda_minus: 0.0, chi: 1.0 }
    }
}

impl PointSpreadFunction {
    pub fn gaussian() -> Self {
        PointSpreadFunction { inner: Inner::Gaussian }
    }

    /// Loads and validates a sampled PSF from a CSV grid file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        validate(PsfSpec::Sampled(SampledGrid::load(path)?))
    }

    pub fn kind(&self) -> PsfKind {
        match self.inner {
            Inner::Gaussian => PsfKind::GaussianUnitSigma,
            Inner::Sampled(_) => PsfKind::Sampled,
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.inner, Inner::Gaussian)
    }

    pub fn grid(&self) -> Option<&SampledGrid> {
        match &self.inner {
            Inner::Sampled(g) => Some(g),
            Inner::Gaussian => None,
        }
    }

    /// Amplitude `ψ(x, y)`; sampled PSFs interpolate bilinearly and vanish
    /// outside their grid.
    pub fn amplitude(&self, x: f64, y: f64) -> f64 {
        match &self.inner {
            Inner::Gaussian => gaussian_factor(x) * gaussian_factor(y),
            Inner::Sampled(g) => g.interpolate(x, y),
        }
    }

    /// Shifted overlap `δ(d) = ∬ ψ(x, y) ψ(x - d, y) dx dy`.
    ///
    /// Closed form `exp(-d²/8)` for the Gaussian; node-sum quadrature for
    /// sampled grids.
    pub fn overlap(&self, d: f64) -> Result<f64> {
        check_separation(d)?;
        match &self.inner {
            Inner::Gaussian => Ok((-d * d / 8.0).exp()),
            Inner::Sampled(g) => Ok(sampled_overlap(g, d)),
        }
    }

    /// `δ(d)` by numerical quadrature regardless of kind: adaptive
    /// Gauss–Legendre over the truncation box for analytic PSFs, node sums
    /// for sampled ones.
    pub fn overlap_by_quadrature(&self, d: f64, rule: &AdaptiveLegendre) -> Result<f64> {
        check_separation(d)?;
        match &self.inner {
            Inner::Gaussian => {
                let w = truncation_half_width(d);
                let e = rule.integrate_rect(
                    |x, y| Ok(self.amplitude(x, y) * self.amplitude(x - d, y)),
                    (-w, w),
                    (-w, w),
                )?;
                Ok(e.value.clamp(-1.0, 1.0))
            }
            Inner::Sampled(g) => Ok(sampled_overlap(g, d)),
        }
    }

    pub fn overlap_stats(&self, d: f64) -> Result<OverlapStats> {
        OverlapStats::new(d, self.overlap(d)?, self.overlap(d / 2.0)?)
    }

    fn intensity_checked(&self, x: f64, y: f64) -> Result<f64> {
        if let Inner::Sampled(g) = &self.inner {
            if !g.contains(x, y) && !g.covers_six_sigma() {
                return Err(Error::domain(format!(
                    "point ({x}, {y}) lies outside a sampled grid that does not cover ±{COVERAGE_SIGMAS}σ"
                )));
            }
        }
        let a = self.amplitude(x, y);
        Ok(a * a)
    }

    /// Photon-arrival density on the image plane under either hypothesis.
    pub fn direct_image_density(&self, hypothesis: Hypothesis, d: f64, x: f64, y: f64) -> Result<f64> {
        check_separation(d)?;
        match hypothesis {
            Hypothesis::H1 => self.intensity_checked(x, y),
            Hypothesis::H2 => Ok(0.5 * self.intensity_checked(x - d / 2.0, y)?
                + 0.5 * self.intensity_checked(x + d / 2.0, y)?),
        }
    }

    /// Unchecked densities `(Λ₁, Λ₂)` at a point; zero off a sampled grid.
    pub fn density_pair(&self, d: f64, x: f64, y: f64) -> (f64, f64) {
        let i = |x: f64| {
            let a = self.amplitude(x, y);
            a * a
        };
        (i(x), 0.5 * i(x - d / 2.0) + 0.5 * i(x + d / 2.0))
    }

    /// `ln Λ₁` and `ln Λ₂` at a point, stable far in the tails for the
    /// Gaussian.
    pub fn log_density_pair(&self, d: f64, x: f64, y: f64) -> (f64, f64) {
        match self.inner {
            Inner::Gaussian => {
                let base = -(2.0 * PI).ln() - 0.5 * y * y;
                let a = -0.5 * (x - d / 2.0).powi(2);
                let b = -0.5 * (x + d / 2.0).powi(2);
                let m = a.max(b);
                let l2 = base + m + (0.5 * ((a - m).exp() + (b - m).exp())).ln();
                (base - 0.5 * x * x, l2)
            }
            Inner::Sampled(_) => {
                let (p, q) = self.density_pair(d, x, y);
                (p.ln(), q.ln())
            }
        }
    }

    /// Integrates `f(Λ₁, Λ₂)` over the image plane.
    ///
    /// Analytic PSFs use adaptive Gauss–Legendre over the truncation box;
    /// sampled PSFs sum over grid nodes extended by the source shift.
    pub fn integrate_densities<F>(&self, d: f64, rule: &AdaptiveLegendre, f: F) -> Result<f64>
    where
        F: Fn(f64, f64) -> f64,
    {
        check_separation(d)?;
        match &self.inner {
            Inner::Gaussian => {
                let w = truncation_half_width(d);
                let e = rule.integrate_rect(
                    |x, y| {
                        let (p, q) = self.density_pair(d, x, y);
                        Ok(f(p, q))
                    },
                    (-w, w),
                    (-w, w),
                )?;
                Ok(e.value)
            }
            Inner::Sampled(g) => {
                let pad = (0.5 * d / g.dx).ceil() as usize;
                let mut sum = 0.0;
                for j in 0..g.ny {
                    for k in 0..g.nx + 2 * pad {
                        let x = g.x_min + (k as f64 - pad as f64) * g.dx;
                        let a0 = g.interpolate_row(x, j);
                        let am = g.interpolate_row(x - d / 2.0, j);
                        let ap = g.interpolate_row(x + d / 2.0, j);
                        sum += f(a0 * a0, 0.5 * am * am + 0.5 * ap * ap);
                    }
                }
                Ok(sum * g.dx * g.dy)
            }
        }
    }
}

fn check_separation(d: f64) -> Result<()> {
    if d >= 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("separation must be finite and >= 0, got {d}")))
    }
}

fn sampled_overlap(g: &SampledGrid, d: f64) -> f64 {
    let mut sum = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            sum += g.node(i, j) * g.interpolate_row(g.x_at(i) - d, j);
        }
    }
    (sum * g.dx * g.dy).clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled_gaussian(h: f64) -> PointSpreadFunction {
        let grid = SampledGrid::from_fn((-8.0, 8.0), (-8.0, 8.0), h, h, |x, y| {
            gaussian_factor(x) * gaussian_factor(y)
        });
        validate(PsfSpec::Sampled(grid)).unwrap()
    }

    #[test]
    fn gaussian_overlap_closed_form() {
        let g = PointSpreadFunction::gaussian();
        assert_eq!(g.overlap(0.0).unwrap(), 1.0);
        assert!((g.overlap(2.0).unwrap() - 0.606_530_659_712_633_4).abs() < 1e-15);
        assert!(g.overlap(-1.0).is_err());
    }

    #[test]
    fn stats_examples() {
        let s = PointSpreadFunction::gaussian().overlap_stats(0.0).unwrap();
        assert_eq!((s.delta, s.lambda_plus, s.lambda_minus, s.chi), (1.0, 1.0, 0.0, 1.0));

        let s = PointSpreadFunction::gaussian().overlap_stats(2.0).unwrap();
        assert!((s.delta - 0.606_530_659_712_633_4).abs() < 1e-12);
        assert!((s.lambda_plus - 0.803_265_329_856_316_7).abs() < 1e-12);
        assert!((s.lambda_minus - 0.196_734_670_143_683_3).abs() < 1e-12);
        assert!((s.chi - 0.882_496_902_584_595_4).abs() < 1e-12);

        let s = PointSpreadFunction::gaussian().overlap_stats(100.0).unwrap();
        assert!((s.lambda_plus - 0.5).abs() < 1e-12);
        assert!(s.chi.abs() < 1e-12);
    }

    #[test]
    fn stats_reject_bad_inputs() {
        assert!(OverlapStats::new(1.0, 1.5, 0.5).is_err());
        assert!(OverlapStats::new(1.0, 0.5, -1.0).is_err());
        assert!(OverlapStats::new(-0.1, 0.5, 0.5).is_err());
    }

    #[test]
    fn density_examples() {
        let g = PointSpreadFunction::gaussian();
        let f0 = gaussian_factor(0.0);
        let h1 = g.direct_image_density(Hypothesis::H1, 3.0, 0.0, 0.0).unwrap();
        assert!((h1 - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((h1 - 0.159_154_943_091_895_35).abs() < 1e-12);

        for &(x, y) in &[(0.3, -1.2), (2.0, 0.5), (-4.0, 0.0)] {
            let a = g.direct_image_density(Hypothesis::H1, 0.0, x, y).unwrap();
            let b = g.direct_image_density(Hypothesis::H2, 0.0, x, y).unwrap();
            assert!((a - b).abs() < 1e-16);
        }

        let h2 = g.direct_image_density(Hypothesis::H2, 2.0, 1.0, 0.0).unwrap();
        let expected = 0.5 * (f0 * f0).powi(2) + 0.5 * (gaussian_factor(2.0) * f0).powi(2);
        assert!((h2 - expected).abs() < 1e-15);
    }

    #[test]
    fn validate_examples() {
        assert!(validate(PsfSpec::GaussianUnitSigma).is_ok());
        let psf = sampled_gaussian(0.05);
        assert_eq!(psf.kind(), PsfKind::Sampled);

        let shifted = SampledGrid::from_fn((-8.0, 8.0), (-8.0, 8.0), 0.05, 0.05, |x, y| {
            gaussian_factor(x - 0.3) * gaussian_factor(y)
        });
        assert!(matches!(validate(PsfSpec::Sampled(shifted)), Err(Error::AsymmetricPsf(_))));
    }

    #[test]
    fn validate_rejects_unnormalized_and_complex() {
        let mut grid = SampledGrid::from_fn((-8.0, 8.0), (-8.0, 8.0), 0.1, 0.1, |x, y| {
            1.01 * gaussian_factor(x) * gaussian_factor(y)
        });
        assert!(matches!(validate(PsfSpec::Sampled(grid.clone())), Err(Error::NotNormalized(_))));
        grid.values.iter_mut().for_each(|v| *v /= 1.01);
        let mut im = vec![0.0; grid.values.len()];
        im[17] = 1e-3;
        grid.imag = Some(im);
        assert!(matches!(validate(PsfSpec::Sampled(grid.clone())), Err(Error::ComplexAmplitude(_))));
        grid.imag = Some(vec![0.0; grid.values.len()]);
        assert!(validate(PsfSpec::Sampled(grid)).is_ok());
    }

    #[test]
    fn negative_amplitudes_are_allowed() {
        // odd-in-y, even-in-x first Hermite–Gaussian mode
        let grid = SampledGrid::from_fn((-8.0, 8.0), (-8.0, 8.0), 0.05, 0.05, |x, y| {
            gaussian_factor(x) * gaussian_factor(y) * y
        });
        assert!(validate(PsfSpec::Sampled(grid)).is_ok());
    }

    #[test]
    fn sampled_overlap_matches_gaussian_on_grid() {
        let psf = sampled_gaussian(0.05);
        assert!((psf.overlap(0.0).unwrap() - 1.0).abs() < 1e-14);
        // 0.882497 = exp(-1/8)
        let v = psf.overlap(1.0).unwrap();
        assert!((v - (-0.125f64).exp()).abs() < 1e-6, "{v}");
    }

    #[test]
    fn grid_refinement_reduces_off_node_error() {
        let d = 0.73;
        let exact = (-d * d / 8.0f64).exp();
        let coarse = (sampled_gaussian(0.1).overlap(d).unwrap() - exact).abs();
        let fine = (sampled_gaussian(0.05).overlap(d).unwrap() - exact).abs();
        assert!(fine < 0.5 * coarse, "coarse={coarse:e} fine={fine:e}");
    }

    #[test]
    fn sampled_density_outside_grid() {
        let small = SampledGrid::from_fn((-4.0, 4.0), (-4.0, 4.0), 0.05, 0.05, |x, y| {
            gaussian_factor(x) * gaussian_factor(y)
        });
        // a ±4σ box loses ~1e-4 of the norm
        let mut small = small;
        let norm = small.squared_norm();
        small.values.iter_mut().for_each(|v| *v /= norm.sqrt());
        let psf = validate(PsfSpec::Sampled(small)).unwrap();
        assert!(psf.direct_image_density(Hypothesis::H1, 0.0, 5.0, 0.0).is_err());
        assert!(psf.direct_image_density(Hypothesis::H1, 0.0, 1.0, 0.0).is_ok());

        let big = sampled_gaussian(0.1);
        assert_eq!(big.direct_image_density(Hypothesis::H1, 0.0, 9.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn log_densities_match() {
        let g = PointSpreadFunction::gaussian();
        for &(x, y, d) in &[(0.1, 0.2, 2.0), (-3.0, 1.0, 0.5), (5.0, -2.0, 4.0)] {
            let (p, q) = g.density_pair(d, x, y);
            let (lp, lq) = g.log_density_pair(d, x, y);
            assert!((lp - p.ln()).abs() < 1e-12);
            assert!((lq - q.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("psf.csv");
        let grid = SampledGrid::from_fn((-8.0, 8.0), (-8.0, 8.0), 0.1, 0.1, |x, y| {
            gaussian_factor(x) * gaussian_factor(y)
        });
        grid.save(&path).unwrap();
        let psf = PointSpreadFunction::load(&path).unwrap();
        assert!((psf.overlap(2.0).unwrap() - (-0.5f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn load_reports_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "x,y,psi\n0,0,1\n").unwrap();
        assert!(matches!(SampledGrid::load(&path), Err(Error::Io(_))));
        fs::write(dir.path().join("bad.csv.meta"), "dx=1\ndy=1\nx_min=-1\nx_max=1\ny_min=-1\ny_max=1\n").unwrap();
        assert!(matches!(SampledGrid::load(&path), Err(Error::Parse(_))));
        fs::write(&path, "a,b,c\n").unwrap();
        assert!(matches!(SampledGrid::load(&path), Err(Error::Parse(_))));
    }
}
