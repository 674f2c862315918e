//! Data model for one-dimensional laws: atoms plus an absolutely continuous
//! part (a piecewise-linear grid density or a Gaussian mixture), with
//! moments, tails, truncation, convolution, and affine maps.
//!
//! The mixed representation is load-bearing: truncation relocates the mass
//! outside `[-N, N]` onto an atom at 0, so a purely continuous model could
//! not express its own truncation.

mod convolve;

use crate::numerics::{self, normal_cdf, normal_pdf, std_normal_quantile};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

pub(crate) const WEIGHT_TOL: f64 = 1e-12;
const GRID_MASS_TOL: f64 = 1e-9;

/// Piecewise-linear density on a uniform grid of knots.
///
/// The density interpolates `values` linearly between knots and vanishes
/// outside `[x0, x0 + step*(len-1)]`; the trapezoidal integral of `values`
/// must equal 1 (the weight of the part inside a [`Distribution`] is carried
/// separately).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRaw", into = "GridRaw")]
pub struct GridDensity {
    x0: f64,
    step: f64,
    values: Vec<f64>,
    /// Cumulative trapezoid mass at each knot; cum[0] = 0.
    cum: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridRaw {
    x0: f64,
    step: f64,
    values: Vec<f64>,
}

impl TryFrom<GridRaw> for GridDensity {
    type Error = Error;
    fn try_from(raw: GridRaw) -> Result<Self> {
        GridDensity::new(raw.x0, raw.step, raw.values)
    }
}

impl From<GridDensity> for GridRaw {
    fn from(g: GridDensity) -> GridRaw {
        GridRaw { x0: g.x0, step: g.step, values: g.values }
    }
}

impl GridDensity {
    pub fn new(x0: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if !x0.is_finite() || !step.is_finite() || step <= 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "grid: x0 and step must be finite with step > 0, got x0={x0}, step={step}"
            )));
        }
        if values.len() < 3 {
            return Err(Error::InvalidDistribution(format!(
                "grid: at least 3 knots required, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "grid: density values must be finite and non-negative, got {v}"
            )));
        }
        let mass = trapezoid_mass(step, &values);
        if (mass - 1.0).abs() > GRID_MASS_TOL {
            return Err(Error::InvalidDistribution(format!(
                "grid: trapezoidal integral must be 1 within {GRID_MASS_TOL}, got {mass}"
            )));
        }
        let cum = cumulative(step, &values);
        Ok(GridDensity { x0, step, values, cum })
    }

    /// Build from raw samples, rescaling so the trapezoidal mass is exactly 1.
    /// Returns the normalization drift `mass - 1` alongside.
    pub(crate) fn normalized(x0: f64, step: f64, mut values: Vec<f64>) -> Result<(Self, f64)> {
        for v in values.iter_mut() {
            if *v < 0.0 && *v > -1e-12 {
                *v = 0.0; // convolution roundoff
            }
        }
        let mass = trapezoid_mass(step, &values);
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "grid: cannot normalize, raw mass {mass}"
            )));
        }
        for v in values.iter_mut() {
            *v /= mass;
        }
        Ok((GridDensity::new(x0, step, values)?, mass - 1.0))
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> (f64, f64) {
        (self.x0, self.x0 + self.step * (self.values.len() - 1) as f64)
    }

    pub fn knots(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| self.x0 + self.step * i as f64)
    }

    /// Density at `x` (0 outside the support).
    pub fn pdf_at(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        let t = (x - self.x0) / self.step;
        let i = (t.floor() as usize).min(self.values.len() - 2);
        let frac = t - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// Mass of `(-inf, x]`.
    pub fn cdf_at(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let t = (x - self.x0) / self.step;
        let i = (t.floor() as usize).min(self.values.len() - 2);
        let xk = self.x0 + self.step * i as f64;
        let partial = (x - xk) * (self.values[i] + self.pdf_at(x)) * 0.5;
        (self.cum[i] + partial).min(1.0)
    }

    /// `(mass, first moment, second moment)` of the density restricted to
    /// `[lo, hi]`, exact per cell for the piecewise-linear interpolant.
    pub fn interval_moments(&self, lo: f64, hi: f64) -> (f64, f64, f64) {
        let (slo, shi) = self.support();
        let lo = lo.max(slo);
        let hi = hi.min(shi);
        if lo >= hi {
            return (0.0, 0.0, 0.0);
        }
        let n = self.values.len();
        let first_cell = (((lo - self.x0) / self.step).floor() as usize).min(n - 2);
        let last_cell = (((hi - self.x0) / self.step).ceil() as usize).max(1).min(n - 1) - 1;
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for i in first_cell..=last_cell {
            let xk = self.x0 + self.step * i as f64;
            let xk1 = xk + self.step;
            let a = lo.max(xk);
            let b = hi.min(xk1);
            if b <= a {
                continue;
            }
            let va = self.pdf_linear_in_cell(i, a);
            let vb = self.pdf_linear_in_cell(i, b);
            let s = b - a;
            let p0 = s * (va + vb) / 2.0;
            let p1 = s * (a * (va + vb) / 2.0 + s * (va + 2.0 * vb) / 6.0);
            let p2 = s
                * (a * a * (va + vb) / 2.0
                    + 2.0 * a * s * (va + 2.0 * vb) / 6.0
                    + s * s * (va + 3.0 * vb) / 12.0);
            m0 += p0;
            m1 += p1;
            m2 += p2;
        }
        (m0, m1, m2)
    }

    fn pdf_linear_in_cell(&self, i: usize, x: f64) -> f64 {
        let xk = self.x0 + self.step * i as f64;
        let frac = (x - xk) / self.step;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}

fn trapezoid_mass(step: f64, values: &[f64]) -> f64 {
    let n = values.len();
    let mut s = 0.5 * (values[0] + values[n - 1]);
    for v in &values[1..n - 1] {
        s += v;
    }
    s * step
}

fn cumulative(step: f64, values: &[f64]) -> Vec<f64> {
    let mut cum = Vec::with_capacity(values.len());
    cum.push(0.0);
    let mut acc = 0.0;
    for w in values.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * step;
        cum.push(acc);
    }
    cum
}

/// One Gaussian mixture component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    pub mean: f64,
    pub sd: f64,
    pub weight: f64,
}

/// Finite mixture of normal densities; component weights sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 3]>", into = "Vec<[f64; 3]>")]
pub struct GaussianMixtureDensity {
    components: Vec<MixtureComponent>,
}

impl TryFrom<Vec<[f64; 3]>> for GaussianMixtureDensity {
    type Error = Error;
    fn try_from(raw: Vec<[f64; 3]>) -> Result<Self> {
        GaussianMixtureDensity::new(
            raw.into_iter()
                .map(|[mean, sd, weight]| MixtureComponent { mean, sd, weight })
                .collect(),
        )
    }
}

impl From<GaussianMixtureDensity> for Vec<[f64; 3]> {
    fn from(m: GaussianMixtureDensity) -> Self {
        m.components.iter().map(|c| [c.mean, c.sd, c.weight]).collect()
    }
}

impl GaussianMixtureDensity {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidDistribution(
                "gaussian_mixture: at least one component required".into(),
            ));
        }
        let mut total = 0.0;
        for c in &components {
            if !c.mean.is_finite() || !c.sd.is_finite() || c.sd <= 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "gaussian_mixture: component (mean={}, sd={}) invalid; sd must be > 0",
                    c.mean, c.sd
                )));
            }
            if !c.weight.is_finite() || c.weight < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "gaussian_mixture: component weight {} must be non-negative",
                    c.weight
                )));
            }
            total += c.weight;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidDistribution(format!(
                "gaussian_mixture: component weights must sum to 1 within {WEIGHT_TOL}, got {total}"
            )));
        }
        Ok(GaussianMixtureDensity { components })
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn pdf_at(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * normal_pdf(x, c.mean, c.sd))
            .sum()
    }

    pub fn cdf_at(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * normal_cdf(x, c.mean, c.sd))
            .sum()
    }

    /// Closed-form `(mass, m1, m2)` over `[lo, hi]` via normal partial
    /// moments.
    pub fn interval_moments(&self, lo: f64, hi: f64) -> (f64, f64, f64) {
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for c in &self.components {
            let a = (lo - c.mean) / c.sd;
            let b = (hi - c.mean) / c.sd;
            let pa = numerics::std_normal_pdf(a);
            let pb = numerics::std_normal_pdf(b);
            let mass = numerics::std_normal_cdf(b) - numerics::std_normal_cdf(a);
            let t_lo = if pa == 0.0 { 0.0 } else { (c.mean + lo) * pa };
            let t_hi = if pb == 0.0 { 0.0 } else { (c.mean + hi) * pb };
            m0 += c.weight * mass;
            m1 += c.weight * (c.mean * mass + c.sd * (pa - pb));
            m2 += c.weight
                * ((c.mean * c.mean + c.sd * c.sd) * mass + c.sd * (t_lo - t_hi));
        }
        (m0, m1, m2)
    }

    fn window(&self, tail_cutoff: f64) -> (f64, f64) {
        // z such that the neglected Gaussian mass per component stays below
        // the cutoff; exact for normal tails, far tighter than Chebyshev.
        let per = (tail_cutoff / (2.0 * self.components.len() as f64)).max(1e-300);
        let z = -std_normal_quantile(per.min(0.49)).unwrap_or(9.0);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in &self.components {
            lo = lo.min(c.mean - z * c.sd);
            hi = hi.max(c.mean + z * c.sd);
        }
        (lo, hi)
    }
}

/// The continuous part of a [`Distribution`].
#[derive(Debug, Clone, PartialEq)]
pub enum ContinuousPart {
    Grid(GridDensity),
    Mixture(GaussianMixtureDensity),
}

impl ContinuousPart {
    pub fn pdf_at(&self, x: f64) -> f64 {
        match self {
            ContinuousPart::Grid(g) => g.pdf_at(x),
            ContinuousPart::Mixture(m) => m.pdf_at(x),
        }
    }

    pub fn cdf_at(&self, x: f64) -> f64 {
        match self {
            ContinuousPart::Grid(g) => g.cdf_at(x),
            ContinuousPart::Mixture(m) => m.cdf_at(x),
        }
    }

    pub fn interval_moments(&self, lo: f64, hi: f64) -> (f64, f64, f64) {
        match self {
            ContinuousPart::Grid(g) => g.interval_moments(lo, hi),
            ContinuousPart::Mixture(m) => m.interval_moments(lo, hi),
        }
    }

    fn window(&self, tail_cutoff: f64) -> (f64, f64) {
        match self {
            ContinuousPart::Grid(g) => g.support(),
            ContinuousPart::Mixture(m) => m.window(tail_cutoff),
        }
    }

    /// Knot locations where the density may have kinks (grid knots,
    /// or mixture component means as quadrature hints).
    pub fn kink_knots(&self) -> Vec<f64> {
        match self {
            ContinuousPart::Grid(g) => g.knots().collect(),
            ContinuousPart::Mixture(m) => {
                m.components.iter().map(|c| c.mean).collect()
            }
        }
    }
}

/// Mean, variance, and raw second moment of a law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    pub second_moment: f64,
}

/// Truncation at level `N = 1 + sqrt(2 log(1/eps))`: the law keeps its mass
/// on `[-N, N]` and relocates the rest onto an atom at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationSummary {
    pub eps: f64,
    /// `N(eps)`.
    pub big_n: f64,
    /// Mean of the law restricted to `[-N, N]`.
    pub a1: f64,
    /// Variance of the truncated law: `∫_{-N}^{N} x² dF - a1²`.
    pub sigma1_sq: f64,
    pub truncated: Distribution,
}

/// Diagnostics carried by numerically constructed distributions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    /// Mass drift removed by renormalization after a numerical convolution.
    pub renorm_drift: f64,
}

/// A mixed law: atoms plus an optional absolutely continuous part.
///
/// Invariants: atom weights are non-negative, atom locations strictly
/// increasing, and `sum(atom weights) + continuous_weight = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionJson", into = "DistributionJson")]
pub struct Distribution {
    atoms: Vec<(f64, f64)>,
    continuous: Option<ContinuousPart>,
    continuous_weight: f64,
    diagnostics: Diagnostics,
}

/// Wire format: `{"atoms":[[x,w],...], "grid":{...} | "gaussian_mixture":[[mean,sd,w],...], "continuous_weight":..}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionJson {
    #[serde(default)]
    atoms: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid: Option<GridDensity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gaussian_mixture: Option<GaussianMixtureDensity>,
    #[serde(default)]
    continuous_weight: f64,
}

impl TryFrom<DistributionJson> for Distribution {
    type Error = Error;
    fn try_from(raw: DistributionJson) -> Result<Self> {
        let continuous = match (raw.grid, raw.gaussian_mixture) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidDistribution(
                    "at most one of `grid` and `gaussian_mixture` may be present".into(),
                ))
            }
            (Some(g), None) => Some(ContinuousPart::Grid(g)),
            (None, Some(m)) => Some(ContinuousPart::Mixture(m)),
            (None, None) => None,
        };
        Distribution::new(
            raw.atoms.into_iter().map(|[x, w]| (x, w)).collect(),
            continuous,
            raw.continuous_weight,
        )
    }
}

impl From<Distribution> for DistributionJson {
    fn from(d: Distribution) -> Self {
        let (grid, gaussian_mixture) = match d.continuous {
            Some(ContinuousPart::Grid(g)) => (Some(g), None),
            Some(ContinuousPart::Mixture(m)) => (None, Some(m)),
            None => (None, None),
        };
        DistributionJson {
            atoms: d.atoms.into_iter().map(|(x, w)| [x, w]).collect(),
            grid,
            gaussian_mixture,
            continuous_weight: d.continuous_weight,
        }
    }
}

impl Distribution {
    /// Validating constructor. Atoms may be given in any order; equal
    /// locations are merged.
    pub fn new(
        atoms: Vec<(f64, f64)>,
        continuous: Option<ContinuousPart>,
        continuous_weight: f64,
    ) -> Result<Self> {
        for &(x, w) in &atoms {
            if !x.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "atom location must be finite, got {x}"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "atom weight must be finite and non-negative, got {w}"
                )));
            }
        }
        if !continuous_weight.is_finite() || continuous_weight < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "continuous_weight must be finite and non-negative, got {continuous_weight}"
            )));
        }
        let mut atoms: Vec<(f64, f64)> = atoms.into_iter().filter(|&(_, w)| w > 0.0).collect();
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += w,
                _ => merged.push((x, w)),
            }
        }
        let atom_mass: f64 = merged.iter().map(|&(_, w)| w).sum();
        let total = atom_mass + continuous_weight;
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidDistribution(format!(
                "atom weights + continuous_weight must sum to 1 within {WEIGHT_TOL}, got {total}"
            )));
        }
        let (continuous, continuous_weight) = if continuous_weight == 0.0 {
            (None, 0.0)
        } else if continuous.is_none() {
            return Err(Error::InvalidDistribution(
                "continuous_weight > 0 but no continuous part given".into(),
            ));
        } else {
            (continuous, continuous_weight)
        };
        Ok(Distribution {
            atoms: merged,
            continuous,
            continuous_weight,
            diagnostics: Diagnostics::default(),
        })
    }

    /// Point mass at `x`.
    pub fn point_mass(x: f64) -> Distribution {
        Distribution::new(vec![(x, 1.0)], None, 0.0).expect("point mass is valid")
    }

    /// Purely atomic law.
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Distribution> {
        Distribution::new(atoms, None, 0.0)
    }

    /// `N(mean, sd²)` as a one-component mixture.
    pub fn normal(mean: f64, sd: f64) -> Result<Distribution> {
        Distribution::new(
            vec![],
            Some(ContinuousPart::Mixture(GaussianMixtureDensity::new(vec![
                MixtureComponent { mean, sd, weight: 1.0 },
            ])?)),
            1.0,
        )
    }

    /// Purely continuous Gaussian mixture.
    pub fn mixture(components: Vec<MixtureComponent>) -> Result<Distribution> {
        Distribution::new(
            vec![],
            Some(ContinuousPart::Mixture(GaussianMixtureDensity::new(components)?)),
            1.0,
        )
    }

    /// `Uniform[a, b]` as a piecewise-linear grid density.
    pub fn uniform(a: f64, b: f64, knots: usize) -> Result<Distribution> {
        if !(b > a) {
            return Err(Error::InvalidDistribution(format!(
                "uniform requires a < b, got [{a}, {b}]"
            )));
        }
        let n = knots.max(3);
        let c = 1.0 / (b - a);
        let g = GridDensity::new(a, (b - a) / (n - 1) as f64, vec![c; n])?;
        Distribution::new(vec![], Some(ContinuousPart::Grid(g)), 1.0)
    }

    /// Purely continuous law from a grid density.
    pub fn from_grid(grid: GridDensity) -> Distribution {
        Distribution::new(vec![], Some(ContinuousPart::Grid(grid)), 1.0)
            .expect("normalized grid is a valid law")
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn continuous(&self) -> Option<&ContinuousPart> {
        self.continuous.as_ref()
    }

    pub fn continuous_weight(&self) -> f64 {
        self.continuous_weight
    }

    pub fn diagnostics(&self) -> Diagnostics {
        self.diagnostics
    }

    pub(crate) fn set_renorm_drift(&mut self, drift: f64) {
        self.diagnostics.renorm_drift = drift;
    }

    pub fn total_atom_weight(&self) -> f64 {
        self.atoms.iter().map(|&(_, w)| w).sum()
    }

    pub fn is_continuous(&self) -> bool {
        self.atoms.is_empty() && self.continuous.is_some()
    }

    /// Weight of the atom exactly at `x` (0 if none).
    pub fn atom_weight_at(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .find(|&&(loc, _)| loc == x)
            .map(|&(_, w)| w)
            .unwrap_or(0.0)
    }

    /// Density of the continuous part scaled by its weight (ignores atoms).
    pub fn pdf_at(&self, x: f64) -> f64 {
        match &self.continuous {
            Some(c) => self.continuous_weight * c.pdf_at(x),
            None => 0.0,
        }
    }

    /// Right-continuous CDF: `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        let atom_mass: f64 = self
            .atoms
            .iter()
            .take_while(|&&(loc, _)| loc <= x)
            .map(|&(_, w)| w)
            .sum();
        let cont = match &self.continuous {
            Some(c) => self.continuous_weight * c.cdf_at(x),
            None => 0.0,
        };
        atom_mass + cont
    }

    /// Left limit of the CDF: `P(X < x)`; `cdf(x) - cdf_left(x)` is the atom
    /// weight at `x`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x) - self.atom_weight_at(x)
    }

    /// Mean, variance, and second moment.
    pub fn moments(&self) -> MomentSummary {
        let (lo, hi) = self.continuous_window(1e-16);
        let (_, mut m1, mut m2) = match &self.continuous {
            Some(c) => {
                let (m0, m1, m2) = c.interval_moments(lo, hi);
                let w = self.continuous_weight;
                (w * m0, w * m1, w * m2)
            }
            None => (0.0, 0.0, 0.0),
        };
        for &(x, w) in &self.atoms {
            m1 += w * x;
            m2 += w * x * x;
        }
        let variance = (m2 - m1 * m1).max(0.0);
        MomentSummary { mean: m1, variance, second_moment: m2 }
    }

    /// `(mass, m1, m2)` over the closed interval `[lo, hi]`, atoms at the
    /// endpoints included.
    pub fn interval_moments_closed(&self, lo: f64, hi: f64) -> (f64, f64, f64) {
        let (mut m0, mut m1, mut m2) = match &self.continuous {
            Some(c) => {
                let (a, b, c2) = c.interval_moments(lo, hi);
                let w = self.continuous_weight;
                (w * a, w * b, w * c2)
            }
            None => (0.0, 0.0, 0.0),
        };
        for &(x, w) in &self.atoms {
            if x >= lo && x <= hi {
                m0 += w;
                m1 += w * x;
                m2 += w * x * x;
            }
        }
        (m0, m1, m2)
    }

    /// Quadratic tail `δ_X(t) = ∫_{|x| >= t} x² dF` (closed set: atoms at
    /// `|x| = t` are included). Non-increasing in `t`; at `t = 0` it equals
    /// the second moment.
    pub fn quadratic_tail(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("quadratic_tail requires t >= 0, got {t}")));
        }
        let total = self.moments().second_moment;
        // subtract the open interval (-t, t): boundary atoms belong to the tail
        let mut inside = match &self.continuous {
            Some(c) => {
                let (_, _, m2) = c.interval_moments(-t, t);
                self.continuous_weight * m2
            }
            None => 0.0,
        };
        for &(x, w) in &self.atoms {
            if x.abs() < t {
                inside += w * x * x;
            }
        }
        Ok((total - inside).max(0.0))
    }

    /// Probability `P(|X| >= t)` (closed set, consistent with
    /// [`Self::quadratic_tail`]).
    pub fn abs_tail_probability(&self, t: f64) -> f64 {
        let mut inside = match &self.continuous {
            Some(c) => {
                let (m0, _, _) = c.interval_moments(-t, t);
                self.continuous_weight * m0
            }
            None => 0.0,
        };
        for &(x, w) in &self.atoms {
            if x.abs() < t {
                inside += w;
            }
        }
        (1.0 - inside).clamp(0.0, 1.0)
    }

    /// Truncate at `N(eps) = 1 + sqrt(2 log(1/eps))`: mass strictly outside
    /// `[-N, N]` is relocated to an atom at 0.
    pub fn truncate(&self, eps: f64) -> Result<TruncationSummary> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain(format!(
                "truncate requires eps in (0,1), got {eps}"
            )));
        }
        let big_n = 1.0 + (2.0 * (1.0 / eps).ln()).sqrt();
        let (kept_mass, a1_raw, m2_raw) = self.interval_moments_closed(-big_n, big_n);
        let a1 = a1_raw; // already the integral of x over [-N, N]
        let sigma1_sq = (m2_raw - a1 * a1).max(0.0);
        let relocated = (1.0 - kept_mass).max(0.0);

        let mut atoms: Vec<(f64, f64)> = self
            .atoms
            .iter()
            .filter(|&&(x, _)| x.abs() <= big_n)
            .copied()
            .collect();
        if relocated > 1e-15 {
            atoms.push((0.0, relocated));
        }
        let (continuous, cont_weight) = match &self.continuous {
            None => (None, 0.0),
            Some(part) => {
                let (lo, hi) = part.window(1e-16);
                if lo >= -big_n && hi <= big_n {
                    // support already inside the window
                    (self.continuous.clone(), self.continuous_weight)
                } else {
                    let (m0, _, _) = part.interval_moments(-big_n, big_n);
                    let kept_cont = self.continuous_weight * m0;
                    if kept_cont <= 1e-15 {
                        (None, 0.0)
                    } else {
                        let clipped = clip_continuous(part, -big_n, big_n, m0)?;
                        (Some(clipped), kept_cont)
                    }
                }
            }
        };
        // Guard against rounding: make weights sum to 1 exactly by adjusting
        // the relocated atom (it absorbs the clipping error).
        let mut d = Distribution::new(atoms, continuous, cont_weight)?;
        let total = d.total_atom_weight() + d.continuous_weight;
        if (total - 1.0).abs() > 0.0 {
            if let Some(a) = d.atoms.iter_mut().find(|a| a.0 == 0.0) {
                a.1 += 1.0 - total;
                a.1 = a.1.max(0.0);
            }
        }
        Ok(TruncationSummary { eps, big_n, a1, sigma1_sq, truncated: d })
    }

    /// Law of `lambda * X + shift`.
    pub fn scale_shift(&self, lambda: f64, shift: f64) -> Result<Distribution> {
        if lambda == 0.0 || !lambda.is_finite() || !shift.is_finite() {
            return Err(Error::Domain(format!(
                "scale_shift requires finite lambda != 0, got lambda={lambda}, shift={shift}"
            )));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|&(x, w)| (lambda * x + shift, w))
            .collect();
        let continuous = match &self.continuous {
            None => None,
            Some(ContinuousPart::Mixture(m)) => {
                let comps = m
                    .components
                    .iter()
                    .map(|c| MixtureComponent {
                        mean: lambda * c.mean + shift,
                        sd: lambda.abs() * c.sd,
                        weight: c.weight,
                    })
                    .collect();
                Some(ContinuousPart::Mixture(GaussianMixtureDensity::new(comps)?))
            }
            Some(ContinuousPart::Grid(g)) => {
                let n = g.values.len();
                let scale = lambda.abs();
                let mut values: Vec<f64> = g.values.iter().map(|v| v / scale).collect();
                let x0 = if lambda > 0.0 {
                    lambda * g.x0 + shift
                } else {
                    values.reverse();
                    lambda * (g.x0 + g.step * (n - 1) as f64) + shift
                };
                Some(ContinuousPart::Grid(GridDensity::new(x0, scale * g.step, values)?))
            }
        };
        let mut out = Distribution::new(atoms, continuous, self.continuous_weight)?;
        out.diagnostics = self.diagnostics;
        Ok(out)
    }

    /// Smallest `x` with `cdf(x) >= 1/2`.
    pub fn median(&self) -> f64 {
        // an atom straddling the 1/2 level is the median
        for &(x, _) in &self.atoms {
            if self.cdf(x) >= 0.5 && self.cdf_left(x) < 0.5 {
                return x;
            }
        }
        let (lo, hi) = self.support_window(1e-14);
        if self.cdf(lo) >= 0.5 {
            return lo;
        }
        numerics::bisect_monotone(|x| self.cdf(x) - 0.5, lo, hi, 1e-12).unwrap_or(0.0)
    }

    /// Window containing all atoms and all but at most `tail_cutoff` of the
    /// continuous mass. Exact for compactly supported parts.
    pub fn support_window(&self, tail_cutoff: f64) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(x, _) in &self.atoms {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        if let Some(c) = &self.continuous {
            let (clo, chi) = c.window(tail_cutoff);
            lo = lo.min(clo);
            hi = hi.max(chi);
        }
        if lo > hi {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    fn continuous_window(&self, tail_cutoff: f64) -> (f64, f64) {
        match &self.continuous {
            Some(c) => c.window(tail_cutoff),
            None => (0.0, 0.0),
        }
    }

    /// Law of `X + Y` for independent `X ~ self`, `Y ~ other`.
    pub fn convolve(&self, other: &Distribution) -> Result<Distribution> {
        convolve::convolve(self, other)
    }

    /// Gaussian regularization helper: all candidate "kink" points of the
    /// CDF (atom locations and grid knots) for sup-style evaluations.
    pub fn cdf_knots(&self, max_points: usize) -> Vec<f64> {
        let mut pts: Vec<f64> = self.atoms.iter().map(|&(x, _)| x).collect();
        if let Some(ContinuousPart::Grid(g)) = &self.continuous {
            let n = g.values.len();
            if n <= max_points {
                pts.extend(g.knots());
            } else {
                let stride = n / max_points + 1;
                pts.extend((0..n).step_by(stride).map(|i| g.x0 + g.step * i as f64));
            }
        }
        pts
    }
}

/// Restrict a continuous part to `[lo, hi]` and renormalize to mass 1.
/// `kept` is the mass of the part inside the window (used as the divisor).
fn clip_continuous(part: &ContinuousPart, lo: f64, hi: f64, kept: f64) -> Result<ContinuousPart> {
    match part {
        ContinuousPart::Grid(g) => {
            let (slo, shi) = g.support();
            let a = lo.max(slo);
            let b = hi.min(shi);
            let n = (((b - a) / g.step).ceil() as usize + 2).max(3);
            let step = (b - a) / (n - 1) as f64;
            let values: Vec<f64> = (0..n)
                .map(|i| g.pdf_at(a + step * i as f64) / kept)
                .collect();
            let (grid, _) = GridDensity::normalized(a, step, values)?;
            Ok(ContinuousPart::Grid(grid))
        }
        ContinuousPart::Mixture(m) => {
            // a clipped mixture is no longer a mixture: sample it on a grid
            let (wlo, whi) = m.window(1e-14);
            let a = lo.max(wlo);
            let b = hi.min(whi);
            let min_sd = m
                .components
                .iter()
                .map(|c| c.sd)
                .fold(f64::INFINITY, f64::min);
            let step_target = (min_sd / 64.0).min((b - a) / 512.0);
            let n = (((b - a) / step_target).ceil() as usize + 1).clamp(3, 400_000);
            let step = (b - a) / (n - 1) as f64;
            let values: Vec<f64> = (0..n)
                .map(|i| m.pdf_at(a + step * i as f64) / kept)
                .collect();
            let (grid, _) = GridDensity::normalized(a, step, values)?;
            Ok(ContinuousPart::Grid(grid))
        }
    }
}

#[cfg(test)]
mod tests;
