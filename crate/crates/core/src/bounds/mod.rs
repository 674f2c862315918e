//! The inequality catalogue: every stability bound as an evaluatable entry
//! with explicit LHS/RHS recipes, preconditions, and a constant mode for
//! statements whose absolute constant is unspecified (evaluated with `C = 1`
//! and reported as a ratio instead of a verdict).

mod catalogue;

pub use catalogue::{entries, evaluate_bound, valid_ids};

use crate::distributions::Distribution;
use crate::metrics;
use crate::numerics::Tolerances;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Inequality direction. Most entries are upper bounds `lhs <= C·rhs`;
/// the exponential stability results are lower bounds `lhs >= exp(-C·A)`,
/// whose ratio is reported in exponent-normalized form so it stays finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "upper")]
    Upper,
    #[serde(rename = "lower-exponential")]
    LowerExponential,
}

/// What inputs an entry consumes (drives the suite runner).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputShape {
    Single,
    SingleT,
    Pair,
    PairSigma,
    PairT,
    PairEps,
    SigmaV,
    ShiftSigma,
}

/// Static description of one catalogue entry.
#[derive(Debug, Clone, Copy)]
pub struct BoundSpec {
    pub id: &'static str,
    /// What the inequality says, in terms of the quantities computed here.
    pub description: &'static str,
    pub requires: &'static [&'static str],
    pub constant_mode: bool,
    pub direction: Direction,
    pub shape: InputShape,
}

/// Inputs for [`evaluate_bound`]; which fields are read depends on the
/// entry's [`InputShape`].
#[derive(Debug, Clone, Copy, Default)]
pub struct BoundInputs<'a> {
    pub x: Option<&'a Distribution>,
    pub y: Option<&'a Distribution>,
    pub sigma: Option<f64>,
    pub t: Option<f64>,
    pub eps: Option<f64>,
    pub shift: Option<f64>,
    pub v: Option<f64>,
    /// Name of the distribution input(s) for report descriptors.
    pub label: Option<&'a str>,
}

impl<'a> BoundInputs<'a> {
    pub fn single(x: &'a Distribution) -> Self {
        BoundInputs { x: Some(x), ..Default::default() }
    }

    pub fn pair(x: &'a Distribution, y: &'a Distribution) -> Self {
        BoundInputs { x: Some(x), y: Some(y), ..Default::default() }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = Some(sigma);
        self
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = Some(eps);
        self
    }

    pub fn scalars(sigma: f64, v: f64) -> Self {
        BoundInputs { sigma: Some(sigma), v: Some(v), ..Default::default() }
    }

    pub fn shift_sigma(shift: f64, sigma: f64) -> Self {
        BoundInputs { shift: Some(shift), sigma: Some(sigma), ..Default::default() }
    }

    pub fn with_label(mut self, label: &'a str) -> Self {
        self.label = Some(label);
        self
    }
}

/// One evaluated inequality instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckReport {
    pub bound_id: String,
    pub input_descriptor: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs/rhs` for upper bounds; exponent-normalized constant for
    /// lower-exponential bounds. `None` when undefined (`rhs = 0`).
    pub ratio: Option<f64>,
    /// Verdict for explicit-constant entries; `None` in constant mode.
    pub satisfied: Option<bool>,
    pub err_budget: f64,
    pub constant_mode: bool,
    pub direction: Direction,
    /// Standardizations applied and other evaluation remarks.
    pub notes: Vec<String>,
}

/// `m(σ, ε) = min(1/√σ, log log(e^e/ε))`.
pub fn m_fn(sigma: f64, eps: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("m_fn requires sigma > 0, got {sigma}")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("m_fn requires eps in (0, 1], got {eps}")));
    }
    let loglog = (std::f64::consts::E + (1.0 / eps).ln()).ln();
    Ok((1.0 / sigma.sqrt()).min(loglog))
}

/// `N(ε) = 1 + sqrt(2 log(1/ε))`.
pub fn big_n(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("big_n requires eps in (0,1), got {eps}")));
    }
    Ok(1.0 + (2.0 * (1.0 / eps).ln()).sqrt())
}

/// `R(t) = sqrt(t log(2/t))` on `0 < t <= 2`.
pub fn r_fn(t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 2.0) {
        return Err(Error::Domain(format!("r_fn requires t in (0, 2], got {t}")));
    }
    Ok((t * (2.0 / t).ln()).sqrt())
}

/// Evaluation context: accumulates error estimates of constituent metric
/// computations and standardization notes.
pub(crate) struct Ctx {
    pub tol: Tolerances,
    pub errs: f64,
    pub notes: Vec<String>,
}

impl Ctx {
    pub fn new(tol: &Tolerances) -> Self {
        Ctx { tol: *tol, errs: 0.0, notes: Vec::new() }
    }

    pub fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    pub fn kolmogorov(&mut self, f: &Distribution, g: &Distribution) -> f64 {
        let m = metrics::kolmogorov(f, g, &self.tol);
        self.errs += m.err_estimate;
        m.value
    }

    pub fn levy(&mut self, f: &Distribution, g: &Distribution) -> f64 {
        let m = metrics::levy(f, g, &self.tol);
        self.errs += m.err_estimate;
        m.value
    }

    pub fn w1(&mut self, f: &Distribution, g: &Distribution) -> f64 {
        let m = metrics::w1(f, g, &self.tol);
        self.errs += m.err_estimate;
        m.value
    }

    pub fn tv(&mut self, f: &Distribution, g: &Distribution) -> f64 {
        let m = metrics::tv(f, g, &self.tol);
        self.errs += m.err_estimate;
        m.value
    }

    pub fn entropic(&mut self, d: &Distribution) -> Result<f64> {
        let e = metrics::entropic_distance(d, &self.tol)?;
        self.errs += e.err_estimate;
        Ok(e.value)
    }

    pub fn uniform_deviation(&mut self, d: &Distribution) -> Result<f64> {
        let u = metrics::uniform_deviation(d, &self.tol)?;
        Ok(u.value)
    }

    pub fn err_budget(&self) -> f64 {
        3.0 * self.errs
    }
}

pub(crate) fn precondition(bound_id: &str, requirement: impl Into<String>) -> Error {
    Error::PreconditionUnmet { bound_id: bound_id.to_string(), requirement: requirement.into() }
}

/// Shift a law to mean zero. Returns the applied shift.
pub(crate) fn center(d: &Distribution) -> Result<(Distribution, f64)> {
    let mean = d.moments().mean;
    if mean == 0.0 {
        return Ok((d.clone(), 0.0));
    }
    Ok((d.scale_shift(1.0, -mean)?, -mean))
}

/// Shift both laws to mean zero and rescale jointly so `Var(X+Y) = 1`.
pub(crate) fn standardize_pair_total_var(
    id: &str,
    x: &Distribution,
    y: &Distribution,
    ctx: &mut Ctx,
) -> Result<(Distribution, Distribution)> {
    let (xc, sx) = center(x)?;
    let (yc, sy) = center(y)?;
    let b_sq = xc.moments().variance + yc.moments().variance;
    if !(b_sq > 0.0) {
        return Err(precondition(id, "Var(X+Y) > 0"));
    }
    let scale = 1.0 / b_sq.sqrt();
    if sx != 0.0 || sy != 0.0 || (scale - 1.0).abs() > 1e-12 {
        ctx.note(format!(
            "standardized: shifts ({sx:.6e}, {sy:.6e}), joint scale {scale:.6e}"
        ));
    }
    Ok((xc.scale_shift(scale, 0.0)?, yc.scale_shift(scale, 0.0)?))
}

/// Shift and rescale each law separately to mean zero, variance one.
pub(crate) fn standardize_marginals(
    id: &str,
    x: &Distribution,
    y: &Distribution,
    ctx: &mut Ctx,
) -> Result<(Distribution, Distribution)> {
    let std1 = |d: &Distribution| -> Result<Distribution> {
        let m = d.moments();
        if !(m.variance > 0.0) {
            return Err(precondition(id, "positive marginal variances"));
        }
        d.scale_shift(1.0, -m.mean)?
            .scale_shift(1.0 / m.variance.sqrt(), 0.0)
    };
    let xs = std1(x)?;
    let ys = std1(y)?;
    if xs != *x || ys != *y {
        ctx.note("standardized marginals to mean 0, variance 1".into());
    }
    Ok((xs, ys))
}

/// Shift the pair by the median of `X`, preserving the sum: `X - m, Y + m`.
pub(crate) fn median_shift_pair(
    x: &Distribution,
    y: &Distribution,
    ctx: &mut Ctx,
) -> Result<(Distribution, Distribution)> {
    let m = x.median();
    if m == 0.0 {
        return Ok((x.clone(), y.clone()));
    }
    ctx.note(format!("shifted pair by median(X) = {m:.6e} to make median(X) zero"));
    Ok((x.scale_shift(1.0, -m)?, y.scale_shift(1.0, m)?))
}

/// `Δ log^{3/2}(2 + 1/(scale·Δ))`, continuously extended by 0 at `Δ = 0`.
pub(crate) fn delta_log_term(delta: f64, scale: f64) -> f64 {
    if delta <= 0.0 {
        0.0
    } else {
        delta * (2.0 + 1.0 / (scale * delta)).ln().powf(1.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_fn_reference_values() {
        assert_eq!(m_fn(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(m_fn(0.25, 1.0).unwrap(), 1.0);
        // min(10, log(e + 6 log 10)) — frozen from direct evaluation
        let v = m_fn(0.01, 1e-6).unwrap();
        assert!((v - 2.805_406_309_985_185).abs() < 1e-12, "{v}");
    }

    #[test]
    fn m_fn_domain() {
        assert!(m_fn(0.0, 0.5).is_err());
        assert!(m_fn(1.0, 0.0).is_err());
        assert!(m_fn(1.0, 1.1).is_err());
    }

    #[test]
    fn big_n_reference_values() {
        assert!((big_n((-2.0f64).exp()).unwrap() - 3.0).abs() < 1e-12);
        assert!((big_n(1.0 - 1e-12).unwrap() - 1.0).abs() < 2e-6);
        let v = big_n(0.01).unwrap();
        assert!((v - 4.034_854_258_770_293).abs() < 1e-12, "{v}");
        assert!(big_n(0.0).is_err());
        assert!(big_n(1.0).is_err());
    }

    #[test]
    fn r_fn_reference_values() {
        assert_eq!(r_fn(2.0).unwrap(), 0.0);
        let v = r_fn(1.0).unwrap();
        assert!((v - 0.832_554_611_157_697_8).abs() < 1e-12, "{v}");
        assert!(r_fn(0.0).is_err());
        assert!(r_fn(2.1).is_err());
    }

    #[test]
    fn r_fn_subadditive() {
        // R(ξ+η) <= R(ξ) + R(η) on a grid with ξ+η <= 2
        for i in 1..20 {
            for j in 1..20 {
                let xi = 0.05 * i as f64;
                let eta = 0.05 * j as f64;
                if xi + eta > 2.0 {
                    continue;
                }
                let lhs = r_fn(xi + eta).unwrap();
                let rhs = r_fn(xi).unwrap() + r_fn(eta).unwrap();
                assert!(lhs <= rhs + 1e-12, "subadditivity failed at ({xi}, {eta})");
            }
        }
    }

    #[test]
    fn delta_log_term_vanishes_at_zero() {
        assert_eq!(delta_log_term(0.0, 1.0), 0.0);
        assert!(delta_log_term(1e-12, 1.0) < 1e-9);
    }
}
