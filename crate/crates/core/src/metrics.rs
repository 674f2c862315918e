//! The four classical metrics (Lévy, Kolmogorov, Kantorovich `W₁`, total
//! variation), the entropic distance to the matched normal, the uniform
//! density deviation `Δ(X)`, and the entropy functional `Ent_μ(f)`.

use crate::distributions::Distribution;
use crate::numerics::{self, normal_pdf, Tolerances};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// How a metric value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "bisection")]
    Bisection,
    #[serde(rename = "quadrature")]
    Quadrature,
    #[serde(rename = "closed-form")]
    ClosedForm,
    #[serde(rename = "grid-sup")]
    GridSup,
}

/// A computed distance with its numerical-error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: f64,
    pub err_estimate: f64,
    pub method: Method,
}

/// Entropic distance `D(X) = h(Z) - h(X)` against the normal with matched
/// mean and variance. `value` is `+inf` for laws with an atomic part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropicValue {
    pub value: f64,
    pub err_estimate: f64,
    /// `(a, sigma)` of the reference normal: `a = mean(X)`, `sigma² = Var(X)`.
    pub centering: (f64, f64),
}

/// Result of [`uniform_deviation`]: tiny negative suprema are clamped to 0
/// and flagged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformDeviation {
    pub value: f64,
    pub clamped: bool,
}

/// Candidate evaluation points for sup-style scans: a uniform grid over the
/// combined support window plus every atom location and (subsampled) grid
/// knot of both laws.
fn sup_candidates(f: &Distribution, g: &Distribution, tol: &Tolerances) -> Vec<f64> {
    let (flo, fhi) = f.support_window(tol.tail_cutoff);
    let (glo, ghi) = g.support_window(tol.tail_cutoff);
    let lo = flo.min(glo);
    let hi = fhi.max(ghi);
    let n = tol.sup_grid_points;
    let mut pts = Vec::with_capacity(n + 64);
    if hi > lo {
        let step = (hi - lo) / (n - 1) as f64;
        pts.extend((0..n).map(|i| lo + step * i as f64));
    } else {
        pts.push(lo);
    }
    pts.extend(f.cdf_knots(n / 4));
    pts.extend(g.cdf_knots(n / 4));
    pts
}

/// Kolmogorov distance `sup_x |F(x) - G(x)|`, evaluating both the CDF and its
/// left limit at every candidate point, then refining around the argmax.
pub fn kolmogorov(f: &Distribution, g: &Distribution, tol: &Tolerances) -> MetricValue {
    let pts = sup_candidates(f, g, tol);
    let eval = |x: f64| {
        let right = (f.cdf(x) - g.cdf(x)).abs();
        let left = (f.cdf_left(x) - g.cdf_left(x)).abs();
        right.max(left)
    };
    let mut best = 0.0f64;
    let mut best_x = pts.first().copied().unwrap_or(0.0);
    for &x in &pts {
        let v = eval(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    // local refinement around the argmax
    let (flo, fhi) = f.support_window(tol.tail_cutoff);
    let (glo, ghi) = g.support_window(tol.tail_cutoff);
    let span = (fhi.max(ghi) - flo.min(glo)).max(1e-12);
    let mut h = span / (tol.sup_grid_points - 1) as f64;
    let mut improvement = 0.0f64;
    for _ in 0..8 {
        let lo = best_x - h;
        let step = 2.0 * h / 16.0;
        let mut round_best = best;
        let mut round_x = best_x;
        for i in 0..=16 {
            let x = lo + step * i as f64;
            let v = eval(x);
            if v > round_best {
                round_best = v;
                round_x = x;
            }
        }
        improvement = round_best - best;
        best = round_best;
        best_x = round_x;
        h = step;
    }
    MetricValue {
        value: best.min(1.0),
        err_estimate: improvement.max(1e-12),
        method: Method::GridSup,
    }
}

/// Lévy distance: the smallest `h >= 0` with
/// `G(x-h) - h <= F(x) <= G(x+h) + h` for all `x`, found by bisection on the
/// feasibility predicate. Feasibility is checked at grid knots, atom
/// locations, their `±h` translates, and a uniform grid, using left limits
/// at jumps.
pub fn levy(f: &Distribution, g: &Distribution, tol: &Tolerances) -> MetricValue {
    let base = sup_candidates(f, g, tol);
    let f_knots = f.cdf_knots(tol.sup_grid_points / 4);
    let g_knots = g.cdf_knots(tol.sup_grid_points / 4);

    // max over x of F(x) - G(x+h) (both one-sided versions)
    let margin = |h: f64| -> f64 {
        let mut worst = f64::NEG_INFINITY;
        {
            let mut check = |x: f64| {
                let a = f.cdf(x) - g.cdf(x + h);
                let b = f.cdf_left(x) - g.cdf_left(x + h);
                worst = worst.max(a.max(b));
            };
            for &x in &base {
                check(x);
            }
            for &k in &g_knots {
                check(k - h);
            }
            for &k in &f_knots {
                check(k);
            }
        }
        {
            let mut check = |x: f64| {
                let a = g.cdf(x - h) - f.cdf(x);
                let b = g.cdf_left(x - h) - f.cdf_left(x);
                worst = worst.max(a.max(b));
            };
            for &x in &base {
                check(x);
            }
            for &k in &g_knots {
                check(k + h);
            }
            for &k in &f_knots {
                check(k);
            }
        }
        worst - h
    };

    if margin(0.0) <= 1e-12 {
        return MetricValue { value: 0.0, err_estimate: 0.0, method: Method::Bisection };
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while hi - lo > tol.root_tol {
        let mid = 0.5 * (lo + hi);
        if margin(mid) <= 1e-12 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    MetricValue {
        value: 0.5 * (lo + hi),
        err_estimate: tol.root_tol,
        method: Method::Bisection,
    }
}

/// Zeros of `h` located by a coarse scan plus bisection, used to split
/// absolute-value integrands at their kinks. Capped; near-identical inputs
/// produce noise-level sign flips that do not matter for the integral.
fn sign_change_knots<F: Fn(f64) -> f64>(h: F, lo: f64, hi: f64) -> Vec<f64> {
    const SCAN: usize = 4096;
    const CAP: usize = 256;
    let step = (hi - lo) / SCAN as f64;
    let mut knots = Vec::new();
    let mut prev_x = lo;
    let mut prev = h(lo);
    for i in 1..=SCAN {
        let x = lo + step * i as f64;
        let cur = h(x);
        if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
            let mut a = prev_x;
            let mut b = x;
            let mut ha = prev;
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                let hm = h(m);
                if hm == 0.0 {
                    a = m;
                    break;
                }
                if hm.signum() == ha.signum() {
                    a = m;
                    ha = hm;
                } else {
                    b = m;
                }
                if b - a < 1e-13 * (1.0 + m.abs()) {
                    break;
                }
            }
            knots.push(0.5 * (a + b));
            if knots.len() >= CAP {
                break;
            }
        }
        prev_x = x;
        prev = cur;
    }
    knots
}

/// Kantorovich distance `W₁(F, G) = ∫ |F - G| dx`. The quadrature window is
/// the combined support window; the Chebyshev tail bound `B²/x²` on
/// `|F - G|` outside it is folded into the error estimate.
pub fn w1(f: &Distribution, g: &Distribution, tol: &Tolerances) -> MetricValue {
    let (flo, fhi) = f.support_window(tol.tail_cutoff);
    let (glo, ghi) = g.support_window(tol.tail_cutoff);
    let lo = flo.min(glo);
    let hi = fhi.max(ghi);
    let mut knots: Vec<f64> = f.atoms().iter().chain(g.atoms()).map(|&(x, _)| x).collect();
    knots.extend(f.cdf_knots(4096));
    knots.extend(g.cdf_knots(4096));
    // |F - G| has kinks where the CDFs cross
    knots.extend(sign_change_knots(|x| f.cdf(x) - g.cdf(x), lo, hi));
    let integrand = |x: f64| (f.cdf(x) - g.cdf(x)).abs();
    let q = numerics::integrate_with_knots(integrand, lo, hi, &knots, tol.quad_abs_tol)
        .unwrap_or_else(|e| match e {
            Error::QuadratureNonConvergence { partial, err_estimate } => {
                numerics::Quad { value: partial, err_estimate }
            }
            _ => numerics::Quad { value: 0.0, err_estimate: f64::INFINITY },
        });
    let b_sq = f
        .moments()
        .second_moment
        .max(g.moments().second_moment);
    let mut tail = 0.0;
    if lo < 0.0 {
        tail += b_sq / lo.abs().max(1e-300);
    }
    if hi > 0.0 {
        tail += b_sq / hi.max(1e-300);
    }
    // the window already holds all but tail_cutoff of each mass, so the
    // Chebyshev bound is extremely conservative; cap it by that mass bound
    let width_bound = 4.0 * tol.tail_cutoff * (hi - lo).abs().max(1.0);
    MetricValue {
        value: q.value,
        err_estimate: q.err_estimate + tail.min(width_bound.max(1e-12)),
        method: Method::Quadrature,
    }
}

/// Total variation distance of the signed measure `F - G`:
/// atom-weight differences plus the `L¹` distance of the weighted densities.
/// Takes values in `[0, 2]`.
pub fn tv(f: &Distribution, g: &Distribution, tol: &Tolerances) -> MetricValue {
    let mut atom_part = 0.0;
    let mut locs: Vec<f64> = f.atoms().iter().chain(g.atoms()).map(|&(x, _)| x).collect();
    locs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    locs.dedup();
    for &x in &locs {
        atom_part += (f.atom_weight_at(x) - g.atom_weight_at(x)).abs();
    }
    let (value, err) = if f.continuous().is_none() && g.continuous().is_none() {
        (atom_part, 0.0)
    } else {
        let (flo, fhi) = f.support_window(tol.tail_cutoff);
        let (glo, ghi) = g.support_window(tol.tail_cutoff);
        let lo = flo.min(glo);
        let hi = fhi.max(ghi);
        let mut knots = f.continuous().map(|c| c.kink_knots()).unwrap_or_default();
        knots.extend(g.continuous().map(|c| c.kink_knots()).unwrap_or_default());
        // |p - q| has kinks where the densities cross
        knots.extend(sign_change_knots(|x| f.pdf_at(x) - g.pdf_at(x), lo, hi));
        let integrand = |x: f64| (f.pdf_at(x) - g.pdf_at(x)).abs();
        let q = numerics::integrate_with_knots(integrand, lo, hi, &knots, tol.quad_abs_tol)
            .unwrap_or_else(|e| match e {
                Error::QuadratureNonConvergence { partial, err_estimate } => {
                    numerics::Quad { value: partial, err_estimate }
                }
                _ => numerics::Quad { value: 0.0, err_estimate: f64::INFINITY },
            });
        (atom_part + q.value, q.err_estimate + 2.0 * tol.tail_cutoff)
    };
    MetricValue {
        value: value.clamp(0.0, 2.0),
        err_estimate: err,
        method: Method::Quadrature,
    }
}

/// Entropic distance `D(X) = ∫ p log(p / φ_{a,σ})` with `a = mean(X)` and
/// `σ² = Var(X)`. Laws with an atomic part get the distinguished value
/// `+inf`; zero variance is a domain error.
pub fn entropic_distance(d: &Distribution, tol: &Tolerances) -> Result<EntropicValue> {
    let m = d.moments();
    if !(m.variance > 0.0) {
        return Err(Error::Domain(
            "entropic_distance requires positive variance".into(),
        ));
    }
    let sigma = m.variance.sqrt();
    if d.total_atom_weight() > 0.0 {
        return Ok(EntropicValue {
            value: f64::INFINITY,
            err_estimate: 0.0,
            centering: (m.mean, sigma),
        });
    }
    let (lo, hi) = d.support_window(tol.tail_cutoff);
    let knots = d
        .continuous()
        .map(|c| c.kink_knots())
        .unwrap_or_default();
    let integrand = |x: f64| {
        let p = d.pdf_at(x);
        if p < 1e-300 {
            0.0
        } else {
            p * (p / normal_pdf(x, m.mean, sigma)).ln()
        }
    };
    let q = numerics::integrate_with_knots(integrand, lo, hi, &knots, tol.quad_abs_tol)?;
    Ok(EntropicValue {
        value: q.value.max(0.0),
        err_estimate: q.err_estimate,
        centering: (m.mean, sigma),
    })
}

/// Uniform deviation `Δ(X) = sup_x (p(x) - φ_v(x))` with `v² = Var(X)` and
/// `φ_v` the centred normal density (the functional is defined for laws
/// already shifted to mean zero). Purely continuous laws only.
pub fn uniform_deviation(d: &Distribution, tol: &Tolerances) -> Result<UniformDeviation> {
    if d.total_atom_weight() > 0.0 {
        return Err(Error::Domain(
            "uniform_deviation requires a purely continuous law".into(),
        ));
    }
    let m = d.moments();
    if !(m.variance > 0.0) {
        return Err(Error::Domain(
            "uniform_deviation requires positive variance".into(),
        ));
    }
    let v = m.variance.sqrt();
    let gap = |x: f64| d.pdf_at(x) - normal_pdf(x, 0.0, v);
    let (lo, hi) = d.support_window(tol.tail_cutoff);
    let lo = lo.min(-4.0 * v);
    let hi = hi.max(4.0 * v);
    let n = tol.sup_grid_points;
    let step = (hi - lo) / (n - 1) as f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_x = lo;
    for i in 0..n {
        let x = lo + step * i as f64;
        let vl = gap(x);
        if vl > best {
            best = vl;
            best_x = x;
        }
    }
    let refined = refine_max(gap, best_x - step, best_x + step, 60);
    let raw = best.max(refined);
    Ok(UniformDeviation { value: raw.max(0.0), clamped: raw < 0.0 })
}

/// Golden-section maximization of a locally unimodal function.
pub(crate) fn refine_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// Expectation `E_μ f` over a mixed law by atom summation plus quadrature.
pub fn expect<F: Fn(f64) -> f64>(mu: &Distribution, f: F, tol: &Tolerances) -> Result<f64> {
    let mut acc = 0.0;
    for &(x, w) in mu.atoms() {
        acc += w * f(x);
    }
    if let Some(c) = mu.continuous() {
        let (lo, hi) = mu.support_window(tol.tail_cutoff);
        let knots = c.kink_knots();
        let q = numerics::integrate_with_knots(
            |x| f(x) * mu.pdf_at(x),
            lo,
            hi,
            &knots,
            tol.quad_abs_tol,
        )?;
        acc += q.value;
    }
    Ok(acc)
}

/// Entropy functional `Ent_μ(f) = E_μ f log f - E_μ f log E_μ f` for `f >= 0`.
pub fn entropy_functional<F: Fn(f64) -> f64>(
    f: F,
    mu: &Distribution,
    tol: &Tolerances,
) -> Result<f64> {
    let mean = expect(mu, &f, tol)?;
    if !mean.is_finite() || mean <= 0.0 {
        return Err(Error::Domain(format!(
            "entropy_functional requires 0 < E_mu f < inf, got {mean}"
        )));
    }
    let xlogx = |t: f64| if t <= 0.0 { 0.0 } else { t * t.ln() };
    let e_flogf = expect(mu, |x| xlogx(f(x)), tol)?;
    Ok((e_flogf - mean * mean.ln()).max(0.0))
}
