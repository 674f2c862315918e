//! Distribution-family generators, the suite runner, and empirical-constant
//! estimation over parameter grids.
//!
//! Families are deterministic: randomized members come from a counter-based
//! generator keyed by `rng_seed` (one stream per member), so a fixed spec
//! reproduces bit-identical suites on every platform.

use crate::bounds::{self, BoundCheckReport, BoundInputs, InputShape};
use crate::distributions::{Distribution, MixtureComponent};
use crate::numerics::Tolerances;
use crate::regularize::{regularize, RegularizationParams};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

fn default_sigmas() -> Vec<f64> {
    vec![0.25, 0.5, 1.0]
}

fn default_t_values() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 3.0, 4.0]
}

fn default_eps_values() -> Vec<f64> {
    vec![(-2.0f64).exp(), 1e-3]
}

fn default_seed() -> u64 {
    20_240_817
}

/// One family of laws (or of pairs) plus the parameter grids the suite
/// sweeps over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub members: Vec<MemberSpec>,
    #[serde(default)]
    pub pairing: Pairing,
    /// Regularization levels for bounds that smooth their inputs.
    #[serde(default = "default_sigmas")]
    pub sigmas: Vec<f64>,
    /// Tail thresholds for bounds taking a free `T`.
    #[serde(default = "default_t_values")]
    pub t_values: Vec<f64>,
    /// Closeness levels for bounds taking a free `eps`.
    #[serde(default = "default_eps_values")]
    pub eps_values: Vec<f64>,
    #[serde(default = "default_seed")]
    pub rng_seed: u64,
}

/// How two-input bounds pair up the generated singles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// `(m_i, m_{i+1})` for consecutive members.
    #[default]
    Adjacent,
    /// All ordered pairs of distinct members.
    AllOrdered,
    /// Adjacent pairs plus each member with itself.
    AdjacentAndSelf,
}

/// Generator for one batch of family members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "family", rename_all = "snake_case")]
pub enum MemberSpec {
    /// Symmetric two-point law `±a` with weight 1/2 each.
    TwoPoint { a: Vec<f64> },
    /// Centred uniform law with the given variance.
    Uniform { var: Vec<f64> },
    /// `(1-w) N(0,1) + w N(0, tau²)`, standardized to variance 1.
    ContaminatedNormal { w: Vec<f64>, tau: Vec<f64> },
    /// Random standardized Gaussian mixtures (2-4 components).
    GaussianMixtureRandom { draws: usize },
    /// Exact centred normal with the given variance.
    Normal { var: Vec<f64> },
    /// Convolutions of adjacent base members (as singles) and the
    /// corresponding base pairs.
    ConvolvedPair { base: Vec<MemberSpec> },
    /// Pairs of regularized adjacent base members, one pair per sigma.
    RegularizedPair { base: Vec<MemberSpec>, sigmas: Vec<f64> },
}

/// A named law.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub name: String,
    pub dist: Distribution,
}

/// A named ordered pair of laws.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberPair {
    pub name: String,
    pub x: Distribution,
    pub y: Distribution,
}

/// Generated family: singles for unary bounds, pairs for binary ones.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Family {
    pub singles: Vec<Member>,
    pub pairs: Vec<MemberPair>,
}

fn standardize(d: &Distribution) -> Result<Distribution> {
    let m = d.moments();
    if !(m.variance > 0.0) {
        return Err(Error::Config("family member has zero variance".into()));
    }
    d.scale_shift(1.0, -m.mean)?
        .scale_shift(1.0 / m.variance.sqrt(), 0.0)
}

fn generate_members(spec: &MemberSpec, seed: u64, out: &mut Vec<Member>) -> Result<()> {
    match spec {
        MemberSpec::TwoPoint { a } => {
            for &a in a {
                if !(a > 0.0) {
                    return Err(Error::Config(format!("two_point requires a > 0, got {a}")));
                }
                out.push(Member {
                    name: format!("two_point(a={a})"),
                    dist: Distribution::from_atoms(vec![(-a, 0.5), (a, 0.5)])?,
                });
            }
        }
        MemberSpec::Uniform { var } => {
            for &v in var {
                if !(v > 0.0) {
                    return Err(Error::Config(format!("uniform requires var > 0, got {v}")));
                }
                let r = (3.0 * v).sqrt();
                out.push(Member {
                    name: format!("uniform(var={v})"),
                    dist: Distribution::uniform(-r, r, 33)?,
                });
            }
        }
        MemberSpec::ContaminatedNormal { w, tau } => {
            for &w in w {
                for &tau in tau {
                    if !(w > 0.0 && w < 1.0 && tau > 0.0) {
                        return Err(Error::Config(format!(
                            "contaminated_normal requires 0 < w < 1 and tau > 0, got w={w}, tau={tau}"
                        )));
                    }
                    let d = Distribution::mixture(vec![
                        MixtureComponent { mean: 0.0, sd: 1.0, weight: 1.0 - w },
                        MixtureComponent { mean: 0.0, sd: tau, weight: w },
                    ])?;
                    out.push(Member {
                        name: format!("contaminated_normal(w={w},tau={tau})"),
                        dist: standardize(&d)?,
                    });
                }
            }
        }
        MemberSpec::GaussianMixtureRandom { draws } => {
            for i in 0..*draws {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64 + 1);
                let k = rng.gen_range(2..=4usize);
                let raw: Vec<(f64, f64, f64)> = (0..k)
                    .map(|_| {
                        (
                            rng.gen_range(-2.0..2.0),
                            rng.gen_range(0.3..1.5),
                            rng.gen_range(0.2..1.0),
                        )
                    })
                    .collect();
                let total: f64 = raw.iter().map(|c| c.2).sum();
                let d = Distribution::mixture(
                    raw.iter()
                        .map(|&(mean, sd, w)| MixtureComponent { mean, sd, weight: w / total })
                        .collect(),
                )?;
                out.push(Member {
                    name: format!("gaussian_mixture_random(seed={seed},draw={i})"),
                    dist: standardize(&d)?,
                });
            }
        }
        MemberSpec::Normal { var } => {
            for &v in var {
                if !(v > 0.0) {
                    return Err(Error::Config(format!("normal requires var > 0, got {v}")));
                }
                out.push(Member {
                    name: format!("normal(var={v})"),
                    dist: Distribution::normal(0.0, v.sqrt())?,
                });
            }
        }
        MemberSpec::ConvolvedPair { .. } | MemberSpec::RegularizedPair { .. } => {
            // handled by generate_family (these produce pairs)
        }
    }
    Ok(())
}

/// Generate the family deterministically.
pub fn generate_family(spec: &FamilySpec) -> Result<Family> {
    if spec.members.is_empty() {
        return Err(Error::Config("family has no member specs".into()));
    }
    let mut singles = Vec::new();
    let mut pairs = Vec::new();
    for m in &spec.members {
        match m {
            MemberSpec::ConvolvedPair { base } => {
                let mut base_members = Vec::new();
                for b in base {
                    generate_members(b, spec.rng_seed, &mut base_members)?;
                }
                if base_members.len() < 2 {
                    return Err(Error::Config(
                        "convolved_pair needs at least 2 base members".into(),
                    ));
                }
                for w in base_members.windows(2) {
                    let conv = w[0].dist.convolve(&w[1].dist)?;
                    singles.push(Member {
                        name: format!("conv({},{})", w[0].name, w[1].name),
                        dist: standardize(&conv)?,
                    });
                    pairs.push(MemberPair {
                        name: format!("pair({},{})", w[0].name, w[1].name),
                        x: w[0].dist.clone(),
                        y: w[1].dist.clone(),
                    });
                }
            }
            MemberSpec::RegularizedPair { base, sigmas } => {
                let mut base_members = Vec::new();
                for b in base {
                    generate_members(b, spec.rng_seed, &mut base_members)?;
                }
                if base_members.len() < 2 {
                    return Err(Error::Config(
                        "regularized_pair needs at least 2 base members".into(),
                    ));
                }
                for &s in sigmas {
                    let params = RegularizationParams::new(s).map_err(|_| {
                        Error::Config(format!("regularized_pair sigma out of range: {s}"))
                    })?;
                    for w in base_members.windows(2) {
                        pairs.push(MemberPair {
                            name: format!("reg_pair({},{},sigma={s})", w[0].name, w[1].name),
                            x: regularize(&w[0].dist, &params)?,
                            y: regularize(&w[1].dist, &params)?,
                        });
                    }
                }
            }
            simple => generate_members(simple, spec.rng_seed, &mut singles)?,
        }
    }
    match spec.pairing {
        Pairing::Adjacent => {
            for w in singles.windows(2) {
                pairs.push(MemberPair {
                    name: format!("pair({},{})", w[0].name, w[1].name),
                    x: w[0].dist.clone(),
                    y: w[1].dist.clone(),
                });
            }
        }
        Pairing::AllOrdered => {
            for a in &singles {
                for b in &singles {
                    if a.name != b.name {
                        pairs.push(MemberPair {
                            name: format!("pair({},{})", a.name, b.name),
                            x: a.dist.clone(),
                            y: b.dist.clone(),
                        });
                    }
                }
            }
        }
        Pairing::AdjacentAndSelf => {
            for w in singles.windows(2) {
                pairs.push(MemberPair {
                    name: format!("pair({},{})", w[0].name, w[1].name),
                    x: w[0].dist.clone(),
                    y: w[1].dist.clone(),
                });
            }
            for a in &singles {
                pairs.push(MemberPair {
                    name: format!("pair({},{})", a.name, a.name),
                    x: a.dist.clone(),
                    y: a.dist.clone(),
                });
            }
        }
    }
    Ok(Family { singles, pairs })
}

/// The default verification family: atomic, bounded-density, and
/// heavy-shoulder laws, which stress the tail, deviation, and entropic
/// functionals differently.
pub fn standard_family(seed: u64) -> FamilySpec {
    FamilySpec {
        members: vec![
            MemberSpec::TwoPoint { a: vec![1.0] },
            MemberSpec::Uniform { var: vec![1.0] },
            MemberSpec::ContaminatedNormal { w: vec![0.05, 0.1, 0.3], tau: vec![2.0, 3.0] },
            MemberSpec::GaussianMixtureRandom { draws: 5 },
        ],
        pairing: Pairing::Adjacent,
        sigmas: default_sigmas(),
        t_values: default_t_values(),
        eps_values: default_eps_values(),
        rng_seed: seed,
    }
}

/// On-disk suite configuration (strict parsing: unknown keys are rejected).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    /// Bound ids to run; omitted means the whole catalogue.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<String>>,
    pub family: FamilySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

/// A combination that could not be evaluated, with the exact unmet
/// precondition (or numerical failure) as the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedCheck {
    pub bound_id: String,
    pub input_descriptor: String,
    pub reason: String,
}

/// Reference to a failed explicit-constant report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub bound_id: String,
    pub input_descriptor: String,
    pub lhs: f64,
    pub rhs: f64,
}

/// Aggregate result of a suite run. Serialization is deterministic:
/// reports are sorted, maps are ordered, and no timing data is embedded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub library_version: String,
    pub bounds: Vec<String>,
    pub family: FamilySpec,
    pub tolerances: Tolerances,
    pub reports: Vec<BoundCheckReport>,
    pub skipped: Vec<SkippedCheck>,
    /// Supremum of observed ratios per constant-mode bound.
    pub empirical_constants: BTreeMap<String, f64>,
    pub violations: Vec<Violation>,
}

impl SuiteReport {
    pub fn has_violations(&self) -> bool {
        !self.violations.is_empty()
    }
}

enum Combo {
    One(usize),
    OneT(usize, f64),
    Two(usize),
    TwoSigma(usize, f64),
    TwoT(usize, f64),
    TwoEps(usize, f64),
    Scalars(f64, f64),
    Shift(f64, f64),
}

fn combos_for(shape: InputShape, family: &Family, spec: &FamilySpec) -> Vec<Combo> {
    let mut v = Vec::new();
    match shape {
        InputShape::Single => {
            v.extend((0..family.singles.len()).map(Combo::One));
        }
        InputShape::SingleT => {
            for i in 0..family.singles.len() {
                for &t in &spec.t_values {
                    v.push(Combo::OneT(i, t));
                }
            }
        }
        InputShape::Pair => {
            v.extend((0..family.pairs.len()).map(Combo::Two));
        }
        InputShape::PairSigma => {
            for i in 0..family.pairs.len() {
                for &s in &spec.sigmas {
                    v.push(Combo::TwoSigma(i, s));
                }
            }
        }
        InputShape::PairT => {
            for i in 0..family.pairs.len() {
                for &t in &spec.t_values {
                    v.push(Combo::TwoT(i, t));
                }
            }
        }
        InputShape::PairEps => {
            for i in 0..family.pairs.len() {
                for &e in &spec.eps_values {
                    v.push(Combo::TwoEps(i, e));
                }
            }
        }
        InputShape::SigmaV => {
            let mut sigma = 0.0f64;
            while sigma < 0.95 {
                let v_max = (sigma * sigma + 1.0).sqrt().min(1.5);
                let mut vv = sigma + 0.05;
                while vv <= v_max + 1e-12 {
                    v.push(Combo::Scalars(sigma, vv));
                    vv += 0.05;
                }
                sigma += 0.1;
            }
        }
        InputShape::ShiftSigma => {
            for &a in &[-2.0, -0.5, 0.5, 2.0] {
                for &s in &[0.5, 1.0, 2.0] {
                    v.push(Combo::Shift(a, s));
                }
            }
        }
    }
    v
}

fn eval_combo(
    id: &str,
    combo: &Combo,
    family: &Family,
    tol: &Tolerances,
) -> std::result::Result<BoundCheckReport, (String, String)> {
    let run = |inputs: BoundInputs<'_>, descriptor: String| {
        bounds::evaluate_bound(id, &inputs, tol).map_err(|e| {
            let reason = match &e {
                Error::PreconditionUnmet { requirement, .. } => requirement.clone(),
                other => format!("numerical error: {other}"),
            };
            (descriptor, reason)
        })
    };
    match combo {
        Combo::One(i) => {
            let m = &family.singles[*i];
            run(BoundInputs::single(&m.dist).with_label(&m.name), m.name.clone())
        }
        Combo::OneT(i, t) => {
            let m = &family.singles[*i];
            run(
                BoundInputs::single(&m.dist).with_label(&m.name).with_t(*t),
                format!("{}, T={t}", m.name),
            )
        }
        Combo::Two(i) => {
            let p = &family.pairs[*i];
            run(BoundInputs::pair(&p.x, &p.y).with_label(&p.name), p.name.clone())
        }
        Combo::TwoSigma(i, s) => {
            let p = &family.pairs[*i];
            run(
                BoundInputs::pair(&p.x, &p.y).with_label(&p.name).with_sigma(*s),
                format!("{}, sigma={s}", p.name),
            )
        }
        Combo::TwoT(i, t) => {
            let p = &family.pairs[*i];
            run(
                BoundInputs::pair(&p.x, &p.y).with_label(&p.name).with_t(*t),
                format!("{}, T={t}", p.name),
            )
        }
        Combo::TwoEps(i, e) => {
            let p = &family.pairs[*i];
            run(
                BoundInputs::pair(&p.x, &p.y).with_label(&p.name).with_eps(*e),
                format!("{}, eps={e}", p.name),
            )
        }
        Combo::Scalars(s, vv) => run(
            BoundInputs::scalars(*s, *vv),
            format!("normals, sigma={s}, v={vv}"),
        ),
        Combo::Shift(a, s) => run(
            BoundInputs::shift_sigma(*a, *s),
            format!("normal shift, a={a}, sigma={s}"),
        ),
    }
}

/// Evaluate the given bounds over every applicable family combination.
/// Inapplicable combinations are recorded as skips, never dropped.
pub fn run_suite(
    bound_ids: &[String],
    family_spec: &FamilySpec,
    tol: &Tolerances,
) -> Result<SuiteReport> {
    let specs: Vec<_> = bound_ids
        .iter()
        .map(|id| bounds::entries().iter().find(|e| e.id == id.as_str()).ok_or_else(|| {
            Error::UnknownBound { id: id.clone(), valid: bounds::valid_ids().join(", ") }
        }))
        .collect::<Result<_>>()?;
    let family = generate_family(family_spec)?;

    let tasks: Vec<(usize, Combo)> = specs
        .iter()
        .enumerate()
        .flat_map(|(bi, spec)| {
            combos_for(spec.shape, &family, family_spec)
                .into_iter()
                .map(move |c| (bi, c))
        })
        .collect();

    let outcomes: Vec<_> = tasks
        .par_iter()
        .map(|(bi, combo)| (*bi, eval_combo(specs[*bi].id, combo, &family, tol)))
        .collect();

    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for (bi, outcome) in outcomes {
        match outcome {
            Ok(r) => reports.push(r),
            Err((descriptor, reason)) => skipped.push(SkippedCheck {
                bound_id: specs[bi].id.to_string(),
                input_descriptor: descriptor,
                reason,
            }),
        }
    }
    reports.sort_by(|a, b| {
        (a.bound_id.as_str(), a.input_descriptor.as_str())
            .cmp(&(b.bound_id.as_str(), b.input_descriptor.as_str()))
    });
    skipped.sort_by(|a, b| {
        (a.bound_id.as_str(), a.input_descriptor.as_str())
            .cmp(&(b.bound_id.as_str(), b.input_descriptor.as_str()))
    });

    let mut empirical_constants = BTreeMap::new();
    for r in &reports {
        if r.constant_mode {
            if let Some(ratio) = r.ratio {
                if ratio.is_finite() {
                    let slot = empirical_constants
                        .entry(r.bound_id.clone())
                        .or_insert(f64::NEG_INFINITY);
                    *slot = slot.max(ratio);
                }
            }
        }
    }
    let violations = reports
        .iter()
        .filter(|r| r.satisfied == Some(false))
        .map(|r| Violation {
            bound_id: r.bound_id.clone(),
            input_descriptor: r.input_descriptor.clone(),
            lhs: r.lhs,
            rhs: r.rhs,
        })
        .collect();

    Ok(SuiteReport {
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        bounds: bound_ids.to_vec(),
        family: family_spec.clone(),
        tolerances: *tol,
        reports,
        skipped,
        empirical_constants,
        violations,
    })
}

/// One ratio observation during constant estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub bound_id: String,
    pub family_member: String,
    pub ratio: f64,
    pub level: usize,
}

/// Result of [`estimate_constant`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub bound_id: String,
    /// Supremum of ratios over the family at the finest refinement level.
    pub empirical_c: f64,
    /// Relative change of the supremum between the two finest levels.
    pub stability: f64,
    pub records: Vec<EstimateRecord>,
}

/// Estimate the absolute constant of a constant-mode bound as the supremum
/// of observed ratios, refining grid and quadrature resolution per level.
pub fn estimate_constant(
    id: &str,
    family_spec: &FamilySpec,
    levels: usize,
    tol: &Tolerances,
) -> Result<EstimateResult> {
    let spec = bounds::entries()
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownBound {
            id: id.to_string(),
            valid: bounds::valid_ids().join(", "),
        })?;
    if !spec.constant_mode {
        return Err(Error::Config(format!(
            "{id} is not a constant-mode entry; estimate_constant applies only to bounds with an unspecified constant"
        )));
    }
    if levels < 2 {
        return Err(Error::Config("refinement_levels must be >= 2".into()));
    }
    let family = generate_family(family_spec)?;
    let n_members = match spec.shape {
        InputShape::Single | InputShape::SingleT => family.singles.len(),
        InputShape::SigmaV | InputShape::ShiftSigma => 3,
        _ => family.pairs.len(),
    };
    if n_members < 3 {
        return Err(Error::Config(format!(
            "family too small for constant estimation: {n_members} members (need >= 3)"
        )));
    }

    let mut records = Vec::new();
    let mut sups = Vec::new();
    for level in 0..levels {
        let level_tol = Tolerances {
            quad_abs_tol: tol.quad_abs_tol / 10f64.powi(level as i32),
            root_tol: tol.root_tol / 2f64.powi(level as i32),
            sup_grid_points: tol.sup_grid_points * (1 << level),
            tail_cutoff: tol.tail_cutoff,
        };
        let combos = combos_for(spec.shape, &family, family_spec);
        let level_records: Vec<_> = combos
            .par_iter()
            .filter_map(|c| match eval_combo(spec.id, c, &family, &level_tol) {
                Ok(r) => r.ratio.filter(|x| x.is_finite()).map(|ratio| EstimateRecord {
                    bound_id: spec.id.to_string(),
                    family_member: r.input_descriptor,
                    ratio,
                    level,
                }),
                Err(_) => None,
            })
            .collect();
        let sup = level_records
            .iter()
            .map(|r| r.ratio)
            .fold(f64::NEG_INFINITY, f64::max);
        if !sup.is_finite() {
            return Err(Error::Config(format!(
                "no applicable family member produced a finite ratio for {id}"
            )));
        }
        sups.push(sup);
        records.extend(level_records);
    }
    let last = sups[sups.len() - 1];
    let prev = sups[sups.len() - 2];
    let stability = if prev.abs() > 1e-300 {
        ((last - prev) / prev).abs()
    } else {
        (last - prev).abs()
    };
    Ok(EstimateResult {
        bound_id: id.to_string(),
        empirical_c: last,
        stability,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_family() -> FamilySpec {
        FamilySpec {
            members: vec![
                MemberSpec::TwoPoint { a: vec![1.0] },
                MemberSpec::Uniform { var: vec![1.0] },
                MemberSpec::ContaminatedNormal { w: vec![0.1], tau: vec![2.0] },
                MemberSpec::GaussianMixtureRandom { draws: 2 },
            ],
            pairing: Pairing::Adjacent,
            sigmas: vec![0.5],
            t_values: vec![2.0],
            eps_values: vec![(-2.0f64).exp()],
            rng_seed: 7,
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = small_family();
        let a = generate_family(&spec).unwrap();
        let b = generate_family(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generated_members_are_standardized() {
        let fam = generate_family(&small_family()).unwrap();
        assert_eq!(fam.singles.len(), 5);
        for m in &fam.singles {
            let mm = m.dist.moments();
            assert!(mm.mean.abs() < 1e-9, "{} mean {}", m.name, mm.mean);
            assert!((mm.variance - 1.0).abs() < 1e-8, "{} var {}", m.name, mm.variance);
        }
        assert_eq!(fam.pairs.len(), 4);
    }

    #[test]
    fn two_point_example() {
        let fam = generate_family(&FamilySpec {
            members: vec![MemberSpec::TwoPoint { a: vec![1.0] }],
            pairing: Pairing::Adjacent,
            sigmas: vec![],
            t_values: vec![],
            eps_values: vec![],
            rng_seed: 0,
        })
        .unwrap();
        assert_eq!(
            fam.singles[0].dist,
            Distribution::from_atoms(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap()
        );
    }

    #[test]
    fn contaminated_variance_arithmetic() {
        // raw variance 0.9 + 0.1 * 9 = 1.8, standardized back to 1
        let fam = generate_family(&FamilySpec {
            members: vec![MemberSpec::ContaminatedNormal { w: vec![0.1], tau: vec![3.0] }],
            pairing: Pairing::Adjacent,
            sigmas: vec![],
            t_values: vec![],
            eps_values: vec![],
            rng_seed: 0,
        })
        .unwrap();
        let m = fam.singles[0].dist.moments();
        assert!((m.variance - 1.0).abs() < 1e-12);
        // the pre-standardization law indeed has variance 1.8
        let raw = Distribution::mixture(vec![
            MixtureComponent { mean: 0.0, sd: 1.0, weight: 0.9 },
            MixtureComponent { mean: 0.0, sd: 3.0, weight: 0.1 },
        ])
        .unwrap();
        assert!((raw.moments().variance - 1.8).abs() < 1e-12);
    }

    #[test]
    fn empty_family_is_config_error() {
        let spec = FamilySpec {
            members: vec![],
            pairing: Pairing::Adjacent,
            sigmas: vec![],
            t_values: vec![],
            eps_values: vec![],
            rng_seed: 0,
        };
        assert!(matches!(generate_family(&spec), Err(Error::Config(_))));
        assert!(matches!(
            run_suite(&["CHAIN".into()], &spec, &Tolerances::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn run_suite_chain_on_small_family() {
        let report = run_suite(
            &["CHAIN".into()],
            &small_family(),
            &Tolerances::default(),
        )
        .unwrap();
        assert!(!report.reports.is_empty());
        assert!(report.violations.is_empty(), "{:?}", report.violations);
    }

    #[test]
    fn run_suite_records_skips_with_reason() {
        // P62 with T < 2 must be skipped, not dropped
        let mut fam = small_family();
        fam.t_values = vec![0.5, 2.0];
        let report = run_suite(&["P62".into()], &fam, &Tolerances::default()).unwrap();
        assert!(report
            .skipped
            .iter()
            .any(|s| s.reason.contains("T >= 2")), "{:?}", report.skipped);
    }

    #[test]
    fn run_suite_rejects_unknown_bound() {
        assert!(matches!(
            run_suite(&["NOPE".into()], &small_family(), &Tolerances::default()),
            Err(Error::UnknownBound { .. })
        ));
    }

    #[test]
    fn estimate_requires_constant_mode() {
        let err = estimate_constant("LEMMA43", &small_family(), 2, &Tolerances::default());
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn estimate_requires_levels() {
        assert!(estimate_constant("T23", &small_family(), 1, &Tolerances::default()).is_err());
    }

    #[test]
    fn suite_report_roundtrips_as_json() {
        let report = run_suite(
            &["LEMMA43".into()],
            &small_family(),
            &Tolerances::default(),
        )
        .unwrap();
        let s = serde_json::to_string_pretty(&report).unwrap();
        let back: SuiteReport = serde_json::from_str(&s).unwrap();
        let s2 = serde_json::to_string_pretty(&back).unwrap();
        assert_eq!(s, s2);
    }
}
