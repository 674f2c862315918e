use super::*;
use crate::numerics::std_normal_pdf;
use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn std_normal() -> Distribution {
    Distribution::normal(0.0, 1.0).unwrap()
}

fn two_point() -> Distribution {
    Distribution::from_atoms(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap()
}

fn uniform_var1() -> Distribution {
    let r = 3.0f64.sqrt();
    Distribution::uniform(-r, r, 33).unwrap()
}

/// Closed-form Gaussian quadratic tail 2(tφ(t) + 1 - Φ(t)).
fn gaussian_tail_oracle(t: f64) -> f64 {
    2.0 * (t * std_normal_pdf(t) + 1.0 - numerics::std_normal_cdf(t))
}

#[test]
fn moments_point_mass() {
    let m = Distribution::point_mass(0.0).moments();
    assert_eq!((m.mean, m.variance, m.second_moment), (0.0, 0.0, 0.0));
}

#[test]
fn moments_standard_normal() {
    let m = std_normal().moments();
    assert!(m.mean.abs() < 1e-9);
    assert!((m.variance - 1.0).abs() < 1e-9);
    assert!((m.second_moment - 1.0).abs() < 1e-9);
}

#[test]
fn moments_two_point() {
    let m = two_point().moments();
    assert_eq!(m.mean, 0.0);
    assert_eq!(m.variance, 1.0);
    assert_eq!(m.second_moment, 1.0);
}

#[test]
fn moments_uniform_grid() {
    let m = uniform_var1().moments();
    assert!(m.mean.abs() < 1e-12);
    assert!((m.variance - 1.0).abs() < 1e-9);
}

#[test]
fn cdf_jump_at_atom() {
    let d = Distribution::point_mass(0.0);
    assert_eq!(d.cdf(0.0), 1.0);
    assert_eq!(d.cdf_left(0.0), 0.0);
}

#[test]
fn cdf_standard_normal_at_zero() {
    assert_relative_eq!(std_normal().cdf(0.0), 0.5, max_relative = 1e-12);
}

#[test]
fn cdf_two_point_midpoint() {
    assert_eq!(two_point().cdf(0.0), 0.5);
}

#[test]
fn cdf_limits() {
    for d in [std_normal(), two_point(), uniform_var1()] {
        assert_eq!(d.cdf(f64::INFINITY), 1.0);
        assert_eq!(d.cdf(f64::NEG_INFINITY), 0.0);
        let (lo, hi) = d.support_window(1e-12);
        let mut prev = -1e-15;
        for i in 0..=500 {
            let x = lo - 0.5 + (hi - lo + 1.0) * i as f64 / 500.0;
            let c = d.cdf(x);
            assert!(c >= prev - 1e-14, "cdf not monotone at {x}");
            prev = c;
        }
    }
}

#[test]
fn quadratic_tail_standard_normal() {
    let d = std_normal();
    assert!((d.quadratic_tail(0.0).unwrap() - 1.0).abs() < 1e-9);
    // frozen from the closed form 2(tφ(t) + 1 - Φ(t)) at t = 2
    let t2 = d.quadratic_tail(2.0).unwrap();
    assert!((t2 - 0.261_464_129_949_110_6).abs() < 1e-10);
    assert!((t2 - gaussian_tail_oracle(2.0)).abs() < 1e-12);
    // quadrature cross-check of the closed form
    let q = numerics::integrate(|x| x * x * std_normal_pdf(x), 2.0, 10.0, 1e-12).unwrap();
    assert!((t2 - 2.0 * q.value).abs() < 1e-8);
}

#[test]
fn quadratic_tail_two_point_beyond_support() {
    assert_eq!(two_point().quadratic_tail(2.0).unwrap(), 0.0);
}

#[test]
fn quadratic_tail_includes_boundary_atoms() {
    let d = two_point();
    // closed set: atoms at |x| = 1 belong to the tail at t = 1
    assert_eq!(d.quadratic_tail(1.0).unwrap(), 1.0);
}

#[test]
fn quadratic_tail_partition_identity() {
    for d in [std_normal(), uniform_var1(), two_point()] {
        let m2 = d.moments().second_moment;
        // no atoms sit exactly at these levels, so closed/open set choices agree
        for t in [0.3, 0.97, 2.5] {
            let tail = d.quadratic_tail(t).unwrap();
            let (_, _, inside) = d.interval_moments_closed(-t, t);
            // boundary atoms would be double counted; none sit at these t
            assert!(
                (tail + inside - m2).abs() < 1e-8,
                "partition failed at t={t}: {tail} + {inside} != {m2}"
            );
        }
    }
}

#[test]
fn truncate_standard_normal_at_n3() {
    let eps = (-2.0f64).exp();
    let s = std_normal().truncate(eps).unwrap();
    assert!((s.big_n - 3.0).abs() < 1e-12);
    assert!(s.a1.abs() < 1e-12);
    // sigma1^2 = 1 - delta_Z(3), frozen from the Gaussian tail oracle
    assert!((s.sigma1_sq - 0.970_709_113_465_111_8).abs() < 1e-9);
    assert!(s.sigma1_sq <= 1.0);
    // relocated atom at 0 carries the tail mass
    let tail_mass = s.truncated.atom_weight_at(0.0);
    assert!((tail_mass - 2.0 * numerics::std_normal_cdf(-3.0)).abs() < 1e-9);
}

#[test]
fn truncate_two_point_is_identity_for_large_n() {
    let s = two_point().truncate(0.1).unwrap();
    assert!(s.big_n > 1.0);
    assert_eq!(s.truncated, two_point());
    assert_eq!(s.a1, 0.0);
    assert_eq!(s.sigma1_sq, 1.0);
}

#[test]
fn truncate_relocates_everything_for_far_atom() {
    let d = Distribution::point_mass(5.0);
    let s = d.truncate((-2.0f64).exp()).unwrap();
    assert_eq!(s.truncated, Distribution::point_mass(0.0));
    assert_eq!(s.a1, 0.0);
    assert_eq!(s.sigma1_sq, 0.0);
}

#[test]
fn truncate_rejects_bad_eps() {
    assert!(std_normal().truncate(0.0).is_err());
    assert!(std_normal().truncate(1.0).is_err());
}

#[test]
fn truncation_variance_identity() {
    // for mean-zero laws: v1^2 - sigma1^2 = delta_X(N) + a1^2
    let mix = Distribution::mixture(vec![
        MixtureComponent { mean: -0.7, sd: 0.5, weight: 0.4 },
        MixtureComponent { mean: 0.9, sd: 1.2, weight: 0.6 },
    ])
    .unwrap();
    let mix = mix.scale_shift(1.0, -mix.moments().mean).unwrap();
    for d in [std_normal(), uniform_var1(), two_point(), mix] {
        let m = d.moments();
        assert!(m.mean.abs() < 1e-12);
        for eps in [(-2.0f64).exp(), 1e-3] {
            let s = d.truncate(eps).unwrap();
            let delta = d.quadratic_tail(s.big_n).unwrap();
            let lhs = m.variance - s.sigma1_sq;
            let rhs = delta + s.a1 * s.a1;
            assert!(
                (lhs - rhs).abs() < 1e-8,
                "identity failed at eps={eps}: lhs={lhs} rhs={rhs}"
            );
        }
    }
}

#[test]
fn convolve_normals_is_normal() {
    let c = std_normal().convolve(&std_normal()).unwrap();
    match c.continuous().unwrap() {
        ContinuousPart::Mixture(m) => {
            assert_eq!(m.components().len(), 1);
            let comp = m.components()[0];
            assert_relative_eq!(comp.sd, 2.0f64.sqrt(), max_relative = 1e-12);
            assert_eq!(comp.mean, 0.0);
        }
        other => panic!("expected mixture, got {other:?}"),
    }
}

#[test]
fn convolve_atoms_shifts() {
    let c = Distribution::point_mass(2.0)
        .convolve(&Distribution::point_mass(-0.5))
        .unwrap();
    assert_eq!(c, Distribution::point_mass(1.5));
}

#[test]
fn convolve_two_point_with_normal_is_mixture() {
    let c = two_point().convolve(&Distribution::normal(0.0, 0.4).unwrap()).unwrap();
    match c.continuous().unwrap() {
        ContinuousPart::Mixture(m) => {
            let mut comps = m.components().to_vec();
            comps.sort_by(|a, b| a.mean.partial_cmp(&b.mean).unwrap());
            assert_eq!(comps.len(), 2);
            assert_eq!(comps[0].mean, -1.0);
            assert_eq!(comps[1].mean, 1.0);
            assert_eq!(comps[0].sd, 0.4);
            assert_relative_eq!(comps[0].weight, 0.5, max_relative = 1e-12);
        }
        other => panic!("expected mixture, got {other:?}"),
    }
}

#[test]
fn convolve_uniform_with_uniform_is_triangular() {
    let u = uniform_var1();
    let c = u.convolve(&u).unwrap();
    let m = c.moments();
    assert!(m.mean.abs() < 1e-6);
    assert!((m.variance - 2.0).abs() < 1e-6, "var = {}", m.variance);
    // triangular density peak at 0: 1/(2*sqrt(3))
    let peak = 1.0 / (2.0 * 3.0f64.sqrt());
    assert!((c.pdf_at(0.0) - peak).abs() < 1e-4);
    assert!(c.diagnostics().renorm_drift.abs() < 1e-6);
}

#[test]
fn convolve_uniform_with_mixture_matches_moments() {
    let u = uniform_var1();
    let m = Distribution::mixture(vec![
        MixtureComponent { mean: -1.0, sd: 0.5, weight: 0.5 },
        MixtureComponent { mean: 1.0, sd: 0.5, weight: 0.5 },
    ])
    .unwrap();
    let c = u.convolve(&m).unwrap();
    let mm = c.moments();
    assert!(mm.mean.abs() < 1e-7);
    assert!((mm.variance - (1.0 + 1.25)).abs() < 1e-6, "var = {}", mm.variance);
}

#[test]
fn convolve_moment_additivity_on_random_mixture_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let draw = |rng: &mut ChaCha8Rng| {
            let k = rng.gen_range(1..4usize);
            let raw: Vec<(f64, f64, f64)> = (0..k)
                .map(|_| {
                    (
                        rng.gen_range(-2.0..2.0),
                        rng.gen_range(0.3..1.5),
                        rng.gen_range(0.1..1.0),
                    )
                })
                .collect();
            let total: f64 = raw.iter().map(|c| c.2).sum();
            Distribution::mixture(
                raw.iter()
                    .map(|&(mean, sd, w)| MixtureComponent { mean, sd, weight: w / total })
                    .collect(),
            )
            .unwrap()
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let (ma, mb) = (a.moments(), b.moments());
        let mc = a.convolve(&b).unwrap().moments();
        assert!((mc.mean - (ma.mean + mb.mean)).abs() < 1e-6);
        assert!((mc.variance - (ma.variance + mb.variance)).abs() < 1e-6);
    }
}

#[test]
fn scale_shift_identity() {
    let d = two_point();
    assert_eq!(d.scale_shift(1.0, 0.0).unwrap(), d);
}

#[test]
fn scale_shift_normal() {
    let d = std_normal().scale_shift(2.0, 0.0).unwrap();
    let m = d.moments();
    assert!((m.variance - 4.0).abs() < 1e-9);
}

#[test]
fn scale_shift_reflect_atom() {
    let d = Distribution::point_mass(1.0).scale_shift(-1.0, 1.0).unwrap();
    assert_eq!(d, Distribution::point_mass(0.0));
}

#[test]
fn scale_shift_rejects_zero_lambda() {
    assert!(std_normal().scale_shift(0.0, 1.0).is_err());
}

#[test]
fn scale_shift_roundtrip_cdf() {
    for d in [std_normal(), uniform_var1(), two_point()] {
        let rt = d
            .scale_shift(3.0, -0.7)
            .unwrap()
            .scale_shift(1.0 / 3.0, 0.7 / 3.0)
            .unwrap();
        let (lo, hi) = d.support_window(1e-12);
        for i in 0..=100 {
            let x = lo + (hi - lo) * i as f64 / 100.0;
            assert!((d.cdf(x) - rt.cdf(x)).abs() < 1e-9, "cdf mismatch at {x}");
        }
    }
}

#[test]
fn median_of_common_laws() {
    assert!(std_normal().median().abs() < 1e-9);
    assert_eq!(two_point().median(), -1.0);
    assert_eq!(Distribution::point_mass(3.5).median(), 3.5);
}

#[test]
fn grid_requires_three_knots() {
    assert!(GridDensity::new(0.0, 1.0, vec![1.0, 1.0]).is_err());
}

#[test]
fn grid_requires_normalization() {
    assert!(GridDensity::new(0.0, 1.0, vec![1.0, 1.0, 1.0]).is_err());
}

#[test]
fn distribution_weight_sum_enforced() {
    assert!(Distribution::from_atoms(vec![(0.0, 0.3), (1.0, 0.3)]).is_err());
    assert!(Distribution::new(vec![(0.0, 0.5)], None, 0.5).is_err());
}

#[test]
fn atoms_merge_and_sort() {
    let d = Distribution::from_atoms(vec![(1.0, 0.25), (-1.0, 0.5), (1.0, 0.25)]).unwrap();
    assert_eq!(d.atoms(), &[(-1.0, 0.5), (1.0, 0.5)]);
}

#[test]
fn json_roundtrip() {
    let d = two_point();
    let s = serde_json::to_string(&d).unwrap();
    let back: Distribution = serde_json::from_str(&s).unwrap();
    assert_eq!(d, back);

    let m = Distribution::mixture(vec![
        MixtureComponent { mean: 0.0, sd: 1.0, weight: 0.25 },
        MixtureComponent { mean: 1.0, sd: 2.0, weight: 0.75 },
    ])
    .unwrap();
    let s = serde_json::to_string(&m).unwrap();
    let back: Distribution = serde_json::from_str(&s).unwrap();
    assert_eq!(m, back);
}

#[test]
fn json_rejects_two_continuous_parts() {
    let s = r#"{"atoms":[],"grid":{"x0":0.0,"step":0.5,"values":[1.0,1.0,1.0]},
                "gaussian_mixture":[[0.0,1.0,1.0]],"continuous_weight":1.0}"#;
    assert!(serde_json::from_str::<Distribution>(s).is_err());
}

#[test]
fn json_rejects_unknown_fields() {
    let s = r#"{"atoms":[[0.0,1.0]],"continuous_weight":0.0,"extra":1}"#;
    assert!(serde_json::from_str::<Distribution>(s).is_err());
}

#[test]
fn json_wire_format_shape() {
    let d = Distribution::point_mass(2.0);
    let v: serde_json::Value = serde_json::to_value(&d).unwrap();
    assert_eq!(v["atoms"][0][0], 2.0);
    assert_eq!(v["continuous_weight"], 0.0);
    assert!(v.get("grid").is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_cdf_monotone_mixture(
        mean in -2.0f64..2.0,
        sd in 0.2f64..2.0,
        xs in prop::collection::vec(-6.0f64..6.0, 2..20)
    ) {
        let d = Distribution::normal(mean, sd).unwrap();
        let mut xs = xs;
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in xs.windows(2) {
            prop_assert!(d.cdf(w[0]) <= d.cdf(w[1]) + 1e-15);
        }
    }

    #[test]
    fn prop_quadratic_tail_monotone(t1 in 0.0f64..3.0, t2 in 0.0f64..3.0) {
        let d = Distribution::mixture(vec![
            MixtureComponent { mean: -0.5, sd: 0.8, weight: 0.5 },
            MixtureComponent { mean: 0.5, sd: 1.1, weight: 0.5 },
        ]).unwrap();
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(d.quadratic_tail(lo).unwrap() + 1e-12 >= d.quadratic_tail(hi).unwrap());
    }
}
