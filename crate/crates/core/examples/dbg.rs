use cramer_core::*;
use cramer_core::harness::{run_suite, FamilySpec, MemberSpec, Pairing};

fn main() {
    let t = Tolerances::default();
    let n1 = Distribution::normal(0.0, 1.0).unwrap();
    let n2 = Distribution::normal(0.0, 2.0).unwrap();
    let tvv = metrics::tv(&n1, &n2, &t);
    println!("tv(N(0,1),N(0,4)) = {:?} expect 0.6453518475", tvv);

    let spec = FamilySpec {
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
    };
    let report = run_suite(&["LEMMA43".into()], &spec, &t).unwrap();
    let s = serde_json::to_string_pretty(&report).unwrap();
    let back: harness::SuiteReport = serde_json::from_str(&s).unwrap();
    let s2 = serde_json::to_string_pretty(&back).unwrap();
    if s != s2 {
        for (a, b) in s.lines().zip(s2.lines()) {
            if a != b {
                println!("DIFF:\n  {a}\n  {b}");
            }
        }
    } else {
        println!("roundtrip identical");
    }
}
