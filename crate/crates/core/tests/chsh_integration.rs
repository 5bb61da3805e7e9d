mod common;

use std::collections::HashSet;
use std::sync::Mutex;

use common::{random_params, rng};
use diamond_chsh::chsh::{correlator_terms, hadamard_bilinear};
use diamond_chsh::{
    chsh_correlator, chsh_correlator_with, classify, correlator_from_bilinears, BilinearSet,
    ChshResult, ChshScenario, Classification, DiamondSide, DiamondTestFunction, IntegralEstimate,
    MassParam, QuadPlan, REFERENCE_ROWS,
};

fn row1() -> ChshScenario {
    REFERENCE_ROWS[0].0.scenario().unwrap()
}

fn close(a: &IntegralEstimate, b: &IntegralEstimate, k: f64) -> bool {
    (a.value - b.value).abs() <= k * a.std_error.hypot(b.std_error)
}

#[test]
fn each_bilinear_is_computed_once() {
    let s = row1();
    let seen = Mutex::new(Vec::new());
    let plan = QuadPlan::screening(0);
    let result = chsh_correlator_with(&s, |u, v| {
        seen.lock().unwrap().push((*u, *v));
        hadamard_bilinear(u, v, s.mass, &plan)
    })
    .unwrap();
    let seen = seen.into_inner().unwrap();
    assert_eq!(seen.len(), 8);
    let distinct: HashSet<String> = seen.iter().map(|p| format!("{p:?}")).collect();
    assert_eq!(distinct.len(), 8);
    assert!(result.correlator.is_finite());
}

#[test]
fn zero_amplitude_limit_is_exactly_two() {
    let (c, err) = correlator_from_bilinears(&BilinearSet::zero());
    assert!((c - 2.0).abs() < 1e-12);
    assert_eq!(err, 0.0);
    let r = ChshResult::from_bilinears(BilinearSet::zero());
    assert_eq!(r.classification, Classification::NoViolation);
}

#[test]
fn small_amplitudes_approach_two() {
    let s = row1().with_amplitudes_scaled(1e-6).unwrap();
    let r = chsh_correlator(&s, &QuadPlan::default()).unwrap();
    assert!((r.correlator - 2.0).abs() < 1e-6, "{}", r.correlator);
}

#[test]
fn large_amplitudes_damp_the_correlator() {
    let s = row1().with_amplitudes_scaled(100.0).unwrap();
    let r = chsh_correlator(&s, &QuadPlan::default()).unwrap();
    assert!(r.correlator < 0.1, "{}", r.correlator);
    let scaled = chsh_correlator(&row1(), &QuadPlan::default())
        .unwrap()
        .bilinears
        .with_amplitudes_scaled(100.0);
    assert!(correlator_from_bilinears(&scaled).0 < 0.1);
}

#[test]
fn degenerate_primes_stay_classical() {
    let mut rng = rng(4);
    for _ in 0..3 {
        let mut p = random_params(&mut rng);
        p.a_prime = p.a;
        p.eta_prime = p.eta;
        p.b_prime = p.b;
        p.sigma_prime = p.sigma;
        p.r_prime = p.r;
        let r = chsh_correlator(&p.scenario().unwrap(), &QuadPlan::screening(1)).unwrap();
        let t = correlator_terms(&r.bilinears);
        assert_eq!(t[0], t[1]);
        assert_eq!(t[0], t[3]);
        assert!(r.correlator <= 2.0);
        assert_eq!(r.classification, Classification::NoViolation);
    }
}

#[test]
fn terms_lie_in_unit_interval() {
    let mut rng = rng(11);
    for _ in 0..5 {
        let p = random_params(&mut rng);
        let r = chsh_correlator(&p.scenario().unwrap(), &QuadPlan::screening(2)).unwrap();
        assert!(r.bilinears.self_terms_positive());
        for t in correlator_terms(&r.bilinears) {
            assert!(t > 0.0 && t <= 1.0, "{t}");
        }
        assert!(r.correlator > -1.0 && r.correlator < 3.0);
        assert_ne!(r.classification, Classification::AboveTsirelson);
    }
}

#[test]
fn mirror_permutes_bilinears_and_keeps_correlator() {
    let mut rng = rng(12);
    for draw in 0..3 {
        let s = random_params(&mut rng).scenario().unwrap();
        let plan = QuadPlan::default().with_seed(draw);
        let a = chsh_correlator(&s, &plan).unwrap();
        let b = chsh_correlator(&s.mirrored(), &plan).unwrap();
        let (x, y) = (&a.bilinears, &b.bilinears);
        for (p, q) in [
            (&x.hff, &y.hgg),
            (&x.hgg, &y.hff),
            (&x.hfpfp, &y.hgpgp),
            (&x.hgpgp, &y.hfpfp),
            (&x.hfg, &y.hfg),
            (&x.hfgp, &y.hfpg),
            (&x.hfpg, &y.hfgp),
            (&x.hfpgp, &y.hfpgp),
        ] {
            assert!(close(p, q, 3.0), "{p:?} vs {q:?}");
        }
        let tol = 2.0 * a.correlator_error.hypot(b.correlator_error);
        assert!((a.correlator - b.correlator).abs() <= tol.max(1e-12));
    }
}

#[test]
fn classification_examples() {
    assert_eq!(classify(2.0), Classification::NoViolation);
    assert_eq!(classify(2.067), Classification::Violation);
    assert_eq!(classify(-2.5), Classification::Violation);
    assert_eq!(classify(2.9), Classification::AboveTsirelson);
    assert_eq!(classify(2.0 * 2f64.sqrt()), Classification::Violation);
}

#[test]
fn scenario_enforces_sides_and_radii() {
    let m = MassParam::new(0.01).unwrap();
    let r = |r: f64| DiamondTestFunction::new(DiamondSide::Right, r, 0.5, 1.0).unwrap();
    let l = |r: f64| DiamondTestFunction::new(DiamondSide::Left, r, 0.5, 1.0).unwrap();
    assert!(ChshScenario::new(r(1.0), r(2.0), l(1.0), l(2.0), m).is_ok());
    assert!(ChshScenario::new(l(1.0), r(2.0), l(1.0), l(2.0), m).is_err());
    assert!(ChshScenario::new(r(1.0), r(2.0), l(1.5), l(2.0), m).is_err());
    assert!(ChshScenario::new_relaxed(r(1.0), r(2.0), l(1.5), l(0.7), m).is_ok());
    assert!(ChshScenario::new_relaxed(r(1.0), r(2.0), r(1.5), l(0.7), m).is_err());
}
