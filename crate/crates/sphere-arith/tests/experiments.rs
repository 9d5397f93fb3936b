use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sphere_arith::experiments::*;
use sphere_arith::hecke::simultaneous_eigenbasis;
use sphere_arith::numeric::quadrature::SphereRule;
use sphere_arith::poly::{basis, sphere_mean};
use sphere_arith::quat::{OrderKind, OrderSpec};
use sphere_arith::Error;

fn small(nu_min: u32, nu_max: u32) -> ExperimentConfig {
    ExperimentConfig {
        nu_min,
        nu_max,
        ..Default::default()
    }
}

#[test]
fn config_errors_are_config_errors() {
    for bad in [
        r#"{"nu_min": 10, "nu_max": 4}"#,
        r#"{"primes": []}"#,
        r#"{"primes": [2]}"#,
        r#"{"primes": [9]}"#,
        r#"{"moments": [0, 2]}"#,
        r#"{"tolerance": -1}"#,
        r#"{"coefficients": 10}"#,
        r#"{"identity_nus": [5]}"#,
        r#"{"order": "octonion"}"#,
        r#"{"unknown_key": 1}"#,
        "not json",
    ] {
        let err = ExperimentConfig::from_json(bad).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{bad}: {err:?}");
        assert_eq!(err.exit_code(), 2);
    }
    let c = ExperimentConfig::from_json(r#"{"order": "lipschitz", "nu_max": 12}"#).unwrap();
    assert_eq!(c.order, OrderKind::Lipschitz);
    assert_eq!(c.nu_min, 4);
    let low = ExperimentConfig {
        quadrature_order: Some(3),
        ..small(4, 6)
    };
    assert!(matches!(run_moments(&low), Err(Error::Config(_))));
}

#[test]
fn mass_against_constant_is_one() {
    let c = ExperimentConfig {
        test_degree: 0,
        ..small(4, 10)
    };
    let recs = run_mass(&c).unwrap();
    assert!(!recs.is_empty());
    for r in &recs {
        assert!((r.value - 1.0).abs() < 1e-12, "{r:?}");
        assert!(r.err < 1e-12);
    }
}

#[test]
fn mass_vanishes_below_half_test_degree() {
    let c = ExperimentConfig {
        test_degree: 12,
        ..small(2, 5)
    };
    let recs = run_mass(&c).unwrap();
    assert!(!recs.is_empty());
    for r in &recs {
        assert!(r.value.abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn low_moments_are_fixed() {
    let c = ExperimentConfig {
        moments: vec![1, 2],
        ..small(4, 12)
    };
    let recs = run_moments(&c).unwrap();
    for r in &recs {
        let want = if r.quantity == "moment_1" { 0.0 } else { 1.0 };
        assert!((r.value - want).abs() < 1e-11, "{r:?}");
    }
    assert_eq!(gaussian_moment(4), 3.0);
    assert_eq!(gaussian_moment(6), 15.0);
    assert_eq!(gaussian_moment(3), 0.0);
}

#[test]
fn third_moment_odd_degrees_vanish() {
    let recs = run_third_moment(&small(4, 15)).unwrap();
    let odd: Vec<_> = recs.iter().filter(|r| r.nu % 2 == 1).collect();
    assert!(!odd.is_empty());
    assert!(odd.iter().all(|r| r.value == 0.0));
}

#[test]
fn third_moment_exact_value_at_degree_four() {
    let sys = simultaneous_eigenbasis(4, &[3, 5], OrderSpec::HURWITZ).unwrap();
    let form = sys.exact_eigenform(0).unwrap();
    let (sq, sign) = exact_third_moment(&form);
    // cube of ∫P³ against ∫P² recomputed directly
    let p = &form.poly;
    let m3 = sphere_mean(&(p * &(p * p)));
    let m2 = sphere_mean(&(p * p));
    assert_eq!(sq, &m3 * &m3 / (&m2 * &m2 * &m2));
    assert_eq!(sign, if m3 > BigRational::from_integer(0.into()) { 1 } else { -1 });
    let recs = run_third_moment(&small(4, 4)).unwrap();
    let v = sign as f64 * sq.to_f64().unwrap().sqrt();
    assert!((recs[0].value - v).abs() < 1e-15);
}

#[test]
fn quadrature_agrees_with_exact_third_moment() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for case in 0..50 {
        let nu = 2 + 2 * (case % 6) as u32;
        let b = basis(2, nu).unwrap();
        let coeffs: Vec<BigRational> = (0..b.dim())
            .map(|_| BigRational::new(BigInt::from(rng.gen_range(-9i64..=9)), BigInt::from(rng.gen_range(1i64..=5))))
            .collect();
        let p = b.combine(&coeffs);
        if p.is_zero() {
            continue;
        }
        let exact = sphere_mean(&(&p * &(&p * &p))).to_f64().unwrap();
        let rule = SphereRule::exact_for_degree(3 * nu as usize);
        let approx = rule.integrate(|x| p.eval_f64(x).powi(3));
        let scale = rule.integrate(|x| p.eval_f64(x).abs().powi(3));
        assert!((exact - approx).abs() <= 1e-10 * scale, "case {case}: {exact} vs {approx}");
    }
}

#[test]
fn csv_round_trip_and_determinism() {
    let recs = run_third_moment(&small(4, 9)).unwrap();
    let a = to_csv(&recs).unwrap();
    let b = to_csv(&run_third_moment(&small(4, 9)).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with("nu,index,quantity,value,err\n"));
    assert_eq!(from_csv(&a).unwrap(), recs);

    let dir = std::env::temp_dir().join(format!("sphere-arith-emit-{}", std::process::id()));
    let paths = emit(&recs, &dir, "third_moment").unwrap();
    assert_eq!(paths.len(), 3);
    let first: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
    emit(&recs, &dir, "third_moment").unwrap();
    let second: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
    assert_eq!(first, second);
    let json: Vec<ExperimentRecord> = serde_json::from_slice(&first[1]).unwrap();
    assert_eq!(json, recs);
    assert!(String::from_utf8_lossy(&first[2]).starts_with("<svg"));
    assert!(emit(&[], &dir, "empty").is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn identity_needs_hurwitz() {
    let c = ExperimentConfig {
        order: OrderKind::Lipschitz,
        identity_nus: vec![4],
        ..Default::default()
    };
    assert!(matches!(run_identity(&c), Err(Error::Config(_))));
}

#[test]
fn identity_odd_sign_forms_vanish_on_both_sides() {
    let c = ExperimentConfig {
        identity_nus: vec![6],
        ..Default::default()
    };
    let report = run_identity(&c).unwrap();
    let odd: Vec<_> = report.entries.iter().filter(|e| e.root_number_form == -1).collect();
    assert!(!odd.is_empty());
    for e in odd {
        assert!(e.lhs.abs() <= e.lhs_error, "{}", e.lhs);
        assert_eq!(e.rhs, 0.0);
        assert!(e.ratio.is_none());
    }
}
