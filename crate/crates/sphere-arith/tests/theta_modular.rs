use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use sphere_arith::hecke::{invariant_subspace, simultaneous_eigenbasis};
use sphere_arith::poly::MultiPoly;
use sphere_arith::quat::{enumerate_norm, OrderSpec};
use sphere_arith::theta::*;

fn xyz() -> MultiPoly {
    MultiPoly::monomial(vec![1, 1, 1], BigRational::one())
}

#[test]
fn constant_theta_counts_shell() {
    let f = theta_series(&MultiPoly::one(3), OrderSpec::HURWITZ, 30).unwrap();
    assert_eq!(f.weight, 2);
    assert_eq!(f.level, 2);
    assert_eq!(*f.a(1), BigRational::one());
    for n in 1..=30u64 {
        let r = enumerate_norm(OrderSpec::HURWITZ, n).len() as i64;
        assert_eq!(*f.a(n as usize), BigRational::new(r.into(), 24.into()), "n = {n}");
    }
}

#[test]
fn eta_product_basics() {
    let e = eta_product_8(60);
    assert_eq!(*e.a(1), BigRational::one());
    assert_eq!(*e.a(2), BigRational::from_integer((-8).into()));
    assert_eq!(e.a(6), &(e.a(2) * e.a(3)));
    assert_eq!(e.a(15), &(e.a(3) * e.a(5)));
    assert!(hecke_relation_residual(&e, 3).unwrap().is_zero());
    assert!(hecke_relation_residual(&e, 5).unwrap().is_zero());
}

#[test]
fn cubic_theta_is_eta_product() {
    let f = theta_series(&xyz(), OrderSpec::HURWITZ, 200).unwrap();
    assert_eq!(f.weight, 8);
    assert!(f.is_cuspidal());
    let e = eta_product_8(200);
    let c = f.proportionality(&e).expect("theta(xyz) is proportional to the eta product");
    assert!(!c.is_zero());
    let n = f.normalized().unwrap();
    assert_eq!(n, e);
    for p in [3, 5, 7] {
        assert!(hecke_relation_residual(&f, p).unwrap().is_zero());
    }
}

#[test]
fn non_invariant_rejected() {
    let x = MultiPoly::var(3, 0);
    assert!(theta_series(&x, OrderSpec::HURWITZ, 10).is_err());
    let p = &xyz() + &MultiPoly::monomial(vec![3, 0, 0], BigRational::one());
    assert!(theta_series(&p, OrderSpec::HURWITZ, 10).is_err());
}

#[test]
fn corrupted_series_has_residual() {
    let mut e = eta_product_8(60);
    e.coeffs[9] += BigRational::one();
    assert!(hecke_relation_residual(&e, 3).unwrap() > BigRational::zero());
    assert!(hecke_relation_residual(&eta_product_8(5), 3).is_err());
}

#[test]
fn satake_parameters() {
    let e = eta_product_8(60);
    for p in [3u64, 5, 7] {
        let s = satake(&e, p).unwrap();
        let prod = s.alpha() * s.beta();
        let sum = s.alpha() + s.beta();
        let pk = (p as f64).powi(7);
        assert!((prod.re - pk).abs() < 1e-9 * pk && prod.im.abs() < 1e-9 * pk);
        assert!((sum.re - e.a(p as usize).to_f64().unwrap()).abs() < 1e-9 * pk.sqrt());
        assert!(s.ramanujan);
    }
}

#[test]
fn sphere_eigenvalues_match_theta_coefficients() {
    let primes = [3u64, 5, 7, 11, 13];
    for nu in [3u32, 4, 6] {
        let sys = simultaneous_eigenbasis(nu, &primes, OrderSpec::HURWITZ).unwrap();
        for idx in 0..sys.len() {
            let form = sys.exact_eigenform(idx).expect("rational eigenform");
            let f = theta_series(&form.poly, OrderSpec::HURWITZ, 170).unwrap().normalized().unwrap();
            for p in [3u64, 5, 7] {
                if (p * p) as usize <= f.n_max() {
                    assert!(hecke_relation_residual(&f, p).unwrap().is_zero());
                }
            }
            let ratios: Vec<f64> = primes
                .iter()
                .enumerate()
                .map(|(k, &p)| sys.eigenvalues[idx][k] * (p as f64).powi(nu as i32) / f.a(p as usize).to_f64().unwrap())
                .collect();
            for r in &ratios {
                assert!((r / ratios[0] - 1.0).abs() < 1e-8, "nu {nu}: {ratios:?}");
            }
            assert!(deligne_violations(&f).is_empty());
        }
    }
}

#[test]
fn invariant_dimension_six_gives_two_forms() {
    let s = invariant_subspace(6, OrderSpec::HURWITZ).unwrap();
    assert_eq!(s.dim(), 2);
}

#[test]
fn expansion_from_primes_reproduces_eta_product() {
    let e = eta_product_8(300);
    let primes = (2..=300u64)
        .filter(|&p| sphere_arith::quat::is_prime(p))
        .map(|p| (p, e.a(p as usize).to_integer()))
        .collect();
    let g = expansion_from_primes(8, &primes, 300).unwrap();
    assert_eq!(g, e);
}

#[test]
fn atkin_lehner_and_root_number() {
    let e = eta_product_8(10);
    // a_2 = -8 = -η 2^3
    assert_eq!(atkin_lehner_sign(&e).unwrap(), 1);
    assert_eq!(root_number(&e).unwrap(), 1);
}

#[test]
fn petersson_converges() {
    let e50 = eta_product_8(50);
    let e100 = eta_product_8(100);
    let a = petersson_norm(&e50, "eta8", 1e-6).unwrap();
    let b = petersson_norm(&e100, "eta8", 1e-8).unwrap();
    assert!(a.value > 0.0);
    assert!((a.value / b.value - 1.0).abs() < 1e-6);
    assert!(b.error < 1e-8 * b.value);
}

#[test]
fn symmetric_square_edge_within_weight_window() {
    let e = eta_product_8(100);
    let norm = petersson_norm(&e, "eta8", 1e-8).unwrap().value;
    let d = symmetric_square_edge(&e, norm);
    let k = 8.0;
    assert!(d > 1.0 / k && d < k, "D_f(k-1) = {d} outside (1/{k}, {k})");
}

#[test]
fn text_round_trip() {
    let e = eta_product_8(20);
    let t = e.to_text();
    assert!(t.starts_with("# weight 8 level 2\n"));
    assert_eq!(QExpansion::from_text(&t).unwrap(), e);
    assert!(QExpansion::from_text("0 1\n").is_err());
    assert!(QExpansion::from_text("# weight 2 level 2\n1 x\n").is_err());
}

#[test]
fn abs_of_coefficients_is_integral_after_normalization() {
    let f = theta_series(&xyz(), OrderSpec::HURWITZ, 40).unwrap().normalized().unwrap();
    assert!(f.coeffs.iter().all(|c| c.is_integer()));
}
