use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use sphere_arith::hecke::*;
use sphere_arith::poly::{cached_basis, mean_product, MultiPoly};
use sphere_arith::quat::{enumerate_norm, OrderSpec};

fn r(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn xyz() -> MultiPoly {
    MultiPoly::monomial(vec![1, 1, 1], BigRational::one())
}

#[test]
fn constant_raw_matrix_is_shell_size() {
    let m = hecke_matrix(0, 3, OrderSpec::LIPSCHITZ, HeckeNormalization::Raw).unwrap();
    let shell = enumerate_norm(OrderSpec::LIPSCHITZ, 3).len() as i64;
    assert_eq!(shell, 32);
    assert_eq!(m.operator, vec![vec![r(shell)]]);
}

#[test]
fn linear_raw_matrix_vanishes() {
    let m = hecke_matrix(1, 3, OrderSpec::LIPSCHITZ, HeckeNormalization::Raw).unwrap();
    assert!(m.operator.iter().flatten().all(|v| v.is_zero()));
    // direct summation over the 32 rotations
    for i in 0..3 {
        let x = MultiPoly::var(3, i);
        assert!(hecke_apply_bruteforce(&x, 3, OrderSpec::LIPSCHITZ).is_zero());
    }
}

#[test]
fn even_prime_rejected() {
    assert!(hecke_matrix(2, 2, OrderSpec::HURWITZ, HeckeNormalization::Raw).is_err());
    assert!(hecke_matrix(2, 9, OrderSpec::HURWITZ, HeckeNormalization::Raw).is_err());
    assert!(simultaneous_eigenbasis(2, &[3, 2], OrderSpec::HURWITZ).is_err());
}

#[test]
fn matrix_matches_full_shell_sum() {
    for order in [OrderSpec::HURWITZ, OrderSpec::LIPSCHITZ] {
        for nu in 0..=4 {
            for p in [3u64, 5] {
                let m = hecke_matrix(nu, p, order, HeckeNormalization::Raw).unwrap();
                let b = cached_basis(2, nu).unwrap();
                for (j, bj) in b.elements.iter().enumerate() {
                    let direct = hecke_apply_bruteforce(bj, p, order);
                    let col: Vec<BigRational> = (0..m.dim()).map(|i| m.operator[i][j].clone()).collect();
                    assert_eq!(b.combine(&col), direct, "order {order:?} nu {nu} p {p} col {j}");
                }
            }
        }
    }
}

#[test]
fn symmetric_and_commuting_small_degrees() {
    for nu in [2u32, 3, 5, 6] {
        let ms: Vec<HeckeMatrix> = [3u64, 5, 7]
            .iter()
            .map(|&p| hecke_matrix(nu, p, OrderSpec::HURWITZ, HeckeNormalization::Raw).unwrap())
            .collect();
        for a in &ms {
            assert!(a.is_symmetric());
            for b in &ms {
                assert!(a.commutes_with(b));
            }
        }
    }
}

#[test]
fn invariant_dimensions() {
    let dims: Vec<usize> = (0..=6)
        .map(|nu| invariant_subspace(nu, OrderSpec::HURWITZ).unwrap().dim())
        .collect();
    assert_eq!(dims, vec![1, 0, 0, 1, 1, 0, 2]);
    for nu in 0..=10 {
        let s = invariant_subspace(nu, OrderSpec::HURWITZ).unwrap();
        for e in &s.elements {
            assert!(s.contains(e));
        }
    }
}

#[test]
fn xyz_is_invariant() {
    let s = invariant_subspace(3, OrderSpec::HURWITZ).unwrap();
    assert!(s.contains(&xyz()));
    assert_eq!(unit_average(&xyz(), OrderSpec::HURWITZ), xyz());
    let b = &s.elements[0];
    let ratio = b.coeff(&[1, 1, 1]);
    assert_eq!(*b, xyz().scale(&ratio));
}

#[test]
fn invariant_subspace_is_hecke_stable() {
    for nu in [4u32, 6, 8] {
        let m = hecke_matrix(nu, 3, OrderSpec::HURWITZ, HeckeNormalization::UnitNormalized).unwrap();
        let s = invariant_subspace(nu, OrderSpec::HURWITZ).unwrap();
        let b = cached_basis(2, nu).unwrap();
        for e in &s.elements {
            let c = b.coordinates(e);
            let image: Vec<BigRational> = (0..m.dim())
                .map(|i| (0..m.dim()).map(|j| &m.operator[i][j] * &c[j]).sum())
                .collect();
            assert!(s.contains(&b.combine(&image)));
        }
    }
}

#[test]
fn constant_eigensystem() {
    let sys = simultaneous_eigenbasis(0, &[3, 5, 7], OrderSpec::HURWITZ).unwrap();
    assert_eq!(sys.len(), 1);
    for (k, p) in [3.0, 5.0, 7.0].iter().enumerate() {
        assert!((sys.eigenvalues[0][k] - (p + 1.0)).abs() < 1e-12);
    }
    let v = sys.evaluate(0, [0.6, 0.0, 0.8]).unwrap();
    assert!((v - 1.0).abs() < 1e-14);
}

#[test]
fn cubic_eigenvector_is_xyz() {
    let sys = simultaneous_eigenbasis(3, &[3, 5, 7], OrderSpec::HURWITZ).unwrap();
    assert_eq!(sys.len(), 1);
    assert!(sys.invariant[0]);
    let exact = sys.exact_eigenform(0).unwrap();
    let c = exact.poly.coeff(&[1, 1, 1]);
    assert_eq!(exact.poly, xyz().scale(&c));
    // ∫ (xyz)² = 1/105, so the normalised value at (1,1,1)/√3 is √105/(3√3)
    assert_eq!(mean_product(&xyz(), &xyz()), BigRational::new(1.into(), 105.into()));
    let s = 1.0 / 3f64.sqrt();
    let v = sys.evaluate(0, [s, s, s]).unwrap();
    let want = 105f64.sqrt() / (3.0 * 3f64.sqrt());
    assert!((v.abs() - want).abs() < 1e-12, "{v} vs {want}");
}

#[test]
fn table_independent_of_prime_order() {
    for nu in [6u32, 12, 20] {
        let a = simultaneous_eigenbasis(nu, &[3, 5, 7], OrderSpec::HURWITZ).unwrap();
        let b = simultaneous_eigenbasis(nu, &[7, 3, 5], OrderSpec::HURWITZ).unwrap();
        assert_eq!(a.len(), b.len());
        for v in 0..a.len() {
            for (k, p) in a.primes.iter().enumerate() {
                let kb = b.primes.iter().position(|q| q == p).unwrap();
                assert!((a.eigenvalues[v][k] - b.eigenvalues[v][kb]).abs() < 1e-9);
            }
            for (x, y) in a.vectors[v].iter().zip(&b.vectors[v]) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn eigenbases_orthonormal_with_small_residuals() {
    for nu in [8u32, 16, 24] {
        let sys = simultaneous_eigenbasis(nu, &[3, 5, 7], OrderSpec::HURWITZ).unwrap();
        assert!(sys.max_residual <= 1e-10);
        for i in 0..sys.len() {
            for j in 0..sys.len() {
                let d: f64 = sys.vectors[i].iter().zip(&sys.vectors[j]).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-12);
            }
        }
        assert!(sys.ramanujan_violations().is_empty());
        for lams in &sys.eigenvalues {
            for (&p, l) in sys.primes.iter().zip(lams) {
                assert!(l.abs() <= p as f64 + 1.0);
            }
        }
    }
}

#[test]
fn off_sphere_point_rejected() {
    let sys = simultaneous_eigenbasis(4, &[3], OrderSpec::HURWITZ).unwrap();
    assert!(sys.evaluate(0, [1.0, 1.0, 0.0]).is_err());
    assert!(sys.evaluate(5, [1.0, 0.0, 0.0]).is_err());
}

#[test]
fn exact_coefficients_are_integral() {
    let sys = simultaneous_eigenbasis(4, &[3, 5], OrderSpec::HURWITZ).unwrap();
    let f = sys.exact_eigenform(0).unwrap();
    let coeffs = hecke_coefficients(&f, 13).unwrap();
    for ((p, a), k) in coeffs.iter().zip(0..) {
        if k < 2 {
            let float = sys.eigenvalues[0][k] * (*p as f64).powi(4);
            assert!((float - a.to_string().parse::<f64>().unwrap()).abs() < 1e-6);
        }
    }
}

#[test]
fn table_has_one_row_per_vector_and_prime() {
    let sys = simultaneous_eigenbasis(12, &[3, 5], OrderSpec::HURWITZ).unwrap();
    let rows = sys.to_table().lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, sys.len() * 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn parity(nu in 3u32..10, theta in 0.0f64..3.1, phi in 0.0f64..6.2) {
        let sys = simultaneous_eigenbasis(nu, &[3, 5], OrderSpec::HURWITZ).unwrap();
        let x = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let mx = [-x[0], -x[1], -x[2]];
        for i in 0..sys.len() {
            let a = sys.evaluate(i, x).unwrap();
            let b = sys.evaluate(i, mx).unwrap();
            let s = if nu % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((a - s * b).abs() < 1e-10);
        }
    }
}
