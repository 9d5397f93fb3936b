use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sphere_arith::numeric::quadrature::SphereRule;
use sphere_arith::poly::harmonic::{harmonic_dimension, monomials};
use sphere_arith::poly::*;
use sphere_arith::quat::Quaternion;

fn r(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn mono(e: &[u32]) -> MultiPoly {
    MultiPoly::monomial(e.to_vec(), BigRational::one())
}

fn random_homogeneous(rng: &mut ChaCha8Rng, nvars: usize, deg: u32, nterms: usize) -> MultiPoly {
    let ms = monomials(nvars, deg);
    let mut p = MultiPoly::zero(nvars);
    for _ in 0..nterms {
        let e = ms[rng.gen_range(0..ms.len())].clone();
        p.add_term(e, q(rng.gen_range(-9..=9), rng.gen_range(1..=5)));
    }
    p
}

fn random_harmonic(rng: &mut ChaCha8Rng, nvars: usize, deg: u32) -> MultiPoly {
    loop {
        let p = harmonic_project(&random_homogeneous(rng, nvars, deg, 4)).unwrap();
        if !p.is_zero() {
            return p;
        }
    }
}

#[test]
fn laplacian_examples() {
    assert_eq!(laplacian(&mono(&[2, 0, 0])), MultiPoly::constant(3, r(2)));
    assert!(laplacian(&mono(&[1, 1, 1])).is_zero());
    let r2 = &(&mono(&[2, 0, 0]) + &mono(&[0, 2, 0])) + &mono(&[0, 0, 2]);
    assert_eq!(laplacian(&r2), MultiPoly::constant(3, r(6)));
}

#[test]
fn harmonic_project_examples() {
    let r2 = &(&mono(&[2, 0, 0]) + &mono(&[0, 2, 0])) + &mono(&[0, 0, 2]);
    let expect = &mono(&[2, 0, 0]) - &r2.scale(&q(1, 3));
    assert_eq!(harmonic_project(&mono(&[2, 0, 0])).unwrap(), expect);
    assert_eq!(harmonic_project(&mono(&[1, 1, 1])).unwrap(), mono(&[1, 1, 1]));
    assert!(harmonic_project(&r2).unwrap().is_zero());
    let inhom = &mono(&[2, 0, 0]) + &mono(&[1, 0, 0]);
    assert!(harmonic_project(&inhom).is_err());
}

#[test]
fn sphere_integral_examples() {
    assert_eq!(sphere_integral(&mono(&[2, 0, 0]), true).unwrap(), PiScaled::rational(q(1, 3)));
    assert!(sphere_integral(&mono(&[1, 2, 0]), false).unwrap().is_zero());
    assert_eq!(sphere_integral(&mono(&[2, 0, 2]), true).unwrap(), PiScaled::rational(q(1, 15)));
    // raw measures 4π and 2π²
    assert_eq!(sphere_integral(&MultiPoly::one(3), false).unwrap(), PiScaled::new(r(4), 1));
    assert_eq!(sphere_integral(&MultiPoly::one(4), false).unwrap(), PiScaled::new(r(2), 2));
}

#[test]
fn basis_dimensions() {
    assert_eq!(basis(2, 2).unwrap().dim(), 5);
    assert_eq!(basis(3, 3).unwrap().dim(), 16);
    let b0 = basis(2, 0).unwrap();
    assert_eq!(b0.elements, vec![MultiPoly::one(3)]);
    for nu in 0..=8 {
        let b = basis(2, nu).unwrap();
        assert_eq!(b.dim(), 2 * nu as usize + 1);
        for (i, e) in b.elements.iter().enumerate() {
            assert!(laplacian(e).is_zero());
            for f in &b.elements[..i] {
                assert!(mean_product(e, f).is_zero());
            }
        }
    }
    for beta in 0..=4 {
        let b = basis(3, beta).unwrap();
        assert_eq!(b.dim(), (beta as usize + 1).pow(2));
        assert_eq!(b.dim(), harmonic_dimension(4, beta));
        assert!(b.elements.iter().all(|e| laplacian(e).is_zero()));
    }
}

#[test]
fn gegenbauer_examples() {
    assert_eq!(gegenbauer_1d(0).coeffs, vec![r(1)]);
    assert_eq!(gegenbauer_1d(1).coeffs, vec![r(0), r(2)]);
    assert_eq!(gegenbauer_1d(2).coeffs, vec![r(-1), r(0), r(4)]);
    assert_eq!(legendre_1d(2).coeffs, vec![q(-1, 2), r(0), q(3, 2)]);
}

#[test]
fn kernels_reproduce_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for alpha in 0..=6u32 {
        let w = Quaternion::from_doubled([1, 3, -1, 1]);
        let k = kernel_s3(alpha, &w).unwrap();
        assert!(laplacian(&k).is_zero());
        let qpoly = random_harmonic(&mut rng, 4, alpha);
        let lhs = inner(&k, &qpoly, Normalization::Gegenbauer);
        assert_eq!(lhs, qpoly.eval(&w.coords()), "S³ reproducing, α={alpha}");
        // diagonal value: K_w(w) = ⟨⟨K_w, K_w⟩⟩
        assert_eq!(k.eval(&w.coords()), inner(&k, &k, Normalization::Gegenbauer));

        let z = Quaternion::from_ints([0, 2, -1, 2]);
        let k2 = kernel_s2(alpha, &z).unwrap();
        assert!(laplacian(&k2).is_zero());
        let p = random_harmonic(&mut rng, 3, alpha);
        let zc = z.coords();
        let zc3 = [zc[1].clone(), zc[2].clone(), zc[3].clone()];
        assert_eq!(inner(&k2, &p, Normalization::Gegenbauer), p.eval(&zc3), "S² reproducing, α={alpha}");
        assert_eq!(k2.eval(&zc3), inner(&k2, &k2, Normalization::Gegenbauer));
    }
    assert_eq!(kernel_s3(0, &Quaternion::ONE).unwrap(), MultiPoly::one(4));
    assert!(kernel_s2(2, &Quaternion::ONE).is_err());
}

#[test]
fn gegenbauer_triple_on_s3_is_half_pi() {
    // with the S³ measure of total mass π/2
    for (a, b) in [(0u32, 0u32), (2, 0), (0, 2), (2, 2), (4, 2)] {
        let w = Quaternion::ONE;
        let g1 = kernel_s3(a + b, &w).unwrap();
        let g3 = kernel_s3(a, &w).unwrap();
        let prod = &(&g1 * &g1) * &g3;
        let mean = sphere_mean(&prod);
        assert_eq!(mean, r(1), "(a,b)=({a},{b})");
    }
}

#[test]
fn tensor_embed_matches_definition_and_kernel_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    assert_eq!(
        tensor_embed(&MultiPoly::one(3), &MultiPoly::one(3)).unwrap(),
        MultiPoly::one(4)
    );
    for nu in 1..=3u32 {
        let p1 = random_harmonic(&mut rng, 3, nu);
        let p2 = random_harmonic(&mut rng, 3, nu);
        let fast = tensor_embed(&p1, &p2).unwrap();
        assert_eq!(fast, tensor_embed_direct(&p1, &p2), "ν={nu}");
        assert!(laplacian(&fast).is_zero());
    }
    for alpha in 0..=4u32 {
        let z = Quaternion::from_ints([0, 1, 0, 0]);
        let g = kernel_s2(alpha, &z).unwrap();
        let lhs = tensor_embed(&g, &g).unwrap();
        // G_z(x̄ z x) as a polynomial in x
        let forms = sphere_arith::poly::gegenbauer::conjugation_forms();
        // x̄ z x = R(x̄) z: column of the matrix of y ↦ x̄ y x for y = i
        let conj_bar: Vec<MultiPoly> = (0..3)
            .map(|i| {
                // d x d̄ with d = x̄ flips the sign of the vector part
                forms[i][0].apply_linear(&[
                    vec![r(1), r(0), r(0), r(0)],
                    vec![r(0), r(-1), r(0), r(0)],
                    vec![r(0), r(0), r(-1), r(0)],
                    vec![r(0), r(0), r(0), r(-1)],
                ])
            })
            .collect();
        let rhs = g.compose(&conj_bar);
        assert_eq!(lhs, rhs, "α={alpha}");
    }
    assert!(tensor_embed(&mono(&[1, 0, 0]), &mono(&[1, 1, 0])).is_err());
}

#[test]
fn tensor_embed_is_isometric() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for nu in 0..=4u32 {
        let ps: Vec<MultiPoly> = (0..4).map(|_| random_harmonic(&mut rng, 3, nu)).collect();
        let t1 = tensor_embed(&ps[0], &ps[1]).unwrap();
        let t2 = tensor_embed(&ps[2], &ps[3]).unwrap();
        let lhs = inner(&t1, &t2, Normalization::Gegenbauer);
        let rhs = inner(&ps[0], &ps[2], Normalization::Gegenbauer)
            * inner(&ps[1], &ps[3], Normalization::Gegenbauer);
        assert_eq!(lhs, rhs, "ν={nu}");
    }
}

#[test]
fn exact_integrals_agree_with_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let deg = rng.gen_range(0..=12u32);
        let p = random_homogeneous(&mut rng, 3, deg, 6);
        let exact = sphere_mean(&p).to_f64().unwrap();
        let rule = SphereRule::exact_for_degree(deg as usize);
        let dd = p.dd_form();
        let quad = rule.integrate(|x| dd.eval(x));
        let scale = p.max_abs_coeff().to_f64().unwrap().max(1e-300);
        assert!((exact - quad).abs() <= 1e-12 * scale.max(exact.abs()), "{exact} vs {quad}");
    }
}

#[test]
fn text_round_trip() {
    let p = &mono(&[2, 0, 1]).scale(&q(-3, 7)) + &mono(&[0, 1, 2]);
    let t = p.to_text();
    assert!(t.contains("(2,0,1):-3/7"));
    assert_eq!(MultiPoly::from_text(&t, 3).unwrap(), p);
    assert!(MultiPoly::from_text("(1,2):1/2", 3).is_err());
    assert!(MultiPoly::from_text("(1,2,0):1/0", 3).is_err());
}

#[test]
fn pi_scaled_guards_mixed_powers() {
    let a = PiScaled::new(r(1), 1);
    let b = PiScaled::new(r(1), 2);
    assert!(a.try_add(&b).is_err());
    assert!(a.try_add(&PiScaled::zero()).is_ok());
    assert_eq!((&a * &b).pi_power, 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projection_is_idempotent(seed in any::<u64>(), deg in 0u32..=10, nvars in 3usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_homogeneous(&mut rng, nvars, deg, 5);
        let h = harmonic_project(&p).unwrap();
        prop_assert!(laplacian(&h).is_zero());
        prop_assert_eq!(harmonic_project(&h).unwrap(), h.clone());
        // p - h is orthogonal to harmonics of this degree
        let d = &p - &h;
        let probe = random_harmonic(&mut rng, nvars, deg);
        prop_assert!(mean_product(&d, &probe).is_zero());
    }

    #[test]
    fn multiplication_is_commutative_and_distributive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_homogeneous(&mut rng, 3, 3, 4);
        let b = random_homogeneous(&mut rng, 3, 2, 4);
        let c = random_homogeneous(&mut rng, 3, 2, 4);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn eval_is_a_ring_map(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_homogeneous(&mut rng, 4, 3, 4);
        let b = random_homogeneous(&mut rng, 4, 2, 4);
        let x: Vec<BigRational> = (0..4).map(|_| q(rng.gen_range(-5..=5), rng.gen_range(1..=3))).collect();
        prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
        prop_assert!(!(&a * &b).is_zero() || a.is_zero() || b.is_zero());
        let _ = BigRational::zero();
    }
}
