//! One-variable Gegenbauer and Legendre polynomials, the zonal reproducing
//! kernels built from them, and the identification of `U_ν⊗U_ν` (S²) with
//! `U_{2ν}` (S³).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::harmonic::{harmonic_dimension, mean_product};
use super::linalg::solve;
use super::multipoly::{rat, MultiPoly};
use crate::error::{Error, Result};
use crate::quat::Quaternion;

/// Dense univariate polynomial, `coeffs[i]` multiplies `t^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    pub coeffs: Vec<BigRational>,
}

impl UniPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * t + c)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        use num_traits::ToPrimitive;
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c.to_f64().unwrap_or(f64::NAN))
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * k)
}

/// `2^α Σ_j (-1)^j (α-j)! / (j! (α-2j)! 2^{2j}) t^{α-2j}`, which is the
/// Chebyshev polynomial of the second kind `U_α`.
pub fn gegenbauer_1d(alpha: u32) -> UniPoly {
    let a = alpha as u64;
    let mut coeffs = vec![BigRational::zero(); a as usize + 1];
    for j in 0..=a / 2 {
        let num = factorial(a - j) * (BigInt::one() << (a - 2 * j));
        let den = factorial(j) * factorial(a - 2 * j);
        let mut c = BigRational::new(num, den);
        if j % 2 == 1 {
            c = -c;
        }
        coeffs[(a - 2 * j) as usize] = c;
    }
    UniPoly { coeffs }
}

/// Legendre polynomial `P_α`, the zonal polynomial of degree `α` on S².
pub fn legendre_1d(alpha: u32) -> UniPoly {
    // Rodrigues: P_n = 2^{-n} Σ_j (-1)^j C(n,j) C(2n-2j, n) t^{n-2j}
    let n = alpha as u64;
    let mut coeffs = vec![BigRational::zero(); n as usize + 1];
    for j in 0..=n / 2 {
        let num = factorial(n) / (factorial(j) * factorial(n - j)) * factorial(2 * n - 2 * j)
            / (factorial(n) * factorial(n - 2 * j));
        let mut c = BigRational::new(num, BigInt::one() << n);
        if j % 2 == 1 {
            c = -c;
        }
        coeffs[(n - 2 * j) as usize] = c;
    }
    UniPoly { coeffs }
}

/// `(|x||w|)^α u(⟨x,w⟩ / |x||w|)` for an even or odd polynomial `u` of
/// degree `α`, as a polynomial in `x`.
fn homogenize_zonal(u: &UniPoly, w: &[BigRational]) -> MultiPoly {
    let n = w.len();
    let alpha = u.degree() as u32;
    let nw: BigRational = w.iter().map(|v| v * v).sum();
    let dot = MultiPoly::from_terms(
        n,
        (0..n).map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            (e, w[i].clone())
        }),
    );
    let r2 = MultiPoly::from_terms(
        n,
        (0..n).map(|i| {
            let mut e = vec![0; n];
            e[i] = 2;
            (e, BigRational::one())
        }),
    );
    let mut out = MultiPoly::zero(n);
    for j in 0..=alpha / 2 {
        let c = &u.coeffs[(alpha - 2 * j) as usize];
        if c.is_zero() {
            continue;
        }
        let term = &dot.pow(alpha - 2 * j) * &r2.pow(j);
        out.add_scaled(&term, &(c * num_traits::pow(nw.clone(), j as usize)));
    }
    out
}

/// Reproducing kernel of harmonic polynomials of degree `α` on S³ for the
/// Gegenbauer product `(α+1)∫ f g dσ`: the homogenized `U_α(⟨x,w⟩)`.
///
/// Homogeneous of degree `α` in `w` as well, so `w` need not be a unit.
pub fn kernel_s3(alpha: u32, w: &Quaternion) -> Result<MultiPoly> {
    if w.is_zero() {
        return Err(Error::invalid("kernel center must be nonzero"));
    }
    Ok(homogenize_zonal(&gegenbauer_1d(alpha), &w.coords()))
}

/// Same as [`kernel_s3`] with an arbitrary rational center.
pub fn kernel_s3_at(alpha: u32, w: &[BigRational; 4]) -> MultiPoly {
    homogenize_zonal(&gegenbauer_1d(alpha), w)
}

/// Reproducing kernel of harmonic polynomials of degree `α` on S² for the
/// product `(2α+1)∫ f g dσ`: the homogenized Legendre `P_α(⟨x,z⟩)`, with
/// `z` a pure quaternion.
pub fn kernel_s2(alpha: u32, z: &Quaternion) -> Result<MultiPoly> {
    if !z.is_pure() || z.is_zero() {
        return Err(Error::invalid("kernel_s2 needs a nonzero pure quaternion"));
    }
    let c = z.coords();
    Ok(kernel_s2_at(alpha, &[c[1].clone(), c[2].clone(), c[3].clone()]))
}

pub fn kernel_s2_at(alpha: u32, z: &[BigRational; 3]) -> MultiPoly {
    homogenize_zonal(&legendre_1d(alpha), z)
}

/// Matrix of `x ↦ d x d̄` on pure quaternions, entries quadratic forms in
/// the coordinates of `d` (4-variable polynomials).
pub fn conjugation_forms() -> [[MultiPoly; 3]; 3] {
    let q = |terms: &[(i64, [u32; 4])]| {
        MultiPoly::from_terms(4, terms.iter().map(|(c, e)| (e.to_vec(), rat(*c))))
    };
    const A2: [u32; 4] = [2, 0, 0, 0];
    const B2: [u32; 4] = [0, 2, 0, 0];
    const C2: [u32; 4] = [0, 0, 2, 0];
    const D2: [u32; 4] = [0, 0, 0, 2];
    const AB: [u32; 4] = [1, 1, 0, 0];
    const AC: [u32; 4] = [1, 0, 1, 0];
    const AD: [u32; 4] = [1, 0, 0, 1];
    const BC: [u32; 4] = [0, 1, 1, 0];
    const BD: [u32; 4] = [0, 1, 0, 1];
    const CD: [u32; 4] = [0, 0, 1, 1];
    [
        [
            q(&[(1, A2), (1, B2), (-1, C2), (-1, D2)]),
            q(&[(2, BC), (-2, AD)]),
            q(&[(2, BD), (2, AC)]),
        ],
        [
            q(&[(2, BC), (2, AD)]),
            q(&[(1, A2), (-1, B2), (1, C2), (-1, D2)]),
            q(&[(2, CD), (-2, AB)]),
        ],
        [
            q(&[(2, BD), (-2, AC)]),
            q(&[(2, CD), (2, AB)]),
            q(&[(1, A2), (-1, B2), (-1, C2), (1, D2)]),
        ],
    ]
}

/// Writes a homogeneous degree-`ν` polynomial in 3 variables as
/// `Σ c_k (u_k·y)^ν` with `u_k = (1, s, t)`, `s + t ≤ ν`.
fn power_sum_decomposition(p: &MultiPoly, nu: u32) -> Vec<([i64; 3], BigRational)> {
    let pts: Vec<(i64, i64)> = (0..=nu as i64)
        .flat_map(|s| (0..=nu as i64 - s).map(move |t| (s, t)))
        .collect();
    // unknowns c_k; equations indexed by (α2, α3), α1 = ν - α2 - α3:
    // Σ_k c_k s_k^{α2} t_k^{α3} = coeff_α / multinomial(α)
    let eqs: Vec<(u32, u32)> = (0..=nu)
        .flat_map(|a| (0..=nu - a).map(move |b| (a, b)))
        .collect();
    let fact = |n: u32| factorial(n as u64);
    let mat: Vec<Vec<BigRational>> = eqs
        .iter()
        .map(|&(a2, a3)| {
            pts.iter()
                .map(|&(s, t)| {
                    BigRational::from_integer(BigInt::from(s).pow(a2) * BigInt::from(t).pow(a3))
                })
                .collect()
        })
        .collect();
    let rhs: Vec<BigRational> = eqs
        .iter()
        .map(|&(a2, a3)| {
            let a1 = nu - a2 - a3;
            let multi = fact(nu) / (fact(a1) * fact(a2) * fact(a3));
            p.coeff(&[a1, a2, a3]) / BigRational::from_integer(multi)
        })
        .collect();
    let c = solve(mat, rhs).expect("triangular grid is unisolvent");
    pts.into_iter()
        .zip(c)
        .filter(|(_, c)| !c.is_zero())
        .map(|((s, t), c)| ([1, s, t], c))
        .collect()
}

/// `(P1⊗P2)(d) = ⟨⟨P2(x), P1(d x d̄)⟩⟩₀`, a harmonic polynomial of degree
/// `2ν` in the four coordinates of `d`.
///
/// With `P1(y) = Σ c_k (u_k·y)^ν` and `P2` harmonic the pairing collapses
/// to `(2ν+1) ν! / (2ν+1)!! · Σ c_k P2(Aᵀ(d) u_k)`, where `A(d)` is the
/// matrix of `x ↦ d x d̄`.
pub fn tensor_embed(p1: &MultiPoly, p2: &MultiPoly) -> Result<MultiPoly> {
    if p1.nvars() != 3 || p2.nvars() != 3 {
        return Err(Error::invalid("tensor_embed takes polynomials in 3 variables"));
    }
    if p1.is_zero() || p2.is_zero() {
        return Ok(MultiPoly::zero(4));
    }
    let (Some(n1), Some(n2)) = (p1.homogeneous_degree(), p2.homogeneous_degree()) else {
        return Err(Error::invalid("tensor_embed needs homogeneous inputs"));
    };
    if n1 != n2 {
        return Err(Error::invalid(format!("degree mismatch {n1} vs {n2}")));
    }
    let nu = n1;
    let a = conjugation_forms();
    let mut acc = MultiPoly::zero(4);
    for (u, c) in power_sum_decomposition(p1, nu) {
        // v_j = Σ_i A_ij u_i  (Aᵀ u)
        let v: Vec<MultiPoly> = (0..3)
            .map(|j| {
                let mut s = MultiPoly::zero(4);
                for i in 0..3 {
                    s.add_scaled(&a[i][j], &rat(u[i]));
                }
                s
            })
            .collect();
        acc.add_scaled(&p2.compose(&v), &c);
    }
    let mut dfact = BigInt::one();
    for t in 0..=nu as u64 {
        dfact *= 2 * t + 1;
    }
    let k = BigRational::new(BigInt::from(2 * nu as u64 + 1) * factorial(nu as u64), dfact);
    Ok(acc.scale(&k))
}

/// Direct definition of [`tensor_embed`], expanding `P1(d x d̄)` in seven
/// variables. Only practical for small degree; kept as an oracle.
pub fn tensor_embed_direct(p1: &MultiPoly, p2: &MultiPoly) -> MultiPoly {
    let nu = p1.homogeneous_degree().unwrap_or(0);
    let a = conjugation_forms();
    // lift to 7 variables: d0..d3, x1..x3
    let lift_d = |p: &MultiPoly| {
        MultiPoly::from_terms(7, p.terms().map(|(e, c)| (vec![e[0], e[1], e[2], e[3], 0, 0, 0], c.clone())))
    };
    let subs: Vec<MultiPoly> = (0..3)
        .map(|i| {
            let mut s = MultiPoly::zero(7);
            for j in 0..3 {
                let mut xe = vec![0; 7];
                xe[4 + j] = 1;
                s = &s + &(&lift_d(&a[i][j]) * &MultiPoly::monomial(xe, BigRational::one()));
            }
            s
        })
        .collect();
    let composed = p1.compose(&subs);
    let mut out = MultiPoly::zero(4);
    let factor = rat(2 * nu as i64 + 1);
    for (e, c) in composed.terms() {
        let xmono = MultiPoly::monomial(e[4..].to_vec(), BigRational::one());
        let pair = mean_product(p2, &xmono);
        if pair.is_zero() {
            continue;
        }
        out.add_term(e[..4].to_vec(), c * pair * &factor);
    }
    out
}

/// Dimension check helper: `(β+1)²` for S³.
pub fn s3_dimension(beta: u32) -> usize {
    harmonic_dimension(4, beta)
}
