//! Laplacian, harmonic projection, exact sphere integrals and orthogonal
//! bases of harmonic polynomials.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::multipoly::{rat, MultiPoly};
use super::pi::PiScaled;
use crate::error::{Error, Result};

pub fn laplacian(p: &MultiPoly) -> MultiPoly {
    let mut out = MultiPoly::zero(p.nvars());
    for (e, c) in p.terms() {
        for i in 0..p.nvars() {
            if e[i] >= 2 {
                let mut f = e.clone();
                f[i] -= 2;
                out.add_term(f, c * rat((e[i] * (e[i] - 1)) as i64));
            }
        }
    }
    out
}

/// The harmonic component of a homogeneous polynomial: the unique harmonic
/// `h` with `p - h` divisible by `x_0² + … + x_{n-1}²`.
pub fn harmonic_project(p: &MultiPoly) -> Result<MultiPoly> {
    if p.is_zero() {
        return Ok(p.clone());
    }
    let d = p
        .homogeneous_degree()
        .ok_or_else(|| Error::invalid("harmonic_project needs a homogeneous polynomial"))?
        as i64;
    let n = p.nvars() as i64;
    // h = Σ_j (-1)^j r^{2j} Δ^j p / (2^j j! Π_{i=1..j} (n + 2d - 2 - 2i))
    let mut out = p.clone();
    let mut lap = p.clone();
    let mut denom = BigRational::one();
    for j in 1..=d / 2 {
        lap = laplacian(&lap);
        if lap.is_zero() {
            break;
        }
        denom *= rat(2 * j * (n + 2 * d - 2 - 2 * j));
        let mut term = lap.clone();
        for _ in 0..j {
            term = term.times_r2();
        }
        let c = if j % 2 == 1 { -denom.recip() } else { denom.recip() };
        out.add_scaled(&term, &c);
    }
    Ok(out)
}

/// `∫ x^e dσ` over the unit sphere in `ℝ^n` against the probability
/// measure. Zero unless every exponent is even.
pub fn monomial_moment(e: &[u32]) -> BigRational {
    if e.iter().any(|k| k % 2 == 1) {
        return BigRational::zero();
    }
    let n = e.len() as i64;
    let mut num = BigInt::one();
    let mut half_total = 0i64;
    for &k in e {
        let a = (k / 2) as i64;
        half_total += a;
        for t in 0..a {
            num *= 2 * t + 1;
        }
    }
    let mut den = BigInt::one();
    for t in 0..half_total {
        den *= n + 2 * t;
    }
    BigRational::new(num, den)
}

/// Cache of moments for a fixed variable count, to avoid recomputing
/// double factorials in tight loops.
#[derive(Default)]
pub struct MomentTable {
    map: HashMap<Vec<u32>, BigRational>,
}

impl MomentTable {
    pub fn get(&mut self, e: &[u32]) -> BigRational {
        if e.iter().any(|k| k % 2 == 1) {
            return BigRational::zero();
        }
        if let Some(v) = self.map.get(e) {
            return v.clone();
        }
        let v = monomial_moment(e);
        self.map.insert(e.to_vec(), v.clone());
        v
    }
}

/// Probability-measure integral over the unit sphere of `ℝ^{nvars}`.
pub fn sphere_mean(p: &MultiPoly) -> BigRational {
    p.terms()
        .map(|(e, c)| c * monomial_moment(e))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// Total surface measure as a `PiScaled`: `4π` on S², `2π²` on S³.
pub fn sphere_area(nvars: usize) -> Result<PiScaled> {
    match nvars {
        3 => Ok(PiScaled::new(rat(4), 1)),
        4 => Ok(PiScaled::new(rat(2), 2)),
        n => Err(Error::invalid(format!("sphere integrals need 3 or 4 variables, got {n}"))),
    }
}

/// Exact integral over S² (3 variables) or S³ (4 variables); against the
/// probability measure when `normalized`, else the surface measure.
pub fn sphere_integral(p: &MultiPoly, normalized: bool) -> Result<PiScaled> {
    let area = sphere_area(p.nvars())?;
    let mean = PiScaled::rational(sphere_mean(p));
    Ok(if normalized { mean } else { &mean * &area })
}

/// `∫ f g dσ` (probability) without forming the product when one factor is
/// small.
pub fn mean_product(f: &MultiPoly, g: &MultiPoly) -> BigRational {
    let (a, b) = if f.len() <= g.len() { (f, g) } else { (g, f) };
    let mut s = BigRational::zero();
    for (ea, ca) in a.terms() {
        for (eb, cb) in b.terms() {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            if e.iter().any(|k| k % 2 == 1) {
                continue;
            }
            s += ca * cb * monomial_moment(&e);
        }
    }
    s
}

/// Which invariant scalar product on harmonic polynomials of a fixed
/// degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Normalization {
    /// `∫ f g` against the probability measure on the sphere.
    L2Probability,
    /// The product for which the zonal kernel is reproducing:
    /// `(2ν+1)∫ f g` on S² and `(β+1)∫ f g` on S³.
    Gegenbauer,
}

/// Factor turning the probability product into the Gegenbauer product for
/// harmonic polynomials of the given degree.
pub fn gegenbauer_factor(nvars: usize, degree: u32) -> BigRational {
    match nvars {
        3 => rat(2 * degree as i64 + 1),
        4 => rat(degree as i64 + 1),
        _ => panic!("gegenbauer_factor needs 3 or 4 variables"),
    }
}

/// Scalar product of two harmonic polynomials of equal degree.
pub fn inner(f: &MultiPoly, g: &MultiPoly, norm: Normalization) -> BigRational {
    let m = mean_product(f, g);
    match norm {
        Normalization::L2Probability => m,
        Normalization::Gegenbauer => {
            let d = f.homogeneous_degree().or(g.homogeneous_degree()).unwrap_or(0);
            m * gegenbauer_factor(f.nvars(), d)
        }
    }
}

/// Monomials of total degree `d` in `n` variables, graded-lex with the
/// first variable least significant (`x < y < z < w`), ascending.
pub fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=d {
            prefix.push(k);
            rec(n - 1, d - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::new(), &mut out);
    // lexicographic on reversed exponents: compare the last variable first
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

/// Dimension of harmonic polynomials of degree `d` in `n` variables.
pub fn harmonic_dimension(n: usize, d: u32) -> usize {
    let binom = |a: i64, b: i64| -> i64 {
        if b < 0 || a < b {
            return 0;
        }
        let mut r = 1i64;
        for i in 0..b {
            r = r * (a - i) / (i + 1);
        }
        r
    };
    let d = d as i64;
    let n = n as i64;
    (binom(d + n - 1, n - 1) - binom(d - 2 + n - 1, n - 1)) as usize
}

/// An exact orthogonal basis of harmonic polynomials of one degree.
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    pub nvars: usize,
    pub degree: u32,
    /// Mutually orthogonal basis polynomials.
    pub elements: Vec<MultiPoly>,
    /// `⟨b_i, b_i⟩` in the probability product.
    pub norms: Vec<BigRational>,
    /// Gram matrix in the product named by `normalization` (diagonal).
    pub gram: Vec<Vec<PiScaled>>,
    pub normalization: Normalization,
}

impl HarmonicBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// Coordinates of a harmonic polynomial of the right degree.
    pub fn coordinates(&self, p: &MultiPoly) -> Vec<BigRational> {
        self.elements
            .iter()
            .zip(&self.norms)
            .map(|(b, n)| mean_product(p, b) / n)
            .collect()
    }

    pub fn combine(&self, coeffs: &[BigRational]) -> MultiPoly {
        let mut p = MultiPoly::zero(self.nvars);
        for (b, c) in self.elements.iter().zip(coeffs) {
            p.add_scaled(b, c);
        }
        p
    }
}

/// Greedy exact Gram–Schmidt over harmonic projections of `sources`,
/// stopping at `target` elements.
///
/// Uses `⟨H(s), b⟩ = ⟨s, b⟩` for harmonic `b` of the same degree, so only
/// cheap source-times-harmonic products are ever integrated.
pub fn orthogonal_from_sources(
    sources: impl IntoIterator<Item = MultiPoly>,
    target: usize,
) -> Result<(Vec<MultiPoly>, Vec<BigRational>)> {
    let mut basis: Vec<MultiPoly> = Vec::new();
    let mut norms: Vec<BigRational> = Vec::new();
    if target == 0 {
        return Ok((basis, norms));
    }
    for s in sources {
        if s.is_zero() {
            continue;
        }
        let h = harmonic_project(&s)?;
        if h.is_zero() {
            continue;
        }
        let coeffs: Vec<BigRational> = basis
            .iter()
            .zip(&norms)
            .map(|(b, n)| mean_product(&s, b) / n)
            .collect();
        let hh = mean_product(&s, &h);
        let mut resid = hh.clone();
        for (c, n) in coeffs.iter().zip(&norms) {
            resid -= c * c * n;
        }
        if resid.is_zero() {
            continue;
        }
        let mut b = h;
        for (bi, c) in basis.iter().zip(&coeffs) {
            b.add_scaled(bi, &-c.clone());
        }
        basis.push(b);
        norms.push(resid);
        if basis.len() == target {
            return Ok((basis, norms));
        }
    }
    Err(Error::numerical(format!(
        "only {} of {} independent harmonic polynomials found",
        basis.len(),
        target
    )))
}

/// Orthogonal basis of harmonic polynomials of degree `degree` on the
/// sphere of dimension `sphere_dim` (2 or 3), from monomials in graded-lex
/// order.
pub fn basis(sphere_dim: usize, degree: u32) -> Result<HarmonicBasis> {
    basis_with(sphere_dim, degree, Normalization::L2Probability)
}

pub fn basis_with(sphere_dim: usize, degree: u32, normalization: Normalization) -> Result<HarmonicBasis> {
    let nvars = sphere_dim + 1;
    if !(3..=4).contains(&nvars) {
        return Err(Error::invalid("basis supports S² and S³"));
    }
    let target = harmonic_dimension(nvars, degree);
    let sources = monomials(nvars, degree)
        .into_iter()
        .map(|e| MultiPoly::monomial(e, BigRational::one()));
    let (elements, norms) = orthogonal_from_sources(sources, target)?;
    let factor = match normalization {
        Normalization::L2Probability => BigRational::one(),
        Normalization::Gegenbauer => gegenbauer_factor(nvars, degree),
    };
    let gram = (0..target)
        .map(|i| {
            (0..target)
                .map(|j| {
                    if i == j {
                        PiScaled::rational(&norms[i] * &factor)
                    } else {
                        PiScaled::zero()
                    }
                })
                .collect()
        })
        .collect();
    Ok(HarmonicBasis {
        nvars,
        degree,
        elements,
        norms,
        gram,
        normalization,
    })
}

/// Memoized [`basis`] (probability normalization).
pub fn cached_basis(sphere_dim: usize, degree: u32) -> Result<std::sync::Arc<HarmonicBasis>> {
    type Cache = Mutex<HashMap<(usize, u32), std::sync::Arc<HarmonicBasis>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.lock().unwrap().get(&(sphere_dim, degree)) {
        return Ok(b.clone());
    }
    let b = std::sync::Arc::new(basis(sphere_dim, degree)?);
    cache.lock().unwrap().insert((sphere_dim, degree), b.clone());
    Ok(b)
}

/// Eigenvalue of the spherical Laplacian on harmonics of degree `ν` on S²,
/// `ν(ν+1)`.
pub fn spherical_laplace_eigenvalue(nu: u32) -> u64 {
    nu as u64 * (nu as u64 + 1)
}

/// Factors converting Gegenbauer-normalized inputs to L²-normalized ones
/// in the central-value formula: `√(a′+(b+1)/2)` for the two large-degree
/// polynomials and `√(a′+1/2)` for the small one. Returned squared, as
/// exact rationals.
pub fn renormalization_squares(a_half: u32, b: u32) -> (BigRational, BigRational) {
    let big = BigRational::new(BigInt::from(2 * a_half as i64 + b as i64 + 1), BigInt::from(2));
    let small = BigRational::new(BigInt::from(2 * a_half as i64 + 1), BigInt::from(2));
    (big, small)
}
