//! Triple-product integrals on S² and S³, the generating series of the
//! invariant trilinear polynomials on four-dimensional vectors, and the
//! assembly of the predicted central value of the triple L-function.
//!
//! Sphere measures come in three flavours: raw surface measure, the
//! probability measure, and the calibrated measures of total mass 2 on S²
//! and π/2 on S³ in which the Gegenbauer constants below are stated.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::gamma::ln_gamma_real;
use crate::poly::{mean_product, rat, ratio, sphere_mean, tensor_embed, MultiPoly, PiScaled};

fn fact(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

fn factr(n: u64) -> BigRational {
    BigRational::from_integer(fact(n))
}

fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::from(2).pow(e as u32))
    } else {
        BigRational::new(BigInt::one(), BigInt::from(2).pow((-e) as u32))
    }
}

/// Which measure a sphere integral is taken against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SphereMeasure {
    /// Surface measure: 4π on S², 2π² on S³.
    Raw,
    /// Total mass 1.
    Probability,
    /// Total mass 2 on S² and π/2 on S³.
    Calibrated,
}

fn measure_mass(nvars: usize, m: SphereMeasure) -> Result<PiScaled> {
    Ok(match (nvars, m) {
        (_, SphereMeasure::Probability) => PiScaled::rational(BigRational::one()),
        (3, SphereMeasure::Raw) => PiScaled::new(rat(4), 1),
        (4, SphereMeasure::Raw) => PiScaled::new(rat(2), 2),
        (3, SphereMeasure::Calibrated) => PiScaled::rational(rat(2)),
        (4, SphereMeasure::Calibrated) => PiScaled::new(ratio(1, 2), 1),
        (n, _) => return Err(Error::invalid(format!("sphere integrals need 3 or 4 variables, got {n}"))),
    })
}

fn triple_integral(p1: &MultiPoly, p2: &MultiPoly, p3: &MultiPoly, nvars: usize, m: SphereMeasure) -> Result<PiScaled> {
    for p in [p1, p2, p3] {
        if p.nvars() != nvars {
            return Err(Error::invalid(format!("expected polynomials in {nvars} variables")));
        }
    }
    let mass = measure_mass(nvars, m)?;
    let prod = p1 * p2;
    Ok(&PiScaled::rational(mean_product(&prod, p3)) * &mass)
}

/// `∫_{S²} P₁P₂P₃`.
pub fn triple_integral_s2(p1: &MultiPoly, p2: &MultiPoly, p3: &MultiPoly, m: SphereMeasure) -> Result<PiScaled> {
    triple_integral(p1, p2, p3, 3, m)
}

/// `∫_{S³} Q₁Q₂Q₃`.
pub fn triple_integral_s3(q1: &MultiPoly, q2: &MultiPoly, q3: &MultiPoly, m: SphereMeasure) -> Result<PiScaled> {
    triple_integral(q1, q2, q3, 4, m)
}

/// Degrees of an equal-weight triple: `ν₁ = ν₂` and `ν₃`, on a quaternion
/// algebra of prime discriminant `level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TripleIndex {
    pub nu1: u32,
    pub nu3: u32,
    pub level: u64,
}

impl TripleIndex {
    pub fn new(nu1: u32, nu3: u32, level: u64) -> Result<Self> {
        if nu3 > nu1 {
            return Err(Error::invalid("need ν₁ ≥ ν₃"));
        }
        if level < 2 {
            return Err(Error::invalid("level must be at least 2"));
        }
        Ok(TripleIndex { nu1, nu3, level })
    }

    /// From the weight parameters `a′` and `b`.
    pub fn from_ab(a_half: u32, b: u32, level: u64) -> Result<Self> {
        if b % 2 != 0 {
            return Err(Error::invalid("b must be even"));
        }
        Self::new(a_half + b / 2, a_half, level)
    }

    pub fn k1(&self) -> u32 {
        2 + 2 * self.nu1
    }
    pub fn k3(&self) -> u32 {
        2 + 2 * self.nu3
    }
    pub fn a(&self) -> u32 {
        self.k3() - 2
    }
    pub fn a_half(&self) -> u32 {
        self.nu3
    }
    pub fn b(&self) -> u32 {
        self.k1() - self.k3()
    }

    /// Number of distinct prime divisors of the level.
    pub fn omega(&self) -> u32 {
        let mut n = self.level;
        let mut c = 0;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                c += 1;
                while n % p == 0 {
                    n /= p;
                }
            }
            p += 1;
        }
        c + u32::from(n > 1)
    }

    /// The central-value formulas are stated for even `a′` and `b`.
    pub fn check_parity(&self) -> Result<()> {
        if self.a_half() % 2 != 0 || self.b() % 2 != 0 {
            return Err(Error::precondition(format!(
                "a' = {} and b = {} must both be even",
                self.a_half(),
                self.b()
            )));
        }
        Ok(())
    }
}

/// `rational · √π^sqrt_pi` for products of Γ at half-integers.
#[derive(Clone, Debug, PartialEq)]
struct HalfGamma {
    rational: BigRational,
    sqrt_pi: i32,
}

impl HalfGamma {
    fn one() -> Self {
        HalfGamma {
            rational: BigRational::one(),
            sqrt_pi: 0,
        }
    }

    /// `Γ(twice / 2)`, `twice ≥ 1`.
    fn gamma(twice: u64) -> Self {
        assert!(twice >= 1, "gamma pole");
        if twice % 2 == 0 {
            HalfGamma {
                rational: factr(twice / 2 - 1),
                sqrt_pi: 0,
            }
        } else {
            let n = (twice - 1) / 2;
            HalfGamma {
                rational: BigRational::new(fact(2 * n), BigInt::from(4).pow(n as u32) * fact(n)),
                sqrt_pi: 1,
            }
        }
    }

    fn mul(mut self, o: &HalfGamma) -> Self {
        self.rational *= &o.rational;
        self.sqrt_pi += o.sqrt_pi;
        self
    }

    fn div(mut self, o: &HalfGamma) -> Self {
        self.rational /= &o.rational;
        self.sqrt_pi -= o.sqrt_pi;
        self
    }

    fn scale(mut self, c: &BigRational) -> Self {
        self.rational *= c;
        self
    }

    fn into_pi_scaled(self) -> Result<PiScaled> {
        if self.sqrt_pi % 2 != 0 {
            return Err(Error::numerical("odd power of √π left over"));
        }
        Ok(PiScaled::new(self.rational, self.sqrt_pi / 2))
    }
}

fn check_even(a_half: u32, b: u32) -> Result<()> {
    if a_half % 2 != 0 || b % 2 != 0 {
        return Err(Error::invalid(format!("a' = {a_half} and b = {b} must both be even")));
    }
    Ok(())
}

/// Gegenbauer triple constant `∫_{S²} G^{(a′+b/2)} G^{(a′+b/2)} G^{(a′)}`
/// in the calibrated measure, from its first closed form.
pub fn c1(a_half: u32, b: u32) -> Result<BigRational> {
    check_even(a_half, b)?;
    let (a, b) = (a_half as u64, b as u64);
    // Γ((3a′+b)/2+1) Γ((a′+1)/2)² Γ((a′+b+1)/2) / (π Γ(a′/2+1)² Γ((a′+b)/2+1) Γ((3a′+b+3)/2))
    let num = HalfGamma::gamma(3 * a + b + 2)
        .mul(&HalfGamma::gamma(a + 1))
        .mul(&HalfGamma::gamma(a + 1))
        .mul(&HalfGamma::gamma(a + b + 1));
    let den = HalfGamma::gamma(a + 2)
        .mul(&HalfGamma::gamma(a + 2))
        .mul(&HalfGamma::gamma(a + b + 2))
        .mul(&HalfGamma::gamma(3 * a + b + 3))
        .mul(&HalfGamma {
            rational: BigRational::one(),
            sqrt_pi: 2,
        });
    let v = num.div(&den).into_pi_scaled()?;
    if v.pi_power != 0 {
        return Err(Error::numerical("c1 is not rational"));
    }
    Ok(v.rational)
}

/// How `Γ(2w)/Γ(w)` is read at `w = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegenerateRule {
    /// The limit `1/2`.
    Limit,
    /// The literal replacement value `2`.
    Literal,
}

/// `c₁` from the second closed form, obtained by the duplication formula.
pub fn c1_second_form(a_half: u32, b: u32, rule: DegenerateRule) -> Result<BigRational> {
    check_even(a_half, b)?;
    let (a, b) = (a_half as u64, b as u64);
    let degenerate = match rule {
        DegenerateRule::Limit => ratio(1, 2),
        DegenerateRule::Literal => rat(2),
    };
    // Γ(2w)/Γ(w) with w given doubled
    let ratio = |w2: u64| -> HalfGamma {
        if w2 == 0 {
            HalfGamma::one().scale(&degenerate)
        } else {
            HalfGamma::gamma(2 * w2).div(&HalfGamma::gamma(w2))
        }
    };
    // 16 [Γ(a′)/Γ(a′/2)]² [Γ(a′+b)/Γ((a′+b)/2)] Γ((3a′+b)/2+1)²
    //   / (Γ(3a′+b+2) Γ(a′/2+1)² Γ((a′+b)/2+1))
    let v = ratio(a)
        .mul(&ratio(a))
        .mul(&ratio(a + b))
        .mul(&HalfGamma::gamma(3 * a + b + 2))
        .mul(&HalfGamma::gamma(3 * a + b + 2))
        .div(&HalfGamma::gamma(2 * (3 * a + b + 2)))
        .div(&HalfGamma::gamma(a + 2))
        .div(&HalfGamma::gamma(a + 2))
        .div(&HalfGamma::gamma(a + b + 2))
        .scale(&rat(16))
        .into_pi_scaled()?;
    if v.pi_power != 0 {
        return Err(Error::numerical("c1 is not rational"));
    }
    Ok(v.rational)
}

/// Value of the normalized invariant trilinear polynomial on the diagonal,
/// `P₀(w,w,w)` for a unit vector `w`.
pub fn p0_diag(a_half: u32, b: u32) -> BigRational {
    let (a, b) = (a_half as u64, b as u64);
    pow2((b + 4 * a) as i64) * factr(3 * a + b + 1) * factr(a) * factr(a) * factr(a + 1) * factr(a + b)
        / (factr(2 * a) * factr(b + 2 * a) * factr(b + 2 * a) * factr(b) * factr(a + b + 1))
}

fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    fact(n) / (fact(k) * fact(n - k))
}

/// `Σ_α C(2a′−2α, a′−α) C(2a′+b+α, 3α+b) (3α+b)!/(α! α! (α+b)!)`.
pub fn saalschutz_sum(a_half: u32, b: u32) -> BigInt {
    let (a, b) = (a_half as u64, b as u64);
    (0..=a)
        .map(|al| {
            binom(2 * a - 2 * al, a - al) * binom(2 * a + b + al, 3 * al + b) * fact(3 * al + b)
                / (fact(al) * fact(al) * fact(al + b))
        })
        .sum()
}

/// Closed form `(2a′)! (b+2a′)!² / (a′!⁴ (b+a′)!²)` of [`saalschutz_sum`].
pub fn saalschutz_closed(a_half: u32, b: u32) -> BigInt {
    let (a, b) = (a_half as u64, b as u64);
    fact(2 * a) * fact(b + 2 * a).pow(2) / (fact(a).pow(4) * fact(b + a).pow(2))
}

/// Coefficient of `X₁^i X₂^j X₃^l` in `(1 − X₁ − X₂ − X₃)^{−2}`.
pub fn inverse_square_coeff(i: u32, j: u32, l: u32) -> BigInt {
    let (i, j, l) = (i as u64, j as u64, l as u64);
    fact(i + j + l + 1) / (fact(i) * fact(j) * fact(l))
}

/// Variables of the Gram polynomials: `m₁, m₂, m₃, r₁, r₂, r₃` with
/// `mᵢ = (vᵢ, vᵢ)`, `r₁ = 2(y,z)`, `r₂ = 2(x,z)`, `r₃ = 2(x,y)`.
pub const GRAM_VARS: usize = 6;
const M: [usize; 3] = [0, 1, 2];
const R: [usize; 3] = [3, 4, 5];

/// Largest total index accepted by [`ibukiyama_coeff`].
pub const MAX_TOTAL_INDEX: u32 = 16;

/// A coefficient of the generating series as a polynomial in the Gram
/// variables.
#[derive(Clone, Debug, PartialEq)]
pub struct GenSeriesCoeff {
    pub mu: [u32; 3],
    pub poly: MultiPoly,
}

fn gvar(i: usize) -> MultiPoly {
    MultiPoly::var(GRAM_VARS, i)
}

type XSeries = BTreeMap<[u32; 3], MultiPoly>;

fn add_x(s: &mut XSeries, e: [u32; 3], p: MultiPoly) {
    let entry = s.entry(e).or_insert_with(|| MultiPoly::zero(GRAM_VARS));
    *entry = &*entry + &p;
}

fn mul_x(a: &XSeries, b: &XSeries) -> XSeries {
    let mut out = XSeries::new();
    for (ea, pa) in a {
        for (eb, pb) in b {
            add_x(&mut out, [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], pa * pb);
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

/// `Δ(X,T)² − 4 d(T) X₁X₂X₃`, grouped by monomials in `X`.
fn radicand() -> XSeries {
    let (m1, m2, m3) = (gvar(M[0]), gvar(M[1]), gvar(M[2]));
    let (r1, r2, r3) = (gvar(R[0]), gvar(R[1]), gvar(R[2]));
    let one = MultiPoly::one(GRAM_VARS);
    let mut delta = XSeries::new();
    add_x(&mut delta, [0, 0, 0], one);
    add_x(&mut delta, [1, 0, 0], -&r1);
    add_x(&mut delta, [0, 1, 0], -&r2);
    add_x(&mut delta, [0, 0, 1], -&r3);
    add_x(&mut delta, [0, 1, 1], &r1 * &m1);
    add_x(&mut delta, [1, 0, 1], &r2 * &m2);
    add_x(&mut delta, [1, 1, 0], &r3 * &m3);
    add_x(&mut delta, [0, 0, 2], &m1 * &m2);
    add_x(&mut delta, [2, 0, 0], &m2 * &m3);
    add_x(&mut delta, [0, 2, 0], &m3 * &m1);
    let mut f = mul_x(&delta, &delta);
    // d(T) = 4m₁m₂m₃ − m₁r₁² − m₂r₂² − m₃r₃² + r₁r₂r₃
    let d = &(&(&(&(&(&m1 * &m2) * &m3).scale(&rat(4)) - &(&m1 * &(&r1 * &r1))) - &(&m2 * &(&r2 * &r2)))
        - &(&m3 * &(&r3 * &r3)))
        + &(&(&r1 * &r2) * &r3);
    add_x(&mut f, [1, 1, 1], d.scale(&rat(-4)));
    f.retain(|_, p| !p.is_zero());
    f
}

/// Coefficients of `(Δ² − 4dX₁X₂X₃)^{−1/2}` for all exponents `≤ max`
/// componentwise.
///
/// With `F = Σ_j F_j` graded by total `X`-degree (`F₀ = 1`), the series
/// `G = F^{−1/2}` satisfies `2F·E(G) = −E(F)·G` for the Euler operator `E`,
/// so its graded pieces obey `y_n = −(1/2n) Σ_{j=1}^{4} (2n−j) F_j y_{n−j}`.
pub fn generating_series(max: [u32; 3]) -> Result<XSeries> {
    if max.iter().sum::<u32>() > MAX_TOTAL_INDEX {
        return Err(Error::invalid(format!(
            "total index {} exceeds the bound {MAX_TOTAL_INDEX}",
            max.iter().sum::<u32>()
        )));
    }
    let f = radicand();
    let mut g = XSeries::new();
    g.insert([0, 0, 0], MultiPoly::one(GRAM_VARS));
    let total = max.iter().sum::<u32>();
    for n in 1..=total {
        for i in 0..=max[0].min(n) {
            for j in 0..=max[1].min(n - i) {
                let l = n - i - j;
                if l > max[2] {
                    continue;
                }
                let mut acc = MultiPoly::zero(GRAM_VARS);
                for (k, fk) in &f {
                    let deg = k[0] + k[1] + k[2];
                    if deg == 0 || k[0] > i || k[1] > j || k[2] > l {
                        continue;
                    }
                    if let Some(prev) = g.get(&[i - k[0], j - k[1], l - k[2]]) {
                        let w = rat(2 * n as i64 - deg as i64);
                        acc.add_scaled(&(fk * prev), &w);
                    }
                }
                if !acc.is_zero() {
                    g.insert([i, j, l], acc.scale(&BigRational::new((-1).into(), (2 * n as i64).into())));
                }
            }
        }
    }
    Ok(g)
}

/// The coefficient of `X₁^{μ₁} X₂^{μ₂} X₃^{μ₃}`, spanning the invariant
/// trilinear harmonics of degrees `(μ₂+μ₃, μ₁+μ₃, μ₁+μ₂)`.
pub fn ibukiyama_coeff(mu: [u32; 3]) -> Result<GenSeriesCoeff> {
    let g = generating_series(mu)?;
    Ok(GenSeriesCoeff {
        mu,
        poly: g.get(&mu).cloned().unwrap_or_else(|| MultiPoly::zero(GRAM_VARS)),
    })
}

/// Laplacian in the `which`-th vector (`0 = x`, `1 = y`, `2 = z`) of a
/// polynomial in Gram variables, for vectors in `ℝ^dim`.
pub fn gram_laplacian(f: &MultiPoly, which: usize, dim: u32) -> MultiPoly {
    // pairs: r₃ ↔ (x,y), r₂ ↔ (x,z), r₁ ↔ (y,z)
    let pair = |u: usize, v: usize| R[3 - u - v];
    let (u, w) = match which {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let m = M[which];
    let ra = pair(which, u);
    let rb = pair(which, w);
    let rc = pair(u, w);
    let d = |p: &MultiPoly, i: usize| p.derivative(i);
    let fm = d(f, m);
    let mut out = fm.scale(&rat(2 * dim as i64));
    let terms = [
        (gvar(m), d(&fm, m)),
        (gvar(ra), d(&fm, ra)),
        (gvar(rb), d(&fm, rb)),
        (gvar(M[u]), d(&d(f, ra), ra)),
        (gvar(rc), d(&d(f, ra), rb)),
        (gvar(M[w]), d(&d(f, rb), rb)),
    ];
    for (c, p) in terms {
        out.add_scaled(&(&c * &p), &rat(4));
    }
    out
}

/// Substitutes `mᵢ = (vᵢ,vᵢ)` and `rᵢ = 2(v_j,v_k)` for three vectors in
/// `ℝ⁴`: variables `x₀..x₃, y₀..y₃, z₀..z₃`.
pub fn expand_to_vectors(f: &MultiPoly) -> MultiPoly {
    let n = 12;
    let v = |k: usize, i: usize| MultiPoly::var(n, 4 * k + i);
    let dot = |a: usize, b: usize| {
        let mut s = MultiPoly::zero(n);
        for i in 0..4 {
            s = &s + &(&v(a, i) * &v(b, i));
        }
        s
    };
    let two = rat(2);
    let subs = [dot(0, 0), dot(1, 1), dot(2, 2), dot(1, 2).scale(&two), dot(0, 2).scale(&two), dot(0, 1).scale(&two)];
    f.compose(&subs)
}

/// Leading coefficient relating the normalized polynomial `P₀` to the
/// series coefficient: `2^b 2^{4a′} Γ(a′+2) / (Γ(a′+b+2) b!)` divided by the
/// coefficient of `r₁^{a′} r₂^{a′} r₃^{a′+b}`.
pub fn p0_scale(a_half: u32, b: u32) -> Result<BigRational> {
    let target = pow2((b + 4 * a_half) as i64) * factr(a_half as u64 + 1)
        / (factr((a_half + b) as u64 + 1) * factr(b as u64));
    let coeff = ibukiyama_coeff([a_half, a_half, a_half + b])?;
    let mut e = vec![0u32; GRAM_VARS];
    e[R[0]] = a_half;
    e[R[1]] = a_half;
    e[R[2]] = a_half + b;
    let lead = coeff.poly.coeff(&e);
    if lead.is_zero() {
        return Err(Error::numerical("leading coefficient vanishes"));
    }
    Ok(target / lead)
}

/// `P₀` as a polynomial in the Gram variables.
pub fn p0_polynomial(a_half: u32, b: u32) -> Result<MultiPoly> {
    let c = ibukiyama_coeff([a_half, a_half, a_half + b])?;
    Ok(c.poly.scale(&p0_scale(a_half, b)?))
}

/// `P₀(w,w,w)` from the polynomial at `m = 1`, `r = 2`.
pub fn p0_diag_from_series(a_half: u32, b: u32) -> Result<BigRational> {
    let p = p0_polynomial(a_half, b)?;
    Ok(p.eval(&[rat(1), rat(1), rat(1), rat(2), rat(2), rat(2)]))
}

/// The invariant trilinear form `T(Q₁,Q₂,Q₃) = ⟨P₀, Q₁⊗Q₂⊗Q₃⟩` on
/// harmonics of degrees `(a+b, a+b, a)` in four variables, with the
/// product in which the kernels `G^{(α)}_w` reproduce.
pub fn trilinear_t(q1: &MultiPoly, q2: &MultiPoly, q3: &MultiPoly) -> Result<BigRational> {
    let degs: Vec<u32> = [q1, q2, q3]
        .iter()
        .map(|q| {
            if q.nvars() != 4 {
                return Err(Error::invalid("trilinear_t takes polynomials in 4 variables"));
            }
            q.homogeneous_degree().ok_or_else(|| Error::invalid("inputs must be homogeneous"))
        })
        .collect::<Result<_>>()?;
    if degs[0] != degs[1] || degs[2] > degs[0] || degs[2] % 2 != 0 {
        return Err(Error::invalid(format!("degree triple {degs:?} is not of the form (a+b, a+b, a)")));
    }
    let a_half = degs[2] / 2;
    let b = degs[0] - degs[2];
    if q1.is_zero() || q2.is_zero() || q3.is_zero() {
        return Ok(BigRational::zero());
    }
    let p = expand_to_vectors(&p0_polynomial(a_half, b)?);
    let qs = [q1, q2, q3];
    let mut caches: [HashMap<Vec<u32>, BigRational>; 3] = Default::default();
    let mut total = BigRational::zero();
    for (e, c) in p.terms() {
        let mut term = c.clone();
        for k in 0..3 {
            let ek = e[4 * k..4 * k + 4].to_vec();
            let v = caches[k]
                .entry(ek.clone())
                .or_insert_with(|| mean_product(&MultiPoly::monomial(ek, BigRational::one()), qs[k]))
                .clone();
            if v.is_zero() {
                term = BigRational::zero();
                break;
            }
            term *= v;
        }
        total += term;
    }
    let scale: BigRational = degs.iter().map(|&d| rat(d as i64 + 1)).product();
    Ok(total * scale)
}

/// Both sides of the comparison between the S³ integral of tensor squares
/// and the squared S² integral: `(∫_{S³} ⊗², (π/4c₁)(∫_{S²})²)` in the
/// calibrated measures.
pub fn square_compare(q1: &MultiPoly, q2: &MultiPoly, q3: &MultiPoly) -> Result<(PiScaled, PiScaled)> {
    let degs: Vec<u32> = [q1, q2, q3].iter().map(|q| q.homogeneous_degree().unwrap_or(0)).collect();
    if degs[0] != degs[1] || degs[2] > degs[0] {
        return Err(Error::invalid(format!("degree triple {degs:?} is not of the form (a′+b/2, a′+b/2, a′)")));
    }
    let a_half = degs[2];
    let b = 2 * (degs[0] - degs[2]);
    let t1 = tensor_embed(q1, q1)?;
    let t2 = tensor_embed(q2, q2)?;
    let t3 = tensor_embed(q3, q3)?;
    let lhs = triple_integral_s3(&t1, &t2, &t3, SphereMeasure::Calibrated)?;
    let s2 = triple_integral_s2(q1, q2, q3, SphereMeasure::Calibrated)?;
    let c = c1_general(a_half, b)?;
    if c.is_zero() {
        return Err(Error::precondition(format!("odd total degree {}: both sides vanish", 2 * degs[0] + degs[2])));
    }
    let rhs = &PiScaled::new(ratio(1, 4) / c, 1) * &s2.square();
    Ok((lhs, rhs))
}

/// `c₁` without the parity restriction, directly from the Legendre triple
/// integral.
pub fn c1_general(a_half: u32, b: u32) -> Result<BigRational> {
    use crate::poly::gegenbauer::legendre_1d;
    let n1 = a_half + b / 2;
    let p1 = legendre_1d(n1);
    let p3 = legendre_1d(a_half);
    // ∫_{-1}^{1} P_{n1}² P_{a′} dt
    let mut prod = vec![BigRational::zero(); (2 * n1 + a_half + 1) as usize];
    for (i, x) in p1.coeffs.iter().enumerate() {
        for (j, y) in p1.coeffs.iter().enumerate() {
            for (l, z) in p3.coeffs.iter().enumerate() {
                prod[i + j + l] += x * y * z;
            }
        }
    }
    Ok(prod
        .iter()
        .enumerate()
        .filter(|(k, _)| k % 2 == 0)
        .map(|(k, c)| c * BigRational::new(2.into(), (k as i64 + 1).into()))
        .sum())
}

/// One named multiplicative factor of a predicted value.
#[derive(Clone, Debug, Serialize)]
pub struct Factor {
    pub name: String,
    pub value: f64,
    pub log: f64,
}

/// How the three harmonics feeding the prediction are normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InputNormalization {
    /// `⟨⟨P,P⟩⟩₀ = 1`, the normalization giving newforms with `a₁ = 1`.
    Gegenbauer,
    /// Unit L² norm in the calibrated S² measure.
    L2,
}

/// Predicted central value with every factor exposed.
#[derive(Clone, Debug, Serialize)]
pub struct CentralValuePrediction {
    pub index: TripleIndex,
    pub value: f64,
    pub factors: Vec<Factor>,
    /// The uncorrected trilinear route with the unit average inside the
    /// trilinear form: differs from `value` by `1/|R^×|²`.
    pub trilinear_route: f64,
    /// The variant with Petersson norms replaced by symmetric-square values.
    pub symmetric_square_route: f64,
}

fn ln_g(x: f64) -> f64 {
    ln_gamma_real(x)
}

fn factor(name: &str, log: f64) -> Factor {
    Factor {
        name: name.to_string(),
        value: log.exp(),
        log,
    }
}

/// Gamma quotient of the corrected central-value formula.
fn gamma_quotient_first(a: f64, b: f64) -> f64 {
    (b + a).ln() + a.ln() + 2.0 * ln_g((a + b) / 2.0) + 4.0 * ln_g(a / 2.0) + ln_g(3.0 * a + b + 2.0)
        - 2.0 * ln_g(a)
        - ln_g(2.0 * a)
        - 2.0 * ln_g((3.0 * a + b) / 2.0 + 1.0)
        - ln_g(a + b)
        - 2.0 * ln_g(2.0 * a + b + 1.0)
}

/// Gamma quotient of the symmetric-square variant.
fn gamma_quotient_second(a: f64, b: f64) -> f64 {
    2.0 * a.ln() + (2.0 * a + 1.0).ln() + (a + b).ln() + 2.0 * (b + 2.0 * a + 1.0).ln()
        + 2.0 * ln_g((a + b) / 2.0)
        + ln_g(3.0 * a + b + 2.0)
        + 4.0 * ln_g(a / 2.0)
        - 2.0 * ln_g(a)
        - 2.0 * ln_g((3.0 * a + b) / 2.0 + 1.0)
        - ln_g(a + b)
}

/// `ln` of the L² renormalization `(a′+(b+1)/2)^{−2} (a′+1/2)^{−1}`.
fn ln_renormalization(a: f64, b: f64) -> f64 {
    -2.0 * (a + (b + 1.0) / 2.0).ln() - (a + 0.5).ln()
}

/// Right-hand side of the corrected central-value formula
/// `N^{−1} 2^{12a′+4b−4−ω} π^{5+6a′+2b} ⟨f₁,f₁⟩²⟨f₃,f₃⟩ · Γ-quotient · (∫P₁P₁P₃)²`
/// with the integral in the calibrated S² measure, passed squared so that it
/// stays exact for normalized inputs.
pub fn predicted_central_value(
    idx: &TripleIndex,
    integral_squared: &PiScaled,
    petersson: [f64; 3],
    input: InputNormalization,
    unit_count: usize,
) -> Result<CentralValuePrediction> {
    idx.check_parity()?;
    let a = idx.a_half() as f64;
    let b = idx.b() as f64;
    if a == 0.0 {
        return Err(Error::precondition("a' = 0 is outside the formula's range"));
    }
    let omega = idx.omega() as f64;
    let n = idx.level as f64;
    let pi = std::f64::consts::PI;
    let squared = integral_squared.to_f64();
    if squared < 0.0 {
        return Err(Error::invalid("squared integral is negative"));
    }
    let mut factors = vec![
        factor("level", -n.ln()),
        factor("power_of_two", (12.0 * a + 4.0 * b - 4.0 - omega) * 2f64.ln()),
        factor("power_of_pi", (5.0 + 6.0 * a + 2.0 * b) * pi.ln()),
        factor("petersson", petersson.iter().map(|p| p.ln()).sum()),
        factor("gamma_quotient", gamma_quotient_first(a, b)),
    ];
    if input == InputNormalization::L2 {
        factors.push(factor("renormalization", ln_renormalization(a, b)));
    }
    let ln_rest: f64 = factors.iter().map(|f| f.log).sum();
    factors.push(Factor {
        name: "triple_integral_squared".into(),
        value: squared,
        log: squared.ln(),
    });
    let finish = |ln: f64| if squared == 0.0 { 0.0 } else { (ln + squared.ln()).exp() };
    let value = finish(ln_rest);

    // the trilinear route: N^{-1} 2^{5+4a+3b−ω} π^{5+6a′+2b} · correction ·
    // ⟨⟩³ · T₀(P/|R^×|)², with T₀² = P₀(w,w,w) · ∫_{S³} (probability) and
    // the S³ integral equal to (∫_{S²})² / (2c₁)
    let (ai, bi) = (idx.a_half(), idx.b());
    let correction = ((a + 1.0 + b).ln() + ln_g(b + 1.0))
        - (2.0 * ln_g(a + 1.0) + ln_g(a + 2.0) + ln_g(3.0 * a + b + 2.0));
    let p0 = p0_diag(ai, bi).to_f64().unwrap().ln();
    let c = c1(ai, bi)?.to_f64().unwrap().ln();
    let renorm = if input == InputNormalization::L2 { ln_renormalization(a, b) } else { 0.0 };
    let ln_trilinear = -n.ln()
        + (5.0 + 8.0 * a + 3.0 * b - omega) * 2f64.ln()
        + (5.0 + 6.0 * a + 2.0 * b) * pi.ln()
        + correction
        + petersson.iter().map(|p| p.ln()).sum::<f64>()
        + p0
        - 2f64.ln()
        - c
        - 2.0 * (unit_count as f64).ln()
        + renorm;
    let trilinear_route = finish(ln_trilinear);

    // symmetric-square variant: ⟨f,f⟩ = (4π)^{1−k} Γ(k) D_f(k−1)
    let k1 = idx.k1() as f64;
    let k3 = idx.k3() as f64;
    let ln_d = |pet: f64, k: f64| pet.ln() + (k - 1.0) * (4.0 * pi).ln() - ln_g(k);
    let ln_second = (-9.0 - omega) * 2f64.ln()
        + 2.0 * pi.ln()
        + ln_d(petersson[0], k1)
        + ln_d(petersson[1], k1)
        + ln_d(petersson[2], k3)
        + gamma_quotient_second(a, b)
        + renorm;
    let symmetric_square_route = finish(ln_second);
    Ok(CentralValuePrediction {
        index: *idx,
        value,
        factors,
        trilinear_route,
        symmetric_square_route,
    })
}

/// Factor in front of `D_{f₁}² D_{f₃} (∫P₁P₁P₃)²`, before and after the L²
/// renormalization.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Prefactor {
    pub raw: f64,
    pub renormalized: f64,
}

pub fn lower_bound_prefactor(idx: &TripleIndex) -> Result<Prefactor> {
    idx.check_parity()?;
    let a = idx.a_half() as f64;
    let b = idx.b() as f64;
    if a == 0.0 {
        return Err(Error::precondition("a' = 0 is outside the formula's range"));
    }
    let omega = idx.omega() as f64;
    let ln_raw = (-9.0 - omega) * 2f64.ln() + 2.0 * std::f64::consts::PI.ln() + gamma_quotient_second(a, b);
    Ok(Prefactor {
        raw: ln_raw.exp(),
        renormalized: (ln_raw + ln_renormalization(a, b)).exp(),
    })
}

/// Squared calibrated `∫ P₁P₁P₃` after scaling both inputs to
/// `⟨⟨P,P⟩⟩₀ = (2ν+1)∫P² dσ̄ = 1`.
pub fn normalized_integral_squared(p1: &MultiPoly, p3: &MultiPoly) -> Result<PiScaled> {
    let d1 = p1.homogeneous_degree().ok_or_else(|| Error::invalid("P₁ must be homogeneous"))?;
    let d3 = p3.homogeneous_degree().ok_or_else(|| Error::invalid("P₃ must be homogeneous"))?;
    let n1 = rat(2 * d1 as i64 + 1) * mean_product(p1, p1);
    let n3 = rat(2 * d3 as i64 + 1) * mean_product(p3, p3);
    if n1.is_zero() || n3.is_zero() {
        return Err(Error::invalid("zero polynomial"));
    }
    let t = triple_integral_s2(p1, p1, p3, SphereMeasure::Calibrated)?;
    Ok(PiScaled::new(&t.rational * &t.rational / (&n1 * &n1 * n3), 2 * t.pi_power))
}

/// `∫ P³` against the probability measure on S².
pub fn cubic_mean(p: &MultiPoly) -> BigRational {
    sphere_mean(&(&(p * p) * p))
}
