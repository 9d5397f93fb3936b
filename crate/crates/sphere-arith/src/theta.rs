//! Theta series with harmonic coefficients, q-expansions, Hecke relations,
//! Satake parameters and Petersson norms on Γ₀(2).
//!
//! Expansions use `q = e^{2πi z}`, so the theta series of a unit-invariant
//! harmonic of degree ν on the Hurwitz order is a form of weight `2 + 2ν`
//! and level 2 with integral exponents.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hecke::unit_average;
use crate::numeric::gamma::ln_gamma_real;
use crate::numeric::quadrature::gauss_legendre;
use crate::poly::{tensor_embed, MultiPoly};
use crate::quat::{is_prime, OrderKind, OrderSpec};

/// A q-expansion `Σ_{n≥0} a_n qⁿ` known through `n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct QExpansion {
    pub weight: u32,
    pub level: u64,
    /// `coeffs[n] = a_n` for `0 ≤ n ≤ n_max`.
    pub coeffs: Vec<BigRational>,
}

impl QExpansion {
    pub fn new(weight: u32, level: u64, coeffs: Vec<BigRational>) -> Self {
        QExpansion { weight, level, coeffs }
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn a(&self, n: usize) -> &BigRational {
        &self.coeffs[n]
    }

    pub fn is_cuspidal(&self) -> bool {
        self.coeffs.first().is_none_or(|c| c.is_zero())
    }

    /// Scaled so that `a_1 = 1`.
    pub fn normalized(&self) -> Result<QExpansion> {
        let a1 = self
            .coeffs
            .get(1)
            .filter(|c| !c.is_zero())
            .ok_or_else(|| Error::precondition("a_1 vanishes, cannot normalize"))?
            .clone();
        Ok(QExpansion {
            weight: self.weight,
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c / &a1).collect(),
        })
    }

    /// `Some(c)` when `self = c · other` on the common range.
    pub fn proportionality(&self, other: &QExpansion) -> Option<BigRational> {
        let n = self.n_max().min(other.n_max());
        let mut ratio: Option<BigRational> = None;
        for i in 0..=n {
            let (a, b) = (&self.coeffs[i], &other.coeffs[i]);
            match (a.is_zero(), b.is_zero()) {
                (true, true) => continue,
                (false, false) => {
                    let r = a / b;
                    match &ratio {
                        None => ratio = Some(r),
                        Some(q) if *q == r => {}
                        Some(_) => return None,
                    }
                }
                _ => return None,
            }
        }
        ratio
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// `f(z)` from the truncated series.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let q = (Complex64::i() * 2.0 * PI * z).exp();
        let coeffs = self.coeffs_f64();
        // Horner in q
        let mut acc = Complex64::zero();
        for c in coeffs.iter().rev() {
            acc = acc * q + c;
        }
        acc
    }

    /// Text form: a `# weight k level N` header and one `n a_n` per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("# weight {} level {}\n", self.weight, self.level);
        for (n, c) in self.coeffs.iter().enumerate() {
            writeln!(s, "{n} {c}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<QExpansion> {
        let mut weight = None;
        let mut level = None;
        let mut coeffs: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            let err = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                let toks: Vec<&str> = h.split_whitespace().collect();
                for w in toks.chunks(2) {
                    match w {
                        ["weight", v] => weight = Some(v.parse().map_err(|_| err("bad weight"))?),
                        ["level", v] => level = Some(v.parse().map_err(|_| err("bad level"))?),
                        _ => return Err(err("unknown header field")),
                    }
                }
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(n), Some(c), None) = (it.next(), it.next(), it.next()) else {
                return Err(err("expected `n a_n`"));
            };
            let n: usize = n.parse().map_err(|_| err("bad index"))?;
            let c: BigRational = c.parse().map_err(|_| err("bad coefficient"))?;
            if coeffs.insert(n, c).is_some() {
                return Err(err("duplicate index"));
            }
        }
        let (Some(weight), Some(level)) = (weight, level) else {
            return Err(Error::Parse {
                line: 1,
                msg: "missing weight/level header".into(),
            });
        };
        let n_max = coeffs.keys().next_back().copied().unwrap_or(0);
        let mut v = vec![BigRational::zero(); n_max + 1];
        for (n, c) in coeffs {
            v[n] = c;
        }
        Ok(QExpansion::new(weight, level, v))
    }
}

/// Calls `f(norm, doubled coordinates)` for every order element of norm in
/// `1..=n_max`, grouped by the first coordinate for parallelism.
fn accumulate_ball<T: Send>(
    order: OrderSpec,
    n_max: u64,
    init: impl Fn() -> T + Sync,
    visit: impl Fn(&mut T, u64, [i64; 4]) + Sync,
    merge: impl Fn(T, T) -> T + Sync + Send,
) -> T {
    let bound = 4 * n_max as i64;
    let r = (bound as f64).sqrt() as i64 + 1;
    let pars: &[i64] = match order.kind {
        OrderKind::Lipschitz => &[0],
        OrderKind::Hurwitz => &[0, 1],
    };
    let firsts: Vec<(i64, i64)> = pars
        .iter()
        .flat_map(|&par| (-r..=r).filter(move |a| a.rem_euclid(2) == par).map(move |a| (a, par)))
        .collect();
    firsts
        .par_iter()
        .map(|&(a, par)| {
            let mut acc = init();
            let range = |lim: i64| (-lim..=lim).filter(move |v| v.rem_euclid(2) == par);
            let ra = bound - a * a;
            if ra < 0 {
                return acc;
            }
            let lim = |x: i64| (x as f64).sqrt() as i64 + 1;
            for b in range(lim(ra)) {
                let rb = ra - b * b;
                if rb < 0 {
                    continue;
                }
                for c in range(lim(rb)) {
                    let rc = rb - c * c;
                    if rc < 0 {
                        continue;
                    }
                    for e in range(lim(rc)) {
                        let n4 = a * a + b * b + c * c + e * e;
                        if n4 == 0 || n4 > bound {
                            continue;
                        }
                        visit(&mut acc, (n4 / 4) as u64, [a, b, c, e]);
                    }
                }
            }
            acc
        })
        .reduce(&init, &merge)
}

/// Theta series `(1/|R^×|) Σ_{x ∈ R} (P⊗P)(x) q^{n(x)}` of a unit-invariant
/// harmonic `P` on S².
pub fn theta_series(p: &MultiPoly, order: OrderSpec, n_max: usize) -> Result<QExpansion> {
    if p.nvars() != 3 || !p.is_homogeneous() {
        return Err(Error::invalid("theta_series takes a homogeneous polynomial in 3 variables"));
    }
    if p.is_zero() || unit_average(p, order) != *p {
        return Err(Error::invalid("polynomial is not invariant under the unit group"));
    }
    let nu = p.homogeneous_degree().unwrap_or(0);
    let form = tensor_embed(p, p)?;
    theta_of_quaternion_polynomial(&form, order, n_max, 2 + 2 * nu)
}

/// Theta series `(1/|R^×|) Σ_{x ∈ R} F(x) q^{n(x)}` of a homogeneous
/// polynomial on the quaternions.
pub fn theta_of_quaternion_polynomial(
    form: &MultiPoly,
    order: OrderSpec,
    n_max: usize,
    weight: u32,
) -> Result<QExpansion> {
    let deg = form.homogeneous_degree().unwrap_or(0);
    let ip = form.integer_form();
    let small = ip.small_coeffs();
    let n_len = n_max + 1;
    type Acc = (Vec<i128>, Vec<BigInt>);
    let (fast, slow): Acc = accumulate_ball(
        order,
        n_max as u64,
        || (vec![0i128; n_len], vec![BigInt::zero(); n_len]),
        |acc, n, d| {
            let n = n as usize;
            let v = small.as_ref().and_then(|c| ip.eval_numer_i128(&d, c));
            match v.and_then(|v| acc.0[n].checked_add(v)) {
                Some(s) => acc.0[n] = s,
                None => {
                    let x: Vec<BigInt> = d.iter().map(|&t| BigInt::from(t)).collect();
                    acc.1[n] += ip.eval_numer(&x);
                }
            }
        },
        |mut a, b| {
            for n in 0..n_len {
                match a.0[n].checked_add(b.0[n]) {
                    Some(s) => a.0[n] = s,
                    None => a.1[n] += BigInt::from(b.0[n]),
                }
                a.1[n] += &b.1[n];
            }
            a
        },
    );
    // F is evaluated at doubled coordinates: divide by 2^deg and the denominator
    let scale = &ip.denom * BigInt::from(2).pow(deg) * BigInt::from(order.unit_count());
    let mut coeffs: Vec<BigRational> = (0..n_len)
        .map(|n| BigRational::new(BigInt::from(fast[n]) + &slow[n], scale.clone()))
        .collect();
    // the zero vector
    coeffs[0] += BigRational::new(
        ip.terms.iter().filter(|(e, _)| e.iter().all(|&k| k == 0)).map(|(_, c)| c.clone()).sum(),
        &ip.denom * BigInt::from(order.unit_count()),
    );
    Ok(QExpansion::new(weight, order.theta_level(), coeffs))
}

/// `q ∏_{n≥1} (1 − qⁿ)⁸ (1 − q²ⁿ)⁸`, the weight-8 newform of level 2.
pub fn eta_product_8(n_max: usize) -> QExpansion {
    let len = n_max + 1;
    let mut series = vec![BigInt::zero(); len];
    if len > 1 {
        series[1] = BigInt::one();
    }
    let mul_factor = |s: &mut Vec<BigInt>, m: usize| {
        // multiply by (1 − q^m) in place, high to low
        for i in (m..len).rev() {
            let t = s[i - m].clone();
            s[i] -= t;
        }
    };
    for n in 1..len {
        for _ in 0..8 {
            mul_factor(&mut series, n);
            if 2 * n < len {
                mul_factor(&mut series, 2 * n);
            }
        }
    }
    QExpansion::new(8, 2, series.into_iter().map(BigRational::from_integer).collect())
}

/// Largest relative residual of `a_p a_n = a_{pn} + p^{k−1} a_{n/p}` over
/// all `n` with `pn ≤ n_max`, with `a_p` read relative to `a_1`; exactly
/// zero for a Hecke eigenform.
pub fn hecke_relation_residual(f: &QExpansion, p: u64) -> Result<BigRational> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if f.level % p == 0 {
        return Err(Error::invalid(format!("p = {p} divides the level")));
    }
    let p = p as usize;
    let n_max = f.n_max();
    if p * p > n_max {
        return Err(Error::precondition(format!(
            "need coefficients through p² = {} (have {n_max})",
            p * p
        )));
    }
    let pk = BigRational::from_integer(BigInt::from(p).pow(f.weight - 1));
    if f.coeffs[1].is_zero() {
        return Err(Error::precondition("a_1 vanishes"));
    }
    let ap = &(&f.coeffs[p] / &f.coeffs[1]);
    let mut worst = BigRational::zero();
    for n in 1..=n_max / p {
        let lower = if n % p == 0 { &f.coeffs[n / p] * &pk } else { BigRational::zero() };
        let res = (ap * &f.coeffs[n] - &f.coeffs[p * n] - &lower).abs();
        let scale = [(ap * &f.coeffs[n]).abs(), f.coeffs[p * n].abs(), lower.abs(), BigRational::one()]
            .into_iter()
            .max()
            .unwrap();
        let rel = res / scale;
        if rel > worst {
            worst = rel;
        }
    }
    Ok(worst)
}

/// Roots of `X² − a_p X + p^{k−1}` at a good prime.
#[derive(Clone, Debug, Serialize)]
pub struct SatakeData {
    pub p: u64,
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
    /// `|α_p| = |β_p| = p^{(k−1)/2}` within `1e-10` relative.
    pub ramanujan: bool,
}

impl SatakeData {
    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.alpha.0, self.alpha.1)
    }
    pub fn beta(&self) -> Complex64 {
        Complex64::new(self.beta.0, self.beta.1)
    }
}

pub fn satake(f: &QExpansion, p: u64) -> Result<SatakeData> {
    if f.level % p == 0 {
        return Err(Error::invalid(format!("p = {p} divides the level")));
    }
    let ap = f
        .coeffs
        .get(p as usize)
        .ok_or_else(|| Error::precondition(format!("a_{p} not available")))?
        .to_f64()
        .unwrap();
    let pk = (p as f64).powi(f.weight as i32 - 1);
    let disc = Complex64::new(ap * ap - 4.0 * pk, 0.0).sqrt();
    let alpha = (Complex64::new(ap, 0.0) + disc) / 2.0;
    // β from the product, which is better conditioned than the difference
    let beta = Complex64::new(pk, 0.0) / alpha;
    let target = pk.sqrt();
    let ramanujan = (alpha.norm() / target - 1.0).abs() < 1e-10 && (beta.norm() / target - 1.0).abs() < 1e-10;
    Ok(SatakeData {
        p,
        alpha: (alpha.re, alpha.im),
        beta: (beta.re, beta.im),
        ramanujan,
    })
}

/// Number of divisors.
pub fn divisor_count(n: u64) -> u64 {
    let mut c = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            c += if d * d == n { 1 } else { 2 };
        }
        d += 1;
    }
    c
}

/// Indices `n` violating `|a_n| ≤ d(n) n^{(k−1)/2} (1 + 1e-6)`.
pub fn deligne_violations(f: &QExpansion) -> Vec<usize> {
    let k = f.weight as f64;
    (1..=f.n_max())
        .filter(|&n| {
            let a = f.coeffs[n].to_f64().unwrap().abs();
            a > divisor_count(n as u64) as f64 * (n as f64).powf((k - 1.0) / 2.0) * (1.0 + 1e-6)
        })
        .collect()
}

/// Eigenvalue `η = ±1` of the Atkin–Lehner involution on a newform of
/// level 2, read off from `a_2 = −η 2^{k/2−1}`.
pub fn atkin_lehner_sign(f: &QExpansion) -> Result<i32> {
    if f.level != 2 {
        return Err(Error::precondition("Atkin–Lehner sign is implemented for level 2"));
    }
    let a2 = f.coeffs.get(2).ok_or_else(|| Error::precondition("a_2 not available"))?;
    let unit = BigRational::from_integer(BigInt::from(2).pow(f.weight / 2 - 1));
    if *a2 == -unit.clone() {
        Ok(1)
    } else if *a2 == unit {
        Ok(-1)
    } else {
        Err(Error::precondition(format!("a_2 = {a2} is not ±2^(k/2-1): not a newform")))
    }
}

/// Root number `(−1)^{k/2} η` of the L-function of a level-2 newform.
pub fn root_number(f: &QExpansion) -> Result<i32> {
    let eta = atkin_lehner_sign(f)?;
    Ok(if (f.weight / 2) % 2 == 0 { eta } else { -eta })
}

/// Newform q-expansion from its prime coefficients: multiplicative, with
/// `a_{p^{r+1}} = a_p a_{p^r} − p^{k−1} a_{p^{r−1}}` at good `p` and
/// `a_{2^r} = a_2^r` at the level.
pub fn expansion_from_primes(weight: u32, prime_coeffs: &BTreeMap<u64, BigInt>, n_max: usize) -> Result<QExpansion> {
    let mut a = vec![BigInt::zero(); n_max + 1];
    if n_max >= 1 {
        a[1] = BigInt::one();
    }
    // smallest prime factor sieve
    let mut spf = vec![0usize; n_max + 1];
    for i in 2..=n_max {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n_max {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    for n in 2..=n_max {
        let p = spf[n];
        let mut m = n;
        let mut r = 0;
        while m % p == 0 {
            m /= p;
            r += 1;
        }
        let pp = n / m;
        if m > 1 {
            a[n] = &a[pp] * &a[m];
            continue;
        }
        let ap = prime_coeffs
            .get(&(p as u64))
            .ok_or_else(|| Error::precondition(format!("a_{p} missing")))?;
        a[n] = if p == 2 {
            ap.pow(r)
        } else if r == 1 {
            ap.clone()
        } else {
            ap * &a[n / p] - BigInt::from(p).pow(weight - 1) * &a[n / (p * p)]
        };
    }
    Ok(QExpansion::new(weight, 2, a.into_iter().map(BigRational::from_integer).collect()))
}

/// Petersson norm with its error estimate.
#[derive(Clone, Debug, Serialize)]
pub struct PeterssonValue {
    pub form: String,
    pub value: f64,
    pub error: f64,
    pub truncation_error: f64,
    pub quadrature_error: f64,
}

/// Tail bound `Σ_{n>N} d(n) n^{(k−1)/2} rⁿ` for the truncated series.
fn tail_bound(k: u32, n_max: usize, r: f64) -> f64 {
    let mut s = 0.0;
    for n in n_max + 1..n_max + 2000 {
        let t = 2.0 * (n as f64).sqrt() * (n as f64).powf((k as f64 - 1.0) / 2.0) * r.powi(n as i32);
        s += t;
        if t < 1e-300 {
            break;
        }
    }
    s
}

/// `∫_{Γ₀(2)\H} |f(z)|² y^k dx dy / y²` for a newform of level 2.
///
/// The domain is tiled by `F`, `S F` and `S T F` with `F` the standard
/// fundamental domain of SL₂(ℤ). On the last two the Atkin–Lehner relation
/// turns `f|S(w)` into `±2^{−k/2} f(w/2)`, so the integrand on `F` is
/// `y^k (|f(w)|² + 2^{−k}|f(w/2)|² + 2^{−k}|f((w+1)/2)|²)`.
pub fn petersson_norm(f: &QExpansion, name: &str, tolerance: f64) -> Result<PeterssonValue> {
    if f.level != 2 {
        return Err(Error::precondition("Petersson norm is implemented for level 2"));
    }
    if !f.is_cuspidal() {
        return Err(Error::precondition("form is not cuspidal"));
    }
    if f.n_max() < 50 {
        return Err(Error::precondition("need at least 50 coefficients"));
    }
    atkin_lehner_sign(f)?;
    let k = f.weight;
    let coeffs = f.coeffs_f64();
    let eval = |z: Complex64| -> Complex64 {
        let q = (Complex64::i() * 2.0 * PI * z).exp();
        let mut acc = Complex64::zero();
        for c in coeffs.iter().rev() {
            acc = acc * q + c;
        }
        acc
    };
    let two_k = 2f64.powi(-(k as i32));
    let n_max = f.n_max();
    let tail = |y: f64| tail_bound(k, n_max, (-2.0 * PI * y).exp());
    // integrand and a bound for the truncation error of |f|² terms
    let integrand = |x: f64, y: f64| -> (f64, f64) {
        let w = Complex64::new(x, y);
        let (t1, t2) = (tail(y), tail(y / 2.0));
        let a = eval(w).norm();
        let b = eval(w / 2.0).norm();
        let c = eval((w + 1.0) / 2.0).norm();
        let yk = y.powi(k as i32 - 2);
        let value = (a * a + two_k * (b * b + c * c)) * yk;
        let err = (2.0 * a * t1 + t1 * t1 + two_k * (2.0 * (b + c) * t2 + 2.0 * t2 * t2)) * yk;
        (value, err)
    };
    // x ↦ −x symmetry: integrate over [0, 1/2] and double
    let integrate = |nodes: usize| -> (f64, f64) {
        let (gx, gw) = gauss_legendre(nodes);
        let mut total = 0.0;
        let mut total_err = 0.0;
        for xp in 0..4 {
            let (x0, x1) = (xp as f64 / 8.0, (xp + 1) as f64 / 8.0);
            for (tx, wx) in gx.iter().zip(&gw) {
                let x = x0 + (x1 - x0) * (tx + 1.0) / 2.0;
                let jx = (x1 - x0) / 2.0;
                let y_lo = (1.0 - x * x).sqrt();
                // panels in y: up to 1, then width 1/2 until negligible
                let mut y0 = y_lo;
                let mut column = 0.0;
                let mut column_err = 0.0;
                loop {
                    let y1 = if y0 < 1.0 { 1.0 } else { y0 + 0.5 };
                    let mut panel = 0.0;
                    for (ty, wy) in gx.iter().zip(&gw) {
                        let y = y0 + (y1 - y0) * (ty + 1.0) / 2.0;
                        let (v, e) = integrand(x, y);
                        panel += wy * (y1 - y0) / 2.0 * v;
                        column_err += wy * (y1 - y0) / 2.0 * e;
                    }
                    column += panel;
                    if panel.abs() < 1e-18 * column.abs() || y1 > 80.0 {
                        break;
                    }
                    y0 = y1;
                }
                total += wx * jx * column;
                total_err += wx * jx * column_err;
            }
        }
        (2.0 * total, 2.0 * total_err)
    };
    let (coarse, _) = integrate(20);
    let (fine, truncation_error) = integrate(40);
    let quadrature_error = (fine - coarse).abs() + 1e-15 * fine.abs();
    let error = quadrature_error + truncation_error;
    if !(fine > 0.0) {
        return Err(Error::numerical("Petersson integral is not positive"));
    }
    if error > tolerance * fine {
        return Err(Error::numerical(format!(
            "Petersson error {error:e} exceeds tolerance {tolerance:e} (relative)"
        )));
    }
    Ok(PeterssonValue {
        form: name.to_string(),
        value: fine,
        error,
        truncation_error,
        quadrature_error,
    })
}

/// `D_f(k−1) = ⟨f,f⟩ (4π)^{k−1} / Γ(k)`.
pub fn symmetric_square_edge(f: &QExpansion, petersson: f64) -> f64 {
    let k = f.weight as f64;
    (petersson.ln() + (k - 1.0) * (4.0 * PI).ln() - ln_gamma_real(k)).exp()
}
