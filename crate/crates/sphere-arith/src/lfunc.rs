//! L-functions attached to a level-N eigenform: the form itself, its
//! symmetric cube and the degree-8 triple product, in the analytic
//! normalization with functional equation `s ↔ 1 − s`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::gamma::ln_gamma_c;
use crate::theta::{divisor_count, satake, QExpansion, SatakeData};
use crate::hecke::{hecke_coefficients, ExactEigenform};
use crate::quat::OrderKind;
use crate::theta::theta_series;
use crate::trilinear::TripleIndex;

/// Euler factor `1 + c₁X + … + c_d X^d` in `X = p^{−s}`, analytic
/// normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalFactor {
    pub p: u64,
    pub coeffs: Vec<Complex64>,
}

impl LocalFactor {
    fn from_roots(p: u64, roots: &[Complex64]) -> Self {
        let mut c = vec![Complex64::one()];
        for r in roots {
            c = poly_mul(&c, &[Complex64::one(), -r]);
        }
        LocalFactor { p, coeffs: c }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, other: &LocalFactor) -> Result<LocalFactor> {
        if self.p != other.p {
            return Err(Error::invalid(format!("prime mismatch: {} vs {}", self.p, other.p)));
        }
        Ok(LocalFactor {
            p: self.p,
            coeffs: poly_mul(&self.coeffs, &other.coeffs),
        })
    }

    /// Largest coefficient difference.
    pub fn distance(&self, other: &LocalFactor) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = Complex64::zero();
        (0..n)
            .map(|i| (self.coeffs.get(i).unwrap_or(&z) - other.coeffs.get(i).unwrap_or(&z)).norm())
            .fold(0.0, f64::max)
    }
}

fn poly_mul<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T>,
{
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// Satake pair divided by `p^{(k−1)/2}`.
fn unit_satake(s: &SatakeData, weight: u32) -> Result<(Complex64, Complex64)> {
    if weight < 2 {
        return Err(Error::invalid("weight must be at least 2"));
    }
    let scale = (s.p as f64).powf((weight as f64 - 1.0) / 2.0);
    Ok((s.alpha() / scale, s.beta() / scale))
}

/// Degree-8 factor `∏_{ε∈{α,β}³} (1 − ε₁ε₂ε₃ X)` of three forms with
/// their weights.
pub fn good_local_factor(forms: [(&SatakeData, u32); 3]) -> Result<LocalFactor> {
    let p = forms[0].0.p;
    if forms.iter().any(|(s, _)| s.p != p) {
        return Err(Error::invalid("Satake data for different primes"));
    }
    let pairs: Vec<(Complex64, Complex64)> = forms.iter().map(|(s, k)| unit_satake(s, *k)).collect::<Result<_>>()?;
    let mut roots = Vec::with_capacity(8);
    for e1 in [pairs[0].0, pairs[0].1] {
        for e2 in [pairs[1].0, pairs[1].1] {
            for e3 in [pairs[2].0, pairs[2].1] {
                roots.push(e1 * e2 * e3);
            }
        }
    }
    Ok(LocalFactor::from_roots(p, &roots))
}

fn check_distinct(s: &SatakeData) -> Result<()> {
    if (s.alpha() - s.beta()).norm() < 1e-12 * s.alpha().norm().max(1.0) {
        return Err(Error::invalid(format!("degenerate Satake pair α = β at p = {}", s.p)));
    }
    Ok(())
}

/// Degree-4 factor with roots `α³, α²β, αβ², β³` (normalized).
pub fn sym3_local_factor(s: &SatakeData, weight: u32) -> Result<LocalFactor> {
    check_distinct(s)?;
    let (a, b) = unit_satake(s, weight)?;
    Ok(LocalFactor::from_roots(s.p, &[a * a * a, a * a * b, a * b * b, b * b * b]))
}

/// Degree-2 factor with roots `α, β` (normalized).
pub fn gl2_local_factor(s: &SatakeData, weight: u32) -> Result<LocalFactor> {
    check_distinct(s)?;
    let (a, b) = unit_satake(s, weight)?;
    Ok(LocalFactor::from_roots(s.p, &[a, b]))
}

/// Which L-function of a single eigenform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LKind {
    /// `L(f, s)`.
    Form,
    /// `L(f, s − (k−1))`, the factor appearing twice in the triple product.
    ShiftedForm,
    /// Symmetric cube.
    Sym3,
    /// `L(f ⊗ f ⊗ f, s)`.
    Triple,
}

impl LKind {
    /// Degree of the L-function.
    pub fn degree(self) -> usize {
        match self {
            LKind::Form | LKind::ShiftedForm => 2,
            LKind::Sym3 => 4,
            LKind::Triple => 8,
        }
    }

    /// Exponent `w` with analytic `b_n = B_n / n^w` from classical `B_n`.
    pub fn analytic_shift(self, weight: u32) -> f64 {
        let h = (weight as f64 - 1.0) / 2.0;
        match self {
            LKind::Form => h,
            _ => 3.0 * h,
        }
    }

    /// Shifts `μ_j` with `γ(s) = ∏ Γ_ℂ(s + μ_j)`.
    pub fn gamma_shifts(self, weight: u32) -> Vec<f64> {
        let h = (weight as f64 - 1.0) / 2.0;
        match self {
            LKind::Form | LKind::ShiftedForm => vec![h],
            LKind::Sym3 => vec![3.0 * h, h],
            LKind::Triple => vec![3.0 * h, h, h, h],
        }
    }

    /// Conductor for a squarefree level `N`.
    pub fn conductor(self, level: u64) -> f64 {
        let n = level as f64;
        match self {
            LKind::Form | LKind::ShiftedForm => n,
            LKind::Sym3 => n.powi(3),
            LKind::Triple => n.powi(5),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LKind::Form => "form",
            LKind::ShiftedForm => "shifted_form",
            LKind::Sym3 => "sym3",
            LKind::Triple => "triple",
        }
    }
}

/// Euler factors at primes dividing the level.
#[derive(Clone, Debug, Default)]
pub enum BadFactor {
    /// Equal-forms factors from `a_p = ∓p^{k/2−1}`: `1 − a_p X` for the form,
    /// `1 − a_p³ X` for the symmetric cube and their product rule for the
    /// triple.
    #[default]
    Derived,
    /// Constant 1: the partial L-function without the bad primes.
    Trivial,
    /// Explicit classical factors `[1, c₁, …]` per prime.
    Custom(BTreeMap<u64, Vec<BigInt>>),
}

/// Prime-indexed Hecke data of one eigenform with integral coefficients.
#[derive(Clone, Debug)]
pub struct FormData {
    pub label: String,
    pub weight: u32,
    pub level: u64,
    /// `a_p` for every prime `p ≤` the intended length.
    pub ap: BTreeMap<u64, BigInt>,
}

impl FormData {
    /// Hecke data of the newform attached to a Hurwitz eigenfunction:
    /// `a_p = p^ν λ_p` at odd primes and `a_2` from its theta series.
    pub fn from_eigenform(form: &ExactEigenform, bound: u64, label: impl Into<String>) -> Result<Self> {
        if form.order.kind != OrderKind::Hurwitz {
            return Err(Error::precondition("newform data needs the Hurwitz order"));
        }
        let theta = theta_series(&form.poly, form.order, 2)?.normalized()?;
        let a2 = theta.a(2);
        if !a2.is_integer() {
            return Err(Error::numerical(format!("a_2 = {a2} is not integral")));
        }
        let mut ap: BTreeMap<u64, BigInt> = hecke_coefficients(form, bound)?.into_iter().collect();
        ap.insert(2, a2.to_integer());
        Ok(FormData {
            label: label.into(),
            weight: 2 + 2 * form.nu,
            level: 2,
            ap,
        })
    }
}

fn mul_big(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    poly_mul(a, b)
}

/// Classical (integral) Euler factor of `kind` at `p`.
pub fn exact_local_factor(kind: LKind, data: &FormData, p: u64, bad: &BadFactor) -> Result<Vec<BigInt>> {
    let ap = data
        .ap
        .get(&p)
        .ok_or_else(|| Error::precondition(format!("a_{p} missing")))?;
    let one = BigInt::one();
    if data.level % p == 0 {
        return match bad {
            BadFactor::Trivial => Ok(vec![one]),
            BadFactor::Custom(m) => m
                .get(&p)
                .cloned()
                .ok_or_else(|| Error::precondition(format!("unspecified bad factor at p = {p}"))),
            BadFactor::Derived => {
                if ap * ap != BigInt::from(p).pow(data.weight - 2) {
                    return Err(Error::precondition(format!(
                        "a_{p} = {ap} is not ±p^(k/2-1); no derived bad factor"
                    )));
                }
                let shifted = vec![one.clone(), -(ap * BigInt::from(p).pow(data.weight - 1))];
                let sym3 = vec![one.clone(), -(ap * ap * ap)];
                Ok(match kind {
                    LKind::Form => vec![one, -ap.clone()],
                    LKind::ShiftedForm => shifted,
                    LKind::Sym3 => sym3,
                    LKind::Triple => mul_big(&mul_big(&sym3, &shifted), &shifted),
                })
            }
        };
    }
    let q = BigInt::from(p).pow(data.weight - 1);
    let q3 = &q * &q * &q;
    let shifted = vec![one.clone(), -(&q * ap), q3.clone()];
    let sym3 = || {
        let outer = vec![one.clone(), -(ap * ap * ap - BigInt::from(3) * &q * ap), q3.clone()];
        mul_big(&outer, &shifted)
    };
    Ok(match kind {
        LKind::Form => vec![one, -ap.clone(), q],
        LKind::ShiftedForm => shifted.clone(),
        LKind::Sym3 => sym3(),
        LKind::Triple => mul_big(&mul_big(&sym3(), &shifted), &shifted),
    })
}

/// Degree-8 factor of a triple of possibly distinct forms. At primes
/// dividing a level the factor must be supplied in `bad`.
pub fn mixed_triple_factor(
    forms: [&QExpansion; 3],
    p: u64,
    bad: Option<&BTreeMap<u64, LocalFactor>>,
) -> Result<LocalFactor> {
    if forms.iter().any(|f| f.level % p == 0) {
        return bad
            .and_then(|m| m.get(&p))
            .cloned()
            .ok_or_else(|| Error::precondition(format!("unspecified bad factor at p = {p} for distinct forms")));
    }
    let s: Vec<SatakeData> = forms.iter().map(|f| satake(f, p)).collect::<Result<_>>()?;
    good_local_factor([(&s[0], forms[0].weight), (&s[1], forms[1].weight), (&s[2], forms[2].weight)])
}

fn smallest_prime_factors(m: usize) -> Vec<usize> {
    let mut spf = vec![0usize; m + 1];
    for i in 2..=m {
        if spf[i] == 0 {
            let mut j = i;
            while j <= m {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    spf
}

/// `b_1..b_m` of `∏_p F_p(p^{−s})^{−1}` with `factor(p) = [1, c₁, …]`.
/// Index 0 of the result is unused and zero.
pub fn dirichlet_coefficients<T, F>(m: usize, factor: F) -> Result<Vec<T>>
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T> + Neg<Output = T> + PartialEq + Send,
    F: Fn(u64) -> Result<Vec<T>> + Sync,
{
    let spf = smallest_prime_factors(m);
    let primes: Vec<usize> = (2..=m).filter(|&i| spf[i] == i).collect();
    let local: Vec<(usize, Vec<T>)> = primes
        .par_iter()
        .map(|&p| {
            let c = factor(p as u64)?;
            if c.is_empty() || !c[0].is_one() {
                return Err(Error::invalid(format!("local factor at p = {p} must have constant term 1")));
            }
            // powers p^0..p^r ≤ m
            let mut r = 0;
            let mut pp = 1usize;
            while pp <= m / p {
                pp *= p;
                r += 1;
            }
            let mut y: Vec<T> = vec![T::one()];
            for n in 1..=r {
                let mut acc = T::zero();
                for j in 1..c.len().min(n + 1) {
                    acc = acc + c[j].clone() * y[n - j].clone();
                }
                y.push(-acc);
            }
            Ok((p, y))
        })
        .collect::<Result<_>>()?;
    let series: BTreeMap<usize, Vec<T>> = local.into_iter().collect();
    let mut b = vec![T::zero(); m + 1];
    if m >= 1 {
        b[1] = T::one();
    }
    for n in 2..=m {
        let p = spf[n];
        let mut rest = n;
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        b[n] = series[&p][e].clone() * b[rest].clone();
    }
    Ok(b)
}

/// Classical integral coefficients `B_1..B_m`.
pub fn classical_coefficients(kind: LKind, data: &FormData, m: usize, bad: &BadFactor) -> Result<Vec<BigInt>> {
    dirichlet_coefficients(m, |p| exact_local_factor(kind, data, p, bad))
}

/// Largest `|b_{mn} − b_m b_n|` over coprime `m, n` with `mn ≤ bound`.
pub fn multiplicativity_defect(b: &[f64], bound: usize) -> f64 {
    let mut worst = 0.0f64;
    for m in 2..=bound {
        for n in 2..=bound / m {
            if num_integer::gcd(m, n) == 1 && m * n < b.len() {
                worst = worst.max((b[m * n] - b[m] * b[n]).abs());
            }
        }
    }
    worst
}

/// An L-series `Σ b_n n^{−s}` with its completing data.
#[derive(Clone, Debug, PartialEq)]
pub struct LSeriesSpec {
    pub label: String,
    /// `coeffs[n] = b_n`, index 0 unused.
    pub coeffs: Vec<f64>,
    pub gamma_shifts: Vec<f64>,
    pub conductor: f64,
    pub sign: Option<i32>,
}

#[derive(Serialize, Deserialize)]
struct LSeriesHeader {
    label: String,
    gamma_shifts: Vec<f64>,
    conductor: f64,
    sign: Option<i32>,
    length: usize,
}

impl LSeriesSpec {
    pub fn new(label: impl Into<String>, coeffs: Vec<f64>, gamma_shifts: Vec<f64>, conductor: f64) -> Result<Self> {
        if coeffs.len() < 2 || (coeffs[1] - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("need b_1 = 1"));
        }
        if conductor < 1.0 {
            return Err(Error::invalid("conductor must be at least 1"));
        }
        Ok(LSeriesSpec {
            label: label.into(),
            coeffs,
            gamma_shifts,
            conductor,
            sign: None,
        })
    }

    /// Analytic series of `kind` for one eigenform, together with its
    /// classical coefficients.
    pub fn for_form(kind: LKind, data: &FormData, m: usize, bad: &BadFactor) -> Result<(Self, Vec<BigInt>)> {
        let big = classical_coefficients(kind, data, m, bad)?;
        let w = kind.analytic_shift(data.weight);
        let coeffs: Vec<f64> = big
            .iter()
            .enumerate()
            .map(|(n, c)| if n == 0 { 0.0 } else { scaled(c, n as f64, w) })
            .collect();
        let spec = LSeriesSpec::new(
            format!("{}:{}", data.label, kind.name()),
            coeffs,
            kind.gamma_shifts(data.weight),
            kind.conductor(data.level),
        )?;
        Ok((spec, big))
    }

    pub fn with_sign(mut self, sign: i32) -> Self {
        self.sign = Some(sign);
        self
    }

    pub fn degree(&self) -> usize {
        2 * self.gamma_shifts.len()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Q ∏_j ((|1/2 + μ_j| + 3)/2π)²`.
    pub fn analytic_conductor(&self) -> f64 {
        let two_pi = 2.0 * std::f64::consts::PI;
        self.conductor * self.gamma_shifts.iter().map(|m| ((0.5 + m).abs() + 3.0) / two_pi).map(|x| x * x).product::<f64>()
    }

    /// Text form: a `# {json}` header, then `n b_n` per line.
    pub fn to_text(&self) -> String {
        let header = LSeriesHeader {
            label: self.label.clone(),
            gamma_shifts: self.gamma_shifts.clone(),
            conductor: self.conductor,
            sign: self.sign,
            length: self.len(),
        };
        let mut s = format!("# {}\n", serde_json::to_string(&header).expect("header serializes"));
        for (n, b) in self.coeffs.iter().enumerate().skip(1) {
            s.push_str(&format!("{n} {b:e}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, first) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let json = first.strip_prefix('#').ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let h: LSeriesHeader = serde_json::from_str(json.trim()).map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?;
        let mut coeffs = vec![0.0; h.length + 1];
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.into(),
            };
            let mut it = line.split_whitespace();
            let n: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad index"))?;
            let b: f64 = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad coefficient"))?;
            if it.next().is_some() || n == 0 || n > h.length {
                return Err(bad("malformed row"));
            }
            coeffs[n] = b;
        }
        let mut spec = LSeriesSpec::new(h.label, coeffs, h.gamma_shifts, h.conductor)?;
        spec.sign = h.sign;
        Ok(spec)
    }
}

/// `c / n^w` for a possibly huge integer `c`.
fn scaled(c: &BigInt, n: f64, w: f64) -> f64 {
    if c.is_zero() {
        return 0.0;
    }
    let bits = c.bits();
    if bits < 1000 {
        return c.to_f64().unwrap() / n.powf(w);
    }
    let shift = bits - 60;
    let top = (c >> shift).to_f64().unwrap();
    let sgn = if c.is_negative() { -1.0 } else { 1.0 };
    sgn * (top.abs().ln() + shift as f64 * std::f64::consts::LN_2 - w * n.ln()).exp()
}

/// Gamma shifts `μ` of the triple product of forms of weights
/// `k₁ = k₂` and `k₃` in analytic normalization.
pub fn triple_gamma_shifts(idx: &TripleIndex) -> Vec<f64> {
    let k1 = idx.k1() as f64;
    let k3 = idx.k3() as f64;
    vec![k1 + k3 / 2.0 - 1.5, k3 / 2.0 - 0.5, k3 / 2.0 - 0.5, k1 - k3 / 2.0 - 0.5]
}

fn ln_gamma_factor(shifts: &[f64], s: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::zero();
    for m in shifts {
        acc += ln_gamma_c(s + m).ok_or_else(|| Error::invalid(format!("gamma pole at s = {s}")))?;
    }
    Ok(acc)
}

/// `∏ Γ_ℂ(s + μ_j)` for the triple product.
pub fn completed_gamma(idx: &TripleIndex, s: Complex64) -> Result<Complex64> {
    Ok(ln_gamma_factor(&triple_gamma_shifts(idx), s)?.exp())
}

/// Analytic conductor at height `t`:
/// `N⁵ (1+|it−k₁−k₃/2|²)(1+|it−1−k₃/2|²)²(1+|it−1−k₁+k₃/2|²)`.
pub fn conductor(idx: &TripleIndex, t: f64) -> f64 {
    let k1 = idx.k1() as f64;
    let k3 = idx.k3() as f64;
    let q = |c: f64| 1.0 + t * t + c * c;
    (idx.level as f64).powi(5) * q(k1 + k3 / 2.0) * q(1.0 + k3 / 2.0).powi(2) * q(1.0 + k1 - k3 / 2.0)
}

/// Mellin-inversion parameters of the smoothed approximate functional
/// equation with weight `G(u) = e^{A u²}`.
///
/// `A = 0` lets the gamma factor alone do the smoothing; for large weights
/// it cuts the sum off far more sharply than `A = 1`, whose cutoff is only
/// Gaussian in `log n`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AfeParams {
    /// `Re u` of the contour.
    pub abscissa: f64,
    pub t_max: f64,
    pub step: f64,
    /// Balance point `X` between the two sums.
    pub cut: f64,
    /// `A` in `G(u) = e^{A u²}`.
    pub smoothing: f64,
}

impl Default for AfeParams {
    fn default() -> Self {
        AfeParams {
            abscissa: 1.5,
            t_max: 60.0,
            step: 0.05,
            cut: 1.0,
            smoothing: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CompletedValue {
    pub s: (f64, f64),
    /// `L(s)`.
    pub value: (f64, f64),
    pub error: f64,
    pub tail_error: f64,
    pub quadrature_error: f64,
    pub roundoff_error: f64,
    pub sign: i32,
    pub terms: usize,
}

impl CompletedValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value.0, self.value.1)
    }
}

/// One half of the functional equation, divided by `Q^{s₀/2}γ(s₀)`:
/// `Σ b_n n^{−s} (1/2πi)∫ Q^{(s+u−s₀)/2} γ(s+u)/γ(s₀) G(u) (X/n)^u du/u`.
struct HalfSum {
    value: Complex64,
    coarse: Complex64,
    magnitude: f64,
    tail: f64,
}

fn half_sum(spec: &LSeriesSpec, s: Complex64, s0: Complex64, x: f64, params: &AfeParams) -> Result<HalfSum> {
    let nodes = (params.t_max / params.step).round() as i64;
    let ln_q = spec.conductor.ln();
    let base = ln_gamma_factor(&spec.gamma_shifts, s0)?;
    let kernel: Vec<(Complex64, Complex64)> = (-nodes..=nodes)
        .map(|j| {
            let u = Complex64::new(params.abscissa, j as f64 * params.step);
            let lg = ln_gamma_factor(&spec.gamma_shifts, s + u)?;
            let w = (s + u - s0) * ln_q / 2.0 + lg - base + u * u * params.smoothing - u.ln();
            Ok((u, w))
        })
        .collect::<Result<_>>()?;
    let h = params.step / (2.0 * std::f64::consts::PI);
    let v = |n: usize| -> (Complex64, Complex64, f64) {
        let ln_y = (x / n as f64).ln();
        let mut fine = Complex64::zero();
        let mut coarse = Complex64::zero();
        let mut mag = 0.0;
        for (i, (u, w)) in kernel.iter().enumerate() {
            let t = (w + u * ln_y).exp();
            fine += t;
            mag += t.norm();
            if (i as i64 - nodes) % 2 == 0 {
                coarse += t;
            }
        }
        (fine * h, coarse * 2.0 * h, mag * h)
    };
    let m = spec.len();
    let parts: Vec<(Complex64, Complex64, f64)> = (1..=m)
        .into_par_iter()
        .filter(|&n| spec.coeffs[n] != 0.0)
        .map(|n| {
            let (f, c, g) = v(n);
            let ns = (-s * (n as f64).ln()).exp() * spec.coeffs[n];
            (f * ns, c * ns, g * ns.norm())
        })
        .collect();
    let mut out = HalfSum {
        value: Complex64::zero(),
        coarse: Complex64::zero(),
        magnitude: 0.0,
        tail: 0.0,
    };
    for (f, c, g) in parts {
        out.value += f;
        out.coarse += c;
        out.magnitude += g;
    }
    // omitted terms n ∈ (m, 2m] under |b_n| ≤ d(n)^{log₂ degree}
    let expo = (spec.degree() as f64).log2();
    let tail: f64 = (m + 1..=2 * m)
        .into_par_iter()
        .map(|n| {
            let (f, _, _) = v(n);
            (divisor_count(n as u64) as f64).powf(expo) * (n as f64).powf(-s.re) * f.norm()
        })
        .sum();
    // beyond 2m the smoothed weights decay at least geometrically
    out.tail = 2.0 * tail;
    Ok(out)
}

/// `L(s)` through the smoothed approximate functional equation
/// `Λ(s) = I(s, X) + w I(1−s, 1/X)`.
pub fn l_value(spec: &LSeriesSpec, s: Complex64, params: &AfeParams) -> Result<CompletedValue> {
    let sign = spec
        .sign
        .ok_or_else(|| Error::precondition("root number unknown: fit it first"))?;
    check_length(spec)?;
    let direct = half_sum(spec, s, s, params.cut, params)?;
    let mirror = half_sum(spec, Complex64::one() - s, s, 1.0 / params.cut, params)?;
    let w = sign as f64;
    let value = direct.value + mirror.value * w;
    let quadrature = (direct.value - direct.coarse).norm() + (mirror.value - mirror.coarse).norm();
    let roundoff = 1e-15 * (direct.magnitude + mirror.magnitude) * (spec.len() as f64).sqrt();
    let tail = direct.tail + mirror.tail;
    Ok(CompletedValue {
        s: (s.re, s.im),
        value: (value.re, value.im),
        error: tail + quadrature + roundoff,
        tail_error: tail,
        quadrature_error: quadrature,
        roundoff_error: roundoff,
        sign,
        terms: spec.len(),
    })
}

/// `Λ(s) = Q^{s/2} γ(s) L(s)` with the error scaled alike.
pub fn completed_value(spec: &LSeriesSpec, s: Complex64, params: &AfeParams) -> Result<(Complex64, f64)> {
    let l = l_value(spec, s, params)?;
    let scale = (s * spec.conductor.ln() / 2.0 + ln_gamma_factor(&spec.gamma_shifts, s)?).exp();
    Ok((l.value() * scale, l.error * scale.norm()))
}

fn check_length(spec: &LSeriesSpec) -> Result<()> {
    let need = (10.0 * spec.analytic_conductor().sqrt()).ceil() as usize;
    if spec.len() < need {
        return Err(Error::precondition(format!(
            "{} coefficients given, at least {need} needed",
            spec.len()
        )));
    }
    Ok(())
}

/// `ℒ(1/2)`.
pub fn central_value(spec: &LSeriesSpec, params: &AfeParams) -> Result<CompletedValue> {
    l_value(spec, Complex64::new(0.5, 0.0), params)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RootNumberFit {
    pub sign: i32,
    /// Relative disagreement between two cuts with `w = +1` and `w = −1`.
    pub residual_plus: f64,
    pub residual_minus: f64,
    /// Least-squares `w` from the two cuts.
    pub fitted: f64,
}

/// Largest residual accepted for the winning sign.
pub const FIT_TOLERANCE: f64 = 1e-4;

/// Picks `w ∈ {±1}` by comparing `Λ(0.6)` for cuts `X` and `2X`.

pub fn root_number_fit(spec: &LSeriesSpec, params: &AfeParams) -> Result<RootNumberFit> {
    check_length(spec)?;
    let s = Complex64::new(0.6, 0.0);
    let mut i = [Complex64::zero(); 2];
    let mut j = [Complex64::zero(); 2];
    for (k, x) in [params.cut, 2.0 * params.cut].into_iter().enumerate() {
        i[k] = half_sum(spec, s, s, x, params)?.value;
        j[k] = half_sum(spec, Complex64::one() - s, s, 1.0 / x, params)?.value;
    }
    let residual = |w: f64| {
        let a = i[0] + j[0] * w;
        let b = i[1] + j[1] * w;
        (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
    };
    let (rp, rm) = (residual(1.0), residual(-1.0));
    let fitted = ((i[1] - i[0]) / (j[0] - j[1])).re;
    let (lo, hi) = if rp < rm { (rp, rm) } else { (rm, rp) };
    if hi < 2.0 * lo {
        return Err(Error::Ambiguous(format!(
            "root number residuals {rp:e} (+1) and {rm:e} (-1) are too close"
        )));
    }
    if lo > FIT_TOLERANCE {
        return Err(Error::Ambiguous(format!(
            "neither sign fits: residuals {rp:e} (+1) and {rm:e} (-1)"
        )));
    }
    Ok(RootNumberFit {
        sign: if rp < rm { 1 } else { -1 },
        residual_plus: rp,
        residual_minus: rm,
        fitted,
    })
}
