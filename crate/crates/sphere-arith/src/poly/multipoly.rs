use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::dd::DD;

/// Exponent vector of a monomial.
pub type Exps = Vec<u32>;

/// Sparse polynomial with exact rational coefficients.
///
/// Terms are kept in a `BTreeMap` keyed by exponent vectors, so iteration
/// order (and everything built on it) is deterministic. Zero coefficients
/// are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exps, BigRational>,
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn monomial(exps: Exps, c: BigRational) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exps, BigRational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length mismatch");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, e: Exps, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Total degree (`None` for the zero polynomial).
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// `Some(d)` if every term has total degree `d`. The zero polynomial
    /// counts as homogeneous of every degree and reports `None`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &MultiPoly, c: &BigRational) {
        assert_eq!(self.nvars, other.nvars);
        if c.is_zero() {
            return;
        }
        for (e, v) in &other.terms {
            self.add_term(e.clone(), v * c);
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[i] -= 1;
            out.add_term(f, c * rat(e[i] as i64));
        }
        out
    }

    /// Multiplies by the monomial `x^e`.
    pub fn shift(&self, e: &[u32]) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(f, c)| (f.iter().zip(e).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Multiplies by `x_0² + … + x_{n-1}²`.
    pub fn times_r2(&self) -> Self {
        let mut acc: HashMap<Exps, BigRational> = HashMap::new();
        for (e, c) in &self.terms {
            for i in 0..self.nvars {
                let mut f = e.clone();
                f[i] += 2;
                *acc.entry(f).or_insert_with(BigRational::zero) += c;
            }
        }
        Self::from_map(self.nvars, acc)
    }

    fn from_map(nvars: usize, acc: HashMap<Exps, BigRational>) -> Self {
        MultiPoly {
            nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Substitutes polynomials (all in the same variable count) for each
    /// variable.
    pub fn compose(&self, subs: &[MultiPoly]) -> Self {
        assert_eq!(subs.len(), self.nvars);
        let m = subs[0].nvars;
        let maxdeg: Vec<u32> = (0..self.nvars)
            .map(|i| self.terms.keys().map(|e| e[i]).max().unwrap_or(0))
            .collect();
        // cached powers of each substituted polynomial
        let powers: Vec<Vec<MultiPoly>> = subs
            .iter()
            .zip(&maxdeg)
            .map(|(s, &d)| {
                let mut v = vec![MultiPoly::one(m)];
                for k in 1..=d as usize {
                    let next = &v[k - 1] * s;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc: HashMap<Exps, BigRational> = HashMap::new();
        for (e, c) in &self.terms {
            let mut prod = MultiPoly::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    prod = &prod * &powers[i][k as usize];
                }
            }
            for (f, v) in prod.terms {
                *acc.entry(f).or_insert_with(BigRational::zero) += v;
            }
        }
        Self::from_map(m, acc)
    }

    /// `p(M x)` for a square rational matrix.
    pub fn apply_linear(&self, m: &[Vec<BigRational>]) -> Self {
        let n = self.nvars;
        let subs: Vec<MultiPoly> = (0..n)
            .map(|r| {
                MultiPoly::from_terms(
                    n,
                    (0..n).map(|c| {
                        let mut e = vec![0; n];
                        e[c] = 1;
                        (e, m[r][c].clone())
                    }),
                )
            })
            .collect();
        self.compose(&subs)
    }

    /// `p(x_{perm} · sign)`, i.e. `x_r ↦ sign[r] x_{perm[r]}`.
    pub fn apply_signed_permutation(&self, perm: &[usize], sign: &[i8]) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut f = vec![0; self.nvars];
            let mut s = 1i8;
            for r in 0..self.nvars {
                f[perm[r]] += e[r];
                if sign[r] < 0 && e[r] % 2 == 1 {
                    s = -s;
                }
            }
            out.add_term(f, if s < 0 { -c.clone() } else { c.clone() });
        }
        out
    }

    pub fn eval(&self, x: &[BigRational]) -> BigRational {
        assert_eq!(x.len(), self.nvars);
        let mut total = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            total += t;
        }
        total
    }

    /// Least common denominator of the coefficients.
    pub fn common_denominator(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// `(D, integer polynomial)` with `self = integer / D`.
    pub fn integer_form(&self) -> IntPoly {
        let d = self.common_denominator();
        IntPoly {
            nvars: self.nvars,
            denom: d.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), (c * BigRational::from_integer(d.clone())).to_integer()))
                .collect(),
        }
    }

    /// Compensated floating evaluation.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.dd_form().eval(x)
    }

    pub fn dd_form(&self) -> DDPoly {
        DDPoly::new(self)
    }

    pub fn max_abs_coeff(&self) -> BigRational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// Plain text, one `exponent-tuple:numerator/denominator` term per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (e, c) in &self.terms {
            let tuple: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            s.push_str(&format!("({}):{}/{}\n", tuple.join(","), c.numer(), c.denom()));
        }
        s
    }

    /// Parses [`MultiPoly::to_text`] output. Blank lines and `#` comments
    /// are skipped. An empty body is the zero polynomial in `nvars`
    /// variables.
    pub fn from_text(text: &str, nvars: usize) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse {
                line: ln + 1,
                msg: msg.to_string(),
            };
            let (tup, coef) = line.rsplit_once(':').ok_or_else(|| err("missing ':'"))?;
            let tup = tup.trim().trim_start_matches('(').trim_end_matches(')');
            let exps: Exps = tup
                .split(',')
                .map(|t| t.trim().parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err("bad exponent"))?;
            if exps.len() != nvars {
                return Err(err("wrong number of exponents"));
            }
            let (n, d) = coef.split_once('/').unwrap_or((coef, "1"));
            let n: BigInt = n.trim().parse().map_err(|_| err("bad numerator"))?;
            let d: BigInt = d.trim().parse().map_err(|_| err("bad denominator"))?;
            if d.is_zero() {
                return Err(err("zero denominator"));
            }
            p.add_term(exps, BigRational::new(n, d));
        }
        Ok(p)
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        const NAMES: [&str; 4] = ["x", "y", "z", "w"];
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &k) in e.iter().enumerate() {
                let name = if self.nvars <= 4 {
                    NAMES[i].to_string()
                } else {
                    format!("x{i}")
                };
                match k {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, o: &MultiPoly) -> MultiPoly {
        let mut r = self.clone();
        r.add_scaled(o, &BigRational::one());
        r
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, o: &MultiPoly) -> MultiPoly {
        let mut r = self.clone();
        r.add_scaled(o, &-BigRational::one());
        r
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, o: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let mut acc: HashMap<Exps, BigRational> = HashMap::with_capacity(self.len() * o.len());
        for (e, c) in &self.terms {
            for (f, d) in &o.terms {
                let g: Exps = e.iter().zip(f).map(|(a, b)| a + b).collect();
                let v = c * d;
                match acc.get_mut(&g) {
                    Some(x) => *x += v,
                    None => {
                        acc.insert(g, v);
                    }
                }
            }
        }
        MultiPoly::from_map(self.nvars, acc)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, o: MultiPoly) -> MultiPoly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Integer-coefficient form `terms / denom` for fast exact evaluation.
#[derive(Clone, Debug)]
pub struct IntPoly {
    pub nvars: usize,
    pub denom: BigInt,
    pub terms: Vec<(Exps, BigInt)>,
}

impl IntPoly {
    /// Exact value of the numerator at an integer point.
    pub fn eval_numer(&self, x: &[BigInt]) -> BigInt {
        let maxd: Vec<u32> = (0..self.nvars)
            .map(|i| self.terms.iter().map(|(e, _)| e[i]).max().unwrap_or(0))
            .collect();
        let pows: Vec<Vec<BigInt>> = x
            .iter()
            .zip(&maxd)
            .map(|(xi, &d)| {
                let mut v = vec![BigInt::one()];
                for k in 1..=d as usize {
                    let n = &v[k - 1] * xi;
                    v.push(n);
                }
                v
            })
            .collect();
        let mut s = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= &pows[i][k as usize];
                }
            }
            s += t;
        }
        s
    }

    /// Numerator at a small integer point using `i128`, `None` on overflow.
    pub fn eval_numer_i128(&self, x: &[i64], coeffs: &[i128]) -> Option<i128> {
        let mut s: i128 = 0;
        for ((e, _), c) in self.terms.iter().zip(coeffs) {
            let mut t = *c;
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = t.checked_mul(x[i] as i128)?;
                }
            }
            s = s.checked_add(t)?;
        }
        Some(s)
    }

    /// Coefficients as `i128` when they all fit.
    pub fn small_coeffs(&self) -> Option<Vec<i128>> {
        use num_traits::ToPrimitive;
        self.terms.iter().map(|(_, c)| c.to_i128()).collect()
    }
}

/// Double-double form of a polynomial for accurate floating evaluation.
#[derive(Clone, Debug)]
pub struct DDPoly {
    nvars: usize,
    terms: Vec<(Exps, DD)>,
    maxdeg: Vec<u32>,
}

impl DDPoly {
    pub fn new(p: &MultiPoly) -> Self {
        let maxdeg = (0..p.nvars)
            .map(|i| p.terms.keys().map(|e| e[i]).max().unwrap_or(0))
            .collect();
        DDPoly {
            nvars: p.nvars,
            terms: p
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), DD::from_rational(c)))
                .collect(),
            maxdeg,
        }
    }

    pub fn eval_dd(&self, x: &[f64]) -> DD {
        assert_eq!(x.len(), self.nvars);
        let pows: Vec<Vec<DD>> = x
            .iter()
            .zip(&self.maxdeg)
            .map(|(&xi, &d)| {
                let mut v = Vec::with_capacity(d as usize + 1);
                v.push(DD::ONE);
                for k in 1..=d as usize {
                    let n = v[k - 1].mul_f64(xi);
                    v.push(n);
                }
                v
            })
            .collect();
        let mut s = DD::ZERO;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t * pows[i][k as usize];
                }
            }
            s = s + t;
        }
        s
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_dd(x).to_f64()
    }
}
