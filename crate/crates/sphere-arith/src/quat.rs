//! Quaternions with half-integral coordinates, the Lipschitz and Hurwitz
//! orders, norm shells, and the rotation action on pure quaternions.

use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rational quaternion `x0 + x1 i + x2 j + x3 k` whose coordinates lie in
/// `½ℤ`, stored as the doubled integers `2 x_i`.
///
/// Products of two such quaternions can leave `½ℤ`; [`Quaternion::mul`]
/// panics in that case, which never happens inside an order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quaternion {
    d: [i64; 4],
}

impl Quaternion {
    /// Builds from doubled coordinates.
    pub const fn from_doubled(d: [i64; 4]) -> Self {
        Quaternion { d }
    }

    /// Builds from integer coordinates.
    pub const fn from_ints(x: [i64; 4]) -> Self {
        Quaternion {
            d: [2 * x[0], 2 * x[1], 2 * x[2], 2 * x[3]],
        }
    }

    pub const ONE: Quaternion = Quaternion::from_ints([1, 0, 0, 0]);
    pub const I: Quaternion = Quaternion::from_ints([0, 1, 0, 0]);
    pub const J: Quaternion = Quaternion::from_ints([0, 0, 1, 0]);
    pub const K: Quaternion = Quaternion::from_ints([0, 0, 0, 1]);

    pub fn doubled(&self) -> [i64; 4] {
        self.d
    }

    /// Exact coordinates.
    pub fn coords(&self) -> [BigRational; 4] {
        self.d
            .map(|v| BigRational::new(BigInt::from(v), BigInt::from(2)))
    }

    pub fn coords_f64(&self) -> [f64; 4] {
        self.d.map(|v| v as f64 / 2.0)
    }

    pub fn conj(&self) -> Self {
        let [a, b, c, e] = self.d;
        Quaternion { d: [a, -b, -c, -e] }
    }

    /// Reduced norm `q q̄ = Σ x_i²`, exact.
    pub fn norm(&self) -> BigRational {
        BigRational::new(BigInt::from(self.norm_times_four()), BigInt::from(4))
    }

    /// `4·n(q)`, always an integer.
    pub fn norm_times_four(&self) -> i64 {
        self.d.iter().map(|v| v * v).sum()
    }

    /// Reduced trace `q + q̄ = 2 x0`.
    pub fn trace(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.d[0]))
    }

    pub fn is_zero(&self) -> bool {
        self.d == [0; 4]
    }

    pub fn is_pure(&self) -> bool {
        self.d[0] == 0
    }

    /// Membership in the given order.
    pub fn in_order(&self, kind: OrderKind) -> bool {
        let par = self.d.map(|v| v.rem_euclid(2));
        match kind {
            OrderKind::Lipschitz => par == [0; 4],
            OrderKind::Hurwitz => par.iter().all(|&p| p == par[0]),
        }
    }

    fn checked_mul(&self, o: &Quaternion) -> Option<Quaternion> {
        let [a0, a1, a2, a3] = self.d;
        let [b0, b1, b2, b3] = o.d;
        // doubled product = (2a)(2b)/2
        let p = [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ];
        if p.iter().any(|v| v % 2 != 0) {
            return None;
        }
        Some(Quaternion { d: p.map(|v| v / 2) })
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        self.checked_mul(&o)
            .expect("product left the half-integral lattice")
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion { d: self.d.map(|v| -v) }
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coords();
        write!(f, "{} + {}i + {}j + {}k", c[0], c[1], c[2], c[3])
    }
}

/// Which integral structure on the Hamilton quaternions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    /// `ℤ⟨1,i,j,k⟩`, not maximal.
    Lipschitz,
    /// The maximal order, with the extra points `(±1±i±j±k)/2`.
    Hurwitz,
}

impl std::str::FromStr for OrderKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lipschitz" => Ok(OrderKind::Lipschitz),
            "hurwitz" => Ok(OrderKind::Hurwitz),
            other => Err(Error::Config(format!("unknown order '{other}'"))),
        }
    }
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderKind::Lipschitz => "lipschitz",
            OrderKind::Hurwitz => "hurwitz",
        })
    }
}

/// An order together with its level.
///
/// The Hurwitz order has reduced discriminant 2 and its norm form has
/// level 2. The Lipschitz norm form `x0²+x1²+x2²+x3²` has level 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderSpec {
    pub kind: OrderKind,
    pub discriminant: u32,
}

impl OrderSpec {
    pub const HURWITZ: OrderSpec = OrderSpec {
        kind: OrderKind::Hurwitz,
        discriminant: 2,
    };
    pub const LIPSCHITZ: OrderSpec = OrderSpec {
        kind: OrderKind::Lipschitz,
        discriminant: 2,
    };

    pub fn new(kind: OrderKind) -> Self {
        match kind {
            OrderKind::Hurwitz => Self::HURWITZ,
            OrderKind::Lipschitz => Self::LIPSCHITZ,
        }
    }

    pub fn unit_count(&self) -> usize {
        match self.kind {
            OrderKind::Lipschitz => 8,
            OrderKind::Hurwitz => 24,
        }
    }

    /// Level of the theta series attached to the order.
    pub fn theta_level(&self) -> u64 {
        match self.kind {
            OrderKind::Hurwitz => 2,
            OrderKind::Lipschitz => 4,
        }
    }
}

/// Trial-division primality test.
pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn isqrt(n: i64) -> i64 {
    if n < 0 {
        return -1;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All elements of the order with reduced norm `n`, sorted by doubled
/// coordinates.
pub fn enumerate_norm(order: OrderSpec, n: u64) -> Vec<Quaternion> {
    let target = 4 * n as i64;
    let parities: &[i64] = match order.kind {
        OrderKind::Lipschitz => &[0],
        OrderKind::Hurwitz => &[0, 1],
    };
    // values in [-b, b] with the given parity
    let range = |b: i64, par: i64| {
        let lo = if (-b).rem_euclid(2) == par { -b } else { -b + 1 };
        (lo..=b).step_by(2)
    };
    let mut out = Vec::new();
    for &par in parities {
        for a in range(isqrt(target), par) {
            let ra = target - a * a;
            for b in range(isqrt(ra), par) {
                let rb = ra - b * b;
                for c in range(isqrt(rb), par) {
                    let rc = rb - c * c;
                    let e = isqrt(rc);
                    if e * e != rc || e.rem_euclid(2) != par {
                        continue;
                    }
                    out.push(Quaternion::from_doubled([a, b, c, e]));
                    if e != 0 {
                        out.push(Quaternion::from_doubled([a, b, c, -e]));
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// The unit group of the order.
pub fn unit_group(order: OrderSpec) -> Vec<Quaternion> {
    enumerate_norm(order, 1)
}

/// Representatives of `{y : n(y) = p} / R^×` for an odd prime `p`, where
/// `R^×` acts on the right.
///
/// Every right coset meets the Lipschitz order in exactly eight elements
/// when `p` is odd, so the Lipschitz shell is enough and is much cheaper to
/// enumerate than the full Hurwitz shell.
pub fn coset_representatives(order: OrderSpec, p: u64) -> Result<Vec<Quaternion>> {
    if p % 2 == 0 {
        return Err(Error::invalid(format!("coset representatives need an odd norm, got {p}")));
    }
    let shell = enumerate_norm(OrderSpec::LIPSCHITZ, p);
    let lip_units = unit_group(OrderSpec::LIPSCHITZ);
    let mut reps: Vec<Quaternion> = shell
        .iter()
        .filter(|y| {
            // canonical element of y·{±1,±i,±j,±k}: the largest one
            lip_units.iter().all(|&u| **y * u <= **y)
        })
        .copied()
        .collect();
    reps.sort();
    let expected = p + 1;
    let have = reps.len() as u64;
    if have != expected {
        return Err(Error::numerical(format!(
            "expected {expected} cosets of norm {p}, found {have} (is {p} prime?)"
        )));
    }
    let _ = order;
    Ok(reps)
}

/// A 3×3 rational matrix acting on pure quaternions `x1 i + x2 j + x3 k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationMatrix {
    pub m: [[BigRational; 3]; 3],
}

impl RotationMatrix {
    pub fn identity() -> Self {
        let z = BigRational::zero;
        let o = BigRational::one;
        RotationMatrix {
            m: [[o(), z(), z()], [z(), o(), z()], [z(), z(), o()]],
        }
    }

    pub fn apply(&self, v: &[BigRational; 3]) -> [BigRational; 3] {
        std::array::from_fn(|r| (0..3).map(|c| &self.m[r][c] * &v[c]).sum())
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &RotationMatrix) -> RotationMatrix {
        RotationMatrix {
            m: std::array::from_fn(|r| {
                std::array::from_fn(|c| (0..3).map(|k| &self.m[r][k] * &other.m[k][c]).sum())
            }),
        }
    }

    pub fn transpose(&self) -> RotationMatrix {
        RotationMatrix {
            m: std::array::from_fn(|r| std::array::from_fn(|c| self.m[c][r].clone())),
        }
    }

    pub fn det(&self) -> BigRational {
        let m = &self.m;
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    pub fn is_orthogonal(&self) -> bool {
        self.compose(&self.transpose()) == RotationMatrix::identity()
    }

    /// If the matrix is a signed permutation, `(perm, sign)` with
    /// `row r = sign[r] · e_{perm[r]}`.
    pub fn as_signed_permutation(&self) -> Option<([usize; 3], [i8; 3])> {
        let mut perm = [0usize; 3];
        let mut sign = [0i8; 3];
        for r in 0..3 {
            let mut found = false;
            for c in 0..3 {
                let v = &self.m[r][c];
                if v.is_zero() {
                    continue;
                }
                if found {
                    return None;
                }
                if v.is_one() {
                    sign[r] = 1;
                } else if (-v).is_one() {
                    sign[r] = -1;
                } else {
                    return None;
                }
                perm[r] = c;
                found = true;
            }
            if !found {
                return None;
            }
        }
        Some((perm, sign))
    }

    pub fn to_f64(&self) -> [[f64; 3]; 3] {
        use num_traits::ToPrimitive;
        std::array::from_fn(|r| std::array::from_fn(|c| self.m[r][c].to_f64().unwrap_or(f64::NAN)))
    }
}

/// Integer matrix `M` of `x ↦ q̄ x q` on the span of `i, j, k`, so that
/// `rotation_of(q) = M / n(q)`. Integral for every Hurwitz quaternion.
pub fn conjugation_matrix_int(q: &Quaternion) -> [[i64; 3]; 3] {
    let [a, b, c, d] = q.doubled();
    let raw = [
        [a * a + b * b - c * c - d * d, 2 * (b * c + a * d), 2 * (b * d - a * c)],
        [2 * (b * c - a * d), a * a - b * b + c * c - d * d, 2 * (c * d + a * b)],
        [2 * (b * d + a * c), 2 * (c * d - a * b), a * a - b * b - c * c + d * d],
    ];
    raw.map(|row| {
        row.map(|v| {
            debug_assert_eq!(v % 4, 0);
            v / 4
        })
    })
}

/// Exact matrix of `x ↦ q̄ x q / n(q)` on the span of `i, j, k`.
pub fn rotation_of(q: &Quaternion) -> Result<RotationMatrix> {
    if q.is_zero() {
        return Err(Error::invalid("rotation_of needs a nonzero quaternion"));
    }
    let [a, b, c, d] = q.doubled().map(BigInt::from);
    let two = BigInt::from(2);
    let raw = [
        [&a * &a + &b * &b - &c * &c - &d * &d, &two * (&b * &c + &a * &d), &two * (&b * &d - &a * &c)],
        [&two * (&b * &c - &a * &d), &a * &a - &b * &b + &c * &c - &d * &d, &two * (&c * &d + &a * &b)],
        [&two * (&b * &d + &a * &c), &two * (&c * &d - &a * &b), &a * &a - &b * &b - &c * &c + &d * &d],
    ];
    let n4 = BigInt::from(q.norm_times_four());
    Ok(RotationMatrix {
        m: raw.map(|row| row.map(|v| BigRational::new(v, n4.clone()))),
    })
}

/// Sum of divisors.
pub fn sigma(n: u64) -> u64 {
    (1..=n).filter(|d| n % d == 0).sum()
}
