//! Hecke operators on harmonic polynomials on S², unit-invariant subspaces
//! and simultaneous eigenbases.
//!
//! For a prime `p` the operator is `T(p)P(x) = Σ_{n(y)=p} P(R_y x)` with
//! `R_y x = ȳ x y / n(y)`. Splitting the norm-`p` shell into right cosets
//! `c·R^×` gives `T(p) = |R^×| Σ_c τ(c) ∘ Proj`, where `Proj` averages
//! over the unit group. In particular `T(p)` vanishes on the orthogonal
//! complement of the unit-invariant subspace and maps everything into it.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::jacobi::{frobenius, jacobi_eigen, mat_vec};
use crate::poly::harmonic::{harmonic_dimension, monomials, orthogonal_from_sources};
use crate::poly::linalg::{inverse, kernel, mat_mul, rank};
use crate::poly::{cached_basis, mean_product, DDPoly, IntPoly, MultiPoly};
use crate::quat::{
    conjugation_matrix_int, coset_representatives, enumerate_norm, is_prime, rotation_of, unit_group, OrderKind,
    OrderSpec, Quaternion,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HeckeNormalization {
    /// Plain sum over the norm-`p` shell.
    Raw,
    /// Divided by the number of units.
    UnitNormalized,
}

/// Which harmonic space a matrix acts on.
#[derive(Clone, Debug)]
pub enum Space {
    /// All harmonics of degree ν, with the graded-lex orthogonal basis.
    Full,
    /// The unit-invariant harmonics.
    Invariant(Arc<InvariantSubspace>),
}

/// Exact Hecke operator on a space of harmonics with an orthogonal basis
/// `b_1, …, b_D`.
#[derive(Clone, Debug)]
pub struct HeckeMatrix {
    pub nu: u32,
    pub p: u64,
    pub order: OrderSpec,
    pub normalization: HeckeNormalization,
    /// Column `j` holds the coordinates of `T b_j`.
    pub operator: Vec<Vec<BigRational>>,
    /// `⟨b_i, T b_j⟩` (probability measure); exactly symmetric.
    pub symmetric: Vec<Vec<BigRational>>,
    /// `⟨b_i, b_i⟩`.
    pub norms: Vec<BigRational>,
}

impl HeckeMatrix {
    pub fn dim(&self) -> usize {
        self.norms.len()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..i).all(|j| self.symmetric[i][j] == self.symmetric[j][i]))
    }

    /// Matrix in the orthonormal basis `b_i / ‖b_i‖`, as floats.
    pub fn orthonormal_f64(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let s: Vec<f64> = self.norms.iter().map(|v| v.to_f64().unwrap().sqrt()).collect();
        let mut m: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.symmetric[i][j].to_f64().unwrap() / (s[i] * s[j]))
                    .collect()
            })
            .collect();
        for i in 0..n {
            for j in 0..i {
                let a = 0.5 * (m[i][j] + m[j][i]);
                m[i][j] = a;
                m[j][i] = a;
            }
        }
        m
    }

    /// `self ∘ other` on coordinates.
    pub fn compose(&self, other: &HeckeMatrix) -> Vec<Vec<BigRational>> {
        mat_mul(&self.operator, &other.operator)
    }

    pub fn commutes_with(&self, other: &HeckeMatrix) -> bool {
        self.compose(other) == other.compose(self)
    }
}

/// Unit rotations as signed permutations `x_r ↦ sign[r] x_{perm[r]}`,
/// one per rotation (units `±u` give the same rotation).
fn unit_signed_permutations(order: OrderSpec) -> Vec<([usize; 3], [i8; 3])> {
    let mut out: Vec<([usize; 3], [i8; 3])> = unit_group(order)
        .iter()
        .map(|u| {
            rotation_of(u)
                .expect("units are nonzero")
                .as_signed_permutation()
                .expect("unit rotations of the standard orders permute coordinates")
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Average of `P(R_u x)` over the units.
pub fn unit_average(p: &MultiPoly, order: OrderSpec) -> MultiPoly {
    let rots = unit_signed_permutations(order);
    let mut acc = MultiPoly::zero(p.nvars());
    for (perm, sign) in &rots {
        acc = &acc + &p.apply_signed_permutation(perm, sign);
    }
    acc.scale(&BigRational::new(BigInt::one(), BigInt::from(rots.len())))
}

/// `P(R_y x)` for an arbitrary nonzero quaternion.
pub fn act(y: &Quaternion, p: &MultiPoly) -> MultiPoly {
    let r = rotation_of(y).expect("nonzero");
    let m: Vec<Vec<BigRational>> = r.m.iter().map(|row| row.to_vec()).collect();
    p.apply_linear(&m)
}

/// Dimension of the unit-invariant harmonics of degree `ν`, from the
/// character `sin((2ν+1)θ/2) / sin(θ/2)` of each unit rotation.
pub fn invariant_dimension(nu: u32, order: OrderSpec) -> usize {
    let units = unit_group(order);
    let mut s = 0.0;
    for u in &units {
        let r = rotation_of(u).unwrap().to_f64();
        let tr = r[0][0] + r[1][1] + r[2][2];
        let theta = ((tr - 1.0) / 2.0).clamp(-1.0, 1.0).acos();
        let chi: f64 = (-(nu as i64)..=nu as i64).map(|m| (m as f64 * theta).cos()).sum();
        s += chi;
    }
    (s / units.len() as f64).round() as usize
}

/// Unit-invariant harmonics of one degree with an exact orthogonal basis.
#[derive(Clone, Debug)]
pub struct InvariantSubspace {
    pub nu: u32,
    pub order: OrderSpec,
    pub elements: Vec<MultiPoly>,
    /// `⟨b_i, b_i⟩`, probability measure.
    pub norms: Vec<BigRational>,
}

impl InvariantSubspace {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, p: &MultiPoly) -> bool {
        unit_average(p, self.order) == *p
    }
}

/// The harmonics of degree `ν` fixed by every unit rotation.
pub fn invariant_subspace(nu: u32, order: OrderSpec) -> Result<InvariantSubspace> {
    let target = invariant_dimension(nu, order);
    let rots = unit_signed_permutations(order);
    let mut seen = std::collections::HashSet::new();
    let sources = monomials(3, nu).into_iter().filter_map(move |e| {
        // orbit sum of the monomial
        let m = MultiPoly::monomial(e, BigRational::one());
        let mut acc = MultiPoly::zero(3);
        for (perm, sign) in &rots {
            acc = &acc + &m.apply_signed_permutation(perm, sign);
        }
        if acc.is_zero() {
            return None;
        }
        // normalise the leading coefficient so duplicate orbits collapse
        let lead = acc.terms().next().map(|(_, c)| c.clone()).unwrap();
        let acc = acc.scale(&lead.recip());
        seen.insert(acc.clone()).then_some(acc)
    });
    let (elements, norms) = orthogonal_from_sources(sources, target)?;
    Ok(InvariantSubspace {
        nu,
        order,
        elements,
        norms,
    })
}

/// Memoized [`invariant_subspace`].
pub fn cached_invariant_subspace(nu: u32, order: OrderSpec) -> Result<Arc<InvariantSubspace>> {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    type Cache = Mutex<HashMap<(u32, OrderKind), Arc<InvariantSubspace>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&(nu, order.kind)) {
        return Ok(v.clone());
    }
    let v = Arc::new(invariant_subspace(nu, order)?);
    cache.lock().unwrap().insert((nu, order.kind), v.clone());
    Ok(v)
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if p == 2 {
        return Err(Error::invalid("bad prime: 2 divides the discriminant"));
    }
    Ok(())
}

/// Integer points `v_1..v_D` with `b_j(v_k)` invertible.
fn interpolation_points(elems: &[IntPoly]) -> Result<Vec<[i64; 3]>> {
    let d = elems.len();
    let mut pts: Vec<[i64; 3]> = Vec::new();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut cand = Vec::new();
    for s in 1..=12i64 {
        for a in -s..=s {
            for b in -s..=s {
                for c in [s, -s] {
                    cand.push([a, b, c]);
                }
            }
        }
    }
    // deterministic scramble so early candidates are not all coplanar
    cand.sort_by_key(|v| (v.iter().map(|x| x.abs()).sum::<i64>(), *v));
    for v in cand {
        if pts.len() == d {
            break;
        }
        let x: Vec<BigInt> = v.iter().map(|&t| BigInt::from(t)).collect();
        let row: Vec<BigRational> = elems
            .iter()
            .map(|e| BigRational::new(e.eval_numer(&x), e.denom.clone()))
            .collect();
        rows.push(row);
        if rank(&rows) == rows.len() {
            pts.push(v);
        } else {
            rows.pop();
        }
    }
    if pts.len() < d {
        return Err(Error::numerical("could not find unisolvent interpolation points"));
    }
    Ok(pts)
}

/// Exact unit-normalized Hecke data on an orthogonal basis: returns the
/// operator matrix (columns are coordinates of `T b_j`).
fn hecke_operator(
    elems: &[MultiPoly],
    projected: &[MultiPoly],
    order: OrderSpec,
    p: u64,
    nu: u32,
) -> Result<Vec<Vec<BigRational>>> {
    let d = elems.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    let ints: Vec<IntPoly> = elems.iter().map(|e| e.integer_form()).collect();
    let proj_ints: Vec<IntPoly> = projected.iter().map(|e| e.integer_form()).collect();
    let pts = interpolation_points(&ints)?;
    let e: Vec<Vec<BigRational>> = pts
        .iter()
        .map(|v| {
            let x: Vec<BigInt> = v.iter().map(|&t| BigInt::from(t)).collect();
            ints.iter()
                .map(|b| BigRational::new(b.eval_numer(&x), b.denom.clone()))
                .collect()
        })
        .collect();
    let e_inv = inverse(&e).ok_or_else(|| Error::numerical("singular interpolation matrix"))?;
    let reps = coset_representatives(order, p)?;
    let mats: Vec<[[i64; 3]; 3]> = reps.iter().map(conjugation_matrix_int).collect();
    let pnu = BigInt::from(p).pow(nu);
    // w[k][j] = Σ_c (Proj b_j)(M_c v_k) / p^ν
    let w: Vec<Vec<BigRational>> = pts
        .par_iter()
        .map(|v| {
            let images: Vec<Vec<BigInt>> = mats
                .iter()
                .map(|m| {
                    (0..3)
                        .map(|r| BigInt::from(m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2]))
                        .collect()
                })
                .collect();
            proj_ints
                .iter()
                .map(|b| {
                    let mut s = BigInt::zero();
                    for x in &images {
                        s += b.eval_numer(x);
                    }
                    BigRational::new(s, &b.denom * &pnu)
                })
                .collect()
        })
        .collect();
    Ok(mat_mul(&e_inv, &w))
}

fn assemble(
    nu: u32,
    p: u64,
    order: OrderSpec,
    normalization: HeckeNormalization,
    operator: Vec<Vec<BigRational>>,
    norms: Vec<BigRational>,
) -> HeckeMatrix {
    let scale = match normalization {
        HeckeNormalization::Raw => BigRational::from_integer(BigInt::from(order.unit_count())),
        HeckeNormalization::UnitNormalized => BigRational::one(),
    };
    let operator: Vec<Vec<BigRational>> = operator
        .into_iter()
        .map(|row| row.into_iter().map(|v| v * &scale).collect())
        .collect();
    let n = norms.len();
    let symmetric = (0..n)
        .map(|i| (0..n).map(|j| &norms[i] * &operator[i][j]).collect())
        .collect();
    HeckeMatrix {
        nu,
        p,
        order,
        normalization,
        operator,
        symmetric,
        norms,
    }
}

/// Hecke matrix on all harmonics of degree `ν`, in the orthogonal basis of
/// [`crate::poly::basis`].
pub fn hecke_matrix(nu: u32, p: u64, order: OrderSpec, normalization: HeckeNormalization) -> Result<HeckeMatrix> {
    check_prime(p)?;
    let b = cached_basis(2, nu)?;
    let projected: Vec<MultiPoly> = b.elements.iter().map(|e| unit_average(e, order)).collect();
    let op = hecke_operator(&b.elements, &projected, order, p, nu)?;
    Ok(assemble(nu, p, order, normalization, op, b.norms.clone()))
}

/// Hecke matrix restricted to the unit-invariant subspace.
pub fn hecke_matrix_invariant(
    space: &InvariantSubspace,
    p: u64,
    normalization: HeckeNormalization,
) -> Result<HeckeMatrix> {
    check_prime(p)?;
    let op = hecke_operator(&space.elements, &space.elements, space.order, p, space.nu)?;
    Ok(assemble(space.nu, p, space.order, normalization, op, space.norms.clone()))
}

/// `Σ_{n(y)=p} P(R_y x)` by brute force over the whole shell. Oracle for
/// small degree.
pub fn hecke_apply_bruteforce(p_poly: &MultiPoly, p: u64, order: OrderSpec) -> MultiPoly {
    let mut acc = MultiPoly::zero(3);
    for y in enumerate_norm(order, p) {
        acc = &acc + &act(&y, p_poly);
    }
    acc
}

/// Unit-normalized eigenvalue of an exact Hecke eigenform `P` at `p`,
/// computed as `(T P)(v) / P(v)` at one point.
pub fn eigenform_eigenvalue(form: &MultiPoly, order: OrderSpec, p: u64) -> Result<BigRational> {
    check_prime(p)?;
    let nu = form.homogeneous_degree().unwrap_or(0);
    let ip = form.integer_form();
    let pts = interpolation_points(std::slice::from_ref(&ip))?;
    let v = pts[0];
    let x: Vec<BigInt> = v.iter().map(|&t| BigInt::from(t)).collect();
    let at_v = ip.eval_numer(&x);
    let reps = coset_representatives(order, p)?;
    let mut s = BigInt::zero();
    for c in &reps {
        let m = conjugation_matrix_int(c);
        let img: Vec<BigInt> = (0..3)
            .map(|r| BigInt::from(m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2]))
            .collect();
        s += ip.eval_numer(&img);
    }
    Ok(BigRational::new(s, at_v * BigInt::from(p).pow(nu)))
}

/// Complement of the invariant subspace, on which every Hecke operator is
/// zero.
#[derive(Clone, Debug, Serialize)]
pub struct DegenerateBlock {
    pub dim: usize,
    pub eigenvalue: f64,
}

/// Simultaneous eigenbasis of the Hecke operators at the given primes.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub nu: u32,
    pub order: OrderSpec,
    pub primes: Vec<u64>,
    pub space: Arc<InvariantSubspace>,
    /// Coordinates in the orthonormal basis `b_i / ‖b_i‖` of the invariant
    /// subspace.
    pub vectors: Vec<Vec<f64>>,
    /// `eigenvalues[v][k]`: unit-normalized eigenvalue of vector `v` at
    /// `primes[k]`.
    pub eigenvalues: Vec<Vec<f64>>,
    pub invariant: Vec<bool>,
    pub complement: DegenerateBlock,
    pub max_residual: f64,
    pub warnings: Vec<String>,
    /// Exact unit-normalized matrices on the invariant subspace.
    pub matrices: Vec<HeckeMatrix>,
}

fn normalize_sign(v: &mut [f64]) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() * (1.0 + 1e-12) {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn split_block(
    mats: &[Vec<Vec<f64>>],
    block: Vec<Vec<f64>>,
    k: usize,
    warnings: &mut Vec<String>,
    primes: &[u64],
) -> Vec<Vec<f64>> {
    if block.len() <= 1 {
        return block;
    }
    if k == mats.len() {
        warnings.push(format!(
            "eigenspace of multiplicity {} not split by primes {:?}",
            block.len(),
            primes
        ));
        return block;
    }
    let a = &mats[k];
    let n = block.len();
    let av: Vec<Vec<f64>> = block.iter().map(|v| mat_vec(a, v)).collect();
    let restricted: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| block[i].iter().zip(&av[j]).map(|(x, y)| x * y).sum()).collect())
        .collect();
    let eig = jacobi_eigen(&restricted);
    let scale = frobenius(a).max(1e-300);
    let lift = |w: &Vec<f64>| -> Vec<f64> {
        let d = block[0].len();
        (0..d).map(|t| (0..n).map(|i| w[i] * block[i][t]).sum()).collect()
    };
    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eig.values[end - 1] - eig.values[end]).abs() < 1e-8 * scale {
            end += 1;
        }
        let sub: Vec<Vec<f64>> = eig.vectors[start..end].iter().map(lift).collect();
        out.extend(split_block(mats, sub, k + 1, warnings, primes));
        start = end;
    }
    out
}

/// Simultaneous Hecke eigenbasis of degree `ν`.
///
/// The invariant subspace carries all nonzero spectrum; its complement is
/// reported as one [`DegenerateBlock`] with eigenvalue 0.
pub fn simultaneous_eigenbasis(nu: u32, primes: &[u64], order: OrderSpec) -> Result<EigenSystem> {
    if primes.is_empty() {
        return Err(Error::invalid("need at least one prime"));
    }
    for &p in primes {
        check_prime(p)?;
    }
    let space = cached_invariant_subspace(nu, order)?;
    let matrices: Vec<HeckeMatrix> = primes
        .par_iter()
        .map(|&p| hecke_matrix_invariant(&space, p, HeckeNormalization::UnitNormalized))
        .collect::<Result<_>>()?;
    let floats: Vec<Vec<Vec<f64>>> = matrices.iter().map(|m| m.orthonormal_f64()).collect();
    let d = space.dim();
    let mut warnings = Vec::new();
    let identity: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut vectors = split_block(&floats, identity, 0, &mut warnings, primes);
    for v in vectors.iter_mut() {
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= n);
        normalize_sign(v);
    }
    let rayleigh = |a: &Vec<Vec<f64>>, v: &Vec<f64>| -> f64 {
        mat_vec(a, v).iter().zip(v).map(|(x, y)| x * y).sum()
    };
    let mut eigenvalues: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| floats.iter().map(|a| rayleigh(a, v)).collect())
        .collect();
    // order independent of the prime list order: sort by eigenvalues at
    // increasing primes, descending
    let mut idx: Vec<usize> = (0..vectors.len()).collect();
    let mut sorted_primes: Vec<(u64, usize)> = primes.iter().copied().zip(0..).collect();
    sorted_primes.sort();
    idx.sort_by(|&a, &b| {
        for &(_, k) in &sorted_primes {
            let c = eigenvalues[b][k].total_cmp(&eigenvalues[a][k]);
            if c != std::cmp::Ordering::Equal {
                return c;
            }
        }
        std::cmp::Ordering::Equal
    });
    vectors = idx.iter().map(|&i| vectors[i].clone()).collect();
    eigenvalues = idx.iter().map(|&i| eigenvalues[i].clone()).collect();
    let mut max_residual: f64 = 0.0;
    for (v, lams) in vectors.iter().zip(&eigenvalues) {
        for (a, lam) in floats.iter().zip(lams) {
            let av = mat_vec(a, v);
            let r: f64 = av.iter().zip(v).map(|(x, y)| (x - lam * y).powi(2)).sum::<f64>().sqrt();
            max_residual = max_residual.max(r / frobenius(a).max(1e-300));
        }
    }
    if max_residual > 1e-10 {
        return Err(Error::numerical(format!(
            "eigenvector residual {max_residual:e} exceeds 1e-10"
        )));
    }
    let full = harmonic_dimension(3, nu);
    let complement = DegenerateBlock {
        dim: full - d,
        eigenvalue: 0.0,
    };
    if complement.dim > 1 {
        warnings.push(format!(
            "complement of the invariant subspace: eigenvalue 0 with multiplicity {}",
            complement.dim
        ));
    }
    let invariant = vec![true; vectors.len()];
    Ok(EigenSystem {
        nu,
        order,
        primes: primes.to_vec(),
        space,
        vectors,
        eigenvalues,
        invariant,
        complement,
        max_residual,
        warnings,
        matrices,
    })
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Eigenfunction `index` as a list of `(coefficient, basis polynomial)`
    /// with probability-L² norm one.
    pub fn eigenfunction_coefficients(&self, index: usize) -> Vec<f64> {
        self.vectors[index]
            .iter()
            .zip(&self.space.norms)
            .map(|(c, n)| c / n.to_f64().unwrap().sqrt())
            .collect()
    }

    /// Double-double forms of the invariant basis.
    pub fn basis_dd(&self) -> Vec<DDPoly> {
        self.space.elements.iter().map(|e| e.dd_form()).collect()
    }

    /// Value of the normalized eigenfunction at a point of S².
    pub fn evaluate(&self, index: usize, point: [f64; 3]) -> Result<f64> {
        if index >= self.len() {
            return Err(Error::invalid(format!("no eigenvector {index}")));
        }
        let r = (point.iter().map(|x| x * x).sum::<f64>()).sqrt();
        if (r - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("evaluation point is not on the unit sphere"));
        }
        let c = self.eigenfunction_coefficients(index);
        Ok(self
            .space
            .elements
            .iter()
            .zip(&c)
            .map(|(b, c)| c * b.eval_f64(&point))
            .sum())
    }

    /// Exact rational eigenvector and eigenvalues, available when the
    /// eigenvalue at the first prime is of the form `a / p^ν` with integral
    /// `a` (always the case for forms with rational coefficients).
    pub fn exact_eigenform(&self, index: usize) -> Option<ExactEigenform> {
        let p = self.primes[0];
        let mat = &self.matrices[0];
        let pnu = BigInt::from(p).pow(self.nu);
        let ap = (self.eigenvalues[index][0] * pnu.to_f64()?).round();
        let lam = BigRational::new(BigInt::from(ap as i128), pnu.clone());
        let d = self.space.dim();
        let shifted: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let v = mat.operator[i][j].clone();
                        if i == j {
                            v - &lam
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        let ker = kernel(&shifted, d);
        if ker.len() != 1 {
            return None;
        }
        let coords = &ker[0];
        let mut poly = MultiPoly::zero(3);
        for (b, c) in self.space.elements.iter().zip(coords) {
            poly.add_scaled(b, c);
        }
        // scale so the probability norm is a perfect rational and the sign
        // matches the float vector
        let approx = self.eigenfunction_coefficients(index);
        let dot: f64 = coords
            .iter()
            .zip(&approx)
            .zip(&self.space.norms)
            .map(|((c, a), n)| c.to_f64().unwrap() * a * n.to_f64().unwrap())
            .sum();
        if dot < 0.0 {
            poly = -&poly;
        }
        let norm = mean_product(&poly, &poly);
        Some(ExactEigenform {
            nu: self.nu,
            order: self.order,
            poly,
            norm,
        })
    }

    /// Ramanujan check `|λ_p| ≤ 2√p` for the unit-normalized eigenvalues;
    /// returns the violations `(vector, p, λ_p/√p)`.
    pub fn ramanujan_violations(&self) -> Vec<(usize, u64, f64)> {
        let mut out = Vec::new();
        if self.nu == 0 {
            // constants are Eisenstein, not cuspidal
            return out;
        }
        for (v, lams) in self.eigenvalues.iter().enumerate() {
            for (&p, &l) in self.primes.iter().zip(lams) {
                let r = l / (p as f64).sqrt();
                if r.abs() > 2.0 + 1e-8 {
                    out.push((v, p, r));
                }
            }
        }
        out
    }

    /// Plain-text table, one row per `(vector, p)`.
    pub fn to_table(&self) -> String {
        let mut s = String::from("# nu,order,vector,p,eigenvalue,invariant\n");
        for (v, lams) in self.eigenvalues.iter().enumerate() {
            for (&p, l) in self.primes.iter().zip(lams) {
                s.push_str(&format!(
                    "{},{},{},{},{:.17e},{}\n",
                    self.nu, self.order.kind, v, p, l, self.invariant[v]
                ));
            }
        }
        if self.complement.dim > 0 {
            s.push_str(&format!(
                "# complement block: dimension {}, eigenvalue 0 at every prime\n",
                self.complement.dim
            ));
        }
        s
    }
}

/// A Hecke eigenform with exact rational coefficients.
#[derive(Clone, Debug)]
pub struct ExactEigenform {
    pub nu: u32,
    pub order: OrderSpec,
    pub poly: MultiPoly,
    /// `∫ P² dσ` (probability).
    pub norm: BigRational,
}

impl ExactEigenform {
    pub fn eigenvalue(&self, p: u64) -> Result<BigRational> {
        eigenform_eigenvalue(&self.poly, self.order, p)
    }

    /// `a_p = p^ν λ_p`, the coefficient of the attached newform, which must
    /// be an integer.
    pub fn hecke_coefficient(&self, p: u64) -> Result<BigInt> {
        let l = self.eigenvalue(p)? * BigRational::from_integer(BigInt::from(p).pow(self.nu));
        if !l.is_integer() {
            return Err(Error::numerical(format!("p^ν λ_p = {l} is not integral at p = {p}")));
        }
        Ok(l.to_integer())
    }
}

/// `a_p` for all odd primes up to `bound`, in parallel.
pub fn hecke_coefficients(form: &ExactEigenform, bound: u64) -> Result<Vec<(u64, BigInt)>> {
    let primes: Vec<u64> = (3..=bound).filter(|&p| is_prime(p)).collect();
    primes
        .par_iter()
        .map(|&p| Ok((p, form.hecke_coefficient(p)?)))
        .collect()
}

