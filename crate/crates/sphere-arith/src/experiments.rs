//! Numerical experiments on Hecke eigenfunctions: mass equidistribution,
//! value-distribution moments, third moments and the central-value
//! identity, with CSV, JSON and SVG output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hecke::{simultaneous_eigenbasis, EigenSystem, ExactEigenform};
use crate::lfunc::{central_value, root_number_fit, AfeParams, BadFactor, FormData, LKind, LSeriesSpec};
use crate::numeric::quadrature::SphereRule;
use crate::poly::{mean_product, MultiPoly};
use crate::quat::{is_prime, OrderKind, OrderSpec};
use crate::theta::{expansion_from_primes, petersson_norm, PeterssonValue};
use crate::trilinear::{normalized_integral_squared, predicted_central_value, Factor, InputNormalization, TripleIndex};

/// Settings shared by all experiments; every field has a default so a
/// JSON file may list only what it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub order: OrderKind,
    pub nu_min: u32,
    pub nu_max: u32,
    /// Primes whose Hecke operators are diagonalized.
    pub primes: Vec<u64>,
    /// Degree of the fixed eigenfunction in the mass experiment (0 for the
    /// constant function).
    pub test_degree: u32,
    /// Moment orders `q`.
    pub moments: Vec<u32>,
    /// Gauss–Legendre order of the sphere rule; at least the exactness
    /// threshold when given.
    pub quadrature_order: Option<usize>,
    pub out_dir: Option<PathBuf>,
    /// Relative tolerance for the identity check.
    pub tolerance: f64,
    /// Number of Dirichlet coefficients in the L-value computations.
    pub coefficients: usize,
    /// Degrees `ν` of the equal-forms triples in the identity check.
    pub identity_nus: Vec<u32>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            order: OrderKind::Hurwitz,
            nu_min: 4,
            nu_max: 48,
            primes: vec![3, 5, 7],
            test_degree: 4,
            moments: vec![1, 2, 3, 4],
            quadrature_order: None,
            out_dir: None,
            tolerance: 1e-3,
            coefficients: 2000,
            identity_nus: vec![4, 6, 8],
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Reads a config file without validating it, so command-line
    /// overrides can still repair it.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn order_spec(&self) -> OrderSpec {
        OrderSpec::new(self.order)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nu_min > self.nu_max {
            return Err(Error::Config(format!("nu_min {} exceeds nu_max {}", self.nu_min, self.nu_max)));
        }
        if self.primes.is_empty() {
            return Err(Error::Config("prime list is empty".into()));
        }
        if let Some(&p) = self.primes.iter().find(|&&p| p == 2 || !is_prime(p)) {
            return Err(Error::Config(format!("{p} is not an odd prime")));
        }
        if self.moments.contains(&0) {
            return Err(Error::Config("moment orders start at 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if self.coefficients < 200 {
            return Err(Error::Config("need at least 200 coefficients".into()));
        }
        if let Some(&nu) = self.identity_nus.iter().find(|&&nu| nu % 2 != 0 || nu == 0) {
            return Err(Error::Config(format!("identity degree {nu} must be even and positive")));
        }
        Ok(())
    }

    /// Sphere rule exact for integrands of total degree `degree`.
    fn rule(&self, degree: u32) -> Result<SphereRule> {
        let need = degree as usize / 2 + 1;
        match self.quadrature_order {
            Some(n) if n < need => Err(Error::Config(format!(
                "quadrature order {n} is below {need}, needed for degree {degree}"
            ))),
            Some(n) => Ok(SphereRule::new(n)),
            None => Ok(SphereRule::new(need)),
        }
    }

    fn nus(&self) -> Vec<u32> {
        (self.nu_min..=self.nu_max).collect()
    }
}

/// One row of an experiment table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub nu: u32,
    pub index: usize,
    pub quantity: String,
    pub value: f64,
    pub err: f64,
}

fn sort_records(records: &mut [ExperimentRecord]) {
    records.sort_by(|a, b| {
        (a.quantity.as_str(), a.nu, a.index).cmp(&(b.quantity.as_str(), b.nu, b.index))
    });
}

/// Values of the normalized eigenfunctions at the nodes, evaluated in
/// double-double arithmetic.
fn node_values(sys: &EigenSystem, rule: &SphereRule) -> Vec<Vec<f64>> {
    let basis = sys.basis_dd();
    let at: Vec<Vec<f64>> = rule
        .points
        .par_iter()
        .map(|p| basis.iter().map(|b| b.eval(p)).collect())
        .collect();
    (0..sys.len())
        .map(|i| {
            let c = sys.eigenfunction_coefficients(i);
            at.iter().map(|row| row.iter().zip(&c).map(|(x, y)| x * y).sum()).collect()
        })
        .collect()
}

/// `∫ f dσ̄` with a roundoff estimate.
fn integrate(rule: &SphereRule, f: impl Fn(usize) -> f64) -> (f64, f64) {
    let mut s = 0.0;
    let mut a = 0.0;
    for (i, w) in rule.weights.iter().enumerate() {
        let v = w * f(i);
        s += v;
        a += v.abs();
    }
    (s, 4.0 * f64::EPSILON * a * (rule.weights.len() as f64).sqrt())
}

fn eigensystem(config: &ExperimentConfig, nu: u32) -> Result<EigenSystem> {
    simultaneous_eigenbasis(nu, &config.primes, config.order_spec())
}

/// `∫ Q ψ² dσ̄` for every eigenfunction `ψ` of every `ν` in range, with `Q`
/// the first eigenfunction of degree `test_degree`.
pub fn run_mass(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let q_sys = if config.test_degree == 0 {
        None
    } else {
        let s = eigensystem(config, config.test_degree)?;
        if s.is_empty() {
            return Err(Error::Config(format!(
                "no invariant eigenfunction of degree {} for the {} order",
                config.test_degree, config.order
            )));
        }
        Some(s)
    };
    // validate quadrature for the largest degree before doing any work
    config.rule(2 * config.nu_max + config.test_degree)?;
    let per_nu: Vec<Vec<ExperimentRecord>> = config
        .nus()
        .into_par_iter()
        .map(|nu| {
            let sys = eigensystem(config, nu)?;
            if sys.is_empty() {
                return Ok(Vec::new());
            }
            let rule = config.rule(2 * nu + config.test_degree)?;
            let psi = node_values(&sys, &rule);
            let q: Vec<f64> = match &q_sys {
                Some(s) => node_values(s, &rule).swap_remove(0),
                None => vec![1.0; rule.points.len()],
            };
            Ok(psi
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let (value, err) = integrate(&rule, |k| q[k] * v[k] * v[k]);
                    ExperimentRecord {
                        nu,
                        index: i,
                        quantity: "mass".into(),
                        value,
                        err,
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<ExperimentRecord> = per_nu.into_iter().flatten().collect();
    sort_records(&mut out);
    Ok(out)
}

/// `m_q(ψ) = ∫ ψ^q dσ̄` for every `q` in the config.
pub fn run_moments(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let qmax = config.moments.iter().copied().max().unwrap_or(1);
    config.rule(qmax * config.nu_max)?;
    let per_nu: Vec<Vec<ExperimentRecord>> = config
        .nus()
        .into_par_iter()
        .map(|nu| {
            let sys = eigensystem(config, nu)?;
            if sys.is_empty() {
                return Ok(Vec::new());
            }
            let rule = config.rule(qmax * nu)?;
            let psi = node_values(&sys, &rule);
            let mut recs = Vec::new();
            for (i, v) in psi.iter().enumerate() {
                for &q in &config.moments {
                    let (value, err) = integrate(&rule, |k| v[k].powi(q as i32));
                    recs.push(ExperimentRecord {
                        nu,
                        index: i,
                        quantity: format!("moment_{q}"),
                        value,
                        err,
                    });
                }
            }
            Ok(recs)
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<ExperimentRecord> = per_nu.into_iter().flatten().collect();
    sort_records(&mut out);
    Ok(out)
}

/// Standard Gaussian moment `E[Z^q]`.
pub fn gaussian_moment(q: u32) -> f64 {
    if q % 2 == 1 {
        0.0
    } else {
        (1..q).step_by(2).map(|k| k as f64).product()
    }
}

/// `(∫P³ dσ̄)² / (∫P² dσ̄)³` exactly, with the sign of `∫P³`.
pub fn exact_third_moment(form: &ExactEigenform) -> (BigRational, i32) {
    let p = &form.poly;
    let cube = mean_product(&(p * p), p);
    let sign = if cube.is_zero() {
        0
    } else if cube.is_negative() {
        -1
    } else {
        1
    };
    let sq = &cube * &cube / (&form.norm * &form.norm * &form.norm);
    (sq, sign)
}

fn signed_sqrt(sq: &BigRational, sign: i32) -> f64 {
    sign as f64 * sq.to_f64().unwrap_or(f64::NAN).sqrt()
}

/// Third moments of the L²-normalized eigenfunctions: exact when the
/// eigenform has rational coefficients, exact-rule quadrature otherwise,
/// and exactly zero for odd `ν`.
pub fn run_third_moment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    config.rule(3 * config.nu_max)?;
    let per_nu: Vec<Vec<ExperimentRecord>> = config
        .nus()
        .into_par_iter()
        .map(|nu| {
            let sys = eigensystem(config, nu)?;
            let rec = |index, quantity: &str, value, err| ExperimentRecord {
                nu,
                index,
                quantity: quantity.into(),
                value,
                err,
            };
            if nu % 2 == 1 {
                return Ok((0..sys.len()).map(|i| rec(i, "third_moment", 0.0, 0.0)).collect());
            }
            let mut recs = Vec::new();
            let mut psi: Option<Vec<Vec<f64>>> = None;
            let rule = config.rule(3 * nu)?;
            for i in 0..sys.len() {
                match sys.exact_eigenform(i) {
                    Some(form) => {
                        let (sq, sign) = exact_third_moment(&form);
                        let v = signed_sqrt(&sq, sign);
                        recs.push(rec(i, "third_moment", v, v.abs() * f64::EPSILON));
                    }
                    None => {
                        let vals = psi.get_or_insert_with(|| node_values(&sys, &rule));
                        let v = &vals[i];
                        let (value, err) = integrate(&rule, |k| v[k] * v[k] * v[k]);
                        recs.push(rec(i, "third_moment", value, err));
                    }
                }
            }
            Ok(recs)
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<ExperimentRecord> = per_nu.into_iter().flatten().collect();
    sort_records(&mut out);
    Ok(out)
}

/// One equal-forms triple in the identity check.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityEntry {
    pub nu: u32,
    pub index: usize,
    pub weight: u32,
    /// `a_p` for the first few primes, for identification.
    pub hecke_coefficients: Vec<(u64, String)>,
    pub root_number_form: i32,
    pub root_number_sym3: i32,
    pub root_number_triple: i32,
    pub form_value: f64,
    pub sym3_value: f64,
    /// `ℒ(Sym³ f, 1/2) ℒ(f, 1/2)²`.
    pub lhs: f64,
    pub lhs_error: f64,
    /// The degree-8 value computed from its own coefficients.
    pub triple_direct: f64,
    pub triple_direct_error: f64,
    /// Classical point at which the analytic center sits.
    pub classical_center: f64,
    pub petersson: PeterssonValue,
    pub integral_squared: String,
    pub rhs: f64,
    pub rhs_error: f64,
    pub ratio: Option<f64>,
    pub ratio_error: Option<f64>,
    pub factors: Vec<Factor>,
    pub trilinear_route_ratio: Option<f64>,
    pub symmetric_square_route_ratio: Option<f64>,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub entries: Vec<IdentityEntry>,
    /// Weighted mean ratio over the nonvanishing entries.
    pub ratio: Option<f64>,
    pub ratio_error: Option<f64>,
    /// All nonvanishing ratios agree within their combined errors.
    pub consistent: bool,
    pub target: f64,
}

fn ratio_of(a: f64, b: f64) -> Option<f64> {
    (b != 0.0 && a != 0.0).then(|| a / b)
}

/// LHS `ℒ(Sym³f,1/2)ℒ(f,1/2)²` against the predicted central value, for
/// every rational invariant eigenform of each degree in `identity_nus`.
pub fn run_identity(config: &ExperimentConfig) -> Result<IdentityReport> {
    config.validate()?;
    if config.order != OrderKind::Hurwitz {
        return Err(Error::Config("the identity check needs the Hurwitz order".into()));
    }
    let params = AfeParams::default();
    let mut entries = Vec::new();
    for &nu in &config.identity_nus {
        let sys = eigensystem(config, nu)?;
        for index in 0..sys.len() {
            let Some(form) = sys.exact_eigenform(index) else {
                continue;
            };
            let data = FormData::from_eigenform(&form, config.coefficients as u64, format!("nu{nu}_{index}"))?;
            let m = config.coefficients;
            let mut values = Vec::new();
            for kind in [LKind::Form, LKind::Sym3, LKind::Triple] {
                let (spec, _) = LSeriesSpec::for_form(kind, &data, m, &BadFactor::Derived)?;
                let fit = root_number_fit(&spec, &params)?;
                let v = central_value(&spec.with_sign(fit.sign), &params)?;
                values.push((fit.sign, v.value.0, v.error));
            }
            let (wf, f, ef) = values[0];
            let (ws, s, es) = values[1];
            let (wt, t, et) = values[2];
            let lhs = s * f * f;
            let lhs_rel = es / s.abs().max(f64::MIN_POSITIVE) + 2.0 * ef / f.abs().max(f64::MIN_POSITIVE);
            let lhs_error = if lhs == 0.0 { es * f * f + 2.0 * ef * f.abs() * s.abs() } else { lhs.abs() * lhs_rel };

            let q = expansion_from_primes(data.weight, &data.ap, 200)?;
            let pet = petersson_norm(&q, &data.label, 1e-12)?;
            let idx = TripleIndex::new(nu, nu, 2)?;
            let sq = normalized_integral_squared(&form.poly, &form.poly)?;
            let pred = predicted_central_value(
                &idx,
                &sq,
                [pet.value; 3],
                InputNormalization::Gegenbauer,
                config.order_spec().unit_count(),
            )?;
            let rhs_error = pred.value * 3.0 * pet.error / pet.value;
            let ratio = ratio_of(lhs, pred.value);
            let ratio_error = ratio.map(|r| r * (lhs_rel + 3.0 * pet.error / pet.value));
            let note = match (lhs.abs() < 1e-12 + lhs_error, pred.value == 0.0) {
                (true, true) => "both sides vanish".to_string(),
                (false, true) => "prediction vanishes but the L-value does not".to_string(),
                (true, false) => "L-value vanishes but the prediction does not".to_string(),
                (false, false) => String::new(),
            };
            entries.push(IdentityEntry {
                nu,
                index,
                weight: data.weight,
                hecke_coefficients: [2u64, 3, 5, 7].iter().map(|p| (*p, data.ap[p].to_string())).collect(),
                root_number_form: wf,
                root_number_sym3: ws,
                root_number_triple: wt,
                form_value: f,
                sym3_value: s,
                lhs,
                lhs_error,
                triple_direct: t,
                triple_direct_error: et,
                classical_center: 1.5 * data.weight as f64 - 1.0,
                petersson: pet,
                integral_squared: sq.to_string(),
                rhs: pred.value,
                rhs_error,
                ratio,
                ratio_error,
                factors: pred.factors,
                trilinear_route_ratio: ratio_of(lhs, pred.trilinear_route),
                symmetric_square_route_ratio: ratio_of(lhs, pred.symmetric_square_route),
                note,
            });
        }
    }
    let measured: Vec<(f64, f64)> = entries
        .iter()
        .filter_map(|e| Some((e.ratio?, e.ratio_error?.max(f64::EPSILON * e.ratio?.abs()))))
        .collect();
    let (ratio, ratio_error) = if measured.is_empty() {
        (None, None)
    } else {
        let wsum: f64 = measured.iter().map(|(_, e)| 1.0 / (e * e)).sum();
        let mean = measured.iter().map(|(r, e)| r / (e * e)).sum::<f64>() / wsum;
        (Some(mean), Some(wsum.sqrt().recip()))
    };
    let consistent = measured.iter().enumerate().all(|(i, (ri, ei))| {
        measured[i + 1..]
            .iter()
            .all(|(rj, ej)| (ri - rj).abs() <= (ei + ej).max(config.tolerance * ri.abs()))
    });
    Ok(IdentityReport {
        entries,
        ratio,
        ratio_error,
        consistent,
        target: 1.0,
    })
}

/// CSV with header `nu,index,quantity,value,err`.
pub fn to_csv(records: &[ExperimentRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| Error::numerical(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::numerical(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn from_csv(text: &str) -> Result<Vec<ExperimentRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Parse {
                line: i + 2,
                msg: e.to_string(),
            })
        })
        .collect()
}

/// Scatter of `|value|` against `ν` per quantity, with the per-`ν`
/// maximum joined by a line.
pub fn to_svg(records: &[ExperimentRecord], title: &str) -> String {
    let (w, h, pad) = (720.0, 420.0, 60.0);
    let mut quantities: Vec<&str> = records.iter().map(|r| r.quantity.as_str()).collect();
    quantities.dedup();
    let nu_lo = records.iter().map(|r| r.nu).min().unwrap_or(0) as f64;
    let nu_hi = (records.iter().map(|r| r.nu).max().unwrap_or(1) as f64).max(nu_lo + 1.0);
    let y_hi = records.iter().map(|r| r.value.abs()).fold(0.0, f64::max).max(1e-300);
    let x = |nu: f64| pad + (nu - nu_lo) / (nu_hi - nu_lo) * (w - 2.0 * pad);
    let y = |v: f64| h - pad - v / y_hi * (h - 2.0 * pad);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{title}</text>"#, w / 2.0);
    let _ = writeln!(
        s,
        r#"<path d="M{pad} {pad} V{} H{}" fill="none" stroke="black"/>"#,
        h - pad,
        w - pad
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">ν</text>"#, w / 2.0, h - 20.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{y_hi:.3e}</text>"#, pad - 4.0, pad + 4.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">0</text>"#, pad - 4.0, h - pad + 4.0);
    let _ = writeln!(s, r#"<text x="{pad}" y="{}" text-anchor="middle">{nu_lo}</text>"#, h - pad + 16.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{nu_hi}</text>"#, w - pad, h - pad + 16.0);
    for (qi, q) in quantities.iter().enumerate() {
        let c = colors[qi % colors.len()];
        let rows: Vec<&ExperimentRecord> = records.iter().filter(|r| r.quantity == *q).collect();
        for r in &rows {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{c}" fill-opacity="0.5"/>"#,
                x(r.nu as f64),
                y(r.value.abs())
            );
        }
        let mut peaks: Vec<(u32, f64)> = Vec::new();
        for r in &rows {
            match peaks.last_mut() {
                Some((nu, v)) if *nu == r.nu => *v = v.max(r.value.abs()),
                _ => peaks.push((r.nu, r.value.abs())),
            }
        }
        let path: Vec<String> = peaks
            .iter()
            .enumerate()
            .map(|(i, (nu, v))| format!("{}{:.2} {:.2}", if i == 0 { "M" } else { "L" }, x(*nu as f64), y(*v)))
            .collect();
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{c}"/>"#, path.join(" "));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{c}">max |{q}|</text>"#,
            w - pad - 140.0,
            pad + 16.0 * qi as f64
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `<stem>.csv`, `<stem>.json` and `<stem>.svg` into `dir` and
/// returns their paths.
pub fn emit(records: &[ExperimentRecord], dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::invalid("no records to write"));
    }
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    let files = [
        (dir.join(format!("{stem}.csv")), to_csv(records)?),
        (dir.join(format!("{stem}.json")), serde_json::to_string_pretty(records)? + "\n"),
        (dir.join(format!("{stem}.svg")), to_svg(records, stem)),
    ];
    let mut out = Vec::new();
    for (path, body) in files {
        fs::write(&path, body).map_err(|e| Error::file(&path, e))?;
        out.push(path);
    }
    Ok(out)
}

/// `Q` for the mass experiment as an exact polynomial, when rational.
pub fn test_function(config: &ExperimentConfig) -> Result<MultiPoly> {
    if config.test_degree == 0 {
        return Ok(MultiPoly::one(3));
    }
    let sys = eigensystem(config, config.test_degree)?;
    (0..sys.len())
        .find_map(|i| sys.exact_eigenform(i))
        .map(|f| f.poly)
        .ok_or_else(|| Error::Config(format!("no rational eigenfunction of degree {}", config.test_degree)))
}
