//! Complex log-gamma via shifted Stirling series.

use num_complex::Complex64;
use std::f64::consts::PI;

const BERNOULLI_OVER: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// A branch of `ln Γ(z)`, continuous on `Re z > 0`; `None` at poles.
///
/// The imaginary part is not reduced modulo `2π`, which is harmless since
/// callers only exponentiate sums of these.
pub fn ln_gamma(z: Complex64) -> Option<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return None;
    }
    if z.re < 0.5 {
        // reflection: Γ(z)Γ(1-z) = π / sin(πz)
        let s = (Complex64::from(PI) * z).sin();
        return Some(Complex64::from(PI.ln()) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z)?);
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 16.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in BERNOULLI_OVER {
        series += p * c;
        p *= inv2;
    }
    Some((w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift)
}

/// `ln Γ(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).map(|v| v.re).unwrap_or(f64::INFINITY)
}

/// `ln Γ_ℂ(s) = ln((2π)^{-s} Γ(s))`.
pub fn ln_gamma_c(s: Complex64) -> Option<Complex64> {
    Some(ln_gamma(s)? - s * (2.0 * PI).ln())
}
