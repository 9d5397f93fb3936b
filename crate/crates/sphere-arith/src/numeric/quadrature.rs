//! Gauss–Legendre rules and a product rule on the unit sphere.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton
        let mut z = ((i as f64 + 0.75) / (n as f64 + 0.5) * PI).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss–Legendre in `cos θ` times a uniform azimuthal grid.
///
/// Weights sum to 1, so integrals come out against the probability
/// measure. Exact for polynomials of total degree `≤ 2n - 1` in the
/// polar direction and `< azimuth` in the azimuthal direction; choosing
/// `azimuth = 2n` makes the rule exact through degree `2n - 1`.
#[derive(Clone, Debug)]
pub struct SphereRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(n: usize) -> Self {
        let (zs, ws) = gauss_legendre(n);
        let m = 2 * n;
        let mut points = Vec::with_capacity(n * m);
        let mut weights = Vec::with_capacity(n * m);
        for (z, w) in zs.iter().zip(&ws) {
            let s = (1.0 - z * z).max(0.0).sqrt();
            for j in 0..m {
                let phi = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                points.push([s * phi.cos(), s * phi.sin(), *z]);
                weights.push(w / (2.0 * m as f64));
            }
        }
        SphereRule { points, weights }
    }

    /// Smallest rule exact for polynomials of the given total degree.
    pub fn exact_for_degree(deg: usize) -> Self {
        Self::new(deg / 2 + 1)
    }

    pub fn integrate(&self, f: impl Fn(&[f64; 3]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }
}
