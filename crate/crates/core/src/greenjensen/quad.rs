//! Shared quadrature building blocks: Gauss-Legendre nodes on the unit
//! interval and a real bivariate polynomial with a symbolic Laplacian
//! (used as a smooth test potential/density with known curvature).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::Rng;

/// Process-wide cache of Gauss-Legendre rules: node construction costs
/// O(n^2) Newton iterations, and the integrators request the same few
/// sizes thousands of times.
static GL_CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();

/// Cached variant of [`gauss_legendre_01`]; returns a shared handle to
/// the identical node/weight list.
pub fn gauss_legendre_01_cached(n: usize) -> Arc<Vec<(f64, f64)>> {
    let cache = GL_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache lock");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(gauss_legendre_01(n)))
        .clone()
}

/// Gauss-Legendre nodes and weights on (0, 1), ascending by node.
/// Exact for polynomials of degree <= 2n - 1.
pub fn gauss_legendre_01(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "need at least one quadrature node");
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        // Chebyshev-type initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((x + 1.0) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("nodes are finite"));
    out
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let pk = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Real polynomial in (x, y) = (Re z, Im z), dense coefficient grid
/// `coeffs[i][j] * x^i * y^j`.
#[derive(Clone, Debug)]
pub struct BivariatePoly {
    coeffs: Vec<Vec<f64>>,
}

impl BivariatePoly {
    pub fn new(coeffs: Vec<Vec<f64>>) -> Self {
        BivariatePoly { coeffs }
    }

    /// Random polynomial of total degree <= degree with coefficients in
    /// [-1, 1]; entries above the anti-diagonal are zeroed so the total
    /// degree bound holds.
    pub fn random<R: Rng>(degree: usize, rng: &mut R) -> Self {
        let mut coeffs = vec![vec![0.0; degree + 1]; degree + 1];
        for (i, row) in coeffs.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                if i + j <= degree {
                    *c = rng.gen_range(-1.0..1.0);
                }
            }
        }
        BivariatePoly { coeffs }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        let mut xi = 1.0;
        for row in &self.coeffs {
            let mut yj = 1.0;
            for c in row {
                acc += c * xi * yj;
                yj *= y;
            }
            xi *= x;
        }
        acc
    }

    pub fn eval_z(&self, z: Complex64) -> f64 {
        self.eval(z.re, z.im)
    }

    /// Symbolic Laplacian d^2/dx^2 + d^2/dy^2.
    pub fn laplacian(&self) -> BivariatePoly {
        let ni = self.coeffs.len();
        let nj = self.coeffs.first().map_or(0, |r| r.len());
        let mut out = vec![vec![0.0; nj]; ni];
        for i in 0..ni {
            for j in 0..nj {
                let c = self.coeffs[i][j];
                if c == 0.0 {
                    continue;
                }
                if i >= 2 {
                    out[i - 2][j] += c * (i * (i - 1)) as f64;
                }
                if j >= 2 {
                    out[i][j - 2] += c * (j * (j - 1)) as f64;
                }
            }
        }
        BivariatePoly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gauss_nodes_integrate_polynomials_exactly() {
        let gl = gauss_legendre_01(4);
        let total: f64 = gl.iter().map(|(_, w)| w).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
        // degree 7 = 2n - 1 is still exact
        let i7: f64 = gl.iter().map(|(x, w)| w * x.powi(7)).sum();
        assert_abs_diff_eq!(i7, 1.0 / 8.0, epsilon = 1e-14);
        let gl64 = gauss_legendre_01(64);
        let ilog: f64 = gl64.iter().map(|(x, w)| w * x.powi(3) * (1.0 / x).ln()).sum();
        assert_abs_diff_eq!(ilog, 1.0 / 16.0, epsilon = 1e-9);
    }

    #[test]
    fn symbolic_laplacian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = BivariatePoly::random(6, &mut rng);
        let lap = p.laplacian();
        let h = 1e-4;
        for &(x, y) in &[(0.3, -0.2), (0.0, 0.5), (-0.7, 0.1)] {
            let fd = (p.eval(x + h, y) + p.eval(x - h, y) + p.eval(x, y + h)
                + p.eval(x, y - h)
                - 4.0 * p.eval(x, y))
                / (h * h);
            assert_abs_diff_eq!(lap.eval(x, y), fd, epsilon = 1e-5);
        }
    }
}
