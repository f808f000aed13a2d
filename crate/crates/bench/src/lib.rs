//! Shared fixtures for the benchmark suite: deterministic test maps and
//! potentials sized like the workloads the library is tuned for.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use valdisc::greenjensen::BivariatePoly;
use valdisc::{Poly, RationalMap};

/// [1 : (2z)^n + 1]: the steepening family whose curvature concentrates
/// on the circle |z| = 1/2 as n grows.
pub fn doubling_map(n: usize) -> RationalMap {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[0] = Complex64::new(1.0, 0.0);
    coeffs[n] = Complex64::new(2.0_f64.powi(n as i32), 0.0);
    RationalMap::new(vec![
        Poly::new(vec![Complex64::new(1.0, 0.0)]),
        Poly::new(coeffs),
    ])
    .unwrap()
}

/// A fixed random bivariate polynomial of the given total degree.
pub fn test_potential(degree: usize) -> BivariatePoly {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    BivariatePoly::random(degree, &mut rng)
}
