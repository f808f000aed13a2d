//! Polynomials, rational maps into projective space, and root multisets.
//!
//! Every polynomial carries a double-precision view and, when its
//! coefficients were given as integers or rationals, an exact
//! Gaussian-rational view. Operations that must be integer-exact (radical
//! degrees, the ramification bookkeeping behind the identity checkers)
//! insist on the exact view; numerical operations use the floating one.

mod exact;
mod parse;
mod roots;

pub use exact::{ExactPoly, GaussRat};
pub use parse::{parse_complex_token, parse_map, parse_poly};
pub use roots::{argument_principle_count, root_multiset, roots_in_disc};

pub(crate) use roots::{all_roots, boundary_band};

use num_complex::Complex64;

use crate::error::{Result, VdError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense univariate polynomial, ascending coefficients.
///
/// The floating view is always present; the exact view is carried along
/// whenever it is available and both views agree by construction.
#[derive(Clone, Debug)]
pub struct Poly {
    coeffs: Vec<Complex64>,
    exact: Option<ExactPoly>,
}

impl Poly {
    /// Build from floating coefficients; trailing exact zeros are trimmed.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Poly { coeffs, exact: None }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_exact(exact: ExactPoly) -> Self {
        let coeffs = exact.to_complex_coeffs();
        Poly {
            coeffs,
            exact: Some(exact),
        }
    }

    pub(crate) fn from_views(coeffs: Vec<Complex64>, exact: Option<ExactPoly>) -> Self {
        match exact {
            Some(e) => {
                let p = Poly::from_exact(e);
                debug_assert_eq!(p.coeffs.len(), Poly::new(coeffs).coeffs.len());
                p
            }
            None => Poly::new(coeffs),
        }
    }

    pub fn zero() -> Self {
        Poly::from_exact(ExactPoly::zero())
    }

    pub fn one() -> Self {
        Poly::from_exact(ExactPoly::constant(GaussRat::one()))
    }

    /// The monomial z^k.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![GaussRat::zero(); k + 1];
        c[k] = GaussRat::one();
        Poly::from_exact(ExactPoly::new(c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn exact(&self) -> Option<&ExactPoly> {
        self.exact.as_ref()
    }

    /// Largest coefficient modulus (0 for the zero polynomial).
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Evaluate the polynomial and its derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Sum of |c_k| t^k: an upper bound for |p(z)| on |z| = t and the
    /// natural scale for evaluation round-off at that radius.
    pub fn abs_eval(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c.norm();
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * i as f64)
            .collect::<Vec<_>>();
        Poly::from_views(coeffs, self.exact.as_ref().map(|e| e.derivative()))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or(ZERO)
                    + other.coeffs.get(i).copied().unwrap_or(ZERO)
            })
            .collect();
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(a.add(b)),
            _ => None,
        };
        Poly::from_views(coeffs, exact)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly::from_views(
            self.coeffs.iter().map(|c| -c).collect(),
            self.exact.as_ref().map(|e| e.scale(&GaussRat::from_i64(-1))),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(a.mul(b)),
            _ => None,
        };
        Poly::from_views(out, exact)
    }

    pub fn scale_complex(&self, c: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Coefficient string in the same grammar accepted by the parser:
    /// ascending, comma-separated.
    pub fn to_coeff_string(&self) -> String {
        self.coeffs
            .iter()
            .map(|c| format_complex(*c))
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub(crate) fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 {
        format!("{}{}i", c.re, c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

/// Degree of the squarefree part of `p` (number of distinct roots), computed
/// with exact arithmetic: deg p - deg gcd(p, p').
pub fn radical_degree(p: &Poly) -> Result<usize> {
    let e = p.exact().ok_or(VdError::ExactModeRequired)?;
    e.radical_degree()
}

/// A holomorphic map of the disc (or the sphere) into projective space,
/// written in homogeneous polynomial components with no common factor.
#[derive(Clone, Debug)]
pub struct RationalMap {
    components: Vec<Poly>,
    degree: usize,
}

impl RationalMap {
    /// Validates: at least two components, not all zero, and no common zero
    /// of all components (exactly, when every component carries an exact
    /// view; within a relative band of 1e-9 otherwise).
    pub fn new(components: Vec<Poly>) -> Result<Self> {
        if components.len() < 2 {
            return Err(VdError::Invalid(
                "a projective map needs at least two components".into(),
            ));
        }
        let degree = components
            .iter()
            .filter_map(|p| p.degree())
            .max()
            .ok_or_else(|| VdError::DegenerateInput("all components are zero".into()))?;

        if components.iter().all(|p| p.exact().is_some()) {
            let mut g: Option<ExactPoly> = None;
            for p in &components {
                let e = p.exact().unwrap();
                if e.is_zero() {
                    continue;
                }
                g = Some(match g {
                    None => e.monic(),
                    Some(prev) => ExactPoly::gcd(&prev, e),
                });
            }
            if let Some(g) = g {
                if g.degree().unwrap_or(0) > 0 {
                    return Err(VdError::Invalid(
                        "components share a nonconstant factor".into(),
                    ));
                }
            }
        } else {
            // Floating check: candidate common zeros are the roots of a
            // nonzero component of minimal degree.
            let probe = components
                .iter()
                .filter(|p| !p.is_zero())
                .min_by_key(|p| p.degree().unwrap())
                .unwrap();
            if probe.degree().unwrap() > 0 {
                for root in all_roots(probe.coeffs())? {
                    let common = components.iter().all(|p| {
                        let scale = p.coeff_scale()
                            * (p.coeffs().len() as f64)
                            * root.norm().max(1.0).powi(p.coeffs().len() as i32 - 1);
                        p.eval(root).norm() <= 1e-9 * scale.max(f64::MIN_POSITIVE)
                    });
                    if common {
                        return Err(VdError::Invalid(format!(
                            "components share a common root near {}",
                            format_complex(root)
                        )));
                    }
                }
            }
        }

        Ok(RationalMap { components, degree })
    }

    /// Affine polynomial map [1 : p].
    pub fn graph_of(p: Poly) -> Result<Self> {
        RationalMap::new(vec![Poly::one(), p])
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    /// Dimension of the target projective space.
    pub fn target_dim(&self) -> usize {
        self.components.len() - 1
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_constant(&self) -> bool {
        self.degree == 0
    }

    pub fn coeff_scale(&self) -> f64 {
        self.components
            .iter()
            .map(|p| p.coeff_scale())
            .fold(0.0, f64::max)
    }

    /// Homogeneous value at z.
    pub fn eval_components(&self, z: Complex64) -> Vec<Complex64> {
        self.components.iter().map(|p| p.eval(z)).collect()
    }

    /// Homogeneous value and component-wise derivative at z.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut v = Vec::with_capacity(self.components.len());
        let mut dv = Vec::with_capacity(self.components.len());
        for p in &self.components {
            let (a, b) = p.eval_with_derivative(z);
            v.push(a);
            dv.push(b);
        }
        (v, dv)
    }

    /// Wronskian F1' F0 - F1 F0' of a two-component map. Exact when both
    /// components are exact. Vanishes identically iff the map is constant.
    pub fn wronskian(&self) -> Result<Poly> {
        if self.components.len() != 2 {
            return Err(VdError::Invalid(
                "wronskian requires a two-component map".into(),
            ));
        }
        let f0 = &self.components[0];
        let f1 = &self.components[1];
        Ok(f1.derivative().mul(f0).sub(&f1.mul(&f0.derivative())))
    }

    /// Precompose with the disc automorphism z -> e^{i alpha} (z - a) / (1 - conj(a) z),
    /// clearing denominators so the result is again polynomial of the same degree.
    pub fn compose_mobius(&self, alpha: f64, a: Complex64) -> Result<RationalMap> {
        if a.norm() >= 1.0 {
            return Err(VdError::Invalid(
                "automorphism parameter must satisfy |a| < 1".into(),
            ));
        }
        let d = self.degree;
        let phase = Complex64::from_polar(1.0, alpha);
        // u = e^{i alpha} (z - a), v = 1 - conj(a) z
        let u = Poly::new(vec![-phase * a, phase]);
        let v = Poly::new(vec![Complex64::new(1.0, 0.0), -a.conj()]);
        let mut u_pows = vec![Poly::one()];
        let mut v_pows = vec![Poly::one()];
        for k in 1..=d {
            u_pows.push(u_pows[k - 1].mul(&u));
            v_pows.push(v_pows[k - 1].mul(&v));
        }
        let comps = self
            .components
            .iter()
            .map(|p| {
                let mut acc = Poly::zero();
                for (k, c) in p.coeffs().iter().enumerate() {
                    if *c == ZERO {
                        continue;
                    }
                    acc = acc.add(&u_pows[k].mul(&v_pows[d - k]).scale_complex(*c));
                }
                acc
            })
            .collect();
        RationalMap::new(comps)
    }

    /// Component string in the grammar accepted by the parser.
    pub fn to_spec_string(&self) -> String {
        self.components
            .iter()
            .map(|p| p.to_coeff_string())
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

/// Roots of a polynomial in a disc, merged into multiplicity clusters.
///
/// Entries are sorted by (re, im) for deterministic reporting; locations of
/// distinct entries are at least the merge radius apart; multiplicities sum
/// to the argument-principle winding number around the sampling circle.
#[derive(Clone, Debug, Default)]
pub struct RootMultiset {
    entries: Vec<(Complex64, u32)>,
}

impl RootMultiset {
    pub(crate) fn from_entries(mut entries: Vec<(Complex64, u32)>) -> Self {
        entries.sort_by(|a, b| {
            (a.0.re, a.0.im)
                .partial_cmp(&(b.0.re, b.0.im))
                .expect("root locations are finite")
        });
        RootMultiset { entries }
    }

    pub fn entries(&self) -> &[(Complex64, u32)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.entries.iter().map(|e| e.1).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn poly_arithmetic_keeps_views_consistent() {
        let a = parse_poly("1,-2,1", false).unwrap(); // (1-z)^2
        let b = parse_poly("0,1", false).unwrap(); // z
        let prod = a.mul(&b);
        assert!(prod.exact().is_some());
        let z = Complex64::new(0.3, -0.7);
        let direct = a.eval(z) * b.eval(z);
        assert_abs_diff_eq!(prod.eval(z).re, direct.re, epsilon = 1e-12);
        assert_abs_diff_eq!(prod.eval(z).im, direct.im, epsilon = 1e-12);
    }

    #[test]
    fn eval_with_derivative_matches_manual() {
        let p = Poly::from_real(&[2.0, -1.0, 0.5, 3.0]);
        let z = Complex64::new(0.4, 0.2);
        let (v, dv) = p.eval_with_derivative(z);
        let h = Complex64::new(1e-7, 0.0);
        let fd = (p.eval(z + h) - p.eval(z - h)) / (2.0 * h);
        assert_abs_diff_eq!(v.norm(), p.eval(z).norm(), epsilon = 1e-14);
        assert_abs_diff_eq!(dv.re, fd.re, epsilon = 1e-6);
        assert_abs_diff_eq!(dv.im, fd.im, epsilon = 1e-6);
    }

    #[test]
    fn radical_degree_requires_exact_view() {
        let p = Poly::from_real(&[0.5, 1.0]);
        assert!(matches!(
            radical_degree(&p),
            Err(VdError::ExactModeRequired)
        ));
    }

    #[test]
    fn radical_degree_example() {
        // z^2 (z-1)^3 = z^5 - 3 z^4 + 3 z^3 - z^2 has 2 distinct roots.
        let p = parse_poly("0,0,-1,3,-3,1", false).unwrap();
        assert_eq!(radical_degree(&p).unwrap(), 2);
        // Independent route: count clustered roots of the floating view.
        let roots = roots_in_disc(&p, 10.0).unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots.total_multiplicity(), 5);
    }

    #[test]
    fn map_rejects_shared_factors() {
        // both components divisible by (z - 1)
        let f0 = parse_poly("-1,1", false).unwrap();
        let f1 = parse_poly("-1,0,1", false).unwrap(); // (z-1)(z+1)
        assert!(RationalMap::new(vec![f0, f1]).is_err());
        // floating variant of the same failure
        let g0 = Poly::from_real(&[-1.0, 1.0]).mul(&Poly::from_real(&[0.5, 1.0]));
        let g1 = Poly::from_real(&[-1.0, 1.0]).mul(&Poly::from_real(&[0.25, 0.0, 1.0]));
        let g0 = Poly::new(g0.coeffs().to_vec()); // drop exact views
        let g1 = Poly::new(g1.coeffs().to_vec());
        assert!(RationalMap::new(vec![g0, g1]).is_err());
    }

    #[test]
    fn map_accepts_coprime_components_and_reports_degree() {
        let f = parse_map("1 | 0,0,0,1", false).unwrap(); // [1 : z^3]
        assert_eq!(f.degree(), 3);
        assert_eq!(f.target_dim(), 1);
        let w = f.wronskian().unwrap();
        // W = 3 z^2
        assert_eq!(w.degree(), Some(2));
        assert_abs_diff_eq!(w.coeffs()[2].re, 3.0, epsilon = 1e-14);
    }

    #[test]
    fn mobius_composition_preserves_degree_and_values() {
        let f = parse_map("1 | 0,0,0,1", false).unwrap(); // [1 : z^3]
        let a = Complex64::new(0.3, -0.1);
        let alpha = 0.7;
        let g = f.compose_mobius(alpha, a).unwrap();
        assert_eq!(g.degree(), 3);
        // check projective equality of values at sample points
        let phase = Complex64::from_polar(1.0, alpha);
        for &z in &[
            Complex64::new(0.2, 0.1),
            Complex64::new(-0.5, 0.4),
            Complex64::new(0.0, 0.0),
        ] {
            let w = phase * (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z);
            let fv = f.eval_components(w);
            let gv = g.eval_components(z);
            // cross-ratio: fv[0]*gv[1] == fv[1]*gv[0]
            let cross = fv[0] * gv[1] - fv[1] * gv[0];
            assert!(cross.norm() <= 1e-12 * (fv[0].norm() + fv[1].norm()).max(1.0));
        }
    }
}
