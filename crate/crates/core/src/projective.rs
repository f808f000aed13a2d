//! Projective-space geometry: homogeneous points, metricized divisors
//! cut out by homogeneous forms, Weil proximity functions, chordal
//! distance, and the pullback curvature density of the Fubini-Study
//! metric under a rational map.
//!
//! The divisor of a homogeneous form Q of degree q carries the metric
//! |Q(x)| / ||x||^q throughout, so its curvature is exactly q times the
//! Fubini-Study form and never needs divisor-specific quadrature.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::error::{Result, VdError};
use crate::funcspace::{parse_complex_token, ExactPoly, GaussRat, Poly, RationalMap};
use crate::greenjensen::{periodic_mean, QuadratureSpec};

/// A point of projective n-space in homogeneous coordinates.
/// All consumers respect scale equivalence.
#[derive(Clone, Debug)]
pub struct ProjPoint {
    coords: Vec<Complex64>,
}

impl ProjPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(VdError::Invalid(
                "a projective point needs at least two coordinates".into(),
            ));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(VdError::Invalid("coordinates must be finite".into()));
        }
        if coords.iter().all(|c| c.norm() == 0.0) {
            return Err(VdError::Invalid(
                "homogeneous coordinates must not all vanish".into(),
            ));
        }
        Ok(ProjPoint { coords })
    }

    /// The affine point [1 : w] on the projective line.
    pub fn from_affine(w: Complex64) -> Self {
        ProjPoint {
            coords: vec![Complex64::new(1.0, 0.0), w],
        }
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// Dimension of the ambient projective space.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Euclidean norm of the homogeneous representative.
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Unit-norm representative.
    pub fn normalized(&self) -> Vec<Complex64> {
        let n = self.norm();
        self.coords.iter().map(|c| c / n).collect()
    }
}

/// One monomial of a homogeneous form: exponent per variable and a
/// coefficient (exact view retained when the literal allowed it).
#[derive(Clone, Debug)]
struct DivisorTerm {
    exps: Vec<u32>,
    coeff: Complex64,
    exact: Option<GaussRat>,
}

/// An effective divisor on projective space cut out by a homogeneous
/// form Q, metricized by |Q(x)| / ||x||^q.
#[derive(Clone, Debug)]
pub struct MetricizedDivisor {
    terms: Vec<DivisorTerm>,
    degree: u32,
    nvars: usize,
    name: String,
}

impl MetricizedDivisor {
    fn build(terms: Vec<DivisorTerm>, degree: u32, name: Option<String>) -> Result<Self> {
        if degree == 0 {
            return Err(VdError::Invalid("divisor degree must be positive".into()));
        }
        let nvars = terms.first().map(|t| t.exps.len()).unwrap_or(0);
        if nvars < 2 {
            return Err(VdError::Invalid(
                "divisor form needs at least two variables".into(),
            ));
        }
        if terms.iter().all(|t| t.coeff.norm() == 0.0) {
            return Err(VdError::Invalid(
                "divisor form must not be identically zero".into(),
            ));
        }
        for t in &terms {
            if t.exps.len() != nvars {
                return Err(VdError::Invalid(
                    "all monomials must use the same variable count".into(),
                ));
            }
            let total: u32 = t.exps.iter().sum();
            if total != degree {
                return Err(VdError::Invalid(format!(
                    "monomial {:?} has degree {total}, form declares {degree}",
                    t.exps
                )));
            }
        }
        let name = name.unwrap_or_else(|| canonical_label(&terms, degree));
        Ok(MetricizedDivisor {
            terms,
            degree,
            nvars,
            name,
        })
    }

    /// Parse `q; (e0,e1,...)=coeff, ...`, e.g. `1; (0,1)=1` for the
    /// hyperplane x1 = 0 on the projective line.
    pub fn parse(s: &str) -> Result<Self> {
        let (deg_part, body) = s
            .split_once(';')
            .ok_or_else(|| VdError::Parse("divisor grammar is 'q; (exps)=coeff, ...'".into()))?;
        let degree: u32 = deg_part
            .trim()
            .parse()
            .map_err(|_| VdError::Parse(format!("bad divisor degree '{}'", deg_part.trim())))?;
        let mut terms = Vec::new();
        for raw in split_top_level(body) {
            let raw = raw.trim();
            if raw.is_empty() {
                continue;
            }
            let (tuple, coeff) = raw.split_once('=').ok_or_else(|| {
                VdError::Parse(format!("monomial '{raw}' is missing '=coefficient'"))
            })?;
            let tuple = tuple.trim();
            let inner = tuple
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| {
                    VdError::Parse(format!("exponents in '{raw}' must be parenthesized"))
                })?;
            let exps = inner
                .split(',')
                .map(|e| {
                    e.trim()
                        .parse::<u32>()
                        .map_err(|_| VdError::Parse(format!("bad exponent '{}'", e.trim())))
                })
                .collect::<Result<Vec<u32>>>()?;
            let (c, exact) = parse_complex_token(coeff)?;
            terms.push(DivisorTerm {
                exps,
                coeff: c,
                exact,
            });
        }
        if terms.is_empty() {
            return Err(VdError::Parse("divisor form has no monomials".into()));
        }
        MetricizedDivisor::build(terms, degree, None)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of homogeneous variables (ambient dimension + 1).
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Value of the defining form at homogeneous coordinates.
    pub fn eval_form(&self, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let mut m = t.coeff;
            for (xj, &e) in x.iter().zip(&t.exps) {
                for _ in 0..e {
                    m *= xj;
                }
            }
            acc += m;
        }
        acc
    }

    /// The univariate polynomial Q(F0(z), ..., Fn(z)). Exact when both
    /// the map components and the form coefficients carry exact views,
    /// so multiplicity structure downstream stays exact.
    pub fn compose(&self, f: &RationalMap) -> Result<Poly> {
        if f.components().len() != self.nvars {
            return Err(VdError::Invalid(format!(
                "divisor has {} variables but the map has {} components",
                self.nvars,
                f.components().len()
            )));
        }
        let mut acc = Poly::zero();
        for t in &self.terms {
            if t.coeff.norm() == 0.0 {
                continue;
            }
            let mut factor = match &t.exact {
                Some(g) => Poly::from_exact(ExactPoly::constant(g.clone())),
                None => Poly::new(vec![t.coeff]),
            };
            for (comp, &e) in f.components().iter().zip(&t.exps) {
                if e > 0 {
                    factor = factor.mul(&comp.pow(e));
                }
            }
            acc = acc.add(&factor);
        }
        Ok(acc)
    }

    /// Supremum of |Q| over the unit sphere, by deterministic
    /// quasi-random sampling plus coordinate-ascent polish. Slightly
    /// conservative (a lower estimate of the true supremum), adequate
    /// for order-one constants in margin reports.
    pub fn sup_abs_on_sphere(&self) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
        let dim = 2 * self.nvars;
        let eval_real = |v: &[f64]| -> f64 {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            let x: Vec<Complex64> = (0..self.nvars)
                .map(|j| Complex64::new(v[2 * j] / norm, v[2 * j + 1] / norm))
                .collect();
            self.eval_form(&x).norm()
        };

        let mut best = vec![0.0; dim];
        let mut best_val = f64::NEG_INFINITY;
        for _ in 0..10_000 {
            // Box-Muller pairs give a rotation-invariant direction.
            let v: Vec<f64> = (0..dim)
                .map(|_| {
                    let u1: f64 = rng.gen_range(1e-12..1.0);
                    let u2: f64 = rng.gen_range(0.0..1.0);
                    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
                })
                .collect();
            let val = eval_real(&v);
            if val > best_val {
                best_val = val;
                best = v;
            }
        }

        // Coordinate ascent with shrinking step until well below the
        // tolerance of downstream margin contracts.
        let mut step = 0.2;
        while step > 1e-9 {
            let mut improved = true;
            while improved {
                improved = false;
                for k in 0..dim {
                    for dir in [-1.0, 1.0] {
                        let mut cand = best.clone();
                        cand[k] += dir * step;
                        let val = eval_real(&cand);
                        if val > best_val {
                            best_val = val;
                            best = cand;
                            improved = true;
                        }
                    }
                }
            }
            step *= 0.5;
        }
        best_val
    }

    /// Lower bound for the Weil function of this metricized divisor:
    /// weil(D, x) >= -log sup_{||x||=1} |Q|, for every point x.
    pub fn weil_lower_bound(&self) -> f64 {
        -self.sup_abs_on_sphere().ln()
    }
}

fn canonical_label(terms: &[DivisorTerm], degree: u32) -> String {
    let body = terms
        .iter()
        .map(|t| {
            let exps = t
                .exps
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(",");
            format!("({exps})={}", crate::funcspace::format_complex(t.coeff))
        })
        .collect::<Vec<_>>()
        .join(", ");
    format!("{degree}; {body}")
}

/// Split on commas that are not inside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Weil proximity function of the metricized divisor at a point:
/// -log |Q(x)| + q log ||x||. Plus infinity (in-band) on the divisor.
pub fn weil(d: &MetricizedDivisor, x: &ProjPoint) -> f64 {
    let qv = d.eval_form(&x.normalized()).norm();
    if qv == 0.0 {
        f64::INFINITY
    } else {
        -qv.ln()
    }
}

/// Fubini-Study chordal distance in [0, 1]: the sine of the angle
/// between the lines spanned by x and y, computed through the wedge
/// norm ||x ^ y|| / (||x|| ||y||) so that coincident lines give exactly
/// zero and nearby lines suffer no cancellation.
pub fn chordal_distance(x: &ProjPoint, y: &ProjPoint) -> f64 {
    let xn = x.normalized();
    let yn = y.normalized();
    let mut wedge = 0.0;
    for i in 0..xn.len() {
        for j in i + 1..xn.len() {
            wedge += (xn[i] * yn[j] - xn[j] * yn[i]).norm_sqr();
        }
    }
    wedge.sqrt().min(1.0)
}

/// Area density at z of the pullback under f of the Fubini-Study
/// Kaehler form, normalized so the total mass over the plane equals
/// deg f: (||F||^2 ||F'||^2 - |<F',F>|^2) / (pi ||F||^4).
pub fn fs_pullback_density(f: &RationalMap, z: Complex64) -> Result<f64> {
    let (v, dv) = f.eval_with_derivative(z);
    let n2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    // Evaluation round-off scale at this radius: if the homogeneous
    // vector is below it, the point is numerically a base point.
    let floor = 1e-13
        * f.components()
            .iter()
            .map(|p| p.abs_eval(z.norm()))
            .sum::<f64>();
    if n2.sqrt() <= floor {
        return Err(VdError::IndeterminatePoint);
    }
    let dn2: f64 = dv.iter().map(|c| c.norm_sqr()).sum();
    let inner: Complex64 = dv.iter().zip(&v).map(|(a, b)| a * b.conj()).sum();
    let num = (n2 * dn2 - inner.norm_sqr()).max(0.0);
    Ok(num / (PI * n2 * n2))
}

/// log of the Euclidean norm of the homogeneous value F(z), computed
/// through the largest component so intermediate squares never overflow.
/// NaN when every component evaluates to exactly zero in floating point
/// (a numerical base point).
pub fn log_norm_components(f: &RationalMap, z: Complex64) -> f64 {
    let norms: Vec<f64> = f.components().iter().map(|p| p.eval(z).norm()).collect();
    let m = norms.iter().fold(0.0_f64, |a, &b| a.max(b));
    if !(m > 0.0) || !m.is_finite() {
        return f64::NAN;
    }
    let scaled: f64 = norms.iter().map(|n| (n / m) * (n / m)).sum();
    m.ln() + 0.5 * scaled.ln()
}

/// Green-weighted mass of the Fubini-Study pullback over the disc
/// |z| < r (unit curvature class). A rational map has no base points,
/// so log ||F|| is smooth on the whole disc and the weighted area
/// integral collapses, by the disc transport identity, to a single
/// boundary mean minus the origin value. One angular quadrature replaces
/// an area rule, and the trapezoid mean of the smooth periodic integrand
/// converges spectrally even when the curvature itself is sharply
/// concentrated inside the disc.
pub fn fs_green_mass(f: &RationalMap, r: f64, q: &QuadratureSpec) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(VdError::Invalid(
            "green mass requires a radius in (0, 1)".into(),
        ));
    }
    let at_origin = log_norm_components(f, Complex64::new(0.0, 0.0));
    if !at_origin.is_finite() {
        return Err(VdError::DegenerateInput(
            "homogeneous value at the origin is numerically zero".into(),
        ));
    }
    let mean = periodic_mean(
        &|theta| log_norm_components(f, Complex64::from_polar(r, theta)),
        q,
    )?;
    Ok(mean - at_origin)
}

/// Area density of the pullback curvature of the metricized divisor:
/// q times the Fubini-Study pullback density.
pub fn divisor_curvature_density(
    d: &MetricizedDivisor,
    f: &RationalMap,
    z: Complex64,
) -> Result<f64> {
    Ok(d.degree() as f64 * fs_pullback_density(f, z)?)
}

/// Mass of the Fubini-Study pullback inside the disc |z - center| < rho,
/// computed as the outward flux of the gradient of log ||F|| through the
/// boundary circle (Green's identity), a single angular quadrature:
///
///   (rho / 2 pi) * integral of Re[e^{i theta} <F'(w), F(w)>] / ||F(w)||^2.
pub fn fs_mass_in_disc(
    f: &RationalMap,
    center: Complex64,
    rho: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(VdError::Invalid("flux radius must be positive".into()));
    }
    let integrand = |theta: f64| -> f64 {
        let dir = Complex64::from_polar(1.0, theta);
        let w = center + rho * dir;
        let (v, dv) = f.eval_with_derivative(w);
        let n2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        let inner: Complex64 = dv.iter().zip(&v).map(|(a, b)| a * b.conj()).sum();
        (dir * inner).re / n2
    };
    Ok(rho * periodic_mean(&integrand, q)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::parse_map;
    use crate::greenjensen::gauss_legendre_01;
    use approx::assert_abs_diff_eq;

    fn pt(coords: &[(f64, f64)]) -> ProjPoint {
        ProjPoint::new(
            coords
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn weil_hand_values() {
        let hyper1 = MetricizedDivisor::parse("1; (0,1)=1").unwrap(); // x1
        assert!(weil(&hyper1, &pt(&[(1.0, 0.0), (0.0, 0.0)])).is_infinite());

        let hyper0 = MetricizedDivisor::parse("1; (1,0)=1").unwrap(); // x0
        let w = Complex64::new(0.7, -0.3);
        let expect = 0.5 * (1.0 + w.norm_sqr()).ln();
        assert_abs_diff_eq!(
            weil(&hyper0, &ProjPoint::from_affine(w)),
            expect,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            weil(&hyper0, &ProjPoint::from_affine(Complex64::new(0.0, 0.0))),
            0.0,
            epsilon = 1e-15
        );

        let prod = MetricizedDivisor::parse("2; (1,1)=1").unwrap(); // x0 x1
        assert_abs_diff_eq!(
            weil(&prod, &pt(&[(1.0, 0.0), (1.0, 0.0)])),
            2.0_f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn divisor_parse_and_validation() {
        let d = MetricizedDivisor::parse("2; (2,0)=1, (0,2)=1").unwrap();
        assert_eq!(d.degree(), 2);
        assert_eq!(d.nvars(), 2);
        // non-homogeneous term rejected
        assert!(MetricizedDivisor::parse("2; (1,0)=1").is_err());
        // inconsistent variable counts rejected
        assert!(MetricizedDivisor::parse("1; (0,1)=1, (0,0,1)=1").is_err());
        // empty / malformed
        assert!(MetricizedDivisor::parse("1;").is_err());
        assert!(MetricizedDivisor::parse("nonsense").is_err());
        assert!(MetricizedDivisor::parse("1; (0,1)").is_err());
        // canonical label round-trips through the parser
        let d2 = MetricizedDivisor::parse(d.name()).unwrap();
        assert_eq!(d2.degree(), d.degree());
    }

    #[test]
    fn chordal_examples() {
        let a = pt(&[(1.0, 0.0), (0.0, 0.0)]);
        let b = pt(&[(0.0, 0.0), (1.0, 0.0)]);
        let c = pt(&[(1.0, 0.0), (1.0, 0.0)]);
        assert_abs_diff_eq!(chordal_distance(&a, &a), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(chordal_distance(&a, &b), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            chordal_distance(&c, &a),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn scale_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = MetricizedDivisor::parse("2; (2,0)=1, (1,1)=1/2, (0,2)=-1").unwrap();
        for _ in 0..20 {
            let x = pt(&[
                (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ]);
            let y = pt(&[
                (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ]);
            let lambda = Complex64::new(rng.gen_range(0.1..2.0), rng.gen_range(-1.0..1.0));
            let xs = ProjPoint::new(x.coords().iter().map(|c| c * lambda).collect()).unwrap();
            assert_abs_diff_eq!(weil(&d, &x), weil(&d, &xs), epsilon = 1e-12);
            assert_abs_diff_eq!(
                chordal_distance(&x, &y),
                chordal_distance(&xs, &y),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn fs_density_basics() {
        let f = parse_map("1 | 0,1", false).unwrap(); // [1 : z]
        let d = fs_pullback_density(&f, Complex64::new(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(d, 1.0 / PI, epsilon = 1e-14);
    }

    #[test]
    fn fs_density_matches_finite_difference_laplacian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 100 {
            let deg = rng.gen_range(1..=4_usize);
            let c0: Vec<Complex64> = (0..=deg)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let c1: Vec<Complex64> = (0..=deg)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let Ok(f) = RationalMap::new(vec![Poly::new(c0), Poly::new(c1)]) else {
                continue;
            };
            let z = Complex64::new(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8));
            let Ok(dens) = fs_pullback_density(&f, z) else {
                continue;
            };
            let log_norm = |w: Complex64| -> f64 {
                f.eval_components(w)
                    .iter()
                    .map(|c| c.norm_sqr())
                    .sum::<f64>()
                    .sqrt()
                    .ln()
            };
            // Richardson-extrapolated five-point Laplacian over 2 pi
            let lap = |h: f64| -> f64 {
                (log_norm(z + Complex64::new(h, 0.0))
                    + log_norm(z - Complex64::new(h, 0.0))
                    + log_norm(z + Complex64::new(0.0, h))
                    + log_norm(z - Complex64::new(0.0, h))
                    - 4.0 * log_norm(z))
                    / (h * h)
            };
            let h = 1e-3;
            let fd = (4.0 * lap(h / 2.0) - lap(h)) / 3.0 / (2.0 * PI);
            assert!(
                (dens - fd).abs() <= 1e-6 * (1.0 + dens.abs()),
                "density {dens} vs finite difference {fd}"
            );
            done += 1;
        }
    }

    /// Direct two-dimensional polar quadrature of the density, used as
    /// an independent oracle for the flux-based mass.
    fn mass_by_area_quadrature(f: &RationalMap, radius: f64) -> f64 {
        let nr = 400;
        let nth = 512;
        let gl = gauss_legendre_01(nr);
        let mut acc = 0.0;
        for (x, w) in gl {
            let rho = radius * x;
            let mut ang = 0.0;
            for j in 0..nth {
                let theta = 2.0 * PI * j as f64 / nth as f64;
                ang += fs_pullback_density(f, Complex64::from_polar(rho, theta)).unwrap();
            }
            acc += w * rho * (ang / nth as f64) * radius;
        }
        2.0 * PI * acc
    }

    #[test]
    fn fs_mass_closed_forms() {
        let spec = QuadratureSpec::default();
        let origin = Complex64::new(0.0, 0.0);

        let f1 = parse_map("1 | 0,1", false).unwrap();
        let m = fs_mass_in_disc(&f1, origin, 10.0, &spec).unwrap();
        assert_abs_diff_eq!(m, 100.0 / 101.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m, mass_by_area_quadrature(&f1, 10.0), epsilon = 1e-6);

        let f3 = parse_map("1 | 0,0,0,1", false).unwrap();
        let m = fs_mass_in_disc(&f3, origin, 10.0, &spec).unwrap();
        let r2d = 10.0_f64.powi(6);
        assert_abs_diff_eq!(m, 3.0 * r2d / (1.0 + r2d), epsilon = 1e-9);

        // degree-2 curve in the projective plane: total mass tends to 2
        let veronese = parse_map("1 | 0,1 | 0,0,1", false).unwrap();
        let m = fs_mass_in_disc(&veronese, origin, 10.0, &spec).unwrap();
        assert!((m - 2.0).abs() < 0.02, "mass {m}");
        assert_abs_diff_eq!(m, mass_by_area_quadrature(&veronese, 10.0), epsilon = 1e-6);
        // degree-3 divisor scales the curvature mass by 3
        let d3 = MetricizedDivisor::parse("3; (3,0,0)=1").unwrap();
        let z = Complex64::new(0.3, 0.2);
        assert_abs_diff_eq!(
            divisor_curvature_density(&d3, &veronese, z).unwrap(),
            3.0 * fs_pullback_density(&veronese, z).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn sup_on_sphere_known_cases() {
        let hyper = MetricizedDivisor::parse("1; (1,0)=1").unwrap();
        assert_abs_diff_eq!(hyper.sup_abs_on_sphere(), 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(hyper.weil_lower_bound(), 0.0, epsilon = 1e-7);

        let prod = MetricizedDivisor::parse("2; (1,1)=1").unwrap();
        assert_abs_diff_eq!(prod.sup_abs_on_sphere(), 0.5, epsilon = 1e-7);

        let squares = MetricizedDivisor::parse("2; (2,0)=1, (0,2)=1").unwrap();
        assert_abs_diff_eq!(squares.sup_abs_on_sphere(), 1.0, epsilon = 1e-7);
    }

    #[test]
    fn weil_respects_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let d = MetricizedDivisor::parse("2; (2,0)=1, (1,1)=-1/2, (0,2)=1i").unwrap();
        let bound = d.weil_lower_bound();
        for _ in 0..200 {
            let x = pt(&[
                (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ]);
            assert!(weil(&d, &x) >= bound - 1e-9);
        }
    }

    #[test]
    fn compose_keeps_exactness() {
        let d = MetricizedDivisor::parse("2; (1,1)=1, (2,0)=-1/4").unwrap();
        let f = parse_map("1 | 0,0,1", false).unwrap(); // [1 : z^2]
        let p = d.compose(&f).unwrap(); // z^2 - 1/4
        assert!(p.exact().is_some());
        assert_eq!(p.degree(), Some(2));
        assert_abs_diff_eq!(p.coeffs()[0].re, -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(p.coeffs()[2].re, 1.0, epsilon = 1e-15);
        // wrong variable count is rejected
        let g = parse_map("1 | 0,1 | 0,0,1", false).unwrap();
        assert!(d.compose(&g).is_err());
    }
}
