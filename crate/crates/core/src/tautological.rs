//! Exact ramification identities for rational self-maps of the
//! projective line, Mason's abc theorem for polynomials, and the
//! log-metric tangent identity with its normalized-inequality trend
//! experiment.
//!
//! The Riemann-Hurwitz checkers run on exact Gaussian-rational
//! arithmetic whenever the inputs carry exact coefficient views, so
//! their verdicts are integer identities with zero slack. The analytic
//! identity checker reuses the calibrated Green machinery: the smooth
//! curvature of the log tangent metric integrates against the Green
//! kernel on one side, boundary means plus exact atom bookkeeping sit
//! on the other, and the truncation of boundary-preimage counts emerges
//! from the cancellation between preimage atoms and the ramification
//! atoms sitting at the same points.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, VdError};
use crate::funcspace::{
    format_complex, parse_complex_token, root_multiset, roots_in_disc, ExactPoly, GaussRat, Poly,
    RationalMap,
};
use crate::greenjensen::{periodic_mean, QuadratureSpec};
use crate::nevanlinna::{characteristic_geometric, counting_of_pullback};
use crate::projective::{chordal_distance, MetricizedDivisor, ProjPoint};
use crate::tol;

/// A point of the target projective line used as a boundary (puncture)
/// point, kept in the affine chart with an explicit point at infinity.
#[derive(Clone, Debug)]
pub enum BoundaryPoint {
    Finite {
        value: Complex64,
        exact: Option<GaussRat>,
    },
    Infinity,
}

impl BoundaryPoint {
    pub fn proj_point(&self) -> ProjPoint {
        match self {
            BoundaryPoint::Finite { value, .. } => ProjPoint::from_affine(*value),
            BoundaryPoint::Infinity => {
                ProjPoint::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap()
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            BoundaryPoint::Finite { value, .. } => format_complex(*value),
            BoundaryPoint::Infinity => "inf".to_string(),
        }
    }
}

/// A finite set of distinct punctures of the projective line, e.g.
/// {0, 1, inf}.
#[derive(Clone, Debug)]
pub struct BoundarySet {
    points: Vec<BoundaryPoint>,
}

impl BoundarySet {
    pub fn new(points: Vec<BoundaryPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(VdError::Invalid(
                "boundary set needs at least one point".into(),
            ));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let sep = chordal_distance(&points[i].proj_point(), &points[j].proj_point());
                if sep <= 1e-9 {
                    return Err(VdError::Invalid(format!(
                        "boundary points {} and {} coincide",
                        points[i].label(),
                        points[j].label()
                    )));
                }
            }
        }
        Ok(BoundarySet { points })
    }

    /// Parse a comma-separated point list; `inf` names the point at
    /// infinity. Example: `0,1,inf`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut points = Vec::new();
        for tok in s.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            if tok.eq_ignore_ascii_case("inf") {
                points.push(BoundaryPoint::Infinity);
            } else {
                let (value, exact) = parse_complex_token(tok)?;
                points.push(BoundaryPoint::Finite { value, exact });
            }
        }
        BoundarySet::new(points)
    }

    /// The classical puncture triple {0, 1, inf}.
    pub fn standard() -> Self {
        BoundarySet::parse("0,1,inf").unwrap()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[BoundaryPoint] {
        &self.points
    }

    pub fn label(&self) -> String {
        self.points
            .iter()
            .map(|p| p.label())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Largest Weil value of the set at x: -log of the chordal distance
    /// to the nearest boundary point.
    pub fn weil_distance(&self, x: &ProjPoint) -> f64 {
        self.points
            .iter()
            .map(|p| -chordal_distance(x, &p.proj_point()).ln())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pullback polynomials: for each boundary point a the polynomial
    /// whose zeros are the preimages of a (a*F0 - F1 for finite a, F0
    /// for infinity), exact whenever both inputs are.
    fn pullbacks(&self, f: &RationalMap) -> Result<Vec<Poly>> {
        ensure_self_map(f)?;
        let f0 = &f.components()[0];
        let f1 = &f.components()[1];
        let mut out = Vec::with_capacity(self.points.len());
        for p in &self.points {
            let a = match p {
                BoundaryPoint::Infinity => f0.clone(),
                BoundaryPoint::Finite { value, exact } => {
                    scale_poly(f0, *value, exact.as_ref()).sub(f1)
                }
            };
            out.push(a);
        }
        Ok(out)
    }
}

fn scale_poly(p: &Poly, c: Complex64, ce: Option<&GaussRat>) -> Poly {
    match (p.exact(), ce) {
        (Some(e), Some(g)) => Poly::from_exact(e.scale(g)),
        _ => p.scale_complex(c),
    }
}

fn ensure_self_map(f: &RationalMap) -> Result<()> {
    if f.components().len() != 2 {
        return Err(VdError::Invalid(
            "this operation needs a self-map of the projective line (two components)".into(),
        ));
    }
    Ok(())
}

/// The complete metric weight on the punctured line:
/// w(x) = (1+|x|^2)^{-1} * product over boundary points of the inverse
/// chordal distance. The log tangent norm of a map is |f'(z)| w(f(z)).
#[derive(Clone, Debug)]
pub struct LogMetric {
    boundary: BoundarySet,
}

impl LogMetric {
    pub fn new(boundary: BoundarySet) -> Self {
        LogMetric { boundary }
    }

    pub fn boundary(&self) -> &BoundarySet {
        &self.boundary
    }

    /// Weight at a finite affine point; +infinity on the boundary set.
    pub fn weight(&self, x: Complex64) -> f64 {
        let xp = ProjPoint::from_affine(x);
        let mut w = 1.0 / (1.0 + x.norm_sqr());
        for p in self.boundary.points() {
            w /= chordal_distance(&xp, &p.proj_point());
        }
        w
    }

    /// log of the tangent-vector norm ||f_* d/dz||(z) in the metric,
    /// computed chart-independently from homogeneous data:
    /// log|W| - 2 log||F|| - sum of log chordal distances to the
    /// boundary points, with W the Wronskian of the components.
    pub fn log_tangent_norm(&self, f: &RationalMap, z: Complex64) -> Result<f64> {
        ensure_self_map(f)?;
        let w = f.wronskian()?;
        Ok(log_tangent_norm_with(&w, f, &self.boundary, z))
    }
}

fn log_tangent_norm_with(
    wronskian: &Poly,
    f: &RationalMap,
    boundary: &BoundarySet,
    z: Complex64,
) -> f64 {
    let coords = f.eval_components(z);
    let norm2: f64 = coords.iter().map(|c| c.norm_sqr()).sum();
    let Ok(x) = ProjPoint::new(coords) else {
        return f64::NAN;
    };
    let mut phi = wronskian.eval(z).norm().ln() - norm2.ln();
    for p in boundary.points() {
        phi -= chordal_distance(&x, &p.proj_point()).ln();
    }
    phi
}

/// A ramification point location on the projective line.
#[derive(Clone, Debug, Serialize)]
pub struct RamEntry {
    /// Affine location, or "inf".
    pub location: String,
    /// Ramification order: local multiplicity minus one.
    pub ord: u32,
    /// Whether the map sends this point into the declared boundary set.
    pub maps_into_boundary: bool,
}

/// All ramification points of a self-map, with orders summing to the
/// total ramification degree.
#[derive(Clone, Debug, Serialize)]
pub struct RamificationRecord {
    pub entries: Vec<RamEntry>,
    pub total: u32,
    pub exact_mode: bool,
}

fn trimmed_coeffs(p: &Poly) -> Vec<Complex64> {
    if p.exact().is_some() {
        return p.coeffs().to_vec();
    }
    let scale = p.coeff_scale();
    let mut c = p.coeffs().to_vec();
    while c.len() > 1 && c.last().map(|v| v.norm() <= 1e-10 * scale) == Some(true) {
        c.pop();
    }
    c
}

fn ord_at_zero_of(coeffs: &[Complex64]) -> usize {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    coeffs
        .iter()
        .position(|c| c.norm() > 1e-10 * scale)
        .unwrap_or(coeffs.len())
}

/// Reverse the coefficients relative to total degree d: the chart swap
/// z -> 1/w applied to a component of a degree-d map.
fn reversed_component(p: &Poly, d: usize) -> Poly {
    if let Some(e) = p.exact() {
        return Poly::from_exact(e.reversed(d));
    }
    let mut c = p.coeffs().to_vec();
    c.resize(d + 1, Complex64::new(0.0, 0.0));
    c.reverse();
    Poly::new(c)
}

fn wronskian_of(g0: &Poly, g1: &Poly) -> Poly {
    g1.derivative().mul(g0).sub(&g1.mul(&g0.derivative()))
}

/// Ramification order of the map at infinity: the vanishing order at
/// w = 0 of the Wronskian in the swapped chart.
fn ram_order_at_infinity(f: &RationalMap) -> Result<u32> {
    let d = f.degree();
    let g0 = reversed_component(&f.components()[0], d);
    let g1 = reversed_component(&f.components()[1], d);
    let wg = wronskian_of(&g0, &g1);
    if wg.is_zero() {
        return Err(VdError::ConstantMap);
    }
    let ord = match wg.exact() {
        Some(e) => e.ord_at_zero().unwrap_or(0),
        None => ord_at_zero_of(wg.coeffs()),
    };
    Ok(ord as u32)
}

/// Image of the point at infinity in homogeneous coordinates: the
/// degree-d coefficient vector of the components.
fn image_of_infinity(f: &RationalMap) -> Vec<Complex64> {
    let d = f.degree();
    f.components()
        .iter()
        .map(|p| p.coeffs().get(d).copied().unwrap_or(Complex64::new(0.0, 0.0)))
        .collect()
}

fn infinity_maps_into(f: &RationalMap, boundary: &BoundarySet) -> bool {
    let lead = image_of_infinity(f);
    let Ok(x) = ProjPoint::new(lead) else {
        return false;
    };
    boundary
        .points()
        .iter()
        .any(|p| chordal_distance(&x, &p.proj_point()) <= 1e-9)
}

/// Ramification record over the whole projective line. When a boundary
/// set is supplied each entry is flagged by whether the map sends it
/// into the set; with exact inputs the flags come from exact gcd
/// factor splitting, never from thresholds.
pub fn ramification_record(
    f: &RationalMap,
    boundary: Option<&BoundarySet>,
) -> Result<RamificationRecord> {
    ensure_self_map(f)?;
    if f.is_constant() {
        return Err(VdError::ConstantMap);
    }
    let w = f.wronskian()?;
    if w.is_zero() {
        return Err(VdError::ConstantMap);
    }
    let pullbacks = match boundary {
        Some(b) => Some(b.pullbacks(f)?),
        None => None,
    };
    let exact_mode = w.exact().is_some()
        && pullbacks
            .as_ref()
            .map(|ps| ps.iter().all(|p| p.exact().is_some()))
            .unwrap_or(true);

    let mut entries = Vec::new();
    if exact_mode {
        let we = w.exact().unwrap();
        // product of the boundary pullbacks: its roots are exactly the
        // points mapping into the boundary set
        let product = pullbacks.as_ref().map(|ps| {
            let mut acc = ExactPoly::constant(GaussRat::one());
            for p in ps {
                acc = acc.mul(p.exact().unwrap());
            }
            acc
        });
        for (factor, mult) in we.squarefree_decomposition() {
            if factor.degree() == Some(0) {
                continue;
            }
            let (into, away) = match &product {
                Some(prod) => {
                    let g = ExactPoly::gcd(&factor, prod);
                    let (q, _) = factor.divrem(&g);
                    (g, q)
                }
                None => (ExactPoly::constant(GaussRat::one()), factor.clone()),
            };
            for part in [(into, true), (away, false)] {
                let (poly, flag) = part;
                if poly.degree().map_or(true, |d| d == 0) {
                    continue;
                }
                for root in crate::funcspace::root_multiset(&Poly::from_exact(poly.clone()))?
                    .entries()
                {
                    entries.push(RamEntry {
                        location: format_complex(root.0),
                        ord: mult,
                        maps_into_boundary: flag,
                    });
                }
            }
        }
    } else {
        let wt = Poly::new(trimmed_coeffs(&w));
        let preimage_locs: Vec<Complex64> = match &pullbacks {
            Some(ps) => {
                let mut locs = Vec::new();
                for p in ps {
                    let pt = Poly::new(trimmed_coeffs(p));
                    if pt.degree().map_or(false, |d| d >= 1) {
                        locs.extend(root_multiset(&pt)?.entries().iter().map(|e| e.0));
                    }
                }
                locs
            }
            None => Vec::new(),
        };
        for &(loc, ord) in root_multiset(&wt)?.entries() {
            let into = preimage_locs
                .iter()
                .any(|p| (p - loc).norm() <= 1e-6 * (1.0 + loc.norm()));
            entries.push(RamEntry {
                location: format_complex(loc),
                ord,
                maps_into_boundary: into,
            });
        }
    }

    let ord_inf = ram_order_at_infinity(f)?;
    if ord_inf > 0 {
        let into = boundary
            .map(|b| infinity_maps_into(f, b))
            .unwrap_or(false);
        entries.push(RamEntry {
            location: "inf".to_string(),
            ord: ord_inf,
            maps_into_boundary: into,
        });
    }
    let total = entries.iter().map(|e| e.ord).sum();
    Ok(RamificationRecord {
        entries,
        total,
        exact_mode,
    })
}

/// Verdict of the degree-ramification identity for a self-map of the
/// line: -2d = -2 - Ram, with Ram the total ramification degree over
/// the whole line including infinity.
#[derive(Clone, Debug, Serialize)]
pub struct RhVerdict {
    pub identity: &'static str,
    pub degree: usize,
    pub ram_total: u32,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
    pub exact_mode: bool,
    pub record: RamificationRecord,
}

pub fn rh_check(f: &RationalMap) -> Result<RhVerdict> {
    ensure_self_map(f)?;
    if f.is_constant() {
        return Err(VdError::ConstantMap);
    }
    let record = ramification_record(f, None)?;
    let d = f.degree() as i64;
    let lhs = -2 * d;
    let rhs = -2 - record.total as i64;
    Ok(RhVerdict {
        identity: "-2d = -2 - Ram",
        degree: f.degree(),
        ram_total: record.total,
        lhs,
        rhs,
        holds: lhs == rhs,
        exact_mode: record.exact_mode,
        record,
    })
}

/// Verdict of the punctured variant: d(|D| - 2) = -2 + n_red - Ram_away,
/// where n_red counts boundary preimages without multiplicity over the
/// whole line and Ram_away is the ramification at points not mapping
/// into the boundary set.
#[derive(Clone, Debug, Serialize)]
pub struct LogRhVerdict {
    pub identity: &'static str,
    pub degree: usize,
    pub boundary: String,
    pub n_reduced: u32,
    pub ram_away: u32,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
    pub exact_mode: bool,
}

pub fn log_rh_check(f: &RationalMap, boundary: &BoundarySet) -> Result<LogRhVerdict> {
    ensure_self_map(f)?;
    if f.is_constant() {
        return Err(VdError::ConstantMap);
    }
    let d = f.degree();
    let pullbacks = boundary.pullbacks(f)?;
    let exact_mode = pullbacks.iter().all(|p| p.exact().is_some())
        && f.wronskian()?.exact().is_some();

    let mut n_red: u32 = 0;
    for p in &pullbacks {
        if p.is_zero() {
            return Err(VdError::ConstantMap);
        }
        n_red += if exact_mode {
            p.exact().unwrap().radical_degree()? as u32
        } else {
            let pt = Poly::new(trimmed_coeffs(p));
            if pt.degree().map_or(true, |k| k == 0) {
                0
            } else {
                root_multiset(&pt)?.len() as u32
            }
        };
    }
    if infinity_maps_into(f, boundary) {
        n_red += 1;
    }

    let record = ramification_record(f, Some(boundary))?;
    let ram_away: u32 = record
        .entries
        .iter()
        .filter(|e| !e.maps_into_boundary)
        .map(|e| e.ord)
        .sum();

    let k = boundary.len() as i64;
    let lhs = d as i64 * (k - 2);
    let rhs = -2 + n_red as i64 - ram_away as i64;
    Ok(LogRhVerdict {
        identity: "d(|D|-2) = -2 + n_red - Ram_away",
        degree: d,
        boundary: boundary.label(),
        n_reduced: n_red,
        ram_away,
        lhs,
        rhs,
        holds: lhs == rhs,
        exact_mode,
    })
}

/// Verdict of the polynomial abc inequality: with a + b = c, a and b
/// coprime and not everything constant, the largest degree is at most
/// the number of distinct roots of a*b*c minus one. Exact arithmetic
/// only; `slack` is the gap in the inequality.
#[derive(Clone, Debug, Serialize)]
pub struct MasonVerdict {
    pub identity: &'static str,
    pub max_degree: usize,
    pub radical_degree: usize,
    pub slack: i64,
    pub holds: bool,
}

pub fn mason_check(a: &Poly, b: &Poly) -> Result<MasonVerdict> {
    let (Some(ae), Some(be)) = (a.exact(), b.exact()) else {
        return Err(VdError::ExactModeRequired);
    };
    if a.is_zero() || b.is_zero() {
        return Err(VdError::Invalid("summands must be nonzero".into()));
    }
    let ce = ae.add(be);
    if ce.is_zero() {
        return Err(VdError::Invalid("the sum a + b vanishes".into()));
    }
    let degs = [
        ae.degree().unwrap_or(0),
        be.degree().unwrap_or(0),
        ce.degree().unwrap_or(0),
    ];
    let max_degree = *degs.iter().max().unwrap();
    if max_degree == 0 {
        return Err(VdError::Invalid(
            "a, b, and a + b are all constant".into(),
        ));
    }
    let g = ExactPoly::gcd(ae, be);
    if g.degree().map_or(false, |d| d >= 1) {
        return Err(VdError::NotCoprime);
    }
    let product = ae.mul(be).mul(&ce);
    let radical_degree = product.radical_degree()?;
    let slack = radical_degree as i64 - 1 - max_degree as i64;
    Ok(MasonVerdict {
        identity: "max deg <= rad_deg - 1",
        max_degree,
        radical_degree,
        slack,
        holds: slack >= 0,
    })
}

/// An atom (point mass) entry in the identity report.
#[derive(Clone, Debug, Serialize)]
pub struct AtomRecord {
    pub re: f64,
    pub im: f64,
    pub ord: u32,
    pub maps_into_boundary: bool,
}

/// Two-sided report of the log-metric tangent identity at radius r.
///
/// lhs: Green-weighted integral of the smooth curvature density of the
/// log-canonical metric pulled back by the map, which is (|D| - 2)
/// times the Fubini-Study characteristic.
/// rhs: boundary mean of the log tangent norm, minus its value at the
/// origin, plus the truncated counting of boundary preimages, minus the
/// Green-weighted ramification at points staying off the boundary set.
#[derive(Clone, Debug, Serialize)]
pub struct TautIdentityReport {
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub boundary_term: f64,
    pub origin_term: f64,
    pub truncated_counting: f64,
    pub ram_away_sum: f64,
    pub ram_atoms: Vec<AtomRecord>,
    pub preimage_atoms: Vec<AtomRecord>,
    pub convention: &'static str,
}

/// Green-weighted Fubini-Study mass of the disc of radius r (unit
/// curvature class): the building block of the smooth lhs above.
/// Delegates to the boundary transport of log ||F||.
pub(crate) fn fs_nabla(f: &RationalMap, r: f64, q: &QuadratureSpec) -> Result<f64> {
    crate::projective::fs_green_mass(f, r, q)
}

fn is_zero_at_origin(p: &Poly) -> bool {
    match p.exact() {
        Some(e) => e.ord_at_zero().map_or(true, |k| k >= 1),
        None => p.coeffs().first().map(|c| c.norm() == 0.0).unwrap_or(true),
    }
}

pub fn taut_identity_check(
    f: &RationalMap,
    boundary: &BoundarySet,
    r: f64,
    q: &QuadratureSpec,
) -> Result<TautIdentityReport> {
    ensure_self_map(f)?;
    if f.is_constant() {
        return Err(VdError::ConstantMap);
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(VdError::Invalid("radius must lie in (0, 1)".into()));
    }
    let w = f.wronskian()?;
    if w.is_zero() {
        return Err(VdError::ConstantMap);
    }
    if is_zero_at_origin(&w) {
        return Err(VdError::RamifiedAtOrigin);
    }
    let pullbacks = boundary.pullbacks(f)?;
    for p in &pullbacks {
        if p.is_zero() || is_zero_at_origin(p) {
            return Err(VdError::OriginOnBoundarySet);
        }
    }

    // preimage atoms of each boundary point inside the disc, with the
    // truncated counting shared with the growth module
    let mut truncated_counting = 0.0;
    let mut preimage_atoms = Vec::new();
    let mut preimage_locs = Vec::new();
    for p in &pullbacks {
        truncated_counting += counting_of_pullback(p, r, true)?;
        if p.degree().map_or(true, |d| d == 0) {
            continue;
        }
        for &(loc, ord) in roots_in_disc(p, r)?.entries() {
            preimage_locs.push(loc);
            preimage_atoms.push(AtomRecord {
                re: loc.re,
                im: loc.im,
                ord,
                maps_into_boundary: true,
            });
        }
    }

    // ramification atoms inside the disc, split by whether the image
    // lands on the boundary set (those cancel into the truncation)
    let mut ram_away_sum = 0.0;
    let mut ram_atoms = Vec::new();
    if w.degree().map_or(false, |d| d >= 1) {
        for &(loc, ord) in roots_in_disc(&w, r)?.entries() {
            let into = preimage_locs
                .iter()
                .any(|p| (p - loc).norm() <= 1e-6 * (1.0 + loc.norm()));
            if !into {
                ram_away_sum += ord as f64 * (r / loc.norm()).ln();
            }
            ram_atoms.push(AtomRecord {
                re: loc.re,
                im: loc.im,
                ord,
                maps_into_boundary: into,
            });
        }
    }

    let k = boundary.len();
    let lhs = (k as f64 - 2.0) * fs_nabla(f, r, q)?;

    let phi = |z: Complex64| log_tangent_norm_with(&w, f, boundary, z);
    let boundary_term = periodic_mean(&|theta| phi(Complex64::from_polar(r, theta)), q)?;
    let origin_term = phi(Complex64::new(0.0, 0.0));
    if !origin_term.is_finite() {
        return Err(VdError::RamifiedAtOrigin);
    }

    let rhs = boundary_term - origin_term + truncated_counting - ram_away_sum;
    Ok(TautIdentityReport {
        r,
        lhs,
        rhs,
        residual: lhs - rhs,
        boundary_term,
        origin_term,
        truncated_counting,
        ram_away_sum,
        ram_atoms,
        preimage_atoms,
        convention: tol::CONVENTION,
    })
}

/// One radius row of the normalized-inequality trend: the normalized
/// smooth log-curvature pairing for every map in the sequence, the
/// largest tail value, and whether the tail exceeds the tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct TautTrendRow {
    pub r: f64,
    pub normalized: Vec<f64>,
    pub tail_max: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TautTrendReport {
    pub boundary: String,
    pub tail_start: usize,
    pub rows: Vec<TautTrendRow>,
    pub convention: &'static str,
}

/// Trend experiment for the normalized inequality: for each map f_n and
/// radius r, the smooth log-curvature mass (|D| - 2) T_fs(r) divided by
/// the characteristic against a fixed hyperplane class. Radii whose
/// tail values exceed +tol get flagged.
///
/// Preconditions: every f_n(0) within Weil distance 10 of the boundary
/// complement (not essentially on the set), degrees growing, and the
/// normalizers diverging along the sequence.
pub fn taut_inequality_experiment(
    seq: &[RationalMap],
    boundary: &BoundarySet,
    r_grid: &[f64],
    q: &QuadratureSpec,
) -> Result<TautTrendReport> {
    if seq.is_empty() || r_grid.is_empty() {
        return Err(VdError::InsufficientSamples {
            need: 1,
            got: 0,
        });
    }
    for f in seq {
        ensure_self_map(f)?;
    }
    if seq.iter().all(|f| f.is_constant()) {
        return Err(VdError::NormalizerNotDiverging);
    }
    let d_first = seq.first().unwrap().degree();
    let d_last = seq.last().unwrap().degree();
    if d_last <= d_first && seq.len() > 1 {
        return Err(VdError::DegreesNotGrowing);
    }
    const BASE_POINT_BOUND: f64 = 10.0;
    for f in seq {
        let x = ProjPoint::new(f.eval_components(Complex64::new(0.0, 0.0)))
            .map_err(|_| VdError::BasePointOnDivisor {
                bound: BASE_POINT_BOUND,
            })?;
        if boundary.weil_distance(&x) > BASE_POINT_BOUND {
            return Err(VdError::BasePointOnDivisor {
                bound: BASE_POINT_BOUND,
            });
        }
    }

    let ample = MetricizedDivisor::parse("1; (1,0)=1").unwrap();
    let k = boundary.len() as f64;
    let tail_start = seq.len() / 2;
    let mut rows = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let mut normalized = Vec::with_capacity(seq.len());
        for f in seq {
            let normalizer = characteristic_geometric(f, &ample, r, q)?;
            if normalizer <= q.tol {
                return Err(VdError::DegenerateNormalizer { value: normalizer });
            }
            let lhs = (k - 2.0) * fs_nabla(f, r, q)?;
            normalized.push(lhs / normalizer);
        }
        // divergence of the normalizers along the sequence, checked on
        // the characteristic of the last versus the first map
        let t_first = characteristic_geometric(&seq[0], &ample, r, q)?;
        let t_last = characteristic_geometric(seq.last().unwrap(), &ample, r, q)?;
        if !(t_last >= 2.0 * t_first && t_last > 10.0 * q.tol) {
            return Err(VdError::NormalizerNotDiverging);
        }
        let tail_max = normalized[tail_start..]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        rows.push(TautTrendRow {
            r,
            normalized,
            tail_max,
            flagged: tail_max > q.tol,
        });
    }
    Ok(TautTrendReport {
        boundary: boundary.label(),
        tail_start,
        rows,
        convention: tol::CONVENTION,
    })
}
