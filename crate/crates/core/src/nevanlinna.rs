//! Growth bookkeeping for a rational map against a metricized divisor:
//! the proximity (boundary) term, the counting (zero) term, the
//! geometric characteristic (Green-weighted curvature mass), and the
//! identity tying them together,
//!
//!   T_geom(r) = proximity + counting + log of the divisor metric at
//!   the image of the origin,
//!
//! whose numerical residual every report row carries. The arithmetic
//! side (1-D quadrature plus exact roots) is the more accurate of the
//! two and is the reference value when they disagree.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, VdError};
use crate::funcspace::{all_roots, boundary_band, roots_in_disc, Poly, RationalMap};
use crate::greenjensen::{periodic_mean, QuadratureSpec};
use crate::projective::{fs_mass_in_disc, weil, MetricizedDivisor, ProjPoint};
use crate::tol;

/// One radius row of the growth report. Column order is contractual:
/// r, T_geom, T_arith, m, N, const, residual.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CharacteristicRow {
    pub r: f64,
    #[serde(rename = "T_geom")]
    pub t_geom: f64,
    #[serde(rename = "T_arith")]
    pub t_arith: f64,
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "const")]
    pub const_term: f64,
    pub residual: f64,
}

/// Multi-radius growth report for one (map, divisor) pair.
#[derive(Clone, Debug, Serialize)]
pub struct CharacteristicReport {
    pub f_label: String,
    pub d_label: String,
    pub convention: &'static str,
    pub rows: Vec<CharacteristicRow>,
}

impl CharacteristicReport {
    pub fn new(f_label: String, d_label: String, rows: Vec<CharacteristicRow>) -> Self {
        CharacteristicReport {
            f_label,
            d_label,
            convention: tol::CONVENTION,
            rows,
        }
    }

    /// Enforce the row invariants: every residual within `tol`
    /// (relative, floor 1), counting term nonnegative and nondecreasing
    /// in r, proximity finite.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let mut prev_n = 0.0_f64;
        for row in &self.rows {
            if !row.m.is_finite() {
                return Err(VdError::Invalid(format!(
                    "proximity term is not finite at r = {}",
                    row.r
                )));
            }
            if row.residual.abs() > tol * (1.0 + row.t_geom.abs()) {
                return Err(VdError::Invalid(format!(
                    "residual {:.3e} exceeds tolerance at r = {}",
                    row.residual, row.r
                )));
            }
            if row.n < -1e-12 || row.n + 1e-12 < prev_n {
                return Err(VdError::Invalid(format!(
                    "counting term must be nonnegative and nondecreasing; got {} after {} at r = {}",
                    row.n, prev_n, row.r
                )));
            }
            prev_n = prev_n.max(row.n);
        }
        Ok(())
    }

    /// CSV with the contractual column order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,T_geom,T_arith,m,N,const,residual\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
                row.r, row.t_geom, row.t_arith, row.m, row.n, row.const_term, row.residual
            ));
        }
        out
    }
}

/// Default radius grid: 16 geometrically spaced radii in [0.1, 0.95].
pub fn default_r_grid() -> Vec<f64> {
    let lo: f64 = 0.1;
    let hi: f64 = 0.95;
    (0..16)
        .map(|k| lo * (hi / lo).powf(k as f64 / 15.0))
        .collect()
}

/// The pullback of the divisor's defining form under the map, with a
/// guard against the map landing entirely inside the divisor.
fn divisor_pullback(f: &RationalMap, d: &MetricizedDivisor) -> Result<Poly> {
    let p = d.compose(f)?;
    if p.is_zero() {
        return Err(VdError::Invalid(
            "the image of the map lies inside the divisor".into(),
        ));
    }
    Ok(p)
}

/// Error out if the pullback polynomial has a zero within the
/// root-exclusion band of the circle |z| = r.
fn ensure_boundary_clear(p: &Poly, r: f64) -> Result<()> {
    if p.degree() == Some(0) {
        return Ok(());
    }
    let band = boundary_band(r);
    for root in all_roots(p.coeffs())? {
        if (root.norm() - r).abs() <= band {
            return Err(VdError::BoundaryHitsDivisor { r });
        }
    }
    Ok(())
}

/// Value of -log of the divisor metric at the image of z; +infinity on
/// the divisor itself.
fn weil_at(f: &RationalMap, d: &MetricizedDivisor, z: Complex64) -> f64 {
    match ProjPoint::new(f.eval_components(z)) {
        Ok(x) => weil(d, &x),
        Err(_) => f64::NAN,
    }
}

/// Proximity term: mean over the circle |z| = r of the Weil function of
/// the divisor at the image point.
pub fn proximity(
    f: &RationalMap,
    d: &MetricizedDivisor,
    r: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(VdError::Invalid("radius must be positive".into()));
    }
    let p = divisor_pullback(f, d)?;
    ensure_boundary_clear(&p, r)?;
    periodic_mean(&|theta| weil_at(f, d, Complex64::from_polar(r, theta)), q)
}

/// Counting term: sum over zeros z0 of the divisor pullback with
/// 0 < |z0| < r of ord * log(r/|z0|); the truncated variant caps each
/// multiplicity at one.
pub fn counting(f: &RationalMap, d: &MetricizedDivisor, r: f64, truncated: bool) -> Result<f64> {
    let p = divisor_pullback(f, d)?;
    if origin_on_pullback(&p) {
        return Err(VdError::OriginOnDivisor);
    }
    counting_of_pullback(&p, r, truncated)
}

/// Counting term computed from an already-composed pullback polynomial.
pub(crate) fn counting_of_pullback(p: &Poly, r: f64, truncated: bool) -> Result<f64> {
    if p.degree() == Some(0) {
        return Ok(0.0);
    }
    let roots = roots_in_disc(p, r)?;
    let mut acc = 0.0;
    for &(loc, mult) in roots.entries() {
        let dist = loc.norm();
        if dist == 0.0 {
            return Err(VdError::OriginOnDivisor);
        }
        let weight = if truncated { 1.0 } else { mult as f64 };
        acc += weight * (r / dist).ln();
    }
    Ok(acc)
}

fn origin_on_pullback(p: &Poly) -> bool {
    match p.exact() {
        Some(e) => e.ord_at_zero().map_or(true, |k| k >= 1),
        None => p.coeffs().first().map(|c| c.norm() == 0.0).unwrap_or(true),
    }
}

/// Geometric characteristic: Green-weighted mass, over the disc of
/// radius r, of the pullback curvature density of the metricized
/// divisor (divisor degree times the Fubini-Study pullback density).
/// Evaluated through the boundary transport of log ||F||, which equals
/// the weighted area integral because the map has no base points.
pub fn characteristic_geometric(
    f: &RationalMap,
    d: &MetricizedDivisor,
    r: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    Ok(d.degree() as f64 * crate::projective::fs_green_mass(f, r, q)?)
}

/// One report row at radius r: geometric characteristic, the three
/// arithmetic pieces (proximity m, counting N, origin constant), their
/// sum T_arith, and the residual T_geom - T_arith.
pub fn fmt_check(
    f: &RationalMap,
    d: &MetricizedDivisor,
    r: f64,
    q: &QuadratureSpec,
) -> Result<CharacteristicRow> {
    let p = divisor_pullback(f, d)?;
    if origin_on_pullback(&p) {
        return Err(VdError::OriginOnDivisor);
    }
    let const_term = -weil_at(f, d, Complex64::new(0.0, 0.0));
    if !const_term.is_finite() {
        return Err(VdError::OriginOnDivisor);
    }
    ensure_boundary_clear(&p, r)?;
    let m = periodic_mean(&|theta| weil_at(f, d, Complex64::from_polar(r, theta)), q)?;
    let n = counting_of_pullback(&p, r, false)?;
    let t_arith = m + n + const_term;
    let t_geom = characteristic_geometric(f, d, r, q)?;
    Ok(CharacteristicRow {
        r,
        t_geom,
        t_arith,
        m,
        n,
        const_term,
        residual: t_geom - t_arith,
    })
}

/// Full multi-radius report for one (map, divisor) pair.
pub fn characteristic_report(
    f: &RationalMap,
    d: &MetricizedDivisor,
    radii: &[f64],
    q: &QuadratureSpec,
) -> Result<CharacteristicReport> {
    let rows = radii
        .iter()
        .map(|&r| fmt_check(f, d, r, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacteristicReport::new(
        f.to_spec_string(),
        d.name().to_string(),
        rows,
    ))
}

/// Margin of the growth lower bound
///
///   T_geom(r) >= log of the divisor metric at f(0) + c_D,
///
/// where c_D = -log sup of the defining form on the unit sphere is the
/// universal lower bound for the Weil function of the divisor. Returns
/// T_geom - const - c_D, which is nonnegative up to quadrature error.
pub fn positivity_margin(
    f: &RationalMap,
    d: &MetricizedDivisor,
    r: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    let p = divisor_pullback(f, d)?;
    if origin_on_pullback(&p) {
        return Err(VdError::OriginOnDivisor);
    }
    let const_term = -weil_at(f, d, Complex64::new(0.0, 0.0));
    if !const_term.is_finite() {
        return Err(VdError::OriginOnDivisor);
    }
    let t_geom = characteristic_geometric(f, d, r, q)?;
    Ok(t_geom - const_term - d.weil_lower_bound())
}

/// One row of the plain-area comparison table: the un-weighted
/// curvature mass of the disc of radius r next to the arithmetic side
/// of the growth identity. The difference has no sign or smallness
/// contract; the table only illustrates that the Green weighting in the
/// characteristic, not the raw area, is what the identity balances.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AreaComparisonRow {
    pub r: f64,
    pub area_mass: f64,
    pub arith_side: f64,
    pub difference: f64,
}

/// Non-assertive comparison of the plain area function (curvature mass
/// of the sub-disc) with the arithmetic side m + N + const at each
/// radius.
pub fn area_comparison(
    f: &RationalMap,
    d: &MetricizedDivisor,
    radii: &[f64],
    q: &QuadratureSpec,
) -> Result<Vec<AreaComparisonRow>> {
    let origin = Complex64::new(0.0, 0.0);
    radii
        .iter()
        .map(|&r| {
            let row = fmt_check(f, d, r, q)?;
            let area = d.degree() as f64 * fs_mass_in_disc(f, origin, r, q)?;
            Ok(AreaComparisonRow {
                r,
                area_mass: area,
                arith_side: row.t_arith,
                difference: area - row.t_arith,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::parse_map;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn hyperplane0() -> MetricizedDivisor {
        MetricizedDivisor::parse("1; (1,0)=1").unwrap()
    }

    fn hyperplane1() -> MetricizedDivisor {
        MetricizedDivisor::parse("1; (0,1)=1").unwrap()
    }

    #[test]
    fn proximity_closed_forms() {
        let d0 = hyperplane0();
        // [1 : z^2] against the first-coordinate hyperplane
        let f = parse_map("1 | 0,0,1", false).unwrap();
        let m = proximity(&f, &d0, 0.5, &spec()).unwrap();
        assert_abs_diff_eq!(m, 0.5 * (1.0 + 0.5_f64.powi(4)).ln(), epsilon = 1e-9);
        let f3 = parse_map("1 | 0,0,0,1", false).unwrap();
        let m = proximity(&f3, &d0, 0.9, &spec()).unwrap();
        assert_abs_diff_eq!(m, 0.5 * (1.0 + 0.9_f64.powi(6)).ln(), epsilon = 1e-9);

        // constant map: value independent of the radius
        let c = parse_map("1 | 0.7+0.2i", false).unwrap();
        let w = 0.5 * (1.0 + Complex64::new(0.7, 0.2).norm_sqr()).ln();
        for r in [0.3, 0.8] {
            assert_abs_diff_eq!(proximity(&c, &d0, r, &spec()).unwrap(), w, epsilon = 1e-12);
        }

        // [1 : z] against the second-coordinate hyperplane: the mean of
        // -log|z| on |z| = 0.5 contributes log 2
        let f1 = parse_map("1 | 0,1", false).unwrap();
        let m = proximity(&f1, &hyperplane1(), 0.5, &spec()).unwrap();
        assert_abs_diff_eq!(m, 2.0_f64.ln() + 0.5 * 1.25_f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn proximity_boundary_guard() {
        let f = parse_map("1 | -1/2,1", false).unwrap(); // [1 : z - 1/2]
        let err = proximity(&f, &hyperplane1(), 0.5, &spec()).unwrap_err();
        assert!(matches!(err, VdError::BoundaryHitsDivisor { .. }), "{err}");
    }

    #[test]
    fn counting_examples() {
        let d1 = hyperplane1();
        let f = parse_map("1 | -1/25,0,1", false).unwrap(); // zeros at +-0.2
        let full = counting(&f, &d1, 0.5, false).unwrap();
        assert_abs_diff_eq!(full, 2.0 * 2.5_f64.ln(), epsilon = 1e-10);
        let trunc = counting(&f, &d1, 0.5, true).unwrap();
        assert_abs_diff_eq!(trunc, full, epsilon = 1e-12);

        // triple zero at 0.2
        let f = parse_map("1 | -1/125,3/25,-3/5,1", false).unwrap();
        assert_abs_diff_eq!(
            counting(&f, &d1, 0.4, false).unwrap(),
            3.0 * 2.0_f64.ln(),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            counting(&f, &d1, 0.4, true).unwrap(),
            2.0_f64.ln(),
            epsilon = 1e-10
        );

        // map avoiding the divisor entirely
        let f = parse_map("1 | 0,1", false).unwrap();
        assert_eq!(counting(&f, &hyperplane0(), 0.5, false).unwrap(), 0.0);

        // guards
        let err = counting(&f, &d1, 0.5, false).unwrap_err();
        assert!(matches!(err, VdError::OriginOnDivisor), "{err}");
        let f = parse_map("1 | -1/2,1", false).unwrap();
        let err = counting(&f, &d1, 0.5, false).unwrap_err();
        assert!(matches!(err, VdError::RootOnBoundary { .. }), "{err}");
    }

    #[test]
    fn characteristic_closed_forms() {
        let d0 = hyperplane0();
        let f2 = parse_map("1 | 0,0,1", false).unwrap();
        let t = characteristic_geometric(&f2, &d0, 0.9, &spec()).unwrap();
        assert_abs_diff_eq!(t, 0.5 * (1.0 + 0.9_f64.powi(4)).ln(), epsilon = 1e-7);

        let c = parse_map("1 | 2-1i", false).unwrap();
        assert_abs_diff_eq!(
            characteristic_geometric(&c, &d0, 0.7, &spec()).unwrap(),
            0.0,
            epsilon = 1e-14
        );

        // plane curve [1 : z : z^2]: geometric side equals the
        // arithmetic side of the identity
        let v = parse_map("1 | 0,1 | 0,0,1", false).unwrap();
        let d = MetricizedDivisor::parse("1; (1,0,0)=1").unwrap();
        let row = fmt_check(&v, &d, 0.5, &spec()).unwrap();
        assert!(
            row.residual.abs() <= 1e-6 * (1.0 + row.t_geom.abs()),
            "residual {}",
            row.residual
        );
    }

    #[test]
    fn fmt_identity_rows() {
        // closed form on both sides
        let f3 = parse_map("1 | 0,0,0,1", false).unwrap();
        let row = fmt_check(&f3, &hyperplane0(), 0.9, &spec()).unwrap();
        assert!(row.residual.abs() <= 1e-6, "residual {}", row.residual);
        assert_abs_diff_eq!(
            row.t_geom,
            0.5 * (1.0 + 0.9_f64.powi(6)).ln(),
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(row.n, 0.0, epsilon = 1e-12);

        // zeros at +-0.2 showing up in the counting term
        let f = parse_map("1 | -1/25,0,1", false).unwrap();
        let row = fmt_check(&f, &hyperplane1(), 0.5, &spec()).unwrap();
        assert!(row.residual.abs() <= 1e-6, "residual {}", row.residual);
        assert_abs_diff_eq!(row.n, 2.0 * 2.5_f64.ln(), epsilon = 1e-10);

        // constant map: T = 0 and m cancels the constant exactly
        let c = parse_map("1 | 0.3+0.4i", false).unwrap();
        let row = fmt_check(&c, &hyperplane0(), 0.6, &spec()).unwrap();
        assert_eq!(row.t_geom, 0.0);
        assert_eq!(row.residual, 0.0);
        assert_abs_diff_eq!(row.m, -row.const_term, epsilon = 1e-15);
    }

    #[test]
    fn fmt_guards() {
        let f = parse_map("1 | 0,1", false).unwrap();
        let err = fmt_check(&f, &hyperplane1(), 0.5, &spec()).unwrap_err();
        assert!(matches!(err, VdError::OriginOnDivisor), "{err}");
        let f = parse_map("1 | -1/2,1", false).unwrap();
        let err = fmt_check(&f, &hyperplane1(), 0.5, &spec()).unwrap_err();
        assert!(matches!(err, VdError::BoundaryHitsDivisor { .. }), "{err}");
    }

    #[test]
    fn report_serialization_and_validation() {
        let f = parse_map("1 | -1/25,0,1", false).unwrap();
        let radii = [0.3, 0.5, 0.7];
        let report = characteristic_report(&f, &hyperplane1(), &radii, &spec()).unwrap();
        report.validate(1e-6).unwrap();
        let csv = report.to_csv();
        assert!(csv.starts_with("r,T_geom,T_arith,m,N,const,residual\n"));
        assert_eq!(csv.lines().count(), 1 + radii.len());
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["convention"], tol::CONVENTION);
        let row0 = &json["rows"][0];
        for key in ["r", "T_geom", "T_arith", "m", "N", "const", "residual"] {
            assert!(row0.get(key).is_some(), "missing column {key}");
        }
        // counting and characteristic grow with the radius
        let ns: Vec<f64> = report.rows.iter().map(|row| row.n).collect();
        let ts: Vec<f64> = report.rows.iter().map(|row| row.t_geom).collect();
        assert!(ns.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(ts.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    }

    #[test]
    fn truncated_counting_below_full() {
        let f = parse_map("1 | -1/125,3/25,-3/5,1", false).unwrap();
        for r in [0.3, 0.4, 0.6] {
            let full = counting(&f, &hyperplane1(), r, false).unwrap();
            let trunc = counting(&f, &hyperplane1(), r, true).unwrap();
            assert!(trunc <= full + 1e-12);
        }
    }

    #[test]
    fn default_grid_shape() {
        let grid = default_r_grid();
        assert_eq!(grid.len(), 16);
        assert_abs_diff_eq!(grid[0], 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(grid[15], 0.95, epsilon = 1e-12);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
        // geometric spacing: constant ratio
        let q0 = grid[1] / grid[0];
        assert!(grid.windows(2).all(|w| (w[1] / w[0] - q0).abs() < 1e-12));
    }

    #[test]
    fn positivity_margins() {
        let d0 = hyperplane0();
        for d in 1..=3_usize {
            let mut coeffs = vec!["0".to_string(); d + 1];
            coeffs[d] = "1".to_string();
            let f = parse_map(&format!("1 | {}", coeffs.join(",")), false).unwrap();
            let margin = positivity_margin(&f, &d0, 0.8, &spec()).unwrap();
            assert!(margin >= -1e-7, "margin {margin} at degree {d}");
        }
        // constant map: margin is the Weil value minus its lower bound
        let c = parse_map("1 | 5", false).unwrap();
        let margin = positivity_margin(&c, &d0, 0.5, &spec()).unwrap();
        assert!(margin >= -1e-9, "margin {margin}");
    }

    #[test]
    fn positivity_margin_random_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let divisors = [
            "1; (1,0)=1",
            "1; (1,0)=1, (0,1)=1",
            "2; (2,0)=1, (0,2)=1",
            "2; (1,1)=1, (2,0)=1/2",
        ];
        let mut done = 0;
        while done < 20 {
            let deg = rng.gen_range(1..=4_usize);
            let comp = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
                (0..=deg)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            };
            let c0 = comp(&mut rng);
            let c1 = comp(&mut rng);
            let Ok(f) = RationalMap::new(vec![Poly::new(c0), Poly::new(c1)]) else {
                continue;
            };
            let d = MetricizedDivisor::parse(divisors[done % divisors.len()]).unwrap();
            match positivity_margin(&f, &d, 0.8, &spec()) {
                Ok(margin) => {
                    assert!(margin >= -1e-6, "margin {margin}");
                    done += 1;
                }
                // rejection: f(0) on the divisor for this draw
                Err(VdError::OriginOnDivisor) => continue,
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn area_table_is_not_the_identity() {
        let f = parse_map("1 | 0,0,1", false).unwrap();
        let rows = area_comparison(&f, &hyperplane0(), &[0.3, 0.6, 0.9], &spec()).unwrap();
        assert_eq!(rows.len(), 3);
        for row in &rows {
            assert!(row.area_mass.is_finite() && row.arith_side.is_finite());
        }
        // the raw area mass genuinely differs from the arithmetic side
        assert!(rows.iter().any(|row| row.difference.abs() > 1e-3));
    }
}
