//! Polynomial root extraction with multiplicity clustering and an
//! independent winding-number cross-check.
//!
//! Exact inputs take the exact path: a squarefree decomposition splits
//! the polynomial into coprime squarefree factors with known
//! multiplicities, and only simple (well-conditioned) roots are ever
//! extracted numerically, via companion-matrix eigenvalues with Newton
//! polish. Float-only inputs take the heuristic path: eigenvalues of the
//! companion matrix (with a deterministic Taylor-shift retry when the
//! eigensolver declines to converge) are grouped by a multiplicity scan
//! whose candidate clusters must pass a Taylor-coefficient dominance
//! test - a Rouche-style certificate that a disc around the centroid
//! contains exactly that many roots and the local profile matches a
//! single multiple root. Either way the in-disc total is verified
//! against the boundary winding number before a multiset is returned.

use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;

use crate::error::{Result, VdError};
use crate::tol;

use super::{ExactPoly, Poly, RootMultiset};

/// Relative half-width of the annulus around |z| = r treated as "on the
/// boundary" when partitioning roots (scaled by r).
pub(crate) fn boundary_band(r: f64) -> f64 {
    tol::BOUNDARY_BAND * r.max(1.0)
}

/// All complex roots, listed with multiplicity (length = degree).
/// Origin roots are returned exactly; other roots are polished, which is
/// accurate whenever the roots are simple.
pub(crate) fn all_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    Ok(all_roots_raw(coeffs)?
        .into_iter()
        .map(|z| polish_root(coeffs, z))
        .collect())
}

/// Exact origin roots plus unpolished companion-matrix eigenvalues.
///
/// Kept raw on purpose: the eigenvalues of an m-fold root scatter
/// symmetrically, so their centroid is far more accurate than any
/// individually polished point; the cluster machinery relies on that.
fn all_roots_raw(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let zero = Complex64::new(0.0, 0.0);
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last() == Some(&zero) {
        c.pop();
    }
    if c.is_empty() {
        return Err(VdError::DegenerateInput(
            "cannot extract roots of the zero polynomial".into(),
        ));
    }
    if c.len() == 1 {
        return Ok(Vec::new());
    }
    let ord0 = c.iter().position(|x| *x != zero).unwrap();
    let mut out = vec![zero; ord0];
    let deflated = &c[ord0..];
    if deflated.len() == 1 {
        return Ok(out);
    }
    let lead = *deflated.last().unwrap();
    let monic: Vec<Complex64> = deflated.iter().map(|x| x / lead).collect();
    out.extend(companion_eigenvalues(&monic)?);
    Ok(out)
}

/// Eigenvalues of the companion matrix of a monic polynomial
/// (ascending coefficients, last = 1), with a shifted retry.
fn companion_eigenvalues(monic: &[Complex64]) -> Result<Vec<Complex64>> {
    debug_assert!(monic.len() >= 2);
    if let Some(ev) = try_companion(monic) {
        return Ok(ev);
    }
    // The QR iteration can fail on (near-)nilpotent companions. Shifting
    // the variable by a fixed offset comparable to the root bound breaks
    // the degeneracy; roots are shifted back afterwards.
    let n = monic.len() - 1;
    let bound = 1.0
        + monic[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    for &(mag, ang) in &[(0.9, 0.7_f64), (1.3, 2.3_f64)] {
        let s = Complex64::from_polar(mag * bound, ang);
        let shifted = taylor_shift(monic, s);
        if let Some(ev) = try_companion(&shifted) {
            return Ok(ev.into_iter().map(|w| w + s).collect());
        }
    }
    Err(VdError::Invalid(
        "eigenvalue iteration for polynomial roots did not converge".into(),
    ))
}

fn try_companion(monic: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = monic.len() - 1;
    let mut m = DMatrix::<Complex<f64>>::zeros(n, n);
    for i in 0..n {
        m[(i, n - 1)] = -monic[i];
        if i + 1 < n {
            m[(i + 1, i)] = Complex::new(1.0, 0.0);
        }
    }
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-13, 200 * n.max(4))?;
    let (_, t) = schur.unpack();
    Some((0..n).map(|i| t[(i, i)]).collect())
}

/// Coefficients of p(z + s) for ascending p, by in-place repeated
/// synthetic division. Output has the same degree and leading coefficient.
fn taylor_shift(monic: &[Complex64], s: Complex64) -> Vec<Complex64> {
    let mut c = monic.to_vec();
    let d = c.len() - 1;
    for k in 0..d {
        for j in (k..d).rev() {
            let next = c[j + 1];
            c[j] += s * next;
        }
    }
    c
}

/// Plain Newton polish keeping the iterate with the smallest residual.
/// Quadratic at simple roots; near a multiple root it stalls at the
/// evaluation noise floor, which the cluster machinery then handles.
fn polish_root(coeffs: &[Complex64], start: Complex64) -> Complex64 {
    let poly = Poly::new(coeffs.to_vec());
    let mut z = start;
    let mut best = z;
    let mut best_val = f64::INFINITY;
    for _ in 0..16 {
        let (p, dp) = poly.eval_with_derivative(z);
        if p.norm() < best_val {
            best = z;
            best_val = p.norm();
        }
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            return best;
        }
        let step = p / dp;
        if !step.re.is_finite() || !step.im.is_finite() {
            return best;
        }
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    if poly.eval(z).norm() <= best_val {
        z
    } else {
        best
    }
}

/// Agglomerate points lying within `tol::ROOT_MERGE_RADIUS * (1 + |z|)`
/// of each other; cluster multiplicity = number of members.
fn cluster(points: &[Complex64]) -> Vec<(Complex64, u32)> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let radius =
                tol::ROOT_MERGE_RADIUS * (1.0 + points[i].norm().max(points[j].norm()));
            if (points[i] - points[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut sums: Vec<(Complex64, u32)> = vec![(Complex64::new(0.0, 0.0), 0); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        sums[r].0 += points[i];
        sums[r].1 += 1;
    }
    sums.into_iter()
        .filter(|(_, c)| *c > 0)
        .map(|(s, c)| (s / c as f64, c))
        .collect()
}

/// Pairwise grouping radius for a hypothesized cluster of m eigenvalues
/// of one m-fold root. Backward error eps in the coefficients scatters an
/// m-fold root by ~eps^(1/m), so the radius must grow with m; it is kept
/// tight at m = 2 so genuinely distinct close pairs are not swallowed
/// (for m >= 3 the dominance test rejects false groupings by shape).
fn suspicion_radius(m: usize) -> f64 {
    match m {
        2 => 3e-7,
        _ => 1e-12_f64.powf(1.0 / m as f64),
    }
}

/// Rouche-style certificate that p has exactly m roots in |z - c| <= rho
/// and locally looks like a single m-fold root there: in the Taylor
/// expansion at c, the degree-m term must dominate the sum of all others
/// on the circle of radius rho, with headroom above evaluation noise.
fn dominance_accepts(coeffs: &[Complex64], c: Complex64, rho: f64, m: usize) -> bool {
    let b = taylor_shift(coeffs, c);
    if m >= b.len() {
        return false;
    }
    let mut terms = Vec::with_capacity(b.len());
    let mut l1 = 0.0;
    let mut rp = 1.0;
    for bj in &b {
        l1 += bj.norm();
        terms.push(bj.norm() * rp);
        rp *= rho;
    }
    let tm = terms[m];
    let rest: f64 = terms
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != m)
        .map(|(_, v)| *v)
        .sum();
    tm >= 2.0 * rest + 5e-15 * l1
}

/// Heuristic multiplicity structure for float-only polynomials: scan
/// hypothesized multiplicities from large to small, accept a connected
/// group of exactly m eigenvalues as one m-fold root when no other
/// eigenvalue is nearby and the dominance certificate holds (the root is
/// then reported at the group centroid, which cancels the leading-order
/// scatter); everything left over is merged at the fine radius.
fn group_points(points: &[Complex64], poly: &Poly) -> Vec<(Complex64, u32)> {
    let deg = poly.degree().unwrap_or(0);
    let n = points.len();
    let mut used = vec![false; n];
    let mut out: Vec<(Complex64, u32)> = Vec::new();

    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }

    for m in (2..=deg.min(6)).rev() {
        let s = suspicion_radius(m);
        let mut parent: Vec<usize> = (0..n).collect();
        for i in 0..n {
            if used[i] {
                continue;
            }
            for j in (i + 1)..n {
                if used[j] {
                    continue;
                }
                let scale = 1.0 + 0.5 * (points[i].norm() + points[j].norm());
                if (points[i] - points[j]).norm() <= s * scale {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        let mut comps: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            if !used[i] {
                let r = find(&mut parent, i);
                comps[r].push(i);
            }
        }
        for comp in comps.into_iter().filter(|c| c.len() == m) {
            let mut c = Complex64::new(0.0, 0.0);
            for &i in &comp {
                c += points[i];
            }
            c /= m as f64;
            let spread = comp
                .iter()
                .map(|&i| (points[i] - c).norm())
                .fold(0.0, f64::max);
            let rho = (20.0 * spread).max(1e-5 * (1.0 + c.norm()));
            let isolated = (0..n)
                .filter(|i| !comp.contains(i))
                .all(|i| (points[i] - c).norm() >= 3.0 * rho);
            if isolated && dominance_accepts(poly.coeffs(), c, rho, m) {
                for &i in &comp {
                    used[i] = true;
                }
                out.push((c, m as u32));
            }
        }
    }

    // Leftover points are (believed) simple roots: polish sharpens them,
    // and the fine merge also catches double roots whose scatter is small.
    let leftover: Vec<Complex64> = (0..n)
        .filter(|&i| !used[i])
        .map(|i| polish_root(poly.coeffs(), points[i]))
        .collect();
    out.extend(cluster(&leftover));
    out
}

/// Multiplicity structure from exact arithmetic: the squarefree
/// decomposition pins every multiplicity, and only simple roots of
/// coprime squarefree factors are extracted numerically.
fn entries_exact(e: &ExactPoly) -> Result<Vec<(Complex64, u32)>> {
    let mut out = Vec::new();
    for (f, m) in e.squarefree_decomposition() {
        for root in all_roots(&f.to_complex_coeffs())? {
            out.push((root, m));
        }
    }
    Ok(out)
}

/// Winding number of p around the circle |z| = r: the number of roots
/// inside, counted with multiplicity, computed purely from boundary data.
///
/// Evaluated as the mean over the circle of Re[z p'(z)/p(z)], with the
/// sample count doubled until two successive estimates agree and sit
/// within 0.02 of an integer. A near-vanishing |p| on the circle reports
/// a boundary root instead of silently returning garbage.
pub fn argument_principle_count(p: &Poly, r: f64) -> Result<i64> {
    if !(r > 0.0) {
        return Err(VdError::Invalid("radius must be positive".into()));
    }
    if p.is_zero() {
        return Err(VdError::DegenerateInput(
            "winding number of the zero polynomial".into(),
        ));
    }
    if p.degree() == Some(0) {
        return Ok(0);
    }
    let deg = p.degree().unwrap() as i32;
    let floor = 1e-12 * p.coeff_scale() * (deg + 1) as f64 * r.max(1.0).powi(deg);

    let estimate = |n: usize| -> Result<f64> {
        let mut acc = 0.0;
        for j in 0..n {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            let z = Complex64::from_polar(r, theta);
            let (pv, dv) = p.eval_with_derivative(z);
            if pv.norm() <= floor {
                return Err(VdError::RootOnBoundary { r });
            }
            acc += (z * dv / pv).re;
        }
        Ok(acc / n as f64)
    };

    let mut n = 512;
    let mut prev: Option<f64> = None;
    while n <= 1 << 17 {
        let e = estimate(n)?;
        if let Some(p0) = prev {
            if (e - e.round()).abs() < 0.02 && (p0 - e).abs() < 0.02 {
                return Ok(e.round() as i64);
            }
        }
        prev = Some(e);
        n *= 2;
    }
    Err(VdError::NoConvergence {
        levels: 9,
        last_change: prev.map(|e| (e - e.round()).abs()).unwrap_or(f64::NAN),
    })
}

/// All complex roots of p with multiplicities: the exact squarefree
/// route when the coefficients carry an exact view, multiplicity
/// clustering of eigenvalue scatter otherwise.
pub fn root_multiset(p: &Poly) -> Result<RootMultiset> {
    if p.is_zero() {
        return Err(VdError::DegenerateInput(
            "roots of the zero polynomial".into(),
        ));
    }
    if p.degree() == Some(0) {
        return Ok(RootMultiset::default());
    }
    let clusters = match p.exact() {
        Some(e) => entries_exact(e)?,
        None => group_points(&all_roots_raw(p.coeffs())?, p),
    };
    Ok(RootMultiset::from_entries(clusters))
}

/// Roots of p strictly inside |z| < r, clustered into multiplicities and
/// verified against the boundary winding number.
pub fn roots_in_disc(p: &Poly, r: f64) -> Result<RootMultiset> {
    if !(r > 0.0) {
        return Err(VdError::Invalid("radius must be positive".into()));
    }
    if p.is_zero() {
        return Err(VdError::DegenerateInput(
            "roots of the zero polynomial".into(),
        ));
    }
    if p.degree() == Some(0) {
        return Ok(RootMultiset::default());
    }
    let clusters = match p.exact() {
        Some(e) => entries_exact(e)?,
        None => group_points(&all_roots_raw(p.coeffs())?, p),
    };
    let band = boundary_band(r);
    let mut inside = Vec::new();
    for (loc, mult) in clusters {
        let d = loc.norm();
        if (d - r).abs() <= band {
            return Err(VdError::RootOnBoundary { r });
        }
        if d < r {
            inside.push((loc, mult));
        }
    }
    let total: u32 = inside.iter().map(|e| e.1).sum();
    let winding = argument_principle_count(p, r)?;
    if winding != total as i64 {
        return Err(VdError::RootCountMismatch {
            clustered: total as i64,
            winding,
        });
    }
    Ok(RootMultiset::from_entries(inside))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::parse_poly;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simple_real_roots() {
        let p = parse_poly("-1,0,1", false).unwrap(); // z^2 - 1
        let roots = roots_in_disc(&p, 2.0).unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots.total_multiplicity(), 2);
        assert_abs_diff_eq!(roots.entries()[0].0.re, -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(roots.entries()[1].0.re, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn triple_root_clusters_to_one_entry() {
        // (z - 1/2)^3
        let p = parse_poly("-1/8,3/4,-3/2,1", false).unwrap();
        let roots = roots_in_disc(&p, 1.0).unwrap();
        assert_eq!(roots.len(), 1);
        let (loc, m) = roots.entries()[0];
        assert_eq!(m, 3);
        assert!((loc - Complex64::new(0.5, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn origin_roots_are_exact() {
        // z^2 (z - 1): only the origin root is inside r = 1/2
        let p = parse_poly("0,0,-1,1", false).unwrap();
        let roots = roots_in_disc(&p, 0.5).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots.entries()[0], (Complex64::new(0.0, 0.0), 2));
    }

    #[test]
    fn close_pair_stays_resolved() {
        // (z - 0.5)(z - 0.5001): separation far above the merge radius
        let p = Poly::from_real(&[0.5 * 0.5001, -(0.5 + 0.5001), 1.0]);
        let roots = roots_in_disc(&p, 1.0).unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots.total_multiplicity(), 2);
        assert!((roots.entries()[0].0.re - 0.5).abs() < 1e-8);
        assert!((roots.entries()[1].0.re - 0.5001).abs() < 1e-8);
    }

    #[test]
    fn float_triple_collapses_via_dominance() {
        // Same cube as above but with the exact view withheld, forcing the
        // heuristic path: eigenvalue scatter ~1e-6 must still be certified
        // and collapsed into a single multiplicity-3 entry at the centroid.
        let p = Poly::from_real(&[-0.125, 0.75, -1.5, 1.0]);
        assert!(p.exact().is_none());
        let roots = roots_in_disc(&p, 1.0).unwrap();
        assert_eq!(roots.len(), 1);
        let (loc, m) = roots.entries()[0];
        assert_eq!(m, 3);
        assert!((loc - Complex64::new(0.5, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn float_quadruple_collapses_via_dominance() {
        // (z - 0.6)^4 with rounded coefficients: the four pseudo-roots
        // spread ~1e-4 but the centroid stays accurate to ~1e-12.
        let lin = Poly::from_real(&[-0.6, 1.0]);
        let p = lin.mul(&lin).mul(&lin).mul(&lin);
        assert!(p.exact().is_none());
        let roots = roots_in_disc(&p, 1.0).unwrap();
        assert_eq!(roots.len(), 1);
        let (loc, m) = roots.entries()[0];
        assert_eq!(m, 4);
        assert!((loc - Complex64::new(0.6, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn boundary_root_is_reported() {
        let p = parse_poly("-1,1", false).unwrap(); // z - 1
        assert!(matches!(
            roots_in_disc(&p, 1.0),
            Err(VdError::RootOnBoundary { .. })
        ));
    }

    #[test]
    fn winding_counts_inside_roots() {
        // (z - 0.3)(z - 0.9)(z + 2)
        let a = Poly::from_real(&[-0.3, 1.0]);
        let b = Poly::from_real(&[-0.9, 1.0]);
        let c = Poly::from_real(&[2.0, 1.0]);
        let p = a.mul(&b).mul(&c);
        assert_eq!(argument_principle_count(&p, 1.0).unwrap(), 2);
        assert_eq!(argument_principle_count(&p, 0.5).unwrap(), 1);
        assert_eq!(argument_principle_count(&p, 3.0).unwrap(), 3);
    }

    #[test]
    fn high_degree_circle_of_roots() {
        // (2z)^20 + 1: all roots on |z| = 1/2
        let mut coeffs = vec![0.0; 21];
        coeffs[0] = 1.0;
        coeffs[20] = 2f64.powi(20);
        let p = Poly::from_real(&coeffs);
        let roots = roots_in_disc(&p, 0.8).unwrap();
        assert_eq!(roots.total_multiplicity(), 20);
        for (loc, m) in roots.entries() {
            assert_eq!(*m, 1);
            assert_abs_diff_eq!(loc.norm(), 0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn complex_coefficients() {
        // (z - i/2)(z + 1/4) = z^2 + (1/4 - i/2) z - i/8
        let p = parse_poly("-1/8*i,1/4-1/2*i,1", false).unwrap();
        let roots = roots_in_disc(&p, 1.0).unwrap();
        assert_eq!(roots.len(), 2);
        let locs: Vec<Complex64> = roots.entries().iter().map(|e| e.0).collect();
        assert!(locs
            .iter()
            .any(|z| (z - Complex64::new(0.0, 0.5)).norm() < 1e-10));
        assert!(locs
            .iter()
            .any(|z| (z - Complex64::new(-0.25, 0.0)).norm() < 1e-10));
    }

    #[test]
    fn taylor_shift_is_consistent() {
        // p(z) = z^3 - 2z + 1 (monic); q(z) = p(z + s) must satisfy
        // q(w) = p(w + s) at sample points.
        let monic = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let s = Complex64::new(0.7, -0.4);
        let shifted = taylor_shift(&monic, s);
        let p = Poly::new(monic.to_vec());
        let q = Poly::new(shifted);
        for &w in &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.5, 0.3),
            Complex64::new(-0.2, 1.1),
        ] {
            let lhs = q.eval(w);
            let rhs = p.eval(w + s);
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }
}
