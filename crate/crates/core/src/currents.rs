//! Normalized characteristic currents of map sequences: pairings of
//! the disc current of each map against a finite basis of test forms,
//! tail clustering toward empirical weak limits, positivity margins
//! against effective divisors, and the decay of exact-form pairings
//! under normalization.
//!
//! The current of a map at radius r pairs with a curvature form through
//! the geometric characteristic and with an exact form dd^c(phi)
//! through the calibrated Jensen transport: boundary mean of phi
//! composed with the map, minus its value at the image of the origin.
//! Everything is normalized by the characteristic against a declared
//! ample divisor, so the self-pairing of the normalizer is exactly one.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, VdError};
use crate::funcspace::RationalMap;
use crate::greenjensen::{periodic_mean, QuadratureSpec};
use crate::nevanlinna::characteristic_geometric;
use crate::projective::{chordal_distance, weil, MetricizedDivisor, ProjPoint};
use crate::tol;

/// A bounded smooth test function on the target projective space,
/// probing the exact part dd^c(phi) of the current.
#[derive(Clone)]
pub struct ExactForm {
    label: String,
    sup_abs: f64,
    phi: Arc<dyn Fn(&ProjPoint) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for ExactForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExactForm")
            .field("label", &self.label)
            .field("sup_abs", &self.sup_abs)
            .finish()
    }
}

impl ExactForm {
    pub fn new(
        label: impl Into<String>,
        sup_abs: f64,
        phi: Arc<dyn Fn(&ProjPoint) -> f64 + Send + Sync>,
    ) -> Result<Self> {
        if !(sup_abs.is_finite() && sup_abs >= 0.0) {
            return Err(VdError::Invalid(
                "exact form needs a finite nonnegative sup bound".into(),
            ));
        }
        Ok(ExactForm {
            label: label.into(),
            sup_abs,
            phi,
        })
    }

    /// Squared chordal distance to a fixed center: smooth, sup = 1.
    pub fn chordal_squared(center: ProjPoint, label: impl Into<String>) -> Self {
        ExactForm {
            label: label.into(),
            sup_abs: 1.0,
            phi: Arc::new(move |x| {
                let d = chordal_distance(x, &center);
                d * d
            }),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sup_abs(&self) -> f64 {
        self.sup_abs
    }

    pub fn eval(&self, x: &ProjPoint) -> f64 {
        (self.phi)(x)
    }
}

/// Finite probe basis for weak limits: curvature forms of metricized
/// divisors (the first one is the normalizing ample class) plus exact
/// forms given by bounded test functions.
#[derive(Clone, Debug)]
pub struct TestFormBasis {
    curvature_forms: Vec<MetricizedDivisor>,
    exact_forms: Vec<ExactForm>,
}

impl TestFormBasis {
    pub fn new(
        curvature_forms: Vec<MetricizedDivisor>,
        exact_forms: Vec<ExactForm>,
    ) -> Result<Self> {
        if curvature_forms.is_empty() {
            return Err(VdError::Invalid(
                "basis needs at least the normalizing curvature form".into(),
            ));
        }
        Ok(TestFormBasis {
            curvature_forms,
            exact_forms,
        })
    }

    /// Hyperplane normalizer, the second coordinate divisor, and the
    /// squared chordal distance to [1:0] — a probe basis for maps into
    /// the projective line.
    pub fn standard() -> Self {
        let h = MetricizedDivisor::parse("1; (1,0)=1")
            .unwrap()
            .with_name("H");
        let v = MetricizedDivisor::parse("1; (0,1)=1")
            .unwrap()
            .with_name("V1");
        let origin = ProjPoint::from_affine(Complex64::new(0.0, 0.0));
        TestFormBasis {
            curvature_forms: vec![h, v],
            exact_forms: vec![ExactForm::chordal_squared(origin, "chordal_sq_0")],
        }
    }

    /// The normalizing ample divisor (first curvature form).
    pub fn normalizer(&self) -> &MetricizedDivisor {
        &self.curvature_forms[0]
    }

    pub fn curvature_forms(&self) -> &[MetricizedDivisor] {
        &self.curvature_forms
    }

    pub fn exact_forms(&self) -> &[ExactForm] {
        &self.exact_forms
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .curvature_forms
            .iter()
            .map(|d| d.name().to_string())
            .collect();
        out.extend(self.exact_forms.iter().map(|e| e.label.clone()));
        out
    }
}

/// One probe of the normalized current of a map at one radius.
#[derive(Clone, Debug, Serialize)]
pub struct CurrentSample {
    pub n: usize,
    pub r: f64,
    pub normalizer: f64,
    pub labels: Vec<String>,
    pub pairings: Vec<f64>,
}

/// Unnormalized exact-form pairing by the Jensen transport:
/// boundary mean of phi over the image circle minus phi at the image
/// of the origin.
fn exact_pairing(
    f: &RationalMap,
    phi: &ExactForm,
    r: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    let integrand = |theta: f64| -> f64 {
        let z = Complex64::from_polar(r, theta);
        match ProjPoint::new(f.eval_components(z)) {
            Ok(x) => phi.eval(&x),
            Err(_) => f64::NAN,
        }
    };
    let mean = periodic_mean(&integrand, q)?;
    let origin = ProjPoint::new(f.eval_components(Complex64::new(0.0, 0.0)))
        .map_err(|_| VdError::IndeterminatePoint)?;
    Ok(mean - phi.eval(&origin))
}

/// Pair the normalized current of a map with every element of the
/// basis. The self-pairing of the normalizer is exactly one.
pub fn normalized_pairings(
    f: &RationalMap,
    n: usize,
    r: f64,
    basis: &TestFormBasis,
    q: &QuadratureSpec,
) -> Result<CurrentSample> {
    let normalizer = characteristic_geometric(f, basis.normalizer(), r, q)?;
    if !(normalizer > q.tol) {
        return Err(VdError::DegenerateNormalizer { value: normalizer });
    }
    let mut pairings = Vec::with_capacity(basis.curvature_forms.len() + basis.exact_forms.len());
    for (idx, d) in basis.curvature_forms.iter().enumerate() {
        if idx == 0 {
            pairings.push(normalizer / normalizer);
            continue;
        }
        pairings.push(characteristic_geometric(f, d, r, q)? / normalizer);
    }
    for phi in &basis.exact_forms {
        pairings.push(exact_pairing(f, phi, r, q)? / normalizer);
    }
    if pairings.iter().any(|p| !p.is_finite()) {
        return Err(VdError::Invalid("pairing produced a non-finite value".into()));
    }
    Ok(CurrentSample {
        n,
        r,
        normalizer,
        labels: basis.labels(),
        pairings,
    })
}

/// One value cluster of a tail of pairings.
#[derive(Clone, Debug, Serialize)]
pub struct Cluster {
    pub center: f64,
    pub diameter: f64,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementClusters {
    pub label: String,
    pub clusters: Vec<Cluster>,
    /// single tail cluster of diameter below the tolerance
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterReport {
    pub r: f64,
    pub tail_start: usize,
    pub per_element: Vec<ElementClusters>,
}

fn cluster_values(mut values: Vec<f64>, tol: f64) -> Vec<Cluster> {
    values.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            let chunk = &values[start..i];
            let lo = chunk[0];
            let hi = chunk[chunk.len() - 1];
            out.push(Cluster {
                center: (lo + hi) / 2.0,
                diameter: hi - lo,
                count: chunk.len(),
            });
            start = i;
        }
    }
    out
}

/// Cluster the tails of normalized pairings, per radius and per basis
/// element. A single tail cluster of diameter below `tol` certifies an
/// empirical weak limit along the tail.
pub fn limit_points(samples: &[CurrentSample], tol: f64) -> Result<Vec<ClusterReport>> {
    let mut radii: Vec<f64> = samples.iter().map(|s| s.r).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let mut reports = Vec::new();
    for r in radii {
        let mut group: Vec<&CurrentSample> =
            samples.iter().filter(|s| s.r == r).collect();
        group.sort_by_key(|s| s.n);
        if group.len() < 8 {
            return Err(VdError::InsufficientSamples {
                need: 8,
                got: group.len(),
            });
        }
        let tail_start = group.len() / 2;
        let tail = &group[tail_start..];
        let labels = &group[0].labels;
        let n_elems = group[0].pairings.len();
        let mut per_element = Vec::with_capacity(n_elems);
        for j in 0..n_elems {
            let values: Vec<f64> = tail.iter().map(|s| s.pairings[j]).collect();
            let clusters = cluster_values(values, tol);
            let certified = clusters.len() == 1 && clusters[0].diameter < tol;
            per_element.push(ElementClusters {
                label: labels.get(j).cloned().unwrap_or_else(|| format!("element_{j}")),
                clusters,
                certified,
            });
        }
        reports.push(ClusterReport {
            r,
            tail_start,
            per_element,
        });
    }
    Ok(reports)
}

/// One positivity-margin row: the normalized pairing with an effective
/// divisor, its theoretical lower bound, and the achieved margin.
#[derive(Clone, Debug, Serialize)]
pub struct MarginRow {
    pub n: usize,
    pub r: f64,
    pub pairing: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PositivityReport {
    pub divisor: String,
    pub base_point_bound: f64,
    pub rows: Vec<MarginRow>,
    /// smallest margin over the last half of the sequence
    pub tail_min_margin: f64,
    pub convention: &'static str,
}

fn margin_csv(rows: &[MarginRow]) -> String {
    let mut out = String::from("n,r,pairing,bound,margin\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{:.12e},{:.12e},{:.12e}\n",
            row.n, row.r, row.pairing, row.bound, row.margin
        ));
    }
    out
}

impl PositivityReport {
    pub fn to_csv(&self) -> String {
        margin_csv(&self.rows)
    }
}

/// Base-point Weil bound under which positivity margins are quoted.
pub const BASE_POINT_BOUND: f64 = 10.0;

/// Positivity of the normalized current against effective divisors:
/// the pairing stays above -(B + C_F)/normalizer, with B the base-point
/// Weil bound and C_F the sup of log|Q_F| on the unit sphere. Requires
/// every base point f_n(0) to stay at Weil distance at most B from each
/// divisor.
pub fn positivity_check(
    seq: &[RationalMap],
    ample: &MetricizedDivisor,
    divisors: &[MetricizedDivisor],
    r_grid: &[f64],
    q: &QuadratureSpec,
) -> Result<Vec<PositivityReport>> {
    if seq.is_empty() || divisors.is_empty() || r_grid.is_empty() {
        return Err(VdError::EmptySample);
    }
    // base-point admissibility against every divisor first
    for f in seq {
        let x = ProjPoint::new(f.eval_components(Complex64::new(0.0, 0.0)))
            .map_err(|_| VdError::IndeterminatePoint)?;
        for d in divisors {
            let w = weil(d, &x);
            if !w.is_finite() || w > BASE_POINT_BOUND {
                return Err(VdError::BasePointOnDivisor {
                    bound: BASE_POINT_BOUND,
                });
            }
        }
    }
    let mut reports = Vec::with_capacity(divisors.len());
    for d in divisors {
        let c_f = -d.weil_lower_bound();
        let mut rows = Vec::with_capacity(seq.len() * r_grid.len());
        for (i, f) in seq.iter().enumerate() {
            for &r in r_grid {
                let normalizer = characteristic_geometric(f, ample, r, q)?;
                if !(normalizer > q.tol) {
                    return Err(VdError::DegenerateNormalizer { value: normalizer });
                }
                let pairing = characteristic_geometric(f, d, r, q)? / normalizer;
                let bound = -(BASE_POINT_BOUND + c_f) / normalizer;
                rows.push(MarginRow {
                    n: i,
                    r,
                    pairing,
                    bound,
                    margin: pairing - bound,
                });
            }
        }
        let tail_from = rows.len() / 2;
        let tail_min_margin = rows[tail_from..]
            .iter()
            .map(|row| row.margin)
            .fold(f64::INFINITY, f64::min);
        reports.push(PositivityReport {
            divisor: d.name().to_string(),
            base_point_bound: BASE_POINT_BOUND,
            rows,
            tail_min_margin,
            convention: tol::CONVENTION,
        });
    }
    Ok(reports)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub n: usize,
    pub r: f64,
    pub pairing: f64,
    pub bound: f64,
    pub margin: f64,
    pub compliant: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayTable {
    pub phi_label: String,
    pub rows: Vec<DecayRow>,
    pub all_compliant: bool,
    pub convention: &'static str,
}

impl DecayTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,r,pairing,bound,margin\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{:.12e},{:.12e},{:.12e}\n",
                row.n, row.r, row.pairing, row.bound, row.margin
            ));
        }
        out
    }
}

/// Decay of exact-form pairings under normalization: every normalized
/// pairing obeys |pairing| <= 2 sup|phi| / normalizer + tol, and the
/// bound itself decays as the normalizers diverge. Refuses sequences
/// whose normalizers fail to diverge.
pub fn exactness_decay(
    seq: &[RationalMap],
    ample: &MetricizedDivisor,
    phi: &ExactForm,
    r_grid: &[f64],
    q: &QuadratureSpec,
) -> Result<DecayTable> {
    if seq.is_empty() || r_grid.is_empty() {
        return Err(VdError::EmptySample);
    }
    let mut rows = Vec::with_capacity(seq.len() * r_grid.len());
    let mut all_compliant = true;
    for &r in r_grid {
        let t_first = characteristic_geometric(&seq[0], ample, r, q)?;
        let t_last = characteristic_geometric(seq.last().unwrap(), ample, r, q)?;
        if seq.len() > 1 && !(t_last >= 2.0 * t_first && t_last > 100.0 * q.tol) {
            return Err(VdError::NormalizerNotDiverging);
        }
        for (i, f) in seq.iter().enumerate() {
            let normalizer = characteristic_geometric(f, ample, r, q)?;
            if !(normalizer > q.tol) {
                return Err(VdError::DegenerateNormalizer { value: normalizer });
            }
            let pairing = exact_pairing(f, phi, r, q)? / normalizer;
            let bound = 2.0 * phi.sup_abs() / normalizer;
            let margin = bound + q.tol - pairing.abs();
            let compliant = margin >= 0.0;
            all_compliant &= compliant;
            rows.push(DecayRow {
                n: i,
                r,
                pairing,
                bound,
                margin,
                compliant,
            });
        }
    }
    Ok(DecayTable {
        phi_label: phi.label().to_string(),
        rows,
        all_compliant,
        convention: tol::CONVENTION,
    })
}
