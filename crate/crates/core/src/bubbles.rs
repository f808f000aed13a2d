//! Discs carrying bubble trees: the extended Green-weighted energy that
//! adds a logarithmic term per attached tree, graph sampling of maps
//! over the disc, a product Hausdorff metric on graph samples,
//! concentration detection for sequences of maps, and a desk-scale
//! compactness harness that extracts graph-Cauchy subsequences after
//! augmenting graphs with the detected bubbles.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, VdError};
use crate::funcspace::{boundary_band, RationalMap};
use crate::greenjensen::QuadratureSpec;
use crate::nevanlinna::characteristic_geometric;
use crate::projective::{
    chordal_distance, fs_mass_in_disc, fs_pullback_density, MetricizedDivisor, ProjPoint,
};
use crate::tautological::fs_nabla;

/// A tree of rational-curve components attached to the disc at one
/// interior point. Energies are the a-priori degree pairings: component
/// degree times the degree of the divisor the tree is weighed against.
#[derive(Clone, Debug)]
pub struct BubbleTree {
    attach: Complex64,
    components: Vec<RationalMap>,
    adjacency: Vec<(usize, usize)>,
    energies: Vec<f64>,
}

impl BubbleTree {
    /// Build a tree attached at `attach` with the given components and
    /// adjacency edges; per-component energy is degree times
    /// `divisor_degree`. The adjacency must form a tree: connected and
    /// acyclic over the component indices.
    pub fn new(
        attach: Complex64,
        components: Vec<RationalMap>,
        adjacency: Vec<(usize, usize)>,
        divisor_degree: u32,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(VdError::Invalid("a bubble tree needs components".into()));
        }
        let n = components.len();
        if adjacency.len() != n - 1 {
            return Err(VdError::Invalid(format!(
                "tree on {n} components needs exactly {} edges, got {}",
                n - 1,
                adjacency.len()
            )));
        }
        for &(i, j) in &adjacency {
            if i >= n || j >= n || i == j {
                return Err(VdError::Invalid(format!("bad tree edge ({i}, {j})")));
            }
        }
        // connectivity (with n-1 edges this also rules out cycles)
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(i, j) in &adjacency {
                let next = if i == v {
                    j
                } else if j == v {
                    i
                } else {
                    continue;
                };
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(VdError::Invalid("tree adjacency is disconnected".into()));
        }
        let energies = components
            .iter()
            .map(|c| (c.degree() as u32 * divisor_degree) as f64)
            .collect();
        Ok(BubbleTree {
            attach,
            components,
            adjacency,
            energies,
        })
    }

    pub fn attach(&self) -> Complex64 {
        self.attach
    }

    pub fn components(&self) -> &[RationalMap] {
        &self.components
    }

    pub fn adjacency(&self) -> &[(usize, usize)] {
        &self.adjacency
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn total_energy(&self) -> f64 {
        self.energies.iter().sum()
    }
}

/// A map on the disc together with bubble trees attached at distinct
/// interior points away from the origin.
#[derive(Clone, Debug)]
pub struct DiscWithBubbles {
    base: RationalMap,
    bubbles: Vec<BubbleTree>,
}

impl DiscWithBubbles {
    pub fn new(base: RationalMap, bubbles: Vec<BubbleTree>) -> Result<Self> {
        for b in &bubbles {
            let m = b.attach.norm();
            if m == 0.0 {
                return Err(VdError::Invalid(
                    "bubbles cannot attach at the origin".into(),
                ));
            }
            if m >= 1.0 {
                return Err(VdError::Invalid(
                    "attach points must lie strictly inside the unit disc".into(),
                ));
            }
        }
        for i in 0..bubbles.len() {
            for j in i + 1..bubbles.len() {
                if (bubbles[i].attach - bubbles[j].attach).norm() <= 1e-12 {
                    return Err(VdError::Invalid("attach points must be distinct".into()));
                }
            }
        }
        Ok(DiscWithBubbles { base, bubbles })
    }

    pub fn base(&self) -> &RationalMap {
        &self.base
    }

    pub fn bubbles(&self) -> &[BubbleTree] {
        &self.bubbles
    }
}

/// Green-weighted energy of a disc with bubbles: the base map's
/// geometric characteristic plus, for each tree attached strictly
/// inside radius r, the Green weight log(r/|attach|) times the tree's
/// total energy.
pub fn nabla_bubble(
    b: &DiscWithBubbles,
    d: &MetricizedDivisor,
    r: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    let band = boundary_band(r);
    for tree in b.bubbles() {
        if (tree.attach.norm() - r).abs() <= band {
            return Err(VdError::AttachOnBoundary {
                loc_abs: tree.attach.norm(),
                r,
            });
        }
    }
    let mut total = characteristic_geometric(b.base(), d, r, q)?;
    for tree in b.bubbles() {
        let m = tree.attach.norm();
        if m < r {
            total += (r / m).ln() * tree.total_energy();
        }
    }
    Ok(total)
}

/// Sampled graph of a map over a closed disc: (parameter, image) pairs
/// on a polar grid, possibly augmented with bubble fibers.
#[derive(Clone, Debug)]
pub struct GraphSample {
    pub points: Vec<(Complex64, ProjPoint)>,
    pub mesh: usize,
}

impl GraphSample {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Append a full projective-line fiber {attach} x P1, sampled at
    /// n quasi-uniform points, to the graph.
    pub fn augment_sphere(&mut self, attach: Complex64, n: usize) {
        for x in sphere_sample(n) {
            self.points.push((attach, x));
        }
    }

    /// Append {attach} x (image of the tree components), each component
    /// sampled over the whole projective parameter line.
    pub fn augment_tree(&mut self, attach: Complex64, components: &[RationalMap]) {
        for comp in components {
            for w in projective_parameter_grid() {
                if let Ok(x) = ProjPoint::new(comp.eval_components(w)) {
                    self.points.push((attach, x));
                }
            }
            // the parameter point at infinity: leading coefficients
            let dd = comp.degree();
            let lead: Vec<Complex64> = comp
                .components()
                .iter()
                .map(|p| p.coeffs().get(dd).copied().unwrap_or(Complex64::new(0.0, 0.0)))
                .collect();
            if let Ok(x) = ProjPoint::new(lead) {
                self.points.push((attach, x));
            }
        }
    }
}

/// Affine parameter values whose images cover the projective line:
/// a polar grid of the unit disc together with the reciprocals of its
/// nonzero points (the other chart).
fn projective_parameter_grid() -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0)];
    let rings = 8;
    let angles = 16;
    for j in 1..=rings {
        let rho = j as f64 / rings as f64;
        for k in 0..angles {
            let w = Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * k as f64 / angles as f64);
            out.push(w);
            if rho < 1.0 {
                out.push(w.inv()); // the other chart
            }
        }
    }
    out
}

/// n quasi-uniform points of the projective line (Fibonacci lattice on
/// the round sphere, pushed through the stereographic chart).
pub fn sphere_sample(n: usize) -> Vec<ProjPoint> {
    let golden = std::f64::consts::PI * (1.0 + 5.0_f64.sqrt());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let c = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
        let s = (1.0 - c * c).max(0.0).sqrt();
        let th = golden * i as f64;
        let (a, b) = (s * th.cos(), s * th.sin());
        // sphere point (a, b, c) -> homogeneous [1 - c : a + ib]
        if let Ok(x) = ProjPoint::new(vec![Complex64::new(1.0 - c, 0.0), Complex64::new(a, b)]) {
            out.push(x);
        }
    }
    out
}

/// Sample the graph of a map over the closed disc of the given radius
/// on a polar grid with `mesh` rings and `mesh` angular points.
pub fn graph_sample(f: &RationalMap, radius: f64, mesh: usize) -> Result<GraphSample> {
    if mesh < 16 {
        return Err(VdError::Invalid("mesh must be at least 16".into()));
    }
    if !(radius > 0.0) {
        return Err(VdError::Invalid("radius must be positive".into()));
    }
    let mut points = Vec::with_capacity(mesh * mesh + 1);
    let zero = Complex64::new(0.0, 0.0);
    if let Ok(x) = ProjPoint::new(f.eval_components(zero)) {
        points.push((zero, x));
    }
    for j in 1..=mesh {
        let rho = radius * j as f64 / mesh as f64;
        for k in 0..mesh {
            let z = Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * k as f64 / mesh as f64);
            if let Ok(x) = ProjPoint::new(f.eval_components(z)) {
                points.push((z, x));
            }
        }
    }
    Ok(GraphSample { points, mesh })
}

/// Sample the graph of a disc-with-bubbles: the base graph plus one
/// tree-image fiber per bubble.
pub fn graph_sample_bubbles(
    b: &DiscWithBubbles,
    radius: f64,
    mesh: usize,
) -> Result<GraphSample> {
    let mut g = graph_sample(b.base(), radius, mesh)?;
    for tree in b.bubbles() {
        g.augment_tree(tree.attach(), tree.components());
    }
    Ok(g)
}

fn product_distance(a: &(Complex64, ProjPoint), b: &(Complex64, ProjPoint)) -> f64 {
    let dz = (a.0 - b.0).norm();
    let dx = chordal_distance(&a.1, &b.1);
    dz.max(dx)
}

fn directed_hausdorff(a: &GraphSample, b: &GraphSample) -> f64 {
    let mut worst: f64 = 0.0;
    for p in &a.points {
        let mut best = f64::INFINITY;
        for q in &b.points {
            let d = product_distance(p, q);
            if d < best {
                best = d;
                if best <= worst {
                    break; // cannot raise the supremum further
                }
            }
        }
        if best > worst {
            worst = best;
        }
    }
    worst
}

/// Hausdorff distance between two graph samples in the product metric
/// max(parameter distance, chordal image distance).
pub fn hausdorff_distance(a: &GraphSample, b: &GraphSample) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(VdError::EmptySample);
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// A detected concentration point: location in the disc and the
/// localized curvature mass at the largest map supplied.
#[derive(Clone, Debug, Serialize)]
pub struct Concentration {
    pub re: f64,
    pub im: f64,
    pub mass: f64,
}

impl Concentration {
    pub fn location(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn local_mass(f: &RationalMap, center: Complex64, eps: f64, q: &QuadratureSpec) -> f64 {
    fs_mass_in_disc(f, center, eps, q).unwrap_or(0.0)
}

/// Hill-climb from a starting point to a local maximum of the pullback
/// curvature density.
fn ascend_density(f: &RationalMap, start: Complex64, initial_step: f64) -> Complex64 {
    let dens = |z: Complex64| fs_pullback_density(f, z).unwrap_or(0.0);
    let mut z = start;
    let mut best = dens(z);
    let mut step = initial_step;
    while step > 1e-10 {
        let mut moved = false;
        for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let cand = z + Complex64::new(dx * step, dy * step);
            let v = dens(cand);
            if v > best {
                best = v;
                z = cand;
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    z
}

/// Detect curvature concentration along a sequence of maps: locations
/// where the eps-localized Fubini-Study mass of the last map is at
/// least 1/2 and has not decayed along the sequence. Returns an empty
/// list when nothing concentrates.
pub fn detect_concentration(
    seq: &[RationalMap],
    r: f64,
    eps: f64,
) -> Result<Vec<Concentration>> {
    if seq.is_empty() {
        return Err(VdError::EmptySample);
    }
    if !(eps > 0.0 && eps < r / 4.0) {
        return Err(VdError::Invalid(
            "eps must lie strictly between 0 and r/4".into(),
        ));
    }
    let q = QuadratureSpec {
        tol: 1e-7,
        ..QuadratureSpec::default()
    };
    let last = seq.last().unwrap();

    // scan eps-disc masses of the last map on a polar grid of centers
    // fine enough that any concentration point is within eps/2 of one
    let mut centers = vec![Complex64::new(0.0, 0.0)];
    let spacing = eps / 2.0;
    let rings = (r / spacing).ceil() as usize;
    for j in 1..=rings {
        let rho = r * j as f64 / rings as f64;
        let angular = ((2.0 * std::f64::consts::PI * rho / spacing).ceil() as usize).max(8);
        for k in 0..angular {
            centers.push(Complex64::from_polar(
                rho,
                2.0 * std::f64::consts::PI * k as f64 / angular as f64,
            ));
        }
    }
    let mut candidates: Vec<(Complex64, f64)> = centers
        .into_iter()
        .map(|c| (c, local_mass(last, c, eps, &q)))
        .filter(|&(_, m)| m >= 0.3)
        .collect();
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1));

    let mut found: Vec<Concentration> = Vec::new();
    for (start, _) in candidates {
        let z0 = ascend_density(last, start, eps / 2.0);
        if found
            .iter()
            .any(|c| (c.location() - z0).norm() < 2.0 * eps)
        {
            continue;
        }
        let m_last = local_mass(last, z0, eps, &q);
        let m_first = local_mass(&seq[0], z0, eps, &q);
        if m_last >= 0.5 && m_last + 1e-9 >= m_first {
            found.push(Concentration {
                re: z0.re,
                im: z0.im,
                mass: m_last,
            });
        }
    }
    found.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(found)
}

/// One energy-bound violation: which map, at which radius.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub map_index: usize,
    pub r: f64,
    pub energy: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
}

/// Verdict of the compactness harness.
#[derive(Clone, Debug, Serialize)]
pub struct GromovVerdict {
    pub pass: bool,
    /// per-map list of (r, energy) pairs
    pub energies: Vec<Vec<(f64, f64)>>,
    pub violations: Vec<Violation>,
    /// indices of maps whose energies stay within the bound
    pub candidate_indices: Vec<usize>,
    /// extracted graph-Cauchy subsequence (original indices)
    pub subsequence_indices: Vec<usize>,
    /// pairwise graph distances among the candidates
    pub pairwise_distances: Vec<Vec<f64>>,
    pub bubbles_detected: Vec<Concentration>,
    pub cauchy_tolerance: f64,
    pub reparameterized: bool,
    pub witness: Option<Witness>,
}

fn pairwise_matrix(graphs: &[GraphSample]) -> Result<Vec<Vec<f64>>> {
    let n = graphs.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = hausdorff_distance(&graphs[i], &graphs[j])?;
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    Ok(m)
}

/// Earliest start index s such that all pairs from s onward sit within
/// the tolerance; None when even the final triple fails.
fn cauchy_suffix(m: &[Vec<f64>], tol: f64) -> Option<usize> {
    let n = m.len();
    if n < 3 {
        return None;
    }
    'outer: for s in 0..=n - 3 {
        for i in s..n {
            for j in i + 1..n {
                if m[i][j] > tol {
                    continue 'outer;
                }
            }
        }
        return Some(s);
    }
    None
}

/// Desk-scale compactness harness: compute Green energies of each map
/// over the radius grid, flag maps exceeding the energy bound, then try
/// to extract a graph-Cauchy subsequence among the remaining maps after
/// augmenting their graphs with detected concentration bubbles. Falls
/// back to a grid of disc automorphisms when the plain graphs refuse to
/// cluster.
pub fn gromov_harness(
    seq: &[RationalMap],
    bound: &dyn Fn(f64) -> f64,
    r_grid: &[f64],
    mesh: usize,
) -> Result<GromovVerdict> {
    if seq.len() < 8 {
        return Err(VdError::InsufficientSamples {
            need: 8,
            got: seq.len(),
        });
    }
    if r_grid.is_empty() {
        return Err(VdError::Invalid("radius grid must be nonempty".into()));
    }
    let q = QuadratureSpec {
        tol: 1e-7,
        ..QuadratureSpec::default()
    };

    let mut energies = Vec::with_capacity(seq.len());
    let mut violations = Vec::new();
    for (idx, f) in seq.iter().enumerate() {
        let mut per_map = Vec::with_capacity(r_grid.len());
        for &r in r_grid {
            let e = fs_nabla(f, r, &q)?;
            per_map.push((r, e));
            let cap = bound(r);
            if e > cap + 1e-9 {
                violations.push(Violation {
                    map_index: idx,
                    r,
                    energy: e,
                    bound: cap,
                });
            }
        }
        energies.push(per_map);
    }
    let candidate_indices: Vec<usize> = (0..seq.len())
        .filter(|i| violations.iter().all(|v| v.map_index != *i))
        .collect();

    let r_graph = r_grid.iter().cloned().fold(0.0, f64::max);
    let cauchy_tolerance = 2.0 / mesh as f64 + 0.02;

    // bubble detection runs on the surviving subsequence; sphere
    // augmentation only makes sense for line-valued maps
    let candidate_maps: Vec<RationalMap> = candidate_indices
        .iter()
        .map(|&i| seq[i].clone())
        .collect();
    let bubbles_detected = if !candidate_maps.is_empty()
        && candidate_maps.iter().all(|f| f.target_dim() == 1)
    {
        let eps = (r_graph / 8.0).min(0.05);
        detect_concentration(&candidate_maps, r_graph, eps)?
    } else {
        Vec::new()
    };

    let sphere_n = (mesh * 8).max(200);
    let build_graphs = |maps: &[RationalMap]| -> Result<Vec<GraphSample>> {
        maps.iter()
            .map(|f| {
                let mut g = graph_sample(f, r_graph, mesh)?;
                for c in &bubbles_detected {
                    g.augment_sphere(c.location(), sphere_n);
                }
                Ok(g)
            })
            .collect()
    };

    let graphs = build_graphs(&candidate_maps)?;
    let mut pairwise = pairwise_matrix(&graphs)?;
    let mut start = cauchy_suffix(&pairwise, cauchy_tolerance);
    let mut reparameterized = false;

    if start.is_none() && candidate_maps.len() >= 3 {
        // reparameterization fallback: align every candidate to the
        // last one over a small grid of disc automorphisms
        let grid: Vec<(f64, Complex64)> = {
            let mut g = Vec::new();
            for quarter in 0..4 {
                let alpha = std::f64::consts::FRAC_PI_2 * quarter as f64;
                for a in [
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.2, 0.0),
                    Complex64::new(-0.2, 0.0),
                    Complex64::new(0.0, 0.2),
                    Complex64::new(0.0, -0.2),
                ] {
                    g.push((alpha, a));
                }
            }
            g
        };
        let reference = graphs.last().unwrap();
        let mut aligned = Vec::with_capacity(candidate_maps.len());
        for (i, f) in candidate_maps.iter().enumerate() {
            if i + 1 == candidate_maps.len() {
                aligned.push(f.clone());
                continue;
            }
            let mut best = (f.clone(), hausdorff_distance(&graphs[i], reference)?);
            for &(alpha, a) in &grid {
                let g = f.compose_mobius(alpha, a)?;
                let mut gs = graph_sample(&g, r_graph, mesh)?;
                for c in &bubbles_detected {
                    gs.augment_sphere(c.location(), sphere_n);
                }
                let d = hausdorff_distance(&gs, reference)?;
                if d < best.1 {
                    best = (g, d);
                }
            }
            aligned.push(best.0);
        }
        let aligned_graphs = build_graphs(&aligned)?;
        let aligned_pairwise = pairwise_matrix(&aligned_graphs)?;
        if let Some(s) = cauchy_suffix(&aligned_pairwise, cauchy_tolerance) {
            pairwise = aligned_pairwise;
            start = Some(s);
            reparameterized = true;
        }
    }

    let (pass, subsequence_indices, witness) = match start {
        Some(s) => (
            true,
            candidate_indices[s..].to_vec(),
            None,
        ),
        None => {
            let n = pairwise.len();
            let witness = if n >= 2 {
                // offending pair among the final three candidates
                let lo = n.saturating_sub(3);
                let mut worst = Witness {
                    i: candidate_indices[n - 2],
                    j: candidate_indices[n - 1],
                    distance: pairwise[n - 2][n - 1],
                };
                for i in lo..n {
                    for j in i + 1..n {
                        if pairwise[i][j] > worst.distance {
                            worst = Witness {
                                i: candidate_indices[i],
                                j: candidate_indices[j],
                                distance: pairwise[i][j],
                            };
                        }
                    }
                }
                Some(worst)
            } else {
                None
            };
            (false, Vec::new(), witness)
        }
    };

    Ok(GromovVerdict {
        pass,
        energies,
        violations,
        candidate_indices,
        subsequence_indices,
        pairwise_distances: pairwise,
        bubbles_detected,
        cauchy_tolerance,
        reparameterized,
        witness,
    })
}
