//! Centralized numeric tolerances and quadrature defaults.
//!
//! Every magic constant that decides "same point", "on the boundary", or
//! "converged" lives here so the contracts stay consistent across modules.

/// Roots closer than `ROOT_MERGE_RADIUS * (1 + |root|)` merge into one
/// multiplicity cluster. Companion eigenvalues of an m-fold root scatter at
/// O(eps^(1/m)); the multiplicity-aware polish in `funcspace::roots` pulls
/// them back inside this radius before clustering.
pub const ROOT_MERGE_RADIUS: f64 = 1e-7;

/// Operations near a circle |z| = r refuse atoms/roots within
/// `BOUNDARY_BAND * r` of the circle. Callers are expected to perturb the
/// radius instead of expecting interior/boundary dispatch.
pub const BOUNDARY_BAND: f64 = 1e-9;

/// Relative distance at which a boundary sample counts as "on the divisor".
pub const DIVISOR_BAND: f64 = 1e-9;

/// Jensen-residual contract: |residual| <= RESIDUAL_SLACK * tol * (1 + |boundary mean|).
pub const RESIDUAL_SLACK: f64 = 10.0;

/// First-main-theorem residual contract: the two routes to the characteristic
/// agree within `FMT_SLACK * tol * (1 + |T_geom|)`. Looser than the Jensen
/// slack because two independent quadratures plus clustered root locations
/// enter the comparison.
pub const FMT_SLACK: f64 = 1e3;

/// Absolute residual bound for the four-term log-derivative identity check.
pub const TAUT_RESIDUAL_TOL: f64 = 1e-5;

/// Default relative tolerance for iterated refinement.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default angular resolution (periodic trapezoid); power of two, >= 16.
pub const DEFAULT_N_THETA: usize = 256;

/// Default radial resolution (Gauss-Legendre).
pub const DEFAULT_N_RADIAL: usize = 64;

/// Default number of resolution-doubling refinement rounds before giving up.
pub const DEFAULT_MAX_REFINE: usize = 6;

/// Chordal distance under which a ramification value counts as lying in the
/// boundary point set (used when excluding ramification over D).
pub const ON_BOUNDARY_SET_CHORDAL: f64 = 1e-6;

/// Convention tag embedded in every machine-readable report: the operator
/// behind all residue bookkeeping is (Laplacian / 2 pi) dA plus declared
/// atoms, normalized so that the unit atom at a has disc integral log(r/|a|).
pub const CONVENTION: &str = "ddc=laplacian/2pi";
