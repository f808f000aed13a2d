use thiserror::Error;

/// Unified error type for every operation in the crate.
///
/// Variants are deliberately specific: callers (in particular the CLI) route
/// them to exit codes, and the guard tests assert on exact variants.
#[derive(Debug, Error)]
pub enum VdError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("root within the exclusion band of the circle |z| = {r}")]
    RootOnBoundary { r: f64 },

    #[error("exact (Gaussian-rational) coefficients required for this operation")]
    ExactModeRequired,

    #[error("quadrature did not stabilize after {levels} refinement levels (last change {last_change:.3e})")]
    NoConvergence { levels: usize, last_change: f64 },

    #[error("atom at |z| = {loc_abs} lies within the exclusion band of the circle |z| = {r}")]
    AtomOnBoundary { loc_abs: f64, r: f64 },

    #[error("map meets the divisor within the exclusion band on |z| = {r}")]
    BoundaryHitsDivisor { r: f64 },

    #[error("f(0) lies on the divisor")]
    OriginOnDivisor,

    #[error("all homogeneous components vanish at the sample point")]
    IndeterminatePoint,

    #[error("empty graph sample")]
    EmptySample,

    #[error("bubble attaching point at |z| = {loc_abs} lies on the sampling circle |z| = {r}")]
    AttachOnBoundary { loc_abs: f64, r: f64 },

    #[error("map is constant")]
    ConstantMap,

    #[error("polynomials share a nonconstant factor")]
    NotCoprime,

    #[error("normalizer {value:.3e} is below tolerance")]
    DegenerateNormalizer { value: f64 },

    #[error("need at least {need} entries, got {got}")]
    InsufficientSamples { need: usize, got: usize },

    #[error("base point f(0) exceeds the admissible Weil distance {bound} from the divisor")]
    BasePointOnDivisor { bound: f64 },

    #[error("normalizers do not diverge along the sequence")]
    NormalizerNotDiverging,

    #[error("map degrees do not grow along the sequence")]
    DegreesNotGrowing,

    #[error("f is ramified at the origin")]
    RamifiedAtOrigin,

    #[error("f(0) lies on the boundary point set")]
    OriginOnBoundarySet,

    #[error("clustered root count {clustered} disagrees with winding number {winding}")]
    RootCountMismatch { clustered: i64, winding: i64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, VdError>;
