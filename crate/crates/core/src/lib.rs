//! Numerical laboratory for disc potential theory on the complex disc:
//! boundary means and weighted area integrals of subharmonic densities,
//! projective-space pullback geometry, growth/proximity/counting
//! bookkeeping for holomorphic maps, exact ramification identities, and
//! concentration analysis for sequences of maps.
//!
//! Convention used throughout: the curvature operator applied to a
//! potential is (Laplacian / 2 pi) times area measure plus explicitly
//! declared atoms, so the potential log|z - a| has exactly one unit atom
//! at a. Every report module tags its output with
//! [`tol::CONVENTION`] so downstream consumers can verify agreement.

pub mod bubbles;
pub mod currents;
pub mod error;
pub mod funcspace;
pub mod greenjensen;
pub mod nevanlinna;
pub mod projective;
pub mod tautological;
pub mod tol;

pub use bubbles::{BubbleTree, DiscWithBubbles, GraphSample, GromovVerdict};
pub use currents::{CurrentSample, ExactForm, TestFormBasis};
pub use error::{Result, VdError};
pub use funcspace::{
    parse_map, parse_poly, ExactPoly, GaussRat, Poly, RationalMap, RootMultiset,
};
pub use greenjensen::{QuadratureSpec, RadialDensity};
pub use nevanlinna::{CharacteristicReport, CharacteristicRow};
pub use projective::{MetricizedDivisor, ProjPoint};
pub use tautological::{BoundaryPoint, BoundarySet, LogMetric};
