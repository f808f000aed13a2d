//! One runner per subcommand. Each runner resolves its settings
//! (recording effective defaults), executes the library operation, and
//! returns the results slot, the verdict, and an optional CSV table.

pub mod disc;
pub mod exact;
pub mod limits;

use valdisc::{
    parse_map, BoundarySet, MetricizedDivisor, QuadratureSpec, RationalMap,
};

use crate::settings::{lib_err, CliResult, Settings};

/// Quadrature spec with the given internal tolerance and default
/// resolution parameters.
pub fn quad(inner_tol: f64) -> QuadratureSpec {
    QuadratureSpec {
        tol: inner_tol,
        ..QuadratureSpec::default()
    }
}

/// Internal quadrature tolerance one decade below the verdict
/// tolerance, kept within [1e-12, 1e-9].
pub fn quad_for(verdict_tol: f64) -> QuadratureSpec {
    quad((verdict_tol * 0.1).clamp(1e-12, 1e-9))
}

pub fn map_from(settings: &Settings, key: &str) -> CliResult<RationalMap> {
    let raw = settings.require(key)?;
    let exact_required = settings.get_bool("exact")?;
    parse_map(raw, exact_required).map_err(lib_err)
}

pub fn divisor_from(settings: &Settings, key: &str) -> CliResult<MetricizedDivisor> {
    let raw = settings.require(key)?;
    MetricizedDivisor::parse(raw).map_err(lib_err)
}

pub fn boundary_from(settings: &mut Settings) -> CliResult<BoundarySet> {
    settings.set_default("boundary", "0,1,inf");
    BoundarySet::parse(settings.require("boundary")?).map_err(lib_err)
}
