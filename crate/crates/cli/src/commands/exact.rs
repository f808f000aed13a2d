//! Exact combinatorial identities: `mason`, `rh`, `logrh`.

use valdisc::parse_poly;
use valdisc::tautological::{log_rh_check, mason_check, rh_check};

use super::{boundary_from, map_from};
use crate::report::{to_value, CommandOutput, VERDICT_FAIL, VERDICT_PASS};
use crate::settings::{lib_err, CliResult, Settings};

/// Degree-versus-radical slack for a coprime pair (a, b) and their sum.
/// Always runs in exact coefficient mode.
pub fn mason(settings: &mut Settings) -> CliResult<CommandOutput> {
    settings.seed()?;
    let a = parse_poly(settings.require("a")?, true).map_err(lib_err)?;
    let b = parse_poly(settings.require("b")?, true).map_err(lib_err)?;
    let verdict = mason_check(&a, &b).map_err(lib_err)?;
    let ok = verdict.holds;
    let csv = format!(
        "max_degree,radical_degree,slack\n{},{},{}\n",
        verdict.max_degree, verdict.radical_degree, verdict.slack
    );
    Ok(CommandOutput {
        results: to_value(&verdict)?,
        verdict: if ok { VERDICT_PASS } else { VERDICT_FAIL },
        csv: Some(csv),
    })
}

/// Degree/ramification balance for one self-map of the line.
pub fn rh(settings: &mut Settings) -> CliResult<CommandOutput> {
    settings.seed()?;
    let f = map_from(settings, "map")?;
    let verdict = rh_check(&f).map_err(lib_err)?;
    let ok = verdict.holds;
    let csv = format!(
        "degree,ram_total,lhs,rhs,holds\n{},{},{},{},{}\n",
        verdict.degree, verdict.ram_total, verdict.lhs, verdict.rhs, verdict.holds
    );
    Ok(CommandOutput {
        results: to_value(&verdict)?,
        verdict: if ok { VERDICT_PASS } else { VERDICT_FAIL },
        csv: Some(csv),
    })
}

/// Boundary-reduced degree/ramification balance for a self-map against
/// a finite point set (default `0,1,inf`).
pub fn logrh(settings: &mut Settings) -> CliResult<CommandOutput> {
    settings.seed()?;
    let f = map_from(settings, "map")?;
    let boundary = boundary_from(settings)?;
    let verdict = log_rh_check(&f, &boundary).map_err(lib_err)?;
    let ok = verdict.holds;
    let csv = format!(
        "degree,n_reduced,ram_away,lhs,rhs,holds\n{},{},{},{},{},{}\n",
        verdict.degree,
        verdict.n_reduced,
        verdict.ram_away,
        verdict.lhs,
        verdict.rhs,
        verdict.holds
    );
    Ok(CommandOutput {
        results: to_value(&verdict)?,
        verdict: if ok { VERDICT_PASS } else { VERDICT_FAIL },
        csv: Some(csv),
    })
}
