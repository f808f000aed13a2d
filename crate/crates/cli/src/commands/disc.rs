//! Quadrature-driven disc identities: `jensen`, `fmt`, and `taut`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::json;

use valdisc::funcspace::parse_complex_token;
use valdisc::greenjensen::{boundary_mean, jensen_residual, nabla_integral, BivariatePoly};
use valdisc::nevanlinna::characteristic_report;
use valdisc::tautological::{taut_identity_check, taut_inequality_experiment};
use valdisc::RadialDensity;

use super::{boundary_from, divisor_from, map_from, quad, quad_for};
use crate::report::{to_value, CommandOutput, VERDICT_FAIL, VERDICT_PASS};
use crate::seq::parse_seq;
use crate::settings::{input_err, lib_err, CliResult, Settings};

/// Check the mean-value identity for an explicitly declared potential:
/// atoms (`--atom "a"` or `--atom "a:mass"`, `;`-separated in a config
/// file) plus an optional real bivariate polynomial (`--bipoly`, rows
/// of x-power separated by `;`, y-power coefficients by `,`).
pub fn jensen(settings: &mut Settings) -> CliResult<CommandOutput> {
    let tol = settings.tolerance(1e-8)?;
    settings.seed()?;
    let radii = settings.radius_or_grid("0.3,0.6,0.9")?;

    let mut atoms: Vec<(Complex64, f64)> = Vec::new();
    if let Some(raw) = settings.get("atom") {
        for entry in raw.split(';') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let (tok, mass) = match entry.rsplit_once(':') {
                Some((t, m)) => {
                    let mass: f64 = match m.trim().parse() {
                        Ok(v) => v,
                        Err(_) => {
                            return input_err(format!("--atom: bad mass in {entry:?}"))
                        }
                    };
                    (t, mass)
                }
                None => (entry, 1.0),
            };
            if !(mass.is_finite() && mass != 0.0) {
                return input_err(format!("--atom: mass must be finite and nonzero in {entry:?}"));
            }
            let (a, _) = parse_complex_token(tok).map_err(lib_err)?;
            atoms.push((a, mass));
        }
    }
    let poly = match settings.get("bipoly") {
        Some(raw) => Some(parse_bipoly(raw)?),
        None => None,
    };
    if atoms.is_empty() && poly.is_none() {
        return input_err("jensen needs at least one --atom or a --bipoly potential");
    }

    let phi = {
        let atoms = atoms.clone();
        let poly = poly.clone();
        move |z: Complex64| {
            let mut v = 0.0;
            for (a, m) in &atoms {
                v += m * (z - a).norm().ln();
            }
            if let Some(p) = &poly {
                v += p.eval_z(z);
            }
            v
        }
    };
    let density = {
        let lap = poly.as_ref().map(BivariatePoly::laplacian);
        RadialDensity::new(
            move |z| lap.as_ref().map_or(0.0, |l| l.eval_z(z) / (2.0 * PI)),
            atoms,
        )
        .map_err(lib_err)?
    };

    let q = quad_for(tol);
    let mut rows = Vec::new();
    let mut csv = String::from("r,nabla,boundary_mean,origin_value,residual\n");
    let mut ok = true;
    for &r in &radii {
        let residual = jensen_residual(&phi, &density, r, &q).map_err(lib_err)?;
        let nabla = nabla_integral(&density, r, &q).map_err(lib_err)?;
        let mean = boundary_mean(&phi, r, &q).map_err(lib_err)?;
        let origin = phi(Complex64::new(0.0, 0.0));
        ok &= residual.abs() <= tol;
        rows.push(json!({
            "r": r,
            "nabla": nabla,
            "boundary_mean": mean,
            "origin_value": origin,
            "residual": residual,
        }));
        csv.push_str(&format!(
            "{r},{nabla:.12e},{mean:.12e},{origin:.12e},{residual:.12e}\n"
        ));
    }
    Ok(CommandOutput {
        results: json!({ "rows": rows, "tol": tol }),
        verdict: if ok { VERDICT_PASS } else { VERDICT_FAIL },
        csv: Some(csv),
    })
}

fn parse_bipoly(raw: &str) -> CliResult<BivariatePoly> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for row in raw.split(';') {
        let mut out = Vec::new();
        for c in row.split(',') {
            let c = c.trim();
            if c.is_empty() {
                continue;
            }
            match c.parse::<f64>() {
                Ok(v) if v.is_finite() => out.push(v),
                _ => return input_err(format!("--bipoly: bad coefficient {c:?}")),
            }
        }
        rows.push(out);
    }
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    if width == 0 {
        return input_err("--bipoly: no coefficients");
    }
    for row in &mut rows {
        row.resize(width, 0.0);
    }
    Ok(BivariatePoly::new(rows))
}

/// Growth identity for one (map, divisor) pair across radii: the
/// geometric and arithmetic sides must agree to tolerance relative to
/// the growth scale.
pub fn fmt(settings: &mut Settings) -> CliResult<CommandOutput> {
    let tol = settings.tolerance(1e-6)?;
    settings.seed()?;
    let f = map_from(settings, "map")?;
    let d = divisor_from(settings, "divisor")?;
    let radii = settings.radius_or_grid("0.3,0.5,0.7,0.9")?;
    let q = quad_for(tol);
    let report = characteristic_report(&f, &d, &radii, &q).map_err(lib_err)?;
    let ok = report
        .rows
        .iter()
        .all(|row| row.residual.abs() <= tol * (1.0 + row.t_geom.abs()));
    Ok(CommandOutput {
        results: to_value(&report)?,
        verdict: if ok { VERDICT_PASS } else { VERDICT_FAIL },
        csv: Some(report.to_csv()),
    })
}

/// With `--map`: the log-curvature disc identity at one radius. With
/// `--seq`: the normalized trend experiment across a family of maps.
pub fn taut(settings: &mut Settings) -> CliResult<CommandOutput> {
    match (settings.get("map").is_some(), settings.get("seq").is_some()) {
        (true, false) => taut_identity(settings),
        (false, true) => taut_trend(settings),
        _ => input_err("taut needs exactly one of --map or --seq"),
    }
}

fn taut_identity(settings: &mut Settings) -> CliResult<CommandOutput> {
    let tol = settings.tolerance(1e-5)?;
    settings.seed()?;
    let f = map_from(settings, "map")?;
    let boundary = boundary_from(settings)?;
    let r = settings.radius(Some(0.9))?;
    let q = quad_for(tol);
    let report = taut_identity_check(&f, &boundary, r, &q).map_err(lib_err)?;
    let ok = report.residual.abs() <= tol;
    let csv = format!(
        "r,lhs,rhs,residual,boundary_term,origin_term,truncated_counting,ram_away_sum\n\
         {},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
        report.r,
        report.lhs,
        report.rhs,
        report.residual,
        report.boundary_term,
        report.origin_term,
        report.truncated_counting,
        report.ram_away_sum,
    );
    Ok(CommandOutput {
        results: to_value(&report)?,
        verdict: if ok { VERDICT_PASS } else { VERDICT_FAIL },
        csv: Some(csv),
    })
}

fn taut_trend(settings: &mut Settings) -> CliResult<CommandOutput> {
    let tol = settings.tolerance(1e-2)?;
    settings.seed()?;
    let seq = parse_seq(settings.require("seq")?)?;
    let boundary = boundary_from(settings)?;
    let radii = settings.radius_or_grid("0.6,0.75")?;
    // internal tolerance fixed: coarse verdict tolerances must not
    // loosen the quadrature itself
    let q = quad(1e-7);
    let report =
        taut_inequality_experiment(&seq.maps, &boundary, &radii, &q).map_err(lib_err)?;
    let ok = report.rows.iter().all(|row| row.tail_max <= tol);
    let mut csv = String::from("r,tail_max,flagged\n");
    for row in &report.rows {
        csv.push_str(&format!("{},{:.12e},{}\n", row.r, row.tail_max, row.flagged));
    }
    Ok(CommandOutput {
        results: json!({
            "indices": seq.indices,
            "report": to_value(&report)?,
            "tol": tol,
        }),
        verdict: if ok { VERDICT_PASS } else { VERDICT_FAIL },
        csv: Some(csv),
    })
}
