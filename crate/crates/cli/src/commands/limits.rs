//! Sequence-of-maps experiments: `bubble`, `gromov`, `currents`.

use serde_json::json;

use valdisc::bubbles::{detect_concentration, gromov_harness, nabla_bubble};
use valdisc::currents::{exactness_decay, limit_points, normalized_pairings, positivity_check};
use valdisc::funcspace::parse_complex_token;
use valdisc::nevanlinna::characteristic_geometric;
use valdisc::{
    parse_map, BubbleTree, DiscWithBubbles, MetricizedDivisor, TestFormBasis,
};

use super::{divisor_from, quad};
use crate::report::{to_value, CommandOutput, VERDICT_FAIL, VERDICT_PASS, VERDICT_REPORT};
use crate::seq::parse_seq;
use crate::settings::{input_err, lib_err, CliResult, Settings};

/// With `--map`: the Green-weighted energy of a disc carrying bubble
/// trees (`--bubble "attach"` or `--bubble "attach:k"` for a k-component
/// tree, `;`-separated in a config file). With `--seq`: scan the family
/// for curvature concentration points inside radius `--r`.
pub fn bubble(settings: &mut Settings) -> CliResult<CommandOutput> {
    match (settings.get("map").is_some(), settings.get("seq").is_some()) {
        (true, false) => bubble_model(settings),
        (false, true) => bubble_detect(settings),
        _ => input_err("bubble needs exactly one of --map or --seq"),
    }
}

fn bubble_model(settings: &mut Settings) -> CliResult<CommandOutput> {
    let tol = settings.tolerance(1e-9)?;
    settings.seed()?;
    let base = parse_map(settings.require("map")?, settings.get_bool("exact")?)
        .map_err(lib_err)?;
    let d = divisor_from(settings, "divisor")?;
    let r = settings.radius(Some(0.9))?;
    let q = quad(tol.clamp(1e-12, 1e-9));

    let mut trees = Vec::new();
    if let Some(raw) = settings.get("bubble") {
        for entry in raw.split(';') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let (tok, count) = match entry.rsplit_once(':') {
                Some((t, c)) => {
                    let count: usize = match c.trim().parse() {
                        Ok(v) if v >= 1 => v,
                        _ => {
                            return input_err(format!(
                                "--bubble: component count in {entry:?} must be >= 1"
                            ))
                        }
                    };
                    (t, count)
                }
                None => (entry, 1),
            };
            let (attach, _) = parse_complex_token(tok).map_err(lib_err)?;
            let comps = (0..count)
                .map(|_| identity_line_map())
                .collect::<CliResult<Vec<_>>>()?;
            let adjacency = (1..count).map(|i| (i - 1, i)).collect();
            trees.push(BubbleTree::new(attach, comps, adjacency, d.degree()).map_err(lib_err)?);
        }
    }
    if trees.is_empty() {
        return input_err("bubble --map mode needs at least one --bubble entry");
    }

    let base_term = characteristic_geometric(&base, &d, r, &q).map_err(lib_err)?;
    let mut rows = Vec::new();
    for tree in &trees {
        let a = tree.attach();
        let inside = a.norm() < r;
        let weight = if inside { (r / a.norm()).ln() } else { 0.0 };
        rows.push(json!({
            "attach_re": a.re,
            "attach_im": a.im,
            "energy": tree.total_energy(),
            "green_weight": weight,
            "inside": inside,
        }));
    }
    let model = DiscWithBubbles::new(base, trees).map_err(lib_err)?;
    let total = nabla_bubble(&model, &d, r, &q).map_err(lib_err)?;
    let csv = format!("r,total,base\n{r},{total:.12e},{base_term:.12e}\n");
    Ok(CommandOutput {
        results: json!({
            "r": r,
            "total": total,
            "base_term": base_term,
            "bubbles": rows,
        }),
        verdict: VERDICT_REPORT,
        csv: Some(csv),
    })
}

fn identity_line_map() -> CliResult<valdisc::RationalMap> {
    parse_map("1 | 0,1", false).map_err(lib_err)
}

fn bubble_detect(settings: &mut Settings) -> CliResult<CommandOutput> {
    settings.seed()?;
    let seq = parse_seq(settings.require("seq")?)?;
    let r = settings.radius(Some(0.9))?;
    settings.set_default("eps", crate::settings::format_float(r / 8.0));
    let eps = settings.get_f64("eps")?.unwrap_or(r / 8.0);
    let found = detect_concentration(&seq.maps, r, eps).map_err(lib_err)?;
    let mut csv = String::from("re,im,mass\n");
    for c in &found {
        csv.push_str(&format!("{:.12e},{:.12e},{:.12e}\n", c.re, c.im, c.mass));
    }
    Ok(CommandOutput {
        results: json!({
            "indices": seq.indices,
            "r": r,
            "eps": eps,
            "concentrations": to_value(&found)?,
        }),
        verdict: VERDICT_REPORT,
        csv: Some(csv),
    })
}

/// Compactness harness for a family of maps: bounded-energy check,
/// concentration scan, bubble-augmented graph comparison, and a Cauchy
/// subsequence witness.
pub fn gromov(settings: &mut Settings) -> CliResult<CommandOutput> {
    settings.seed()?;
    let seq = parse_seq(settings.require("seq")?)?;
    let radii = settings.radius_or_grid("0.5,0.7,0.9")?;
    settings.set_default("mesh", "64");
    let mesh = settings.get_usize("mesh")?.unwrap_or(64);
    settings.set_default("bound", "inf");
    let bound = match settings.require("bound")? {
        "inf" => f64::INFINITY,
        raw => match raw.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => v,
            _ => return input_err(format!("--bound: expected a positive number or 'inf', got {raw:?}")),
        },
    };
    let verdict = gromov_harness(&seq.maps, &|_r| bound, &radii, mesh).map_err(lib_err)?;
    let mut csv = String::from("map_index,r,energy\n");
    for (i, per_map) in verdict.energies.iter().enumerate() {
        for &(r, e) in per_map {
            csv.push_str(&format!("{i},{r},{e:.12e}\n"));
        }
    }
    let pass = verdict.pass;
    Ok(CommandOutput {
        results: json!({
            "indices": seq.indices,
            "verdict": to_value(&verdict)?,
        }),
        verdict: if pass { VERDICT_PASS } else { VERDICT_FAIL },
        csv: Some(csv),
    })
}

/// Normalized-current probes for a family of maps: pairings against the
/// standard test basis, tail clustering, exact-form decay, and
/// positivity margins against supplied divisors (`|`-separated,
/// default `1; (0,1)=1`).
pub fn currents(settings: &mut Settings) -> CliResult<CommandOutput> {
    let tol = settings.tolerance(1e-2)?;
    settings.seed()?;
    let seq = parse_seq(settings.require("seq")?)?;
    let radii = settings.radius_or_grid("0.6,0.75")?;
    settings.set_default("cluster-tol", "0.05");
    let cluster_tol = settings.get_f64("cluster-tol")?.unwrap_or(0.05);
    // internal tolerance fixed: coarse verdict tolerances must not
    // loosen the quadrature itself
    let q = quad(1e-7);
    let basis = TestFormBasis::standard();

    settings.set_default("divisor", "1; (0,1)=1");
    let divisors = settings
        .require("divisor")?
        .split('|')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let s = s.trim();
            MetricizedDivisor::parse(s)
                .map(|d| d.with_name(s))
                .map_err(lib_err)
        })
        .collect::<CliResult<Vec<_>>>()?;
    if divisors.is_empty() {
        return input_err("currents needs at least one --divisor");
    }

    let mut samples = Vec::new();
    let mut self_pairing_exact = true;
    for (i, f) in seq.maps.iter().enumerate() {
        for &r in &radii {
            let s = normalized_pairings(f, seq.indices[i] as usize, r, &basis, &q)
                .map_err(lib_err)?;
            self_pairing_exact &= s.pairings.first().copied() == Some(1.0);
            samples.push(s);
        }
    }

    let clusters = if seq.maps.len() >= 8 {
        Some(limit_points(&samples, cluster_tol).map_err(lib_err)?)
    } else {
        None
    };

    let ample = basis.normalizer().clone();
    let phi = &basis.exact_forms()[0];
    let decay = exactness_decay(&seq.maps, &ample, phi, &radii, &q).map_err(lib_err)?;
    let positivity = positivity_check(&seq.maps, &ample, &divisors, &radii, &q).map_err(lib_err)?;

    let margins_ok = positivity.iter().all(|p| p.tail_min_margin >= -tol);
    let ok = self_pairing_exact && decay.all_compliant && margins_ok;

    let mut csv = decay.to_csv();
    for p in &positivity {
        csv.push('\n');
        csv.push_str(&p.to_csv());
    }
    Ok(CommandOutput {
        results: json!({
            "indices": seq.indices,
            "labels": basis.labels(),
            "samples": to_value(&samples)?,
            "self_pairing_exact": self_pairing_exact,
            "limit_clusters": clusters.map(|c| to_value(&c)).transpose()?,
            "exactness": to_value(&decay)?,
            "positivity": to_value(&positivity)?,
            "tol": tol,
        }),
        verdict: if ok { VERDICT_PASS } else { VERDICT_FAIL },
        csv: Some(csv),
    })
}
