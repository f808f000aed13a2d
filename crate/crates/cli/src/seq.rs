//! Parser for the `--seq` map-family grammar.
//!
//! A sequence spec is `family:[pattern],n=RANGE` where RANGE is either
//! an inclusive span `lo..hi` or an explicit list `a,b,c`. Supported
//! families (the index variable is always `n`):
//!
//! * `geom:[1:(Cz)^n]` or `geom:[1:(Cz)^n+S]` — second component
//!   `(C z)^n + S` for a complex coefficient `C` and shift `S`.
//! * `lin:[1:nz]` — second component `n z`.
//! * `shift:[1:z+1/n]` — second component `z + 1/n`.

use num_complex::Complex64;

use valdisc::funcspace::parse_complex_token;
use valdisc::{Poly, RationalMap};

use crate::settings::{input_err, lib_err, CliResult};

/// Hard cap on the number of generated maps per run.
const MAX_SEQ_LEN: usize = 5000;

#[derive(Debug)]
pub struct SeqSpec {
    /// Index value for each generated map.
    pub indices: Vec<u64>,
    pub maps: Vec<RationalMap>,
}

pub fn parse_seq(spec: &str) -> CliResult<SeqSpec> {
    let trimmed = spec.trim();
    let Some((family, rest)) = trimmed.split_once(':') else {
        return input_err(format!(
            "--seq: expected family:[pattern],n=range, got {trimmed:?}"
        ));
    };
    let Some(body) = rest.strip_prefix('[') else {
        return input_err("--seq: pattern must start with '['".to_string());
    };
    let Some((pattern, range)) = body.split_once("],n=") else {
        return input_err("--seq: expected '],n=' between pattern and range".to_string());
    };
    let indices = parse_range(range)?;

    let builder: Box<dyn Fn(u64) -> CliResult<RationalMap>> = match family.trim() {
        "geom" => {
            let (coeff, shift) = parse_geom_pattern(pattern)?;
            Box::new(move |n| {
                let mut coeffs = vec![Complex64::new(0.0, 0.0); n as usize + 1];
                coeffs[0] = shift;
                coeffs[n as usize] = coeff.powu(n as u32);
                make_map(coeffs)
            })
        }
        "lin" => {
            if pattern.trim() != "1:nz" {
                return input_err(format!("--seq: lin family expects pattern 1:nz, got {pattern:?}"));
            }
            Box::new(|n| {
                make_map(vec![
                    Complex64::new(0.0, 0.0),
                    Complex64::new(n as f64, 0.0),
                ])
            })
        }
        "shift" => {
            if pattern.trim() != "1:z+1/n" {
                return input_err(format!(
                    "--seq: shift family expects pattern 1:z+1/n, got {pattern:?}"
                ));
            }
            Box::new(|n| {
                if n == 0 {
                    return input_err("--seq: shift family needs n >= 1".to_string());
                }
                make_map(vec![
                    Complex64::new(1.0 / n as f64, 0.0),
                    Complex64::new(1.0, 0.0),
                ])
            })
        }
        other => {
            return input_err(format!(
                "--seq: unknown family {other:?} (known: geom, lin, shift)"
            ))
        }
    };

    let mut maps = Vec::with_capacity(indices.len());
    for &n in &indices {
        maps.push(builder(n)?);
    }
    Ok(SeqSpec { indices, maps })
}

/// The geom pattern `1:(Cz)^n` with optional trailing `+S` / `-S`.
fn parse_geom_pattern(pattern: &str) -> CliResult<(Complex64, Complex64)> {
    let p = pattern.trim();
    let Some(body) = p.strip_prefix("1:(") else {
        return input_err(format!("--seq: geom pattern must start with '1:(', got {p:?}"));
    };
    let Some((coeff_str, tail)) = body.split_once("z)^n") else {
        return input_err(format!("--seq: geom pattern needs 'z)^n', got {p:?}"));
    };
    let coeff = parse_complex_token(coeff_str).map_err(lib_err)?.0;
    let shift = if tail.is_empty() {
        Complex64::new(0.0, 0.0)
    } else if let Some(s) = tail.strip_prefix('+') {
        parse_complex_token(s).map_err(lib_err)?.0
    } else if let Some(s) = tail.strip_prefix('-') {
        -parse_complex_token(s).map_err(lib_err)?.0
    } else {
        return input_err(format!("--seq: bad geom shift suffix {tail:?}"));
    };
    if coeff.norm() == 0.0 {
        return input_err("--seq: geom coefficient must be nonzero".to_string());
    }
    Ok((coeff, shift))
}

fn parse_range(range: &str) -> CliResult<Vec<u64>> {
    let r = range.trim();
    let indices: Vec<u64> = if let Some((lo, hi)) = r.split_once("..") {
        let lo: u64 = parse_index(lo)?;
        let hi: u64 = parse_index(hi)?;
        if hi < lo {
            return input_err(format!("--seq: empty range {lo}..{hi}"));
        }
        if (hi - lo) as usize + 1 > MAX_SEQ_LEN {
            return input_err(format!("--seq: range longer than {MAX_SEQ_LEN}"));
        }
        (lo..=hi).collect()
    } else {
        let list = r
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(parse_index)
            .collect::<CliResult<Vec<u64>>>()?;
        if list.len() > MAX_SEQ_LEN {
            return input_err(format!("--seq: list longer than {MAX_SEQ_LEN}"));
        }
        list
    };
    if indices.is_empty() {
        return input_err("--seq: empty index range".to_string());
    }
    Ok(indices)
}

fn parse_index(s: &str) -> CliResult<u64> {
    match s.trim().parse::<u64>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => input_err(format!("--seq: index {s:?} must be an integer >= 1")),
    }
}

fn make_map(coeffs: Vec<Complex64>) -> CliResult<RationalMap> {
    if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return input_err(
            "--seq: generated coefficients overflow f64; shrink the index range".to_string(),
        );
    }
    let comps = vec![Poly::new(vec![Complex64::new(1.0, 0.0)]), Poly::new(coeffs)];
    RationalMap::new(comps).map_err(lib_err)
}
