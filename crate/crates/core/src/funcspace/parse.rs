//! Text grammar for coefficients, polynomials, and maps.
//!
//! A polynomial is a comma-separated list of coefficients in ascending
//! order of degree. A coefficient is one of:
//!   - a real literal: `2`, `-0.5`, `1e-3`
//!   - a complex literal: `1+2i`, `-0.5-0.25i`, `3i`, `-i`
//!   - an exact rational form: `1/2`, `-3/4+5/7*i`
//! A map is a list of polynomials joined by `|`, one per homogeneous
//! component. Integer and rational literals additionally populate the
//! exact view of the parsed polynomial; decimal literals do not.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Result, VdError};

use super::{ExactPoly, GaussRat, Poly, RationalMap};

fn parse_err(tok: &str, why: &str) -> VdError {
    VdError::Parse(format!("bad coefficient '{tok}': {why}"))
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// One real atom: integer, `p/q` rational, or decimal/scientific literal.
/// Returns the floating value and an exact value when representable.
fn parse_real_atom(tok: &str, orig: &str) -> Result<(f64, Option<BigRational>)> {
    if tok.is_empty() {
        return Err(parse_err(orig, "empty numeric part"));
    }
    if let Some(slash) = tok.find('/') {
        let (num_s, den_s) = (&tok[..slash], &tok[slash + 1..]);
        let num: BigInt = num_s
            .parse()
            .map_err(|_| parse_err(orig, "numerator must be an integer"))?;
        let den: BigInt = den_s
            .parse()
            .map_err(|_| parse_err(orig, "denominator must be an integer"))?;
        if den.is_zero() {
            return Err(parse_err(orig, "zero denominator"));
        }
        let r = BigRational::new(num, den);
        let f = rational_to_f64(&r);
        return Ok((f, Some(r)));
    }
    if let Ok(n) = tok.parse::<BigInt>() {
        let r = BigRational::from_integer(n);
        let f = rational_to_f64(&r);
        return Ok((f, Some(r)));
    }
    let f: f64 = tok
        .parse()
        .map_err(|_| parse_err(orig, "not a number"))?;
    if !f.is_finite() {
        return Err(parse_err(orig, "not finite"));
    }
    Ok((f, None))
}

/// Index of the `+`/`-` separating real and imaginary parts, if any.
/// Signs at position 0 or directly after an exponent marker do not split.
fn split_index(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    for i in (1..s.len()).rev() {
        let c = bytes[i];
        if c == b'+' || c == b'-' {
            let prev = bytes[i - 1];
            if prev == b'e' || prev == b'E' {
                continue;
            }
            return Some(i);
        }
    }
    None
}

/// Parse one coefficient token. Returns the floating value together with an
/// exact Gaussian-rational value when every numeric atom in the token was an
/// integer or `p/q` fraction.
pub fn parse_complex_token(raw: &str) -> Result<(Complex64, Option<GaussRat>)> {
    let tok: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    if tok.is_empty() {
        return Err(VdError::Parse("empty coefficient".into()));
    }
    let (real_part, imag_part): (Option<&str>, Option<&str>) = if tok.ends_with('i') {
        let body = &tok[..tok.len() - 1];
        match split_index(body) {
            Some(i) => (Some(&body[..i]), Some(&body[i..])),
            None => (None, Some(body)),
        }
    } else {
        (Some(tok.as_str()), None)
    };

    let (re_f, re_exact) = match real_part {
        Some(s) => parse_real_atom(s, raw)?,
        None => (0.0, Some(BigRational::zero())),
    };
    let (im_f, im_exact) = match imag_part {
        Some(s) => {
            let s = s.strip_suffix('*').unwrap_or(s);
            match s {
                "" | "+" => (1.0, Some(BigRational::one())),
                "-" => (-1.0, Some(-BigRational::one())),
                _ => parse_real_atom(s, raw)?,
            }
        }
        None => (0.0, Some(BigRational::zero())),
    };

    let exact = match (re_exact, im_exact) {
        (Some(re), Some(im)) => Some(GaussRat::new(re, im)),
        _ => None,
    };
    Ok((Complex64::new(re_f, im_f), exact))
}

/// Parse an ascending comma-separated coefficient list.
///
/// With `exact_required`, every coefficient must be an integer or rational
/// literal so the polynomial carries an exact view.
pub fn parse_poly(s: &str, exact_required: bool) -> Result<Poly> {
    let toks: Vec<&str> = s.split(',').map(str::trim).collect();
    if toks.iter().any(|t| t.is_empty()) {
        return Err(VdError::Parse(format!(
            "empty coefficient slot in '{s}'"
        )));
    }
    let mut floats = Vec::with_capacity(toks.len());
    let mut exacts: Option<Vec<GaussRat>> = Some(Vec::with_capacity(toks.len()));
    for t in &toks {
        let (f, e) = parse_complex_token(t)?;
        floats.push(f);
        match (&mut exacts, e) {
            (Some(v), Some(g)) => v.push(g),
            (slot, _) => {
                if exact_required {
                    return Err(VdError::Parse(format!(
                        "coefficient '{t}' is not exact; use integers or p/q fractions"
                    )));
                }
                *slot = None;
            }
        }
    }
    Ok(match exacts {
        Some(v) => Poly::from_exact(ExactPoly::new(v)),
        None => Poly::new(floats),
    })
}

/// Parse `poly | poly | ...` into a projective map.
pub fn parse_map(s: &str, exact_required: bool) -> Result<RationalMap> {
    let comps = s
        .split('|')
        .map(|part| parse_poly(part, exact_required))
        .collect::<Result<Vec<_>>>()?;
    RationalMap::new(comps)
}
