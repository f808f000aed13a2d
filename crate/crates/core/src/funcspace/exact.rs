//! Exact arithmetic over Gaussian rationals (complex numbers with rational
//! real and imaginary parts) and the polynomial operations that must be
//! integer-exact: gcd, radical degree, vanishing orders, chart reversal.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

use crate::error::{Result, VdError};

/// A complex number with rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn zero() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        GaussRat::new(BigRational::one(), BigRational::zero())
    }

    pub fn from_i64(n: i64) -> Self {
        GaussRat::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(VdError::Parse("rational with zero denominator".into()));
        }
        Ok(GaussRat::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        ))
    }

    pub fn from_parts(re: (i64, i64), im: (i64, i64)) -> Result<Self> {
        if re.1 == 0 || im.1 == 0 {
            return Err(VdError::Parse("rational with zero denominator".into()));
        }
        Ok(GaussRat::new(
            BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
            BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn neg(&self) -> Self {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        GaussRat::new(&self.re + &other.re, &self.im + &other.im)
    }

    pub fn sub(&self, other: &Self) -> Self {
        GaussRat::new(&self.re - &other.re, &self.im - &other.im)
    }

    pub fn mul(&self, other: &Self) -> Self {
        GaussRat::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        GaussRat::new(&self.re * &k, &self.im * &k)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        Some(GaussRat::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Dense univariate polynomial over Gaussian rationals, ascending
/// coefficients, trailing zeros trimmed. The empty coefficient vector is the
/// zero polynomial.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactPoly {
    coeffs: Vec<GaussRat>,
}

impl ExactPoly {
    pub fn new(mut coeffs: Vec<GaussRat>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        ExactPoly { coeffs }
    }

    pub fn zero() -> Self {
        ExactPoly { coeffs: vec![] }
    }

    pub fn constant(c: GaussRat) -> Self {
        ExactPoly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.coeffs
    }

    pub fn lead(&self) -> Option<&GaussRat> {
        self.coeffs.last()
    }

    /// Order of vanishing at 0, or `None` for the zero polynomial.
    pub fn ord_at_zero(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = GaussRat::zero();
        let coeffs = (0..n)
            .map(|i| {
                self.coeffs
                    .get(i)
                    .unwrap_or(&z)
                    .add(other.coeffs.get(i).unwrap_or(&z))
            })
            .collect();
        ExactPoly::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = GaussRat::zero();
        let coeffs = (0..n)
            .map(|i| {
                self.coeffs
                    .get(i)
                    .unwrap_or(&z)
                    .sub(other.coeffs.get(i).unwrap_or(&z))
            })
            .collect();
        ExactPoly::new(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return ExactPoly::zero();
        }
        let mut out = vec![GaussRat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        ExactPoly::new(out)
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        ExactPoly::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return ExactPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale_int(i as i64))
            .collect();
        ExactPoly::new(coeffs)
    }

    pub fn eval(&self, x: &GaussRat) -> GaussRat {
        let mut acc = GaussRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Monic rescaling (leading coefficient 1); zero stays zero.
    pub fn monic(&self) -> Self {
        match self.lead().and_then(|l| l.inv()) {
            Some(inv) => self.scale(&inv),
            None => ExactPoly::zero(),
        }
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    /// Panics if `d` is zero (callers guard).
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dl = d.lead().expect("division by zero polynomial");
        let dinv = dl.inv().expect("nonzero lead has an inverse");
        let dd = d.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() < d.coeffs.len() {
            return (ExactPoly::zero(), self.clone());
        }
        let mut quot = vec![GaussRat::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k].mul(&dinv);
            if !c.is_zero() {
                quot[k - dd] = c.clone();
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k - dd + j] = rem[k - dd + j].sub(&c.mul(dc));
                }
            }
        }
        (ExactPoly::new(quot), ExactPoly::new(rem))
    }

    /// Monic gcd via the Euclidean algorithm. Remainders are rescaled monic
    /// each round to keep coefficient growth in check.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let mut x = a.monic();
        let mut y = b.monic();
        if x.is_zero() {
            return y;
        }
        while !y.is_zero() {
            let (_, r) = x.divrem(&y);
            x = y;
            y = r.monic();
        }
        x
    }

    /// Degree of the squarefree part: deg p - deg gcd(p, p').
    pub fn radical_degree(&self) -> Result<usize> {
        let deg = self
            .degree()
            .ok_or_else(|| VdError::DegenerateInput("radical of the zero polynomial".into()))?;
        if deg == 0 {
            return Ok(0);
        }
        let g = ExactPoly::gcd(self, &self.derivative());
        Ok(deg - g.degree().unwrap_or(0))
    }

    /// Yun's squarefree decomposition: pairwise-coprime monic squarefree
    /// factors with their multiplicities, so that up to a constant
    /// `self = prod f_i^{m_i}`. Constant factors are omitted; the zero
    /// polynomial and constants decompose to nothing.
    pub fn squarefree_decomposition(&self) -> Vec<(ExactPoly, u32)> {
        let p = self.monic();
        if p.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let dp = p.derivative();
        let g = ExactPoly::gcd(&p, &dp);
        if g.degree().unwrap_or(0) == 0 {
            return vec![(p, 1)];
        }
        let mut out = Vec::new();
        let (mut w, _) = p.divrem(&g);
        let (mut y, _) = dp.divrem(&g);
        let mut mult = 1u32;
        while w.degree().unwrap_or(0) > 0 {
            let z = y.sub(&w.derivative());
            let h = ExactPoly::gcd(&w, &z);
            if h.degree().unwrap_or(0) > 0 {
                out.push((h.clone(), mult));
            }
            let (wn, _) = w.divrem(&h);
            let (yn, _) = z.divrem(&h);
            w = wn;
            y = yn;
            mult += 1;
        }
        out
    }

    /// Chart swap: coefficients of `u^d * p(1/u)` (reverse, padded to degree d).
    /// Requires `d >= deg p`.
    pub fn reversed(&self, d: usize) -> Self {
        let mut out = vec![GaussRat::zero(); d + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[d - i] = c.clone();
        }
        ExactPoly::new(out)
    }

    pub fn to_complex_coeffs(&self) -> Vec<Complex64> {
        if self.coeffs.is_empty() {
            vec![Complex64::new(0.0, 0.0)]
        } else {
            self.coeffs.iter().map(|c| c.to_complex()).collect()
        }
    }
}

impl fmt::Debug for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactPoly{:?}", self.coeffs)
    }
}
