//! Scalar domains: exact Gaussian rationals, polynomials in a formal
//! variable ε with Gaussian-rational coefficients, and floating complex.
//!
//! A tensor or matrix always lives in exactly one domain; the [`Scalar`]
//! trait is what the generic containers need from it.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Domain tag carried by tensors and matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    #[serde(rename = "rational")]
    RationalComplex,
    #[serde(rename = "eps")]
    EpsPoly,
    #[serde(rename = "float")]
    FloatComplex,
}

impl Domain {
    pub fn tag(self) -> &'static str {
        match self {
            Domain::RationalComplex => "rational",
            Domain::EpsPoly => "eps",
            Domain::FloatComplex => "float",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "rational" => Ok(Domain::RationalComplex),
            "eps" => Ok(Domain::EpsPoly),
            "float" => Ok(Domain::FloatComplex),
            other => Err(Error::Parse(format!("unknown domain tag `{other}`"))),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Operations the generic tensor and matrix code needs from a scalar.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    const DOMAIN: Domain;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Embed an exact Gaussian rational into this domain.
    fn from_exact(q: &QComplex) -> Self;
}

/// Complex number with arbitrary-precision rational real and imaginary parts.
///
/// `BigRational` keeps itself in lowest terms with a positive denominator, so
/// structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl QComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn i() -> Self {
        Self { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| Scalar::mul(self, &inv))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = QComplex::one();
        for _ in 0..exp {
            acc = Scalar::mul(&acc, self);
        }
        acc
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse `"p"` or `"p/q"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(BigRational::new(p, q))
        }
    }
}

/// Canonical text form of a rational: `"p"` or `"p/q"`.
pub fn format_rational(q: &BigRational) -> String {
    fmt_rational(q)
}

impl fmt::Debug for QComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for QComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", fmt_rational(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", fmt_rational(&self.im))
        } else {
            let sign = if self.im.is_negative() { "-" } else { "+" };
            write!(f, "{}{}{}i", fmt_rational(&self.re), sign, fmt_rational(&self.im.abs()))
        }
    }
}

impl Scalar for QComplex {
    const DOMAIN: Domain = Domain::RationalComplex;

    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::real(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        Self { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn sub(&self, o: &Self) -> Self {
        Self { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn mul(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return Self::real(&self.re * &o.re);
        }
        Self {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    fn neg(&self) -> Self {
        Self { re: -&self.re, im: -&self.im }
    }
    fn from_exact(q: &QComplex) -> Self {
        q.clone()
    }
}

macro_rules! forward_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                Scalar::add(&self, &o)
            }
        }
        impl<'a> Add<&'a $t> for &'a $t {
            type Output = $t;
            fn add(self, o: &'a $t) -> $t {
                Scalar::add(self, o)
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                Scalar::sub(&self, &o)
            }
        }
        impl<'a> Sub<&'a $t> for &'a $t {
            type Output = $t;
            fn sub(self, o: &'a $t) -> $t {
                Scalar::sub(self, o)
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                Scalar::mul(&self, &o)
            }
        }
        impl<'a> Mul<&'a $t> for &'a $t {
            type Output = $t;
            fn mul(self, o: &'a $t) -> $t {
                Scalar::mul(self, o)
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                Scalar::neg(&self)
            }
        }
    };
}

forward_ops!(QComplex);
forward_ops!(EpsPoly);

/// Polynomial in ε with Gaussian-rational coefficients. Only nonzero
/// coefficients are stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct EpsPoly {
    coeffs: BTreeMap<u32, QComplex>,
}

impl EpsPoly {
    pub fn constant(c: QComplex) -> Self {
        Self::monomial(0, c)
    }

    /// `c·ε^degree`.
    pub fn monomial(degree: u32, c: QComplex) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(degree, c);
        }
        Self { coeffs }
    }

    /// ε itself.
    pub fn eps() -> Self {
        Self::monomial(1, QComplex::one())
    }

    pub fn from_coeffs(iter: impl IntoIterator<Item = (u32, QComplex)>) -> Self {
        let mut p = EpsPoly::default();
        for (d, c) in iter {
            p.add_term(d, &c);
        }
        p
    }

    fn add_term(&mut self, degree: u32, c: &QComplex) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(degree).or_insert_with(QComplex::zero);
        *slot = Scalar::add(slot, c);
        if slot.is_zero() {
            self.coeffs.remove(&degree);
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, QComplex> {
        &self.coeffs
    }

    pub fn coeff(&self, degree: u32) -> QComplex {
        self.coeffs.get(&degree).cloned().unwrap_or_default()
    }

    pub fn low_degree(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn high_degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    /// Evaluate at a Gaussian rational point (Horner would need dense
    /// coefficients; the sparse sum is just as cheap here).
    pub fn eval(&self, at: &QComplex) -> QComplex {
        self.coeffs
            .iter()
            .fold(QComplex::zero(), |acc, (d, c)| Scalar::add(&acc, &Scalar::mul(c, &at.pow(*d))))
    }
}

impl fmt::Debug for EpsPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for EpsPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(d, c)| match d {
                0 => format!("({c})"),
                1 => format!("({c})ε"),
                _ => format!("({c})ε^{d}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

impl Scalar for EpsPoly {
    const DOMAIN: Domain = Domain::EpsPoly;

    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::constant(QComplex::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (d, c) in &o.coeffs {
            out.add_term(*d, c);
        }
        out
    }
    fn sub(&self, o: &Self) -> Self {
        Scalar::add(self, &Scalar::neg(o))
    }
    fn mul(&self, o: &Self) -> Self {
        let mut out = EpsPoly::default();
        for (da, ca) in &self.coeffs {
            for (db, cb) in &o.coeffs {
                out.add_term(da + db, &Scalar::mul(ca, cb));
            }
        }
        out
    }
    fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|(d, c)| (*d, Scalar::neg(c))).collect() }
    }
    fn from_exact(q: &QComplex) -> Self {
        Self::constant(q.clone())
    }
}

impl Scalar for Complex64 {
    const DOMAIN: Domain = Domain::FloatComplex;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_exact(q: &QComplex) -> Self {
        q.to_complex64()
    }
}
