//! Exact arithmetic over the rationals and real quadratic fields `Q(√D)`.
//!
//! Every number the geometry and effect layers produce lives in one of these
//! fields, so completeness and positivity checks come out with zero residual
//! instead of a floating tolerance.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Failures of field arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("incompatible fields: Q(sqrt {left}) and Q(sqrt {right})")]
    IncompatibleField { left: u64, right: u64 },
    #[error("radicand {0} is not a square-free integer >= 2")]
    BadRadicand(u64),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
}

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, FieldError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(FieldError::ZeroDenominator);
        }
        // Ratio::new reduces and moves the sign onto the numerator.
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// Shorthand for small literals; panics on a zero denominator.
    pub fn frac(numer: i64, denom: i64) -> Self {
        Self::new(numer, denom).expect("nonzero denominator")
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn signum(&self) -> i8 {
        if self.0.is_zero() {
            0
        } else if self.0.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn recip(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn add(&self, other: &Self) -> Self {
        Rational(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Rational(&self.0 - &other.0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Rational(&self.0 * &other.0)
    }

    pub fn div(&self, other: &Self) -> Result<Self, FieldError> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// True when `d >= 2` has no repeated prime factor.
pub fn is_square_free(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut n = d;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// The number `rat + rad·√radicand`.
///
/// Canonical form: a value with `rad == 0` always carries radicand 1, which
/// marks it as a plain rational compatible with every field. Derived
/// equality is therefore value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadNum {
    rat: Rational,
    rad: Rational,
    radicand: u64,
}

impl QuadNum {
    /// Builds `rat + rad·√radicand`; `radicand` must be square-free and at
    /// least 2 unless `rad` is zero.
    pub fn new(rat: Rational, rad: Rational, radicand: u64) -> Result<Self, FieldError> {
        if rad.is_zero() {
            return Ok(Self::rational(rat));
        }
        if !is_square_free(radicand) {
            return Err(FieldError::BadRadicand(radicand));
        }
        Ok(QuadNum { rat, rad, radicand })
    }

    pub fn rational(q: Rational) -> Self {
        QuadNum {
            rat: q,
            rad: Rational::zero(),
            radicand: 1,
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::rational(Rational::from(n))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    /// `√d` itself.
    pub fn sqrt_of(d: u64) -> Result<Self, FieldError> {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    /// The golden ratio `(1 + √5)/2`.
    pub fn golden_ratio() -> Self {
        QuadNum {
            rat: Rational::frac(1, 2),
            rad: Rational::frac(1, 2),
            radicand: 5,
        }
    }

    pub fn rat_part(&self) -> &Rational {
        &self.rat
    }

    pub fn rad_part(&self) -> &Rational {
        &self.rad
    }

    /// Radicand of the field; 1 for plain rationals.
    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.rad.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.rat)
    }

    /// The radicand two values would share when combined.
    pub fn common_radicand(&self, other: &Self) -> Result<u64, FieldError> {
        match (self.radicand, other.radicand) {
            (1, d) | (d, 1) => Ok(d),
            (a, b) if a == b => Ok(a),
            (a, b) => Err(FieldError::IncompatibleField { left: a, right: b }),
        }
    }

    fn build(rat: Rational, rad: Rational, radicand: u64) -> Self {
        if rad.is_zero() {
            Self::rational(rat)
        } else {
            QuadNum { rat, rad, radicand }
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, FieldError> {
        let d = self.common_radicand(other)?;
        Ok(Self::build(
            self.rat.add(&other.rat),
            self.rad.add(&other.rad),
            d,
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.try_add(&-other)
    }

    /// `(a + b√D)(c + d√D) = (ac + D·bd) + (ad + bc)√D`.
    pub fn try_mul(&self, other: &Self) -> Result<Self, FieldError> {
        let d = self.common_radicand(other)?;
        let big_d = Rational::from_integer(d);
        let rat = self
            .rat
            .mul(&other.rat)
            .add(&big_d.mul(&self.rad.mul(&other.rad)));
        let rad = self.rat.mul(&other.rad).add(&self.rad.mul(&other.rat));
        Ok(Self::build(rat, rad, d))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::build(self.rat.mul(q), self.rad.mul(q), self.radicand)
    }

    /// `a - b√D`.
    pub fn conjugate(&self) -> Self {
        Self::build(self.rat.clone(), -&self.rad, self.radicand)
    }

    /// Field norm `a² - D·b²`, always rational.
    pub fn field_norm(&self) -> Rational {
        let big_d = Rational::from_integer(self.radicand);
        self.rat.square().sub(&big_d.mul(&self.rad.square()))
    }

    /// `(a - b√D)/(a² - D·b²)`.
    pub fn inverse(&self) -> Result<Self, FieldError> {
        // D is square-free, so the norm vanishes only at zero.
        let n = self.field_norm();
        if n.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.conjugate().scale(&n.recip()?))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.common_radicand(other)?;
        self.try_mul(&other.inverse()?)
    }

    /// Exact sign of the real value, by integer comparison of `a²` with `D·b²`.
    pub fn sign(&self) -> i8 {
        let sa = self.rat.signum();
        let sb = self.rad.signum();
        if sa >= 0 && sb >= 0 {
            return if sa + sb > 0 { 1 } else { 0 };
        }
        if sa <= 0 && sb <= 0 {
            return -1;
        }
        let big_d = Rational::from_integer(self.radicand);
        let a2 = self.rat.square();
        let db2 = big_d.mul(&self.rad.square());
        // Mixed signs: the term with the larger square wins.
        match a2.cmp(&db2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Exact comparison of real values.
    pub fn cmp_value(&self, other: &Self) -> Result<Ordering, FieldError> {
        Ok(match self.try_sub(other)?.sign() {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        })
    }

    pub fn to_f64(&self) -> f64 {
        if self.rad.is_zero() {
            return self.rat.to_f64();
        }
        self.rat.to_f64() + self.rad.to_f64() * libm::sqrt(self.radicand as f64)
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        -&self
    }
}

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum::build(-&self.rat, -&self.rad, self.radicand)
    }
}

impl From<Rational> for QuadNum {
    fn from(q: Rational) -> Self {
        QuadNum::rational(q)
    }
}

impl From<i64> for QuadNum {
    fn from(n: i64) -> Self {
        QuadNum::from_integer(n)
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rad.is_zero() {
            return write!(f, "{}", self.rat);
        }
        let rad = if self.rad.signum() < 0 {
            (-&self.rad).to_string()
        } else {
            self.rad.to_string()
        };
        let op = if self.rad.signum() < 0 { '-' } else { '+' };
        let coeff = if rad == "1" {
            String::new()
        } else {
            rad + "·"
        };
        if self.rat.is_zero() {
            let lead = if op == '-' { "-" } else { "" };
            write!(f, "{lead}{coeff}√{}", self.radicand)
        } else {
            write!(f, "{} {op} {coeff}√{}", self.rat, self.radicand)
        }
    }
}

impl fmt::Debug for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadNum({self})")
    }
}
