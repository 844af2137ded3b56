//! Scalar realizations shared by every algorithm in the crate.
//!
//! Two backends implement [`Scalar`]: [`ExactRational`] (arbitrary-precision
//! rationals, always in lowest terms) and `f64`. Exact comparisons are used
//! for the former; the latter is only ever compared through an explicit
//! tolerance.
//!
//! Scalar literals follow a small ASCII grammar:
//!
//! ```text
//! [-]digits | [-]digits/digits | [-]digits.digits
//! ```

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in canonical form (positive denominator,
/// coprime numerator and denominator).
pub type ExactRational = BigRational;

/// Arithmetic contract implemented by both backends.
pub trait Scalar: Clone + Debug + PartialOrd + Signed + Send + Sync + 'static {
    /// Whether equality in this realization is exact.
    const EXACT: bool;
    /// Backend name used in reports.
    const BACKEND: &'static str;

    fn parse_literal(text: &str) -> Result<Self>;

    /// Text form accepted back by [`Scalar::parse_literal`].
    fn render(&self) -> String;

    fn from_rational(value: &BigRational) -> Self;

    /// Exact rational value of `self`. Floats convert without rounding.
    fn to_rational(&self) -> BigRational;

    fn to_f64(&self) -> f64;

    /// 0 for the exact backend, 1e-12 for floats.
    fn default_tolerance() -> Self;

    /// Largest bit length of the numerator or denominator; 0 for floats.
    fn magnitude_bits(&self) -> u64 {
        0
    }

    fn from_integer(value: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(value)))
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// `|self - target| <= tol`.
    fn within(&self, target: &Self, tol: &Self) -> bool {
        (self.clone() - target.clone()).abs() <= *tol
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const BACKEND: &'static str = "exact";

    fn parse_literal(text: &str) -> Result<Self> {
        parse_scalar(text)
    }

    fn render(&self) -> String {
        render_scalar(self)
    }

    fn from_rational(value: &BigRational) -> Self {
        value.clone()
    }

    fn to_rational(&self) -> BigRational {
        self.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn default_tolerance() -> Self {
        BigRational::zero()
    }

    fn magnitude_bits(&self) -> u64 {
        self.numer().bits().max(self.denom().bits())
    }

    fn within(&self, target: &Self, tol: &Self) -> bool {
        if tol.is_zero() {
            self == target
        } else {
            (self - target).abs() <= *tol
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const BACKEND: &'static str = "approx";

    fn parse_literal(text: &str) -> Result<Self> {
        let literal = Literal::lex(text)?;
        let value = match literal.denominator {
            Some(den) => {
                let den: f64 = den.parse().map_err(|_| Error::MalformedScalar(text.into()))?;
                if den == 0.0 {
                    return Err(Error::ZeroDenominator(text.into()));
                }
                let num: f64 = literal.numerator.parse().map_err(|_| Error::MalformedScalar(text.into()))?;
                num / den
            }
            None => text.trim_start_matches('-').parse().map_err(|_| Error::MalformedScalar(text.into()))?,
        };
        Ok(if literal.negative { -value } else { value })
    }

    fn render(&self) -> String {
        // Display for f64 is the shortest round-tripping decimal and never
        // uses exponent notation, so it stays inside the literal grammar.
        format!("{self}")
    }

    fn from_rational(value: &BigRational) -> Self {
        ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> BigRational {
        BigRational::from_float(*self).unwrap_or_else(BigRational::zero)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn default_tolerance() -> Self {
        1e-12
    }
}

/// Lexed literal: sign, integer digits and either fraction digits or a
/// denominator.
struct Literal<'a> {
    negative: bool,
    numerator: &'a str,
    fraction: Option<&'a str>,
    denominator: Option<&'a str>,
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

impl<'a> Literal<'a> {
    fn lex(text: &'a str) -> Result<Self> {
        let malformed = || Error::MalformedScalar(text.to_string());
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let mut literal = Literal { negative, numerator: body, fraction: None, denominator: None };
        if let Some((num, den)) = body.split_once('/') {
            literal.numerator = num;
            literal.denominator = Some(den);
            if !all_digits(num) || !all_digits(den) {
                return Err(malformed());
            }
        } else if let Some((int, frac)) = body.split_once('.') {
            literal.numerator = int;
            literal.fraction = Some(frac);
            if !all_digits(int) || !all_digits(frac) {
                return Err(malformed());
            }
        } else if !all_digits(body) {
            return Err(malformed());
        }
        Ok(literal)
    }
}

/// Parses an integer, fraction or finite decimal literal into an exact
/// rational. Decimals are read as exact decimal fractions.
pub fn parse_scalar(text: &str) -> Result<ExactRational> {
    let literal = Literal::lex(text)?;
    let digits = |s: &str| s.parse::<BigInt>().map_err(|_| Error::MalformedScalar(text.to_string()));
    let mut numer = digits(literal.numerator)?;
    let mut denom = BigInt::one();
    if let Some(den) = literal.denominator {
        denom = digits(den)?;
        if denom.is_zero() {
            return Err(Error::ZeroDenominator(text.to_string()));
        }
    }
    if let Some(frac) = literal.fraction {
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        numer = numer * &scale + digits(frac)?;
        denom = scale;
    }
    if literal.negative {
        numer = -numer;
    }
    Ok(BigRational::new(numer, denom))
}

/// Canonical text form: `n` for integers, `n/d` otherwise.
pub fn render_scalar(value: &ExactRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Exact field arithmetic. Only division can fail.
pub fn rational_arith(a: &ExactRational, b: &ExactRational, op: ArithOp) -> Result<ExactRational> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => {
            if b.is_zero() {
                return Err(Error::DivisionByZero);
            }
            a / b
        }
    })
}

/// `true` when the value is strictly positive.
pub fn is_positive<T: Scalar>(value: &T) -> bool {
    *value > T::zero()
}
