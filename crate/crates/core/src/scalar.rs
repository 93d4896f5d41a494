//! Scalar abstraction shared by the decision, compiler, simulation and gel
//! modules.
//!
//! Probabilities and concentrations are exact rationals by default (see
//! [`crate::Rational`]), but every algorithm is written against [`Scalar`] so
//! the same pipeline can be driven with `f64`/`f32` for quick exploration.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseScalarError {
    #[error("empty value")]
    Empty,
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("not a number: {0:?}")]
    Malformed(String),
}

/// Numeric type usable for probabilities, utilities and concentrations.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Display + Send + Sync + 'static {
    /// `num / den`; `den` must be nonzero.
    fn from_fraction(num: i64, den: i64) -> Self;

    /// Parses `"a/b"`, `"a"` or (for floats) a decimal literal.
    fn parse_fraction(text: &str) -> Result<Self, ParseScalarError>;

    fn to_f64(&self) -> f64;

    /// Equality used for sums and ties: exact for rationals, a few ulps for floats.
    fn approx_eq(&self, other: &Self) -> bool;

    /// Smallest positive value that turns every input into an integer
    /// multiple (the common denominator). Floats have no such notion and
    /// return one.
    fn common_scale(values: &[Self]) -> Self;

    /// Canonical text form, `"a/b"` or `"a"` for rationals.
    fn to_fraction_string(&self) -> String;

    fn from_usize(n: usize) -> Self {
        Self::from_fraction(n as i64, 1)
    }

    fn two_pow(n: u32) -> Self {
        let two = Self::one() + Self::one();
        (0..n).fold(Self::one(), |acc, _| acc * two.clone())
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

fn split_fraction(text: &str) -> Result<(&str, Option<&str>), ParseScalarError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseScalarError::Empty);
    }
    Ok(match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text, None),
    })
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_fraction(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }

            fn parse_fraction(text: &str) -> Result<Self, ParseScalarError> {
                let (n, d) = split_fraction(text)?;
                let num: $t = n
                    .parse()
                    .map_err(|_| ParseScalarError::Malformed(text.to_string()))?;
                match d {
                    None => Ok(num),
                    Some(d) => {
                        let den: $t = d
                            .parse()
                            .map_err(|_| ParseScalarError::Malformed(text.to_string()))?;
                        if den == 0.0 {
                            return Err(ParseScalarError::ZeroDenominator(text.to_string()));
                        }
                        Ok(num / den)
                    }
                }
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn approx_eq(&self, other: &Self) -> bool {
                let scale = self.abs().max(other.abs()).max(1.0);
                (self - other).abs() <= 8.0 * <$t>::EPSILON * scale
            }

            fn common_scale(_values: &[Self]) -> Self {
                1.0
            }

            fn to_fraction_string(&self) -> String {
                format!("{}", self)
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl<I> Scalar for Ratio<I>
where
    I: Integer
        + Signed
        + Clone
        + FromPrimitive
        + ToPrimitive
        + std::str::FromStr
        + Debug
        + Display
        + Send
        + Sync
        + 'static,
{
    fn from_fraction(num: i64, den: i64) -> Self {
        let n = I::from_i64(num).expect("numerator fits the integer type");
        let d = I::from_i64(den).expect("denominator fits the integer type");
        Ratio::new(n, d)
    }

    fn parse_fraction(text: &str) -> Result<Self, ParseScalarError> {
        let (n, d) = split_fraction(text)?;
        let malformed = || ParseScalarError::Malformed(text.to_string());
        let num: I = n.parse().map_err(|_| malformed())?;
        let den: I = match d {
            Some(d) => d.parse().map_err(|_| malformed())?,
            None => I::one(),
        };
        if den.is_zero() {
            return Err(ParseScalarError::ZeroDenominator(text.to_string()));
        }
        Ok(Ratio::new(num, den))
    }

    fn to_f64(&self) -> f64 {
        let n = self.numer().to_f64().unwrap_or(f64::NAN);
        let d = self.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn common_scale(values: &[Self]) -> Self {
        let lcm = values
            .iter()
            .fold(I::one(), |acc, v| acc.lcm(v.denom()));
        Ratio::from_integer(lcm)
    }

    fn to_fraction_string(&self) -> String {
        self.to_string()
    }
}

/// Convenience for building exact values in code and tests.
pub fn frac<T: Scalar>(num: i64, den: i64) -> T {
    T::from_fraction(num, den)
}

/// Exact rational with arbitrary-precision parts.
pub fn big(num: i64, den: i64) -> Ratio<BigInt> {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}

/// Sum of a slice.
pub fn sum<T: Scalar>(values: &[T]) -> T {
    values.iter().cloned().fold(T::zero(), |a, b| a + b)
}
