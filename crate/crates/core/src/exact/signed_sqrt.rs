use std::cmp::Ordering;
use std::fmt;
use std::ops::{Mul, Neg};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{to_f64, ExactError, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(r: &Rational) -> Self {
        if r.is_zero() {
            Sign::Zero
        } else if r.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        match self.as_i8() * rhs.as_i8() {
            1 => Sign::Positive,
            -1 => Sign::Negative,
            _ => Sign::Zero,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Negative
    }
}

/// A real number `sign * sqrt(square)` with `square` an exact nonnegative rational.
///
/// Only products are closed in this representation; sums of distinct surds are
/// evaluated in floating point by the caller.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedSqrtRational {
    sign: Sign,
    square: Rational,
}

impl SignedSqrtRational {
    pub fn new(sign: Sign, square: Rational) -> Result<Self, ExactError> {
        if square.is_negative() {
            return Err(ExactError::NegativeSquare);
        }
        if square.is_zero() {
            return Ok(Self::zero());
        }
        // a nonzero square with Sign::Zero is contradictory; treat the magnitude as authoritative
        let sign = if sign == Sign::Zero { Sign::Positive } else { sign };
        Ok(Self { sign, square })
    }

    /// The signed square root of `|r|` carrying the sign of `r`, i.e. `sign(r) * sqrt(|r|)`.
    pub fn from_signed_square(r: Rational) -> Self {
        let sign = Sign::of(&r);
        Self { sign, square: r.abs() }
    }

    pub fn zero() -> Self {
        Self { sign: Sign::Zero, square: Rational::zero() }
    }

    pub fn one() -> Self {
        Self { sign: Sign::Positive, square: Rational::from_integer(1.into()) }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn square(&self) -> &Rational {
        &self.square
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign.as_i8()) * to_f64(&self.square).sqrt()
    }

    /// Compares magnitudes through the squares.
    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        self.square.cmp(&other.square)
    }
}

impl Mul for &SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn mul(self, rhs: &SignedSqrtRational) -> SignedSqrtRational {
        let sign = self.sign * rhs.sign;
        if sign == Sign::Zero {
            return SignedSqrtRational::zero();
        }
        SignedSqrtRational { sign, square: &self.square * &rhs.square }
    }
}

impl Mul for SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn mul(self, rhs: SignedSqrtRational) -> SignedSqrtRational {
        &self * &rhs
    }
}

impl Neg for SignedSqrtRational {
    type Output = SignedSqrtRational;
    fn neg(self) -> SignedSqrtRational {
        SignedSqrtRational { sign: -self.sign, square: self.square }
    }
}

impl PartialOrd for SignedSqrtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SignedSqrtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                Sign::Positive => self.square.cmp(&other.square),
                Sign::Negative => other.square.cmp(&self.square),
                Sign::Zero => Ordering::Equal,
            },
            o => o,
        }
    }
}

impl fmt::Display for SignedSqrtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => write!(f, "0"),
            Sign::Positive => write!(f, "sqrt({})", self.square),
            Sign::Negative => write!(f, "-sqrt({})", self.square),
        }
    }
}
