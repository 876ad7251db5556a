//! Scalar abstraction: every computation in this crate runs either in `f64`
//! or in exact rational arithmetic, selected by the type parameter.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Field operations required by the tensor and connection machinery.
///
/// Implemented for `f64` (default mode) and [`Rational`] (exact mode).
/// Residual decisions go through [`Scalar::abs_f64`]; exact mode additionally
/// reports symbolic zero via [`Scalar::is_zero`].
pub trait Scalar: Clone + PartialEq + std::fmt::Debug + std::fmt::Display + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Division; panics on division by zero (callers guard).
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Strictly positive test (used for SPD minors and k > 0 gates).
    fn is_positive(&self) -> bool;
    /// Magnitude as f64, for residual reporting and pivot selection.
    fn abs_f64(&self) -> f64;
    fn to_f64(&self) -> f64;
    /// Exact square root when representable in the field, `None` otherwise.
    fn try_sqrt(&self) -> Option<Self>;
    /// Conversion from a double; exact in both modes (every finite `f64`
    /// is a binary rational). `None` for non-finite input.
    fn from_f64(x: f64) -> Option<Self>;
    /// True when arithmetic is exact (no rounding anywhere).
    const EXACT: bool;
    /// Canonical text encoding, used for model fingerprints.
    fn encode(&self) -> String;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_positive(&self) -> bool {
        *self > 0.0
    }
    fn abs_f64(&self) -> f64 {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn try_sqrt(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(self.sqrt())
        }
    }
    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }
    const EXACT: bool = false;
    fn encode(&self) -> String {
        // `{:?}` is shortest-roundtrip, so the encoding is lossless.
        format!("{self:?}")
    }
}

/// Arbitrary-precision rational scalar for exact mode.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rational(pub BigRational);

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Parses either an integer, a `p/q` fraction, or a finite decimal
    /// (decimals convert exactly, e.g. `0.25 -> 1/4`).
    pub fn parse(text: &str) -> Option<Self> {
        let t = text.trim();
        if let Some((num, den)) = t.split_once('/') {
            let n: BigInt = num.trim().parse().ok()?;
            let d: BigInt = den.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            return Some(Rational(BigRational::new(n, d)));
        }
        if let Some((int_part, frac_part)) = t.split_once('.') {
            if frac_part.is_empty() || frac_part.chars().any(|c| !c.is_ascii_digit()) {
                return None;
            }
            let negative = int_part.trim_start().starts_with('-');
            let i: BigInt = if int_part.is_empty() || int_part == "-" {
                BigInt::zero()
            } else {
                int_part.parse().ok()?
            };
            let f: BigInt = frac_part.parse().ok()?;
            let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
            let mag = i.abs() * &scale + f;
            let signed = if negative { -mag } else { mag };
            return Some(Rational(BigRational::new(signed, scale)));
        }
        let n: BigInt = t.parse().ok()?;
        Some(Rational(BigRational::from_integer(n)))
    }
}

fn bigint_exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational(BigRational::zero())
    }
    fn one() -> Self {
        Rational(BigRational::one())
    }
    fn from_i64(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(num, den)
    }
    fn add(&self, rhs: &Self) -> Self {
        Rational(&self.0 + &rhs.0)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Rational(&self.0 - &rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Rational(&self.0 * &rhs.0)
    }
    fn div(&self, rhs: &Self) -> Self {
        Rational(&self.0 / &rhs.0)
    }
    fn neg(&self) -> Self {
        Rational(-&self.0)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn is_positive(&self) -> bool {
        self.0.is_positive()
    }
    fn abs_f64(&self) -> f64 {
        self.0.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
    fn try_sqrt(&self) -> Option<Self> {
        let num = bigint_exact_sqrt(self.0.numer())?;
        let den = bigint_exact_sqrt(self.0.denom())?;
        Some(Rational(BigRational::new(num, den)))
    }
    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Rational)
    }
    const EXACT: bool = true;
    fn encode(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parse_forms() {
        assert_eq!(Rational::parse("3/4").unwrap(), Rational::new(3, 4));
        assert_eq!(Rational::parse("-2").unwrap(), Rational::from_i64(-2));
        assert_eq!(Rational::parse("0.25").unwrap(), Rational::new(1, 4));
        assert_eq!(Rational::parse("-1.5").unwrap(), Rational::new(-3, 2));
        assert!(Rational::parse("1/0").is_none());
        assert!(Rational::parse("abc").is_none());
    }

    #[test]
    fn rational_exact_sqrt() {
        assert_eq!(Rational::new(1, 4).try_sqrt().unwrap(), Rational::new(1, 2));
        assert_eq!(Rational::new(9, 25).try_sqrt().unwrap(), Rational::new(3, 5));
        assert!(Rational::new(1, 2).try_sqrt().is_none());
        assert!(Rational::from_i64(-1).try_sqrt().is_none());
    }

    #[test]
    fn f64_roundtrip_encoding() {
        let x: f64 = 0.1 + 0.2;
        let back: f64 = x.encode().parse().unwrap();
        assert_eq!(x, back);
    }
}
