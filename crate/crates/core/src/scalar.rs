//! Probability scalars.
//!
//! Message spaces, Huffman construction and key-cost accounting are generic
//! over [`Probability`], so the same code runs on `f32`, `f64` and exact
//! [`BigRational`] weights. The exact verifier converts whatever it is given
//! into rationals; every finite float is a dyadic rational, so no precision
//! is lost on the way in.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub trait Probability:
    Clone + Debug + PartialOrd + Num + FromPrimitive + Send + Sync + 'static
{
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    /// Allowed distance of a distribution's total mass from one.
    fn sum_tolerance() -> Self;

    fn from_rational(r: &BigRational) -> Self;

    /// Exact rational value, `None` for non-finite floats.
    fn to_rational(&self) -> Option<BigRational>;

    fn to_f64(&self) -> f64;

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    /// True when `sum` equals one within [`Probability::sum_tolerance`].
    fn is_unit_mass(sum: &Self) -> bool {
        let one = Self::one();
        let diff = if *sum > one {
            sum.clone() - one
        } else {
            one - sum.clone()
        };
        diff <= Self::sum_tolerance()
    }
}

impl Probability for f64 {
    const EXACT: bool = false;

    fn sum_tolerance() -> Self {
        1e-9
    }

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Probability for f32 {
    const EXACT: bool = false;

    // single precision cannot resolve 1e-9 around 1.0
    fn sum_tolerance() -> Self {
        1e-5
    }

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f32(r).unwrap_or(f32::NAN)
    }

    fn to_rational(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Probability for BigRational {
    const EXACT: bool = true;

    fn sum_tolerance() -> Self {
        BigRational::zero()
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn is_unit_mass(sum: &Self) -> bool {
        sum.is_one()
    }
}

/// Converts a rational to the nearest-ish `f64`, staying finite for huge
/// numerators and denominators where a direct conversion would overflow.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

/// `2^-exp` as an exact rational.
pub fn dyadic(exp: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << exp)
}

/// Parses `num/den`, a bare integer, or a decimal such as `0.25`, exactly.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n = BigInt::from_str_radix(n.trim(), 10).ok()?;
        let d = BigInt::from_str_radix(d.trim(), 10).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int}{frac}");
        let n = BigInt::from_str_radix(&digits, 10).ok()?;
        let d = num_traits::pow(BigInt::from(10u8), frac.len());
        return Some(BigRational::new(n, d));
    }
    BigInt::from_str_radix(text, 10).ok().map(BigRational::from_integer)
}

/// Formats a rational as `num/den` (always with a denominator).
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_rational("1/3"), Some(q(1, 3)));
        assert_eq!(parse_rational(" 2/4 "), Some(q(1, 2)));
        assert_eq!(parse_rational("1"), Some(q(1, 1)));
        assert_eq!(parse_rational("0.25"), Some(q(1, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("0."), None);
    }

    #[test]
    fn float_to_rational_is_exact() {
        let r = 0.1f64.to_rational().unwrap();
        assert_eq!(Probability::to_f64(&r), 0.1);
        assert_eq!(*r.denom(), BigInt::one() << 55);
        assert!(f64::NAN.to_rational().is_none());
    }

    #[test]
    fn unit_mass_tolerance_depends_on_scalar() {
        assert!(f64::is_unit_mass(&(1.0 + 1e-10)));
        assert!(!f64::is_unit_mass(&(1.0 + 1e-8)));
        assert!(f32::is_unit_mass(&(1.0 + 1e-6)));
        assert!(BigRational::is_unit_mass(&BigRational::one()));
        assert!(!BigRational::is_unit_mass(&(BigRational::one() + dyadic(200))));
    }

    #[test]
    fn huge_rationals_stay_finite() {
        let r = dyadic(5000);
        assert_eq!(ratio_to_f64(&r), 0.0);
        let third = BigRational::new(BigInt::one() << 3000, BigInt::from(3) << 3000);
        assert!((ratio_to_f64(&third) - 1.0 / 3.0).abs() < 1e-15);
    }
}
