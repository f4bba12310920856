//! Scalar abstraction shared by the model, the LP core and the symmetry code.
//!
//! Everything numeric in this crate is generic over [`Scalar`]. The exact
//! instantiation ([`crate::Rational`]) has a zero tolerance, so every
//! comparison is an exact equality test. The floating-point instantiations
//! carry a small absolute tolerance and are intended for imported data.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Absolute magnitude below which a value counts as zero.
    fn tolerance() -> Self;

    /// `true` when arithmetic is exact and [`Scalar::tolerance`] is zero.
    fn is_exact() -> bool;

    fn floor(&self) -> Self;

    fn ceil(&self) -> Self;

    /// Parses `"12"`, `"-1.75"`, `"3/2"` or `"2.5e3"`.
    fn parse_decimal(text: &str) -> Option<Self>;

    /// Lossless text form: integers and terminating decimals as decimals,
    /// everything else as `p/q`.
    fn to_exact_string(&self) -> String;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("i64 is representable")
    }

    /// `2^k`, or `None` when the type cannot hold it exactly.
    fn pow2(k: u32) -> Option<Self>;

    /// `self -= factor * x`, the inner step of a pivot.
    fn sub_mul_assign(&mut self, factor: &Self, x: &Self) {
        *self = self.clone() - factor.clone() * x.clone();
    }

    fn div_by(&self, d: &Self) -> Self {
        self.clone() / d.clone()
    }
}

pub fn is_zero<S: Scalar>(v: &S) -> bool {
    v.abs() <= S::tolerance()
}

pub fn is_positive<S: Scalar>(v: &S) -> bool {
    *v > S::tolerance()
}

pub fn is_negative<S: Scalar>(v: &S) -> bool {
    *v < -S::tolerance()
}

pub fn approx_eq<S: Scalar>(a: &S, b: &S) -> bool {
    is_zero(&(a.clone() - b.clone()))
}

pub fn min_of<S: Scalar>(a: &S, b: &S) -> S {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

fn split_exponent(text: &str) -> Option<(&str, i32)> {
    match text.find(['e', 'E']) {
        Some(pos) => Some((&text[..pos], text[pos + 1..].parse().ok()?)),
        None => Some((text, 0)),
    }
}

fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (mantissa, exp) = split_exponent(text)?;
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(all);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Exact decimal text if the denominator is of the form 2^a 5^b.
fn rational_to_string(v: &BigRational) -> String {
    if v.is_integer() {
        return v.numer().to_string();
    }
    let mut den = v.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", v.numer(), v.denom());
    }
    let digits = twos.max(fives);
    let scaled = v * BigRational::from_integer(num_traits::pow(BigInt::from(10), digits));
    let scaled = scaled.to_integer();
    let negative = scaled.is_negative();
    let mut s = scaled.abs().to_string();
    if s.len() <= digits {
        s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
    }
    let split = s.len() - digits;
    format!("{}{}.{}", if negative { "-" } else { "" }, &s[..split], &s[split..])
}

impl Scalar for BigRational {
    fn tolerance() -> Self {
        Self::zero()
    }

    fn is_exact() -> bool {
        true
    }

    fn floor(&self) -> Self {
        BigRational::floor(self)
    }

    fn ceil(&self) -> Self {
        BigRational::ceil(self)
    }

    fn parse_decimal(text: &str) -> Option<Self> {
        parse_rational(text)
    }

    fn to_exact_string(&self) -> String {
        rational_to_string(self)
    }

    fn pow2(k: u32) -> Option<Self> {
        Some(BigRational::from_integer(BigInt::one() << k as usize))
    }

    fn sub_mul_assign(&mut self, factor: &Self, x: &Self) {
        if let (Some(a), Some(f), Some(v)) = (small(self), small(factor), small(x)) {
            if let Some(r) = small_sub_mul(a, f, v) {
                *self = r;
                return;
            }
        }
        *self -= factor * x;
    }

    fn div_by(&self, d: &Self) -> Self {
        if let (Some((a, b)), Some((c, e))) = (small(self), small(d)) {
            if c != 0 {
                let n = if c < 0 { -a } else { a };
                if let (Some(num), Some(den)) = (n.checked_mul(e), b.checked_mul(c.abs())) {
                    return from_small(num, den);
                }
            }
        }
        self / d
    }
}

// Word-sized fast path for pivots: most tableau entries stay small, and
// i128 arithmetic avoids the allocation and gcd cost of big integers.

fn small(v: &BigRational) -> Option<(i128, i128)> {
    Some((v.numer().to_i64()? as i128, v.denom().to_i64()? as i128))
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i128
}

/// `num/den` in lowest terms; `den > 0`.
fn from_small(num: i128, den: i128) -> BigRational {
    let g = gcd(num, den).max(1);
    BigRational::new_raw(BigInt::from(num / g), BigInt::from(den / g))
}

/// `a − f·v` for reduced fractions with positive denominators, or `None` on overflow.
fn small_sub_mul((an, ad): (i128, i128), (fnum, fden): (i128, i128), (vn, vd): (i128, i128)) -> Option<BigRational> {
    let g1 = gcd(fnum, vd).max(1);
    let g2 = gcd(vn, fden).max(1);
    let pn = (fnum / g1).checked_mul(vn / g2)?;
    let pd = (fden / g2).checked_mul(vd / g1)?;
    let g = gcd(ad, pd);
    let num = an.checked_mul(pd / g)?.checked_sub(pn.checked_mul(ad / g)?)?;
    let den = ad.checked_mul(pd / g)?;
    Some(from_small(num, den))
}

macro_rules! float_scalar {
    ($t:ty, $tol:expr, $mantissa:expr) => {
        impl Scalar for $t {
            fn tolerance() -> Self {
                $tol
            }

            fn is_exact() -> bool {
                false
            }

            fn floor(&self) -> Self {
                <$t>::floor(*self)
            }

            fn ceil(&self) -> Self {
                <$t>::ceil(*self)
            }

            fn parse_decimal(text: &str) -> Option<Self> {
                let text = text.trim();
                if let Some((num, den)) = text.split_once('/') {
                    let num: $t = num.trim().parse().ok()?;
                    let den: $t = den.trim().parse().ok()?;
                    return (den != 0.0).then(|| num / den);
                }
                text.parse().ok().filter(|v: &$t| v.is_finite())
            }

            fn to_exact_string(&self) -> String {
                self.to_string()
            }

            fn pow2(k: u32) -> Option<Self> {
                (k < $mantissa).then(|| (2.0 as $t).powi(k as i32))
            }
        }
    };
}

float_scalar!(f64, 1e-9, 53);
float_scalar!(f32, 1e-4, 24);

#[cfg(test)]
mod tests {
    use super::*;

    fn q(text: &str) -> BigRational {
        BigRational::parse_decimal(text).unwrap()
    }

    #[test]
    fn parses_decimal_forms() {
        assert_eq!(q("1.7"), BigRational::new(17.into(), 10.into()));
        assert_eq!(q("-0.25"), BigRational::new((-1).into(), 4.into()));
        assert_eq!(q("3/2"), BigRational::new(3.into(), 2.into()));
        assert_eq!(q("2.5e2"), BigRational::from_integer(250.into()));
        assert_eq!(q(".5"), BigRational::new(1.into(), 2.into()));
        assert!(BigRational::parse_decimal("").is_none());
        assert!(BigRational::parse_decimal("1/0").is_none());
        assert!(BigRational::parse_decimal("abc").is_none());
        assert!(BigRational::parse_decimal("1.2.3").is_none());
    }

    #[test]
    fn exact_strings() {
        for text in ["0", "12", "-3", "1.7", "0.05", "-0.125", "1/3", "-7/6"] {
            assert_eq!(q(text).to_exact_string(), text);
            assert_eq!(q(&q(text).to_exact_string()), q(text));
        }
    }

    #[test]
    fn float_helpers() {
        assert!(is_zero(&1e-12_f64));
        assert!(!is_zero(&BigRational::new(1.into(), 1_000_000_000_000i64.into())));
        assert_eq!(f64::parse_decimal("3/4"), Some(0.75));
        assert_eq!(f64::pow2(10), Some(1024.0));
        assert_eq!(f32::pow2(30), None);
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_path_near_overflow() {
        let big = ratio(i64::MAX, 3);
        let mut a = big.clone();
        a.sub_mul_assign(&ratio(i64::MAX - 1, 7), &ratio(i64::MIN + 1, 5));
        assert_eq!(a, big.clone() - ratio(i64::MAX - 1, 7) * ratio(i64::MIN + 1, 5));
        assert_eq!(big.div_by(&ratio(-2, i64::MAX)), big.clone() / ratio(-2, i64::MAX));
    }

    proptest::proptest! {
        #[test]
        fn small_path_matches_big_arithmetic(
            a in (-1000i64..1000, 1i64..50),
            f in (-1000i64..1000, 1i64..50),
            v in (-1000i64..1000, 1i64..50),
        ) {
            let (a, f, v) = (ratio(a.0, a.1), ratio(f.0, f.1), ratio(v.0, v.1));
            let mut got = a.clone();
            got.sub_mul_assign(&f, &v);
            proptest::prop_assert_eq!(got, a.clone() - f.clone() * v.clone());
            if !v.is_zero() {
                proptest::prop_assert_eq!(a.div_by(&v), a.clone() / v.clone());
            }
        }
    }
}
