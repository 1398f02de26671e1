//! Exact rationals over arbitrary-precision integers.
//!
//! `num_rational::BigRational` keeps every value reduced with a positive
//! denominator, which is all the bound catalog needs.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// `num / den`, reduced. Panics on a zero denominator.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn integer(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

pub fn from_biguint(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n.clone()))
}

/// Renders `value` as a decimal with at most `significant` significant
/// digits (rounded half away from zero, trailing zeros dropped).
pub fn to_decimal(value: &Rational, significant: usize) -> String {
    assert!(significant > 0);
    if value.is_zero() {
        return "0".to_string();
    }
    let negative = value.is_negative();
    let abs = value.abs();
    let ten = BigInt::from(10u32);
    let pow10 = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from_integer(num_traits::pow(ten.clone(), e as usize))
        } else {
            Rational::new(BigInt::one(), num_traits::pow(ten.clone(), (-e) as usize))
        }
    };

    // Find e with 10^e <= abs < 10^(e+1).
    let mut e = abs.numer().to_string().len() as i64 - abs.denom().to_string().len() as i64;
    while abs < pow10(e) {
        e -= 1;
    }
    while abs >= pow10(e + 1) {
        e += 1;
    }

    let shift = significant as i64 - 1 - e;
    let scaled = &abs * pow10(shift);
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let mut digits_int = q;
    if BigInt::from(2u32) * r >= *scaled.denom() {
        digits_int += 1;
    }
    if digits_int == num_traits::pow(ten.clone(), significant) {
        digits_int /= &ten;
        e += 1;
    }
    let digits = digits_int.to_string();

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if e >= 0 {
        let int_len = (e + 1) as usize;
        if int_len >= digits.len() {
            out.push_str(&digits);
            out.extend(std::iter::repeat_n('0', int_len - digits.len()));
            return out;
        }
        out.push_str(&digits[..int_len]);
        out.push('.');
        out.push_str(&digits[int_len..]);
    } else {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-e - 1) as usize));
        out.push_str(&digits);
    }
    let trimmed = out.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

/// `num/den` rendered as `a/b` (integers render without a denominator).
pub fn fraction(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses `a`, `a/b` or a finite decimal such as `1.5`.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let joined: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
        let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
        return Some(Rational::new(joined, den));
    }
    text.parse::<BigInt>().ok().map(Rational::from_integer)
}
