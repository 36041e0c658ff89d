//! Decimal interchange format for balls and radii.
//!
//! A ball of precision `p` prints its midpoint with `⌈p·log10 2⌉ + 2`
//! significant digits and its radius separately, rounded upward to three
//! significant digits. The printed radius already includes the error of the
//! decimal rounding, so parsing the pair back yields a ball that still
//! contains the original value, with a midpoint within one ulp of the
//! original midpoint.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::mag::Mag;
use super::real::MpReal;
use crate::error::{Error, Result};

const LOG10_2: f64 = std::f64::consts::LOG10_2;

fn pow10(n: u64) -> BigUint {
    BigUint::from(10u8).pow(n as u32)
}

/// `man · 2^exp · 10^s` as an exact fraction `num / den`.
fn scaled_fraction(man: &BigUint, exp: i64, s: i64) -> (BigUint, BigUint) {
    let mut num = man.clone();
    let mut den = BigUint::one();
    if exp >= 0 {
        num <<= exp as u64;
    } else {
        den <<= (-exp) as u64;
    }
    if s >= 0 {
        num *= pow10(s as u64);
    } else {
        den *= pow10((-s) as u64);
    }
    (num, den)
}

fn mag_pow10(s: i64, up: bool) -> Mag {
    let ten = Mag::from_u64(10);
    if s >= 0 {
        if up {
            ten.pow(s as u64)
        } else {
            ten.pow_down(s as u64)
        }
    } else if up {
        Mag::from_u64(1).div(ten.pow_down((-s) as u64))
    } else {
        Mag::from_u64(1).div_down(ten.pow((-s) as u64))
    }
}

/// Significant decimal digits printed for a ball of `prec` bits.
pub fn decimal_digits(prec: u32) -> u64 {
    (prec as f64 * LOG10_2).ceil() as u64 + 2
}

impl MpReal {
    /// Midpoint and radius as decimal strings (see the module docs).
    pub fn to_decimal_strings(&self) -> (String, String) {
        if self.mid_is_zero() {
            return ("0".to_string(), self.radius().to_decimal_string());
        }
        let digits = decimal_digits(self.prec());
        let man = self.mantissa();
        let exp = self.exponent();
        let mut e10 = (self.ln_abs_mid_f64() / std::f64::consts::LN_10).floor() as i64;
        let lo = pow10(digits - 1);
        let hi = pow10(digits);
        let (q, num, den, s) = loop {
            let s = digits as i64 - 1 - e10;
            let (num, den) = scaled_fraction(man, exp, s);
            let two_den = &den << 1u32;
            let q = ((&num << 1u32) + &den) / &two_den;
            if q >= hi {
                e10 += 1;
            } else if q < lo {
                e10 -= 1;
            } else {
                break (q, num, den, s);
            }
        };
        let qd = &q * &den;
        let diff = if qd >= num { &qd - &num } else { &num - &qd };
        let err = Mag::from_biguint_up(&diff, 0)
            .div(Mag::from_biguint_down(&den, 0))
            .mul(mag_pow10(-s, true));
        let ds = q.to_str_radix(10);
        let sign = if self.mid_sign() == Sign::Minus { "-" } else { "" };
        let value = if ds.len() > 1 {
            format!("{sign}{}.{}e{e10}", &ds[..1], &ds[1..])
        } else {
            format!("{sign}{ds}e{e10}")
        };
        (value, self.radius().add(err).to_decimal_string())
    }

    /// Parses a decimal midpoint plus radius into a ball of `prec` bits.
    pub fn parse_decimal(value: &str, radius: &str, prec: u32) -> Result<MpReal> {
        let (num, e10) = parse_decimal_parts(value)?;
        let (num, den) = if e10 >= 0 {
            (num * BigInt::from(pow10(e10 as u64)), BigInt::one())
        } else {
            (num, BigInt::from(pow10((-e10) as u64)))
        };
        // Round to the nearest `prec`-bit midpoint and charge the exact
        // rounding error rather than a half-ulp bound.
        let mid = MpReal::from_ratio(&num, &den, prec).mid();
        let (m_num, m_den) = {
            let q = mid.mid_rational();
            (q.numer().clone(), q.denom().clone())
        };
        let diff = (&m_num * &den - &num * &m_den).magnitude().clone();
        let err = Mag::from_biguint_up(&diff, 0).div(Mag::from_biguint_down((&m_den * &den).magnitude(), 0));
        Ok(mid.add_error(err).add_error(Mag::parse_decimal(radius)?))
    }
}

fn parse_decimal_parts(text: &str) -> Result<(BigInt, i64)> {
    let bad = || Error::usage(format!("malformed decimal number {text:?}"));
    let t = text.trim();
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut n: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        n = -n;
    }
    Ok((n, exponent - frac_part.len() as i64))
}

impl Mag {
    /// Upward-rounded decimal with three significant digits.
    pub fn to_decimal_string(self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        if self.is_inf() {
            return "inf".to_string();
        }
        let (m, man_exp) = self.parts();
        let man = BigUint::from(m);
        let mut e10 = (self.log2() * LOG10_2).floor() as i64;
        loop {
            let s = 2 - e10;
            let (num, den) = scaled_fraction(&man, man_exp, s);
            let (q, r) = num.div_rem(&den);
            let q = if r.is_zero() { q } else { q + 1u32 };
            if q >= BigUint::from(1000u32) {
                e10 += 1;
            } else if q < BigUint::from(100u32) {
                e10 -= 1;
            } else {
                let ds = q.to_str_radix(10);
                return format!("{}.{}e{e10}", &ds[..1], &ds[1..]);
            }
        }
    }

    /// Parses a non-negative decimal, rounding upward.
    pub fn parse_decimal(text: &str) -> Result<Mag> {
        let t = text.trim();
        if t == "inf" {
            return Ok(Mag::INF);
        }
        let (n, e10) = parse_decimal_parts(t)?;
        if n.sign() == Sign::Minus {
            return Err(Error::usage(format!("negative radius {text:?}")));
        }
        let n = n.magnitude();
        Ok(Mag::from_biguint_up(n, 0).mul(mag_pow10(e10, true)))
    }
}

#[derive(Serialize, Deserialize)]
struct DecimalBall {
    value: String,
    radius: String,
    precision: u32,
}

impl Serialize for MpReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (value, radius) = self.to_decimal_strings();
        DecimalBall {
            value,
            radius,
            precision: self.prec(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MpReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let b = DecimalBall::deserialize(deserializer)?;
        MpReal::parse_decimal(&b.value, &b.radius, b.precision).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Mag {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_decimal_string())
    }
}

impl<'de> Deserialize<'de> for Mag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Mag::parse_decimal(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prints_expected_digits() {
        let x = MpReal::from_i64(1, 64).div(&MpReal::from_i64(3, 64));
        let (v, r) = x.to_decimal_strings();
        assert_eq!(decimal_digits(64), 22);
        assert!(v.starts_with("3.333333333333333333"), "{v}");
        assert!(v.ends_with("e-1"));
        assert!(r.ends_with("e-20") || r.ends_with("e-21"), "{r}");
        assert_eq!(
            MpReal::from_i64(-120, 64).to_decimal_strings().0,
            "-1.200000000000000000000e2"
        );
    }

    #[test]
    fn mag_decimal_rounds_up() {
        assert_eq!(Mag::from_u64(1).to_decimal_string(), "1.00e0");
        assert_eq!(Mag::from_u64(1000).to_decimal_string(), "1.00e3");
        let third = Mag::from_u64(1).div(Mag::from_u64(3));
        assert_eq!(third.to_decimal_string(), "3.34e-1");
        let parsed = Mag::parse_decimal("3.34e-1").unwrap();
        assert!(parsed >= third);
        let tiny = Mag::pow2(-3000);
        let s = tiny.to_decimal_string();
        assert!(Mag::parse_decimal(&s).unwrap() >= tiny, "{s}");
    }

    #[test]
    fn rejects_garbage() {
        assert!(MpReal::parse_decimal("1.2.3", "0", 64).is_err());
        assert!(MpReal::parse_decimal("abc", "0", 64).is_err());
        assert!(Mag::parse_decimal("-1").is_err());
    }

    proptest! {
        #[test]
        fn round_trip_within_one_ulp(m in 1u64.., e in -400i64..400, neg: bool, prec in 16u32..300) {
            let sign = if neg { Sign::Minus } else { Sign::Plus };
            let x = MpReal::from_parts(sign, BigUint::from(m), e, Mag::ZERO, prec);
            let (v, r) = x.to_decimal_strings();
            let y = MpReal::parse_decimal(&v, &r, prec).unwrap();
            prop_assert!(y.contains_mid_of(&x));
            let ulp = Mag::pow2(x.mid_top_exp().unwrap() - prec as i64);
            prop_assert!(x.mid_distance(&y) <= ulp);
        }
    }
}
