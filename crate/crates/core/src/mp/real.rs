//! Mid-radius balls over binary floating-point midpoints.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::mag::Mag;

/// A real ball `[mid − rad, mid + rad]` with `mid = ±man · 2^exp`.
///
/// `man` carries at most `prec` bits and has no trailing zero bits. Every
/// operation rounds its midpoint to the result precision (the larger of the
/// operand precisions) and folds the rounding error into the radius, so
/// the exact mathematical result always lies inside the returned ball.
#[derive(Clone, Debug)]
pub struct MpReal {
    sign: Sign,
    man: BigUint,
    exp: i64,
    rad: Mag,
    prec: u32,
}

fn signed_parts(sign: Sign, man: BigUint) -> BigInt {
    BigInt::from_biguint(sign, man)
}

impl MpReal {
    pub(crate) fn from_parts(sign: Sign, man: BigUint, exp: i64, rad: Mag, prec: u32) -> MpReal {
        let prec = prec.max(2);
        if man.is_zero() {
            return MpReal {
                sign: Sign::NoSign,
                man,
                exp: 0,
                rad,
                prec,
            };
        }
        let mut man = man;
        let mut exp = exp;
        let mut rad = rad;
        let bits = man.bits();
        if bits > prec as u64 {
            let d = bits - prec as u64;
            let lost = man.trailing_zeros().unwrap_or(0) < d;
            let round_up = man.bit(d - 1);
            man >>= d;
            if round_up {
                man += 1u32;
            }
            if lost {
                rad = rad.add(Mag::pow2(exp + d as i64 - 1));
            }
            exp += d as i64;
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            man >>= tz;
            exp += tz as i64;
        }
        let sign = if sign == Sign::NoSign { Sign::Plus } else { sign };
        MpReal {
            sign,
            man,
            exp,
            rad,
            prec,
        }
    }

    pub fn zero(prec: u32) -> MpReal {
        MpReal::from_parts(Sign::NoSign, BigUint::zero(), 0, Mag::ZERO, prec)
    }

    pub fn one(prec: u32) -> MpReal {
        MpReal::from_i64(1, prec)
    }

    /// A ball centred at zero with the given radius.
    pub fn from_radius(rad: Mag, prec: u32) -> MpReal {
        MpReal::from_parts(Sign::NoSign, BigUint::zero(), 0, rad, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> MpReal {
        MpReal::from_bigint(&BigInt::from(v), prec)
    }

    pub fn from_u64(v: u64, prec: u32) -> MpReal {
        MpReal::from_bigint(&BigInt::from(v), prec)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> MpReal {
        let (sign, man) = v.clone().into_parts();
        MpReal::from_parts(sign, man, 0, Mag::ZERO, prec)
    }

    /// `v · 2^exp`, rounded to `prec` bits.
    pub fn from_bigint_2exp(v: &BigInt, exp: i64, prec: u32) -> MpReal {
        let (sign, man) = v.clone().into_parts();
        MpReal::from_parts(sign, man, exp, Mag::ZERO, prec)
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> MpReal {
        MpReal::from_bigint(num, prec + 2)
            .div(&MpReal::from_bigint(den, prec + 2))
            .round(prec)
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> MpReal {
        MpReal::from_ratio(q.numer(), q.denom(), prec)
    }

    /// The exact value of a finite double, rounded to `prec` bits.
    pub fn from_f64(x: f64, prec: u32) -> MpReal {
        assert!(x.is_finite(), "non-finite double {x}");
        if x == 0.0 {
            return MpReal::zero(prec);
        }
        let bits = x.abs().to_bits();
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, exp) = if e == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), e - 1075)
        };
        let sign = if x < 0.0 { Sign::Minus } else { Sign::Plus };
        MpReal::from_parts(sign, BigUint::from(m), exp, Mag::ZERO, prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn radius(&self) -> Mag {
        self.rad
    }

    /// Re-rounds to `prec` bits (radius grows by the rounding error).
    pub fn round(&self, prec: u32) -> MpReal {
        MpReal::from_parts(self.sign, self.man.clone(), self.exp, self.rad, prec)
    }

    /// The same ball, carried at a different precision without rounding
    /// unless the midpoint has more than `prec` bits.
    pub fn with_prec(&self, prec: u32) -> MpReal {
        self.round(prec)
    }

    /// The midpoint as an exact ball.
    pub fn mid(&self) -> MpReal {
        MpReal {
            rad: Mag::ZERO,
            ..self.clone()
        }
    }

    /// Widens the radius by `err`.
    pub fn add_error(mut self, err: Mag) -> MpReal {
        self.rad = self.rad.add(err);
        self
    }

    pub fn with_radius(mut self, rad: Mag) -> MpReal {
        self.rad = rad;
        self
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.rad.is_finite()
    }

    /// Exactly zero: zero midpoint and zero radius.
    pub fn is_zero(&self) -> bool {
        self.man.is_zero() && self.rad.is_zero()
    }

    pub fn mid_is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn mid_sign(&self) -> Sign {
        self.sign
    }

    pub(crate) fn mantissa(&self) -> &BigUint {
        &self.man
    }

    pub(crate) fn exponent(&self) -> i64 {
        self.exp
    }

    /// The midpoint as `(signed mantissa, exponent)`.
    pub fn mid_parts(&self) -> (BigInt, i64) {
        (signed_parts(self.sign, self.man.clone()), self.exp)
    }

    /// Number of significant bits in the midpoint.
    pub fn mid_bits(&self) -> u64 {
        self.man.bits()
    }

    /// `e` such that `|mid| < 2^e`; `None` when the midpoint is zero.
    pub fn mid_top_exp(&self) -> Option<i64> {
        if self.man.is_zero() {
            None
        } else {
            Some(self.exp + self.man.bits() as i64)
        }
    }

    pub fn mid_mag(&self) -> Mag {
        Mag::from_biguint_up(&self.man, self.exp)
    }

    pub fn mid_mag_down(&self) -> Mag {
        Mag::from_biguint_down(&self.man, self.exp)
    }

    /// Upper bound of `|x|` over the ball.
    pub fn abs_upper(&self) -> Mag {
        self.mid_mag().add(self.rad)
    }

    /// Lower bound of `|x|` over the ball (zero if the ball contains zero).
    pub fn abs_lower(&self) -> Mag {
        self.mid_mag_down().sub_down(self.rad)
    }

    pub fn contains_zero(&self) -> bool {
        self.mid_mag_down() <= self.rad
    }

    pub fn is_positive(&self) -> bool {
        self.sign == Sign::Plus && !self.contains_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.sign == Sign::Minus && !self.contains_zero()
    }

    fn exact_mid_sub(&self, other: &MpReal) -> Option<(Sign, BigUint, i64)> {
        if self.man.is_zero() {
            return Some((other.sign.neg_sign(), other.man.clone(), other.exp));
        }
        if other.man.is_zero() {
            return Some((self.sign, self.man.clone(), self.exp));
        }
        let e = self.exp.min(other.exp);
        let span = (self.exp.max(other.exp) - e) as u64;
        if span > 4 * (self.prec.max(other.prec) as u64) + 256 {
            return None;
        }
        let a = signed_parts(self.sign, self.man.clone()) << (self.exp - e) as usize;
        let b = signed_parts(other.sign, other.man.clone()) << (other.exp - e) as usize;
        let (s, m) = (a - b).into_parts();
        Some((s, m, e))
    }

    /// Upper bound of `|mid(self) − mid(other)|`.
    pub fn mid_distance(&self, other: &MpReal) -> Mag {
        match self.exact_mid_sub(other) {
            Some((_, m, e)) => Mag::from_biguint_up(&m, e),
            None => self.mid_mag().add(other.mid_mag()),
        }
    }

    fn mid_distance_down(&self, other: &MpReal) -> Mag {
        match self.exact_mid_sub(other) {
            Some((_, m, e)) => Mag::from_biguint_down(&m, e),
            None => self
                .mid_mag_down()
                .max(other.mid_mag_down())
                .sub_down(self.mid_mag().min(other.mid_mag())),
        }
    }

    /// True when the two balls intersect.
    pub fn overlaps(&self, other: &MpReal) -> bool {
        self.mid_distance_down(other) <= self.rad.add(other.rad)
    }

    /// True when `other` lies entirely inside `self`.
    pub fn contains(&self, other: &MpReal) -> bool {
        self.mid_distance(other).add(other.rad) <= self.rad
    }

    /// True when the midpoint of `other` lies inside `self`.
    pub fn contains_mid_of(&self, other: &MpReal) -> bool {
        self.mid_distance(other) <= self.rad
    }

    /// Compares midpoints exactly.
    pub fn cmp_mid(&self, other: &MpReal) -> Ordering {
        match self.exact_mid_sub(other) {
            Some((s, _, _)) => match s {
                Sign::Minus => Ordering::Less,
                Sign::NoSign => Ordering::Equal,
                Sign::Plus => Ordering::Greater,
            },
            None => {
                let a = self.to_f64();
                let b = other.to_f64();
                a.partial_cmp(&b).unwrap_or(Ordering::Equal)
            }
        }
    }

    /// Nearest double to the midpoint (saturating).
    pub fn to_f64(&self) -> f64 {
        if self.man.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits();
        let (top, e) = if bits > 64 {
            (
                (&self.man >> (bits - 64)).to_u64().unwrap_or(u64::MAX),
                self.exp + (bits - 64) as i64,
            )
        } else {
            (self.man.to_u64().unwrap_or(0), self.exp)
        };
        let v = if e > 2000 {
            f64::INFINITY
        } else if e < -2200 {
            0.0
        } else {
            let half = (e / 2) as i32;
            top as f64 * 2f64.powi(half) * 2f64.powi(e as i32 - half)
        };
        if self.sign == Sign::Minus {
            -v
        } else {
            v
        }
    }

    /// Natural log of `|mid|` as a double, valid far outside the double
    /// exponent range.
    pub fn ln_abs_mid_f64(&self) -> f64 {
        if self.man.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.man.bits();
        let (top, e) = if bits > 64 {
            (
                (&self.man >> (bits - 64)).to_u64().unwrap_or(u64::MAX),
                self.exp + (bits - 64) as i64,
            )
        } else {
            (self.man.to_u64().unwrap_or(0), self.exp)
        };
        (top as f64).ln() + e as f64 * std::f64::consts::LN_2
    }

    /// Floor of the midpoint.
    pub fn floor_mid(&self) -> BigInt {
        let v = signed_parts(self.sign, self.man.clone());
        if self.exp >= 0 {
            v << self.exp as usize
        } else {
            v.div_floor(&(BigInt::one() << (-self.exp) as usize))
        }
    }

    /// `Some(n)` when the ball is exactly the integer `n`.
    pub fn exact_integer(&self) -> Option<BigInt> {
        if !self.rad.is_zero() {
            return None;
        }
        if self.man.is_zero() {
            return Some(BigInt::zero());
        }
        if self.exp >= 0 {
            Some(signed_parts(self.sign, self.man.clone()) << self.exp as usize)
        } else {
            None
        }
    }

    /// The midpoint as an exact rational.
    pub fn mid_rational(&self) -> BigRational {
        let v = signed_parts(self.sign, self.man.clone());
        if self.exp >= 0 {
            BigRational::from_integer(v << self.exp as usize)
        } else {
            BigRational::new(v, BigInt::one() << (-self.exp) as usize)
        }
    }

    pub fn neg(&self) -> MpReal {
        MpReal {
            sign: self.sign.neg_sign(),
            ..self.clone()
        }
    }

    pub fn abs(&self) -> MpReal {
        let mut r = self.clone();
        if r.sign == Sign::Minus {
            r.sign = Sign::Plus;
        }
        r
    }

    fn add_signed(&self, other: &MpReal, negate_other: bool) -> MpReal {
        let prec = self.prec.max(other.prec);
        let mut rad = self.rad.add(other.rad);
        let other_sign = if negate_other {
            other.sign.neg_sign()
        } else {
            other.sign
        };
        if other.man.is_zero() {
            return MpReal::from_parts(self.sign, self.man.clone(), self.exp, rad, prec);
        }
        if self.man.is_zero() {
            return MpReal::from_parts(other_sign, other.man.clone(), other.exp, rad, prec);
        }
        let top = (self.exp + self.man.bits() as i64).max(other.exp + other.man.bits() as i64);
        let cutoff = top - prec as i64 - 8;
        let mut truncate = |sign: Sign, man: &BigUint, exp: i64| -> (BigInt, i64) {
            if exp >= cutoff {
                return (signed_parts(sign, man.clone()), exp);
            }
            let d = (cutoff - exp) as u64;
            let lost = man.trailing_zeros().unwrap_or(0) < d;
            let mut q = man >> d;
            if d <= man.bits() && man.bit(d - 1) {
                q += 1u32;
            }
            if lost {
                rad = rad.add(Mag::pow2(cutoff - 1));
            }
            (signed_parts(sign, q), cutoff)
        };
        let (a, ea) = truncate(self.sign, &self.man, self.exp);
        let (b, eb) = truncate(other_sign, &other.man, other.exp);
        let e = ea.min(eb);
        let sum = (a << (ea - e) as usize) + (b << (eb - e) as usize);
        let (s, m) = sum.into_parts();
        MpReal::from_parts(s, m, e, rad, prec)
    }

    pub fn add(&self, other: &MpReal) -> MpReal {
        self.add_signed(other, false)
    }

    pub fn sub(&self, other: &MpReal) -> MpReal {
        self.add_signed(other, true)
    }

    pub fn mul(&self, other: &MpReal) -> MpReal {
        let prec = self.prec.max(other.prec);
        let rad = self
            .mid_mag()
            .mul(other.rad)
            .add(other.mid_mag().mul(self.rad))
            .add(self.rad.mul(other.rad));
        if self.man.is_zero() || other.man.is_zero() {
            return MpReal::from_radius(rad, prec);
        }
        let sign = if self.sign == other.sign {
            Sign::Plus
        } else {
            Sign::Minus
        };
        MpReal::from_parts(sign, &self.man * &other.man, self.exp + other.exp, rad, prec)
    }

    pub fn sqr(&self) -> MpReal {
        self.mul(self)
    }

    pub fn div(&self, other: &MpReal) -> MpReal {
        let prec = self.prec.max(other.prec);
        let den_lower = other.abs_lower();
        if den_lower.is_zero() {
            return MpReal::from_radius(Mag::INF, prec);
        }
        if self.man.is_zero() {
            return MpReal::from_radius(self.rad.div(den_lower), prec);
        }
        let shift = (prec as i64 + 2 + other.man.bits() as i64 - self.man.bits() as i64).max(0) as u64;
        let num = &self.man << shift;
        let (q, r) = num.div_rem(&other.man);
        let exp = self.exp - shift as i64 - other.exp;
        let trunc = if r.is_zero() { Mag::ZERO } else { Mag::pow2(exp) };
        let q_mag = Mag::from_biguint_up(&q, exp).add(trunc);
        let rad = self.rad.add(q_mag.mul(other.rad)).div(den_lower).add(trunc);
        let sign = if self.sign == other.sign {
            Sign::Plus
        } else {
            Sign::Minus
        };
        MpReal::from_parts(sign, q, exp, rad, prec)
    }

    /// Exact multiplication by `2^e`.
    pub fn mul_2exp(&self, e: i64) -> MpReal {
        let mut r = self.clone();
        if !r.man.is_zero() {
            r.exp += e;
        }
        r.rad = r.rad.mul_2exp(e);
        r
    }

    pub fn mul_bigint(&self, n: &BigInt) -> MpReal {
        self.mul(&MpReal::from_bigint(n, self.prec.max(n.bits() as u32 + 1)))
            .round(self.prec)
    }

    pub fn mul_i64(&self, n: i64) -> MpReal {
        self.mul_bigint(&BigInt::from(n))
    }

    pub fn div_u64(&self, n: u64) -> MpReal {
        self.div(&MpReal::from_u64(n, 64))
    }

    pub fn recip(&self) -> MpReal {
        MpReal::one(self.prec).div(self)
    }

    pub fn pow_u64(&self, mut n: u64) -> MpReal {
        let mut base = self.clone();
        let mut acc = MpReal::one(self.prec);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.sqr();
            }
        }
        acc
    }
}

trait NegSign {
    fn neg_sign(self) -> Sign;
}

impl NegSign for Sign {
    fn neg_sign(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
            Sign::NoSign => Sign::NoSign,
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&MpReal> for &MpReal {
            type Output = MpReal;
            fn $method(self, rhs: &MpReal) -> MpReal {
                MpReal::$method(self, rhs)
            }
        }
        impl $trait<MpReal> for MpReal {
            type Output = MpReal;
            fn $method(self, rhs: MpReal) -> MpReal {
                MpReal::$method(&self, &rhs)
            }
        }
        impl $trait<&MpReal> for MpReal {
            type Output = MpReal;
            fn $method(self, rhs: &MpReal) -> MpReal {
                MpReal::$method(&self, rhs)
            }
        }
        impl $trait<MpReal> for &MpReal {
            type Output = MpReal;
            fn $method(self, rhs: MpReal) -> MpReal {
                MpReal::$method(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for MpReal {
    type Output = MpReal;
    fn neg(self) -> MpReal {
        MpReal::neg(&self)
    }
}

impl Neg for &MpReal {
    type Output = MpReal;
    fn neg(self) -> MpReal {
        MpReal::neg(self)
    }
}

impl fmt::Display for MpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (value, radius) = self.to_decimal_strings();
        write!(f, "{value} +/- {radius}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: i64) -> MpReal {
        MpReal::from_i64(x, 64)
    }

    #[test]
    fn integer_arithmetic_is_exact() {
        let a = r(12345);
        let b = r(-678);
        assert!((&a + &b).is_exact());
        assert_eq!((&a * &b).exact_integer(), Some(BigInt::from(12345 * -678)));
        assert_eq!((&a - &a).exact_integer(), Some(BigInt::zero()));
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn division_contains_true_quotient() {
        let third = r(1).div(&r(3));
        assert!(!third.is_exact());
        let back = &third * &r(3);
        assert!(back.overlaps(&r(1)));
        assert!(back.radius() < Mag::pow2(-60));
        assert_eq!(r(6).div(&r(3)).exact_integer(), Some(BigInt::from(2)));
    }

    #[test]
    fn division_by_ball_containing_zero_is_unbounded() {
        let z = MpReal::from_radius(Mag::pow2(-10), 64);
        assert!(!r(1).div(&z).is_finite());
    }

    #[test]
    fn rounding_records_error() {
        let big = MpReal::from_bigint(&((BigInt::one() << 100u32) + 1), 200);
        let small = big.round(32);
        assert!(small.contains(&big.mid()));
        assert!(!small.is_exact());
    }

    #[test]
    fn far_apart_addition_absorbs_into_radius() {
        let one = r(1);
        let tiny = MpReal::from_parts(Sign::Plus, BigUint::from(3u8), -10_000, Mag::ZERO, 64);
        let s = &one + &tiny;
        assert!(s.contains_mid_of(&one));
        assert!(s.radius() <= Mag::pow2(-60));
        assert!(s.mid_bits() <= 64);
    }

    #[test]
    fn cancellation_keeps_low_bits() {
        let a = MpReal::from_f64(1.0 + f64::EPSILON, 64);
        let d = &a - &r(1);
        assert_eq!(d.to_f64(), f64::EPSILON);
        assert!(d.is_exact());
    }

    #[test]
    fn mid_rational_and_floor() {
        let x = MpReal::from_f64(-2.5, 64);
        assert_eq!(x.floor_mid(), BigInt::from(-3));
        assert_eq!(x.mid_rational(), BigRational::new(BigInt::from(-5), BigInt::from(2)));
        assert!((x.ln_abs_mid_f64() - 2.5f64.ln()).abs() < 1e-15);
    }
}
