//! Non-negative magnitudes with directed rounding, used as ball radii.
//!
//! A [`Mag`] is `man · 2^exp` with a 30-bit normalized mantissa. Every
//! operation has an upward-rounding form (the default) so that a radius
//! computed from other radii is always an upper bound of the exact value;
//! `_down` variants give lower bounds for denominators.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

const BITS: u32 = 30;
const TOP: u64 = 1 << (BITS - 1);
const INF_EXP: i64 = 1 << 50;
const MAX_EXP: i64 = 1 << 40;
const MIN_EXP: i64 = -(1 << 40);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mag {
    man: u64,
    exp: i64,
}

impl Default for Mag {
    fn default() -> Self {
        Mag::ZERO
    }
}

// `add`, `mul` and `div` round upward, so they are not `std::ops` impls.
#[allow(clippy::should_implement_trait)]
impl Mag {
    pub const ZERO: Mag = Mag { man: 0, exp: 0 };
    pub const INF: Mag = Mag { man: TOP, exp: INF_EXP };

    pub fn is_zero(self) -> bool {
        self.man == 0
    }

    pub fn is_inf(self) -> bool {
        self.exp >= INF_EXP
    }

    pub fn is_finite(self) -> bool {
        !self.is_inf()
    }

    fn normalize(m: u128, exp: i64, up: bool) -> Mag {
        if m == 0 {
            return Mag::ZERO;
        }
        let bits = 128 - m.leading_zeros();
        let (man, exp) = if bits > BITS {
            let sh = bits - BITS;
            let mut q = (m >> sh) as u64;
            let mut e = exp + sh as i64;
            if up && m & ((1u128 << sh) - 1) != 0 {
                q += 1;
                if q == 1 << BITS {
                    q = TOP;
                    e += 1;
                }
            }
            (q, e)
        } else {
            let sh = BITS - bits;
            ((m << sh) as u64, exp - sh as i64)
        };
        if exp > MAX_EXP {
            Mag::INF
        } else if exp < MIN_EXP {
            if up {
                Mag { man: TOP, exp: MIN_EXP }
            } else {
                Mag::ZERO
            }
        } else {
            Mag { man, exp }
        }
    }

    /// Upper bound of `m · 2^exp`.
    pub fn from_u128_up(m: u128, exp: i64) -> Mag {
        Mag::normalize(m, exp, true)
    }

    /// Lower bound of `m · 2^exp`.
    pub fn from_u128_down(m: u128, exp: i64) -> Mag {
        Mag::normalize(m, exp, false)
    }

    pub fn from_u64(m: u64) -> Mag {
        Mag::normalize(m as u128, 0, true)
    }

    pub fn pow2(exp: i64) -> Mag {
        Mag::normalize(1, exp, true)
    }

    fn from_biguint(m: &BigUint, exp: i64, up: bool) -> Mag {
        let bits = m.bits();
        if bits <= 64 {
            return Mag::normalize(m.to_u64().unwrap_or(0) as u128, exp, up);
        }
        let shift = bits - 64;
        let top = (m >> shift).to_u64().unwrap_or(u64::MAX) as u128;
        let sticky = m.trailing_zeros().unwrap_or(0) < shift;
        let top = if up && sticky { top + 1 } else { top };
        Mag::normalize(top, exp + shift as i64, up)
    }

    /// Upper bound of `m · 2^exp` for an arbitrary-size integer.
    pub fn from_biguint_up(m: &BigUint, exp: i64) -> Mag {
        Mag::from_biguint(m, exp, true)
    }

    pub fn from_biguint_down(m: &BigUint, exp: i64) -> Mag {
        Mag::from_biguint(m, exp, false)
    }

    fn from_f64(x: f64, up: bool) -> Mag {
        assert!(x >= 0.0, "Mag from negative float {x}");
        if x.is_infinite() || x.is_nan() {
            return Mag::INF;
        }
        if x == 0.0 {
            return Mag::ZERO;
        }
        let bits = x.to_bits();
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, exp) = if e == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), e - 1075)
        };
        Mag::normalize(m as u128, exp, up)
    }

    /// Upper bound of a non-negative float (the float is taken as exact).
    pub fn from_f64_up(x: f64) -> Mag {
        Mag::from_f64(x, true)
    }

    pub fn from_f64_down(x: f64) -> Mag {
        Mag::from_f64(x, false)
    }

    /// Nearest double; saturates to `inf` / `0.0` outside the double range.
    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.is_inf() || self.exp > 1100 {
            return f64::INFINITY;
        }
        if self.exp < -1200 {
            return 0.0;
        }
        let half = (self.exp / 2) as i32;
        let rest = (self.exp - self.exp / 2) as i32;
        self.man as f64 * 2f64.powi(half) * 2f64.powi(rest)
    }

    /// Approximate base-2 logarithm, for heuristics only.
    pub fn log2(self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else if self.is_inf() {
            f64::INFINITY
        } else {
            (self.man as f64).log2() + self.exp as f64
        }
    }

    /// `(mantissa, exponent)` with `self = mantissa · 2^exponent`.
    pub(crate) fn parts(self) -> (u64, i64) {
        (self.man, self.exp)
    }

    /// Exponent `e` with `2^(e-1) ≤ self < 2^e`; `None` for zero.
    pub fn top_exp(self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + BITS as i64)
        }
    }

    fn add_impl(self, other: Mag, up: bool) -> Mag {
        if self.is_inf() || other.is_inf() {
            return Mag::INF;
        }
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let d = (hi.exp - lo.exp) as u64;
        let hi_units = (hi.man as u128) << 64;
        let lo_units = if d <= 64 {
            (lo.man as u128) << (64 - d)
        } else {
            let q = (lo.man as u128) >> (d - 64).min(127);
            if up {
                q + 1
            } else {
                q
            }
        };
        Mag::normalize(hi_units + lo_units, hi.exp - 64, up)
    }

    pub fn add(self, other: Mag) -> Mag {
        self.add_impl(other, true)
    }

    pub fn add_down(self, other: Mag) -> Mag {
        self.add_impl(other, false)
    }

    /// Lower bound of `max(self − other, 0)`.
    pub fn sub_down(self, other: Mag) -> Mag {
        if other.is_zero() {
            return self;
        }
        if self.is_inf() {
            return if other.is_inf() { Mag::ZERO } else { Mag::INF };
        }
        if other >= self {
            return Mag::ZERO;
        }
        let d = (self.exp - other.exp) as u64;
        let a_units = (self.man as u128) << 64;
        let b_units = if d <= 64 {
            (other.man as u128) << (64 - d)
        } else {
            ((other.man as u128) >> (d - 64).min(127)) + 1
        };
        Mag::normalize(a_units.saturating_sub(b_units), self.exp - 64, false)
    }

    fn mul_impl(self, other: Mag, up: bool) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::ZERO;
        }
        if self.is_inf() || other.is_inf() {
            return Mag::INF;
        }
        Mag::normalize(self.man as u128 * other.man as u128, self.exp + other.exp, up)
    }

    pub fn mul(self, other: Mag) -> Mag {
        self.mul_impl(other, true)
    }

    pub fn mul_down(self, other: Mag) -> Mag {
        self.mul_impl(other, false)
    }

    fn div_impl(self, other: Mag, up: bool) -> Mag {
        if self.is_zero() {
            return Mag::ZERO;
        }
        if other.is_zero() || self.is_inf() {
            return if up { Mag::INF } else { Mag::ZERO.max(self) };
        }
        if other.is_inf() {
            return if up { Mag::pow2(MIN_EXP) } else { Mag::ZERO };
        }
        let num = (self.man as u128) << 64;
        let den = other.man as u128;
        let q = num / den;
        let q = if up && !num.is_multiple_of(den) { q + 1 } else { q };
        Mag::normalize(q, self.exp - other.exp - 64, up)
    }

    pub fn div(self, other: Mag) -> Mag {
        self.div_impl(other, true)
    }

    pub fn div_down(self, other: Mag) -> Mag {
        self.div_impl(other, false)
    }

    /// Exact multiplication by `2^e`.
    pub fn mul_2exp(self, e: i64) -> Mag {
        if self.is_zero() || self.is_inf() {
            return self;
        }
        Mag::normalize(self.man as u128, self.exp + e, true)
    }

    pub fn mul_u64(self, n: u64) -> Mag {
        self.mul(Mag::from_u64(n))
    }

    fn sqrt_impl(self, up: bool) -> Mag {
        if self.is_zero() || self.is_inf() {
            return self;
        }
        let (m, e) = if self.exp % 2 != 0 {
            ((self.man as u128) << 1, self.exp - 1)
        } else {
            (self.man as u128, self.exp)
        };
        let big = m << 64;
        let s = big.isqrt();
        let s = if up && s * s < big { s + 1 } else { s };
        Mag::normalize(s, (e - 64) / 2, up)
    }

    pub fn sqrt(self) -> Mag {
        self.sqrt_impl(true)
    }

    pub fn sqrt_down(self) -> Mag {
        self.sqrt_impl(false)
    }

    fn pow_impl(self, mut n: u64, up: bool) -> Mag {
        let mut base = self;
        let mut acc = Mag::from_u64(1);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_impl(base, up);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_impl(base, up);
            }
        }
        acc
    }

    pub fn pow(self, n: u64) -> Mag {
        self.pow_impl(n, true)
    }

    pub fn pow_down(self, n: u64) -> Mag {
        self.pow_impl(n, false)
    }

    /// Upper bound of `e^self − 1`.
    pub fn expm1(self) -> Mag {
        if self.is_zero() {
            return Mag::ZERO;
        }
        if self <= Mag::pow2(-1) {
            // e^r − 1 ≤ r·e^r ≤ r·e^{1/2}
            return self.mul(Mag::from_f64_up(1.648_721_271));
        }
        let r = self.to_f64();
        if r > 700.0 {
            return Mag::INF;
        }
        Mag::from_f64_up(r.exp_m1() * (1.0 + 1e-12))
    }

    pub fn max(self, other: Mag) -> Mag {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Mag) -> Mag {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl Ord for Mag {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        match (self.is_inf(), other.is_inf()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Greater,
            (false, true) => return Ordering::Less,
            _ => {}
        }
        self.exp.cmp(&other.exp).then(self.man.cmp(&other.man))
    }
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_directions_bracket_exact_values() {
        let third_up = Mag::from_u64(1).div(Mag::from_u64(3));
        let third_down = Mag::from_u64(1).div_down(Mag::from_u64(3));
        assert!(third_down < third_up);
        assert!(third_up.to_f64() >= 1.0 / 3.0);
        assert!(third_down.to_f64() <= 1.0 / 3.0);
        let sum = Mag::from_u64(1).add(Mag::pow2(-100));
        assert!(sum > Mag::from_u64(1));
        let diff = Mag::from_u64(1).sub_down(Mag::pow2(-100));
        assert!(diff < Mag::from_u64(1));
    }

    #[test]
    fn exact_small_values_round_trip() {
        for v in [1u64, 2, 3, 12345, (1 << 29) + 7] {
            assert_eq!(Mag::from_u64(v).to_f64(), v as f64);
        }
        assert_eq!(Mag::from_f64_up(0.375).to_f64(), 0.375);
        assert_eq!(Mag::pow2(-2000).log2(), -2000.0);
    }

    #[test]
    fn sqrt_brackets() {
        let two = Mag::from_u64(2);
        assert!(two.sqrt().to_f64() >= std::f64::consts::SQRT_2);
        assert!(two.sqrt_down().to_f64() <= std::f64::consts::SQRT_2);
        assert_eq!(Mag::pow2(-40).sqrt(), Mag::pow2(-20));
    }

    #[test]
    fn sub_never_goes_negative() {
        assert!(Mag::from_u64(3).sub_down(Mag::from_u64(5)).is_zero());
        assert_eq!(Mag::from_u64(5).sub_down(Mag::from_u64(3)), Mag::from_u64(2));
    }

    #[test]
    fn infinity_absorbs() {
        assert!(Mag::INF.add(Mag::from_u64(1)).is_inf());
        assert!(Mag::from_u64(1).div(Mag::ZERO).is_inf());
        assert!(Mag::from_u64(1) < Mag::INF);
        assert!(Mag::ZERO.mul(Mag::INF).is_zero());
    }

    #[test]
    fn big_integers_are_bracketed() {
        let m = (BigUint::from(1u8) << 200u32) + 1u8;
        let up = Mag::from_biguint_up(&m, 0);
        let down = Mag::from_biguint_down(&m, 0);
        assert!(up > down);
        assert_eq!(down, Mag::pow2(200));
    }
}
