//! π and ln 2, memoized at the highest precision requested so far.

use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::mag::Mag;
use super::real::MpReal;
use crate::config::check_precision;
use crate::error::Result;

/// Fixed-point `Σ (−1)^i ⌊2^wp / x^(2i+1)⌋ / (2i+1)`; returns the sum and
/// the number of terms. Each term is off by less than 2 units and the
/// alternating tail by less than 1 unit.
fn atan_recip_fixed(x: u64, wp: u64) -> (BigInt, u64) {
    let x2 = BigInt::from(x * x);
    let mut power = (BigInt::one() << wp) / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut i = 0u64;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * i + 1);
        if i.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        i += 1;
    }
    (sum, i)
}

/// Machin's formula π = 16·atan(1/5) − 4·atan(1/239) in fixed point.
fn compute_pi(prec: u32) -> MpReal {
    let wp = prec as u64 + 32;
    let (a, ta) = atan_recip_fixed(5, wp);
    let (b, tb) = atan_recip_fixed(239, wp);
    let units = 16 * (2 * ta + 1) + 4 * (2 * tb + 1);
    let v = a * 16 - b * 4;
    MpReal::from_bigint_2exp(&v, -(wp as i64), prec).add_error(Mag::from_u64(units).mul_2exp(-(wp as i64)))
}

/// ln 2 = Σ_{i≥1} 1/(i·2^i) in fixed point.
fn compute_ln2(prec: u32) -> MpReal {
    let wp = prec as u64 + 32;
    let mut sum = BigInt::zero();
    for i in 1..=wp {
        sum += (BigInt::one() << (wp - i)) / BigInt::from(i);
    }
    // wp truncations of < 1 unit each plus a tail below 2^−wp.
    MpReal::from_bigint_2exp(&sum, -(wp as i64), prec).add_error(Mag::from_u64(wp + 1).mul_2exp(-(wp as i64)))
}

fn memoized(cell: &RwLock<Option<MpReal>>, prec: u32, compute: fn(u32) -> MpReal) -> MpReal {
    if let Some(v) = cell.read().expect("constant cache poisoned").as_ref() {
        if v.prec() >= prec {
            return v.round(prec);
        }
    }
    let target = prec.next_multiple_of(64) + 64;
    let v = compute(target);
    let mut slot = cell.write().expect("constant cache poisoned");
    if slot.as_ref().is_none_or(|old| old.prec() < v.prec()) {
        *slot = Some(v.clone());
    }
    v.round(prec)
}

static PI: RwLock<Option<MpReal>> = RwLock::new(None);
static LN2: RwLock<Option<MpReal>> = RwLock::new(None);

pub(crate) fn pi(prec: u32) -> MpReal {
    memoized(&PI, prec, compute_pi)
}

pub(crate) fn ln2(prec: u32) -> MpReal {
    memoized(&LN2, prec, compute_ln2)
}

/// π to `precision` bits with radius at most `2^(2−precision)·π`.
pub fn pi_const(precision: u32) -> Result<MpReal> {
    check_precision(precision)?;
    Ok(pi(precision))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    // 50 digits of π and ln 2 from standard tables.
    const PI_50: &str = "3.1415926535897932384626433832795028841971693993751";
    const LN2_50: &str = "0.69314718055994530941723212145817656807550013436026";

    fn reference(s: &str) -> MpReal {
        MpReal::parse_decimal(s, "1e-50", 200).unwrap()
    }

    #[test]
    fn pi_matches_published_digits() {
        let p = pi_const(64).unwrap();
        assert!(p.overlaps(&reference(PI_50)));
        assert!(p.radius() <= Mag::pow2(-62).mul_u64(4));
        let wide = pi_const(160).unwrap();
        assert!(wide.overlaps(&reference(PI_50)));
        assert!(wide.radius() < Mag::pow2(-155));
    }

    #[test]
    fn pi_integer_part() {
        assert_eq!(pi_const(32).unwrap().floor_mid(), BigInt::from(3));
    }

    #[test]
    fn precisions_are_consistent() {
        let hi = pi_const(256).unwrap().round(64);
        let lo = pi_const(64).unwrap();
        assert!(hi.overlaps(&lo));
    }

    #[test]
    fn low_precision_rejected() {
        assert!(matches!(pi_const(8), Err(Error::Config(_))));
    }

    #[test]
    fn ln2_matches_published_digits() {
        let l = ln2(128);
        assert!(l.overlaps(&reference(LN2_50)));
        assert!(l.radius() < Mag::pow2(-125));
    }
}
