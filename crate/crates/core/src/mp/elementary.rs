//! Square root, exp, log, atan, sin/cos on balls.
//!
//! Each function evaluates at the exact midpoint with guard bits and a
//! rigorous truncation bound, then widens the result by a Lipschitz bound
//! for the input radius.

use num_bigint::Sign;

use super::consts::{ln2, pi};
use super::mag::Mag;
use super::real::MpReal;

fn halvings(wp: u32) -> u32 {
    ((wp as f64).sqrt() / 2.0) as u32 + 2
}

impl MpReal {
    pub fn sqrt(&self) -> MpReal {
        let prec = self.prec();
        if !self.is_finite() || self.is_negative() {
            return MpReal::from_radius(Mag::INF, prec);
        }
        if self.contains_zero() {
            if self.is_zero() {
                return MpReal::zero(prec);
            }
            return MpReal::from_radius(self.abs_upper().sqrt(), prec);
        }
        let man = self.mantissa();
        let exp = self.exponent();
        let want = 2 * (prec as i64 + 4);
        let mut shift = (want - man.bits() as i64).max(0);
        if (exp - shift) % 2 != 0 {
            shift += 1;
        }
        let m = man << shift as u64;
        let q = m.sqrt();
        let res_exp = (exp - shift) / 2;
        let trunc = if &q * &q == m { Mag::ZERO } else { Mag::pow2(res_exp) };
        let prop = if self.radius().is_zero() {
            Mag::ZERO
        } else {
            let lower = self.abs_lower().sqrt_down().mul_2exp(1);
            self.radius().div(lower)
        };
        MpReal::from_parts(Sign::Plus, q, res_exp, trunc.add(prop), prec)
    }

    pub fn exp(&self) -> MpReal {
        let prec = self.prec();
        if !self.is_finite() {
            return MpReal::from_radius(Mag::INF, prec);
        }
        let core = exp_exact(&self.mid(), prec);
        let extra = core.abs_upper().mul(self.radius().expm1());
        core.add_error(extra)
    }

    /// Natural logarithm; unbounded unless the ball is strictly positive.
    pub fn ln(&self) -> MpReal {
        let prec = self.prec();
        if !self.is_finite() || !self.is_positive() {
            return MpReal::from_radius(Mag::INF, prec);
        }
        let core = ln_exact(&self.mid(), prec);
        core.add_error(self.radius().div(self.abs_lower()))
    }

    pub fn atan(&self) -> MpReal {
        let prec = self.prec();
        if !self.is_finite() {
            return MpReal::from_radius(Mag::INF, prec);
        }
        atan_exact(&self.mid(), prec).add_error(self.radius())
    }

    /// `(sin x, cos x)`.
    pub fn sin_cos(&self) -> (MpReal, MpReal) {
        let prec = self.prec();
        if !self.is_finite() {
            return (
                MpReal::from_radius(Mag::from_u64(1), prec),
                MpReal::from_radius(Mag::from_u64(1), prec),
            );
        }
        let (s, c) = sin_cos_exact(&self.mid(), prec);
        (s.add_error(self.radius()), c.add_error(self.radius()))
    }

    /// `x^y = exp(y·ln x)` for positive `x`.
    pub fn powf(&self, y: &MpReal) -> MpReal {
        (y * &self.ln()).exp()
    }
}

fn exp_exact(x: &MpReal, prec: u32) -> MpReal {
    if x.mid_is_zero() {
        return MpReal::one(prec);
    }
    let xf = x.to_f64();
    if xf > 1e11 {
        return MpReal::from_radius(Mag::INF, prec);
    }
    if xf < -1e11 {
        return MpReal::from_radius(Mag::pow2(-(1 << 40)), prec);
    }
    let n = (xf / std::f64::consts::LN_2).round() as i64;
    let nbits = 64 - n.unsigned_abs().leading_zeros();
    let j = halvings(prec);
    let wp = prec + nbits + j + 20;
    let t = x.with_prec(wp).sub(&ln2(wp + nbits + 4).mul_i64(n));
    let u = t.mul_2exp(-(j as i64));
    let eps = Mag::pow2(-(wp as i64) - 4);
    let mut sum = MpReal::one(wp);
    let mut term = MpReal::one(wp);
    let mut i = 1u64;
    loop {
        term = term.mul(&u).div_u64(i);
        sum = sum.add(&term);
        if term.abs_upper() < eps {
            break;
        }
        i += 1;
    }
    // |u| < 1/8 so the remaining terms sum to less than |term|.
    sum = sum.add_error(term.abs_upper());
    for _ in 0..j {
        sum = sum.sqr();
    }
    sum.mul_2exp(n).round(prec)
}

/// `Σ t^(2i+1)/(2i+1)` for |t| ≤ 1/2.
fn atanh_series(t: &MpReal, wp: u32) -> MpReal {
    let t2 = t.sqr();
    let eps = Mag::pow2(-(wp as i64) - 4);
    let mut power = t.clone();
    let mut sum = t.clone();
    let mut i = 1u64;
    loop {
        power = power.mul(&t2);
        sum = sum.add(&power.div_u64(2 * i + 1));
        if power.abs_upper() < eps {
            break;
        }
        i += 1;
    }
    sum.add_error(power.abs_upper())
}

fn ln_exact(x: &MpReal, prec: u32) -> MpReal {
    let man = x.mantissa();
    let b = man.bits() as i64;
    let mut e = x.exponent() + b;
    // y = man / 2^b ∈ [1/2, 1); move it into [1/√2, √2).
    let mut y_exp = -b;
    let sq = man * man;
    let four_b = num_bigint::BigUint::from(1u8) << (2 * b as u64);
    if &sq * 2u32 < four_b {
        y_exp += 1;
        e -= 1;
    }
    let ebits = 64 - e.unsigned_abs().leading_zeros();
    let wp = prec + ebits + 20;
    let y = MpReal::from_parts(Sign::Plus, man.clone(), y_exp, Mag::ZERO, wp);
    let one = MpReal::one(wp);
    let t = y.sub(&one).div(&y.add(&one));
    let mut res = if t.mid_is_zero() && t.is_exact() {
        MpReal::zero(wp)
    } else {
        atanh_series(&t, wp).mul_2exp(1)
    };
    if e != 0 {
        res = res.add(&ln2(wp + ebits + 4).mul_i64(e));
    }
    res.round(prec)
}

/// atan on |x| ≤ 1 via argument halving and the Taylor series.
fn atan_reduced(x: &MpReal, wp: u32) -> MpReal {
    let j = halvings(wp);
    let one = MpReal::one(wp);
    let mut y = x.clone();
    for _ in 0..j {
        let r = one.add(&y.sqr()).sqrt();
        y = y.div(&one.add(&r));
    }
    let y2 = y.sqr();
    let eps = Mag::pow2(-(wp as i64) - 4);
    let mut power = y.clone();
    let mut sum = y.clone();
    let mut i = 1u64;
    loop {
        power = power.mul(&y2);
        let term = power.div_u64(2 * i + 1);
        sum = if i % 2 == 1 { sum.sub(&term) } else { sum.add(&term) };
        if power.abs_upper() < eps {
            break;
        }
        i += 1;
    }
    sum.add_error(power.abs_upper()).mul_2exp(j as i64)
}

fn atan_exact(x: &MpReal, prec: u32) -> MpReal {
    if x.mid_is_zero() {
        return MpReal::zero(prec);
    }
    let wp = prec + 2 * halvings(prec) + 30;
    let xw = x.with_prec(wp);
    let res = if x.mid_mag_down() > Mag::from_u64(1) {
        let half_pi = pi(wp).mul_2exp(-1);
        let r = atan_reduced(&xw.recip(), wp);
        if x.mid_sign() == Sign::Minus {
            half_pi.neg().sub(&r)
        } else {
            half_pi.sub(&r)
        }
    } else {
        atan_reduced(&xw, wp)
    };
    res.round(prec)
}

fn sin_cos_exact(x: &MpReal, prec: u32) -> (MpReal, MpReal) {
    if x.mid_is_zero() {
        return (MpReal::zero(prec), MpReal::one(prec));
    }
    let xf = x.to_f64();
    if xf.abs() > 1e12 {
        let unit = MpReal::from_radius(Mag::from_u64(1), prec);
        return (unit.clone(), unit);
    }
    let n = (xf / std::f64::consts::TAU).round() as i64;
    let nbits = 64 - n.unsigned_abs().leading_zeros();
    let j = halvings(prec);
    let wp = prec + nbits + 2 * j + 20;
    let two_pi = pi(wp + nbits + 8).mul_2exp(1);
    let t = if n == 0 {
        x.with_prec(wp)
    } else {
        x.with_prec(wp).sub(&two_pi.mul_i64(n))
    };
    let a = t.mul_2exp(-(j as i64));
    let a2 = a.sqr();
    let eps = Mag::pow2(-(wp as i64) - 4);
    let mut s = a.clone();
    let mut c = MpReal::one(wp);
    let mut term_s = a.clone();
    let mut term_c = MpReal::one(wp);
    let mut k = 1u64;
    loop {
        term_c = term_c.mul(&a2).div_u64((2 * k - 1) * (2 * k)).neg();
        term_s = term_s.mul(&a2).div_u64((2 * k) * (2 * k + 1)).neg();
        c = c.add(&term_c);
        s = s.add(&term_s);
        if term_c.abs_upper().max(term_s.abs_upper()) < eps {
            break;
        }
        k += 1;
    }
    let tail = term_c.abs_upper().max(term_s.abs_upper());
    s = s.add_error(tail);
    c = c.add_error(tail);
    let one = MpReal::one(wp);
    for _ in 0..j {
        let s2 = s.mul(&c).mul_2exp(1);
        c = one.sub(&s.sqr().mul_2exp(1));
        s = s2;
    }
    (s.round(prec), c.round(prec))
}
