//! log Γ by Stirling's series with argument raising.
//!
//! The branch is the analytic continuation of `ln Γ` from the positive
//! axis into the plane cut along (−∞, 0]; on the cut itself the value is
//! the limit from above, so `Im ln Γ(x) = −π·⌈−x⌉` for negative real `x`.

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive};

use super::complex::MpComplex;
use super::consts::pi;
use super::mag::Mag;
use super::real::MpReal;
use crate::config::{self, check_precision};
use crate::error::{Error, Result};
use crate::zeta::bernoulli::bernoulli;

fn magnitude_bits(z: &MpComplex) -> u32 {
    let m = z.abs_upper().log2().max(0.0);
    m.ceil() as u32 + 1
}

/// Nonpositive integer `n` when the ball `z` is exactly that pole.
fn exact_pole(z: &MpComplex) -> Option<BigInt> {
    if !z.im.is_zero() {
        return None;
    }
    z.re.exact_integer().filter(|n| !n.is_positive())
}

/// True when the box contains some nonpositive integer.
fn touches_pole(z: &MpComplex) -> bool {
    if !z.im.contains_zero() {
        return false;
    }
    let x = &z.re;
    if x.is_positive() {
        return false;
    }
    let n = x.floor_mid();
    [n.clone(), n + 1]
        .iter()
        .any(|c| !c.is_positive() && x.contains(&MpReal::from_bigint(c, x.prec())))
}

/// Stirling's series at `w` with `Re w > 0`. `None` if the terms stop
/// shrinking before reaching `2^−wp`.
fn stirling(w: &MpComplex, wp: u32) -> Result<Option<MpComplex>> {
    let abs_lo = w.abs_lower();
    let abs_hi = w.abs_upper();
    let re_lo = w.re.abs_lower();
    if abs_lo.is_zero() || !w.re.is_positive() {
        return Ok(None);
    }
    // sec²(θ/2) = 2|w| / (|w| + Re w).
    let sec2 = Mag::from_u64(2).div(Mag::from_u64(1).add_down(re_lo.div_down(abs_hi)));
    let eps = Mag::pow2(-(wp as i64) - 2);
    let half = MpReal::one(wp).mul_2exp(-1);
    let two_pi = pi(wp + 8).mul_2exp(1);
    let lw = w.ln();
    let mut sum = w.sub(&MpComplex::from_real(half)).mul(&lw).sub(w);
    sum = sum.add_real(&two_pi.ln().mul_2exp(-1));
    let inv = w.recip();
    let inv2 = inv.sqr();
    let mut power = inv;
    let max_n = config::active().bernoulli_max_n / 2;
    let mut prev = Mag::INF;
    let mut k = 1u64;
    loop {
        if k > max_n {
            return Ok(None);
        }
        let b = bernoulli(2 * k)?;
        let denom = BigInt::from(2 * k) * BigInt::from(2 * k - 1);
        let coef_abs = Mag::from_biguint_up(b.numer().magnitude(), 0)
            .div(Mag::from_biguint_down(&(b.denom() * &denom).magnitude().clone(), 0));
        // Bound on the remainder after k − 1 terms.
        let bound = coef_abs.div(abs_lo.pow_down(2 * k - 1)).mul(sec2.pow(k));
        if bound < eps {
            return Ok(Some(sum.add_error(bound)));
        }
        if bound >= prev {
            return Ok(None);
        }
        prev = bound;
        let c = MpReal::from_ratio(b.numer(), &(b.denom() * &denom), wp);
        sum = sum.add(&power.mul_real(&c));
        power = power.mul(&inv2);
        k += 1;
    }
}

/// `Π_{j<r} (z + j)`.
fn rising(z: &MpComplex, r: u64) -> MpComplex {
    let mut p = MpComplex::one(z.prec());
    for j in 0..r {
        p = p.mul(&z.add_real(&MpReal::from_u64(j, 64)));
    }
    p
}

/// log Γ for `z` off the poles and with `Re z ≥ 0` or `Im z ≠ 0`.
fn log_gamma_raised(z: &MpComplex, wp: u32) -> Result<MpComplex> {
    let factor = config::active().lgamma_raise_factor;
    let mut target = factor * wp as f64 + 10.0;
    loop {
        let x = z.re.to_f64();
        let r = (target - x).ceil().max(0.0) as u64;
        let inner_wp = wp + 64 - (r + 1).leading_zeros() + 4;
        let zw = z.with_prec(inner_wp);
        let w = zw.add_real(&MpReal::from_u64(r, 64));
        let Some(s) = stirling(&w, inner_wp)? else {
            target *= 2.0;
            continue;
        };
        if r == 0 {
            return Ok(s);
        }
        let p = rising(&zw, r);
        let logp = if z.im.is_zero() {
            let count = if x < 0.0 {
                (-z.re.floor_mid()).to_u64().unwrap_or(0).min(r)
            } else {
                0
            };
            MpComplex::new(p.re.abs().ln(), pi(inner_wp).mul_i64(count as i64))
        } else {
            let mut l = if p.re.is_negative() {
                let mut l = p.neg().ln();
                let half = if p.im.mid_sign() == Sign::Minus { -1 } else { 1 };
                l.im = l.im.add(&pi(inner_wp).mul_i64(half));
                l
            } else {
                p.ln()
            };
            // Branch of Σ arg(z + j), tracked in doubles.
            let (zr, zi) = z.to_f64();
            let total: f64 = (0..r).map(|j| f64::atan2(zi, zr + j as f64)).sum();
            let m = ((total - l.im.to_f64()) / std::f64::consts::TAU).round() as i64;
            if m != 0 {
                l.im = l.im.add(&pi(inner_wp).mul_2exp(1).mul_i64(m));
            }
            l
        };
        return Ok(s.sub(&logp));
    }
}

/// Principal-branch `ln Γ(z)` (see the module docs for the branch).
pub fn log_gamma(z: &MpComplex, precision: u32) -> Result<MpComplex> {
    check_precision(precision)?;
    if let Some(n) = exact_pole(z) {
        return Err(Error::domain(format!("log_gamma: pole of Γ at z = {n}")));
    }
    if touches_pole(z) {
        return Ok(MpComplex::new(
            MpReal::from_radius(Mag::INF, precision),
            MpReal::from_radius(Mag::INF, precision),
        ));
    }
    let wp = precision + 2 * magnitude_bits(z) + 24;
    let res = if z.im.is_zero() && z.re.is_negative() {
        // Reflection: ln|Γ(x)| = ln π − ln|sin πx| − ln Γ(1 − x).
        let x = z.re.with_prec(wp);
        let count = (-z.re.floor_mid()).to_i64().unwrap_or(i64::MAX);
        let p = pi(wp);
        let (s, _) = x.mul(&p).sin_cos();
        let one_minus = MpComplex::from_real(MpReal::one(wp).sub(&x));
        let g = log_gamma_raised(&one_minus, wp)?;
        let re = p.ln().sub(&s.abs().ln()).sub(&g.re);
        MpComplex::new(re, p.mul_i64(count).neg())
    } else {
        log_gamma_raised(&z.with_prec(wp), wp)?
    };
    Ok(res.round(precision))
}

/// `Γ(a)/Γ(b)` for real `a`, `b` off the poles.
pub fn gamma_ratio(a: &MpReal, b: &MpReal, precision: u32) -> Result<MpReal> {
    check_precision(precision)?;
    let wp = precision + 16;
    let la = log_gamma(&MpComplex::from_real(a.clone()), wp)?;
    let lb = log_gamma(&MpComplex::from_real(b.clone()), wp)?;
    let d = la.sub(&lb);
    // Im d = −π·(count_a − count_b): the parity gives the sign.
    let p = pi(wp);
    let turns = d.im.div(&p).to_f64().round() as i64;
    let residual = d.im.sub(&p.mul_i64(turns));
    let mag = d.re.exp();
    let extra = mag.abs_upper().mul(residual.abs_upper().expm1().mul_2exp(1));
    let v = if turns % 2 == 0 { mag } else { mag.neg() };
    Ok(v.add_error(extra).round(precision))
}
