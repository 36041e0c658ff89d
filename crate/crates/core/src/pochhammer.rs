//! Pochhammer polynomials `P_k(s) = Π_{r=1}^{k} (1 − s/r)`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::config::{self, check_precision};
use crate::error::{Error, Result};
use crate::mp::{log_gamma, Mag, MpComplex, MpReal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PochhammerMethod {
    DirectProduct,
    GammaRatio,
}

#[derive(Clone, Debug, Serialize)]
pub struct PochhammerValue {
    pub k: u64,
    pub s: MpComplex,
    pub value: MpComplex,
    pub method: PochhammerMethod,
}

/// `Some(j)` when `s` is exactly the positive integer `j`.
pub fn positive_integer(s: &MpComplex) -> Option<u64> {
    if !s.im.is_zero() {
        return None;
    }
    s.re.exact_integer().and_then(|n| n.to_u64()).filter(|&n| n >= 1)
}

fn bits(k: u64) -> u32 {
    64 - k.leading_zeros()
}

/// `Π_{r=1}^{k} (r − s)` divided by `k!` in one step.
pub fn pochhammer_direct(k: u64, s: &MpComplex, precision: u32) -> Result<PochhammerValue> {
    check_precision(precision)?;
    let value = if positive_integer(s).is_some_and(|j| j <= k) {
        MpComplex::zero(precision)
    } else {
        let wp = precision + 2 * bits(k) + 10;
        let mut num = MpComplex::one(wp);
        let mut fact = MpReal::one(wp);
        for r in 1..=k {
            let rr = MpReal::from_u64(r, 64);
            num = num.mul(&s.neg().add_real(&rr));
            fact = fact.mul(&rr);
        }
        num.div(&MpComplex::from_real(fact)).round(precision)
    };
    Ok(PochhammerValue {
        k,
        s: s.clone(),
        value,
        method: PochhammerMethod::DirectProduct,
    })
}

/// `Γ(k+1−s) / (Γ(1−s)·Γ(k+1))`.
pub fn pochhammer_gamma(k: u64, s: &MpComplex, precision: u32) -> Result<PochhammerValue> {
    check_precision(precision)?;
    if k == 0 {
        return Err(Error::usage("pochhammer_gamma requires k ≥ 1"));
    }
    if let Some(j) = positive_integer(s) {
        return Err(Error::usage(format!(
            "pochhammer_gamma: s = {j} is a positive integer; use pochhammer_direct"
        )));
    }
    let wp = precision + 2 * bits(k + 2) + 16;
    let one = MpReal::one(wp);
    let kk = MpReal::from_u64(k, wp);
    let sw = s.with_prec(wp);
    let a = sw.neg().add_real(&kk.add(&one));
    let b = sw.neg().add_real(&one);
    let c = MpComplex::from_real(kk.add(&one));
    let l = log_gamma(&a, wp)?.sub(&log_gamma(&b, wp)?).sub(&log_gamma(&c, wp)?);
    Ok(PochhammerValue {
        k,
        s: s.clone(),
        value: l.exp().round(precision),
        method: PochhammerMethod::GammaRatio,
    })
}

/// Direct product for small `k` or integer `s`, Γ ratio otherwise.
pub fn pochhammer(k: u64, s: &MpComplex, precision: u32) -> Result<PochhammerValue> {
    if k <= config::active().pochhammer_direct_max_k || positive_integer(s).is_some() {
        pochhammer_direct(k, s, precision)
    } else {
        pochhammer_gamma(k, s, precision)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BinomialIdentity {
    /// `(−1)^k·C(s/2 − 1, k)` from the falling factorial.
    pub binomial_side: MpComplex,
    /// `P_k(s/2)`.
    pub pochhammer_side: MpComplex,
    pub overlap: bool,
    /// Upper bound on `|binomial_side − pochhammer_side|` over both balls.
    pub residual: Mag,
}

/// Checks `(−1)^k·C(s/2 − 1, k) = P_k(s/2)`.
pub fn binomial_identity_check(k: u64, s: &MpComplex, precision: u32) -> Result<BinomialIdentity> {
    check_precision(precision)?;
    let wp = precision + 2 * bits(k) + 10;
    let half = s.with_prec(wp).mul_2exp(-1);
    let x = half.add_real(&MpReal::from_i64(-1, 64));
    let mut falling = MpComplex::one(wp);
    let mut fact = BigInt::from(1);
    for i in 0..k {
        falling = falling.mul(&x.add_real(&MpReal::from_i64(-(i as i64), 64)));
        fact *= i + 1;
    }
    let mut lhs = falling.div(&MpComplex::from_real(MpReal::from_bigint(&fact, wp)));
    if k % 2 == 1 {
        lhs = lhs.neg();
    }
    let lhs = lhs.round(precision);
    let rhs = pochhammer_direct(k, &half, precision)?.value;
    let d = lhs.sub(&rhs);
    Ok(BinomialIdentity {
        overlap: lhs.overlaps(&rhs),
        residual: d.abs_upper(),
        binomial_side: lhs,
        pochhammer_side: rhs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundScan {
    /// `sup_{1≤k≤k_max} |P_k(s)|·k^{Re s}` (midpoint values).
    pub sup: f64,
    pub argmax: u64,
    /// The sup is attained in `[k_max/2, k_max]`, or the values there stay
    /// within 10% of their mean.
    pub stabilized: bool,
    /// `|P_k(s)|·k^{Re s}` at `k = k_max`.
    pub last: f64,
}

/// Empirical constant in `|P_k(s)| ≤ C·k^{−Re s}`.
pub fn pochhammer_bound_scan(s: &MpComplex, k_max: u64, precision: u32) -> Result<BoundScan> {
    check_precision(precision)?;
    if k_max < 10 {
        return Err(Error::usage("pochhammer_bound_scan requires k_max ≥ 10"));
    }
    let wp = precision + 2 * bits(k_max) + 10;
    let sigma = s.re.with_prec(wp);
    let sw = s.with_prec(wp);
    let mut p = MpComplex::one(wp);
    let mut scaled = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let kk = MpReal::from_u64(k, wp);
        p = p.mul(&MpComplex::one(wp).sub(&sw.div(&MpComplex::from_real(kk.clone()))));
        let v = if p.is_zero() {
            0.0
        } else {
            p.abs().mul(&kk.ln().mul(&sigma).exp()).to_f64()
        };
        scaled.push(v);
    }
    let (argmax, sup) =
        scaled.iter().enumerate().fold(
            (0usize, f64::NEG_INFINITY),
            |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) },
        );
    let half = (k_max / 2) as usize;
    let tail = &scaled[half.saturating_sub(1)..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let tail_sup = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let within = tail.iter().all(|&v| (v - mean).abs() <= 0.1 * mean.abs());
    Ok(BoundScan {
        sup,
        argmax: argmax as u64 + 1,
        stabilized: tail_sup == sup || within,
        last: *scaled.last().unwrap_or(&0.0),
    })
}
