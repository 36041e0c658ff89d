//! Summation kernels for `g_k(n) = n^{−2}(1 − n^{−2})^k`.
//!
//! The float kernels evaluate in binary64 and carry an a-priori rounding
//! bound. With `n² ≤ 2^52` the quantity `x = (n² − 1)/n²` costs one
//! rounding, `x^k` by binary powering at most `k − 1` more, and the final
//! division one more, so `ĝ = g·(1 + θ)` with `|θ| ≤ γ_{2k+2}` where
//! `γ_m = m·u/(1 − m·u)`. Recursive summation of `N` terms adds
//! `γ_N·Σ|t̂|`. Values of `g` below `2^−950` are dropped and charged
//! `2^−900` each.

use crate::mp::{Mag, MpReal};

const UNIT: f64 = 1.0 / 9_007_199_254_740_992.0;
const UNDERFLOW_LOG2: f64 = -950.0;
const DROPPED: f64 = f64::from_bits((1023 - 900) << 52);

/// Largest `n` for which `n²` is exact in binary64.
pub const FLOAT_MAX_N: u64 = 1 << 26;

pub(crate) fn gamma(m: u64) -> f64 {
    let mu = m as f64 * UNIT;
    mu / (1.0 - mu) * (1.0 + 1e-9)
}

/// Midpoint plus an absolute error bound.
#[derive(Clone, Copy, Debug)]
pub(crate) struct FloatSum {
    pub sum: f64,
    pub bound: f64,
}

impl FloatSum {
    pub fn to_ball(self) -> MpReal {
        MpReal::from_f64(self.sum, 64).add_error(Mag::from_f64_up(self.bound))
    }
}

fn powi(mut x: f64, mut k: u64) -> f64 {
    let mut acc = 1.0;
    while k > 0 {
        if k & 1 == 1 {
            acc *= x;
        }
        k >>= 1;
        if k > 0 {
            x *= x;
        }
    }
    acc
}

/// `(n², x)` with `x = (n² − 1)/n²`.
fn base(n: u64) -> (f64, f64) {
    let n2 = (n * n) as f64;
    (n2, (n2 - 1.0) / n2)
}

/// `ĝ_k(n)`, or `None` when it is below `2^−950`.
fn g_float(n: u64, k: u64) -> Option<f64> {
    if n == 1 {
        return Some(if k == 0 { 1.0 } else { 0.0 });
    }
    let (n2, x) = base(n);
    if k as f64 * x.log2() < UNDERFLOW_LOG2 {
        return None;
    }
    Some(powi(x, k) / n2)
}

/// `Σ_{n≤N} w(n)·g_k(n)` for weights in {−1, 0, 1}.
pub(crate) fn weighted_sum_float(k: u64, n_max: u64, weight: impl Fn(u64) -> i8) -> FloatSum {
    debug_assert!(n_max <= FLOAT_MAX_N);
    let mut sum = 0.0f64;
    let mut abs = 0.0f64;
    let mut dropped = 0u64;
    for n in 1..=n_max {
        let w = weight(n);
        if w == 0 {
            continue;
        }
        match g_float(n, k) {
            Some(t) => {
                sum += w as f64 * t;
                abs += t;
            }
            None => dropped += 1,
        }
    }
    let g = gamma(2 * k + 2) + gamma(n_max);
    let bound = g * abs * (1.0 + gamma(n_max)) * (1.0 + 1e-12) + dropped as f64 * DROPPED;
    FloatSum { sum, bound }
}

/// The same sums for every `k` in `k_lo..=k_hi`, stepping the power
/// incrementally.
pub(crate) fn weighted_sum_float_range(k_lo: u64, k_hi: u64, n_max: u64, weight: impl Fn(u64) -> i8) -> Vec<FloatSum> {
    debug_assert!(n_max <= FLOAT_MAX_N);
    let len = (k_hi - k_lo + 1) as usize;
    let mut sum = vec![0.0f64; len];
    let mut abs = vec![0.0f64; len];
    for n in 1..=n_max {
        let w = weight(n);
        if w == 0 {
            continue;
        }
        if n == 1 {
            if k_lo == 0 {
                sum[0] += w as f64;
                abs[0] += 1.0;
            }
            continue;
        }
        let (n2, x) = base(n);
        let limit = (UNDERFLOW_LOG2 / x.log2()).floor() as u64;
        if limit < k_lo {
            continue;
        }
        let top = k_hi.min(limit);
        let inv = 1.0 / n2;
        let wf = w as f64;
        let mut p = powi(x, k_lo);
        for i in 0..=(top - k_lo) as usize {
            let t = p * inv;
            sum[i] += wf * t;
            abs[i] += t;
            p *= x;
        }
    }
    (0..len)
        .map(|i| {
            let k = k_lo + i as u64;
            let g = gamma(2 * k + 4) + gamma(n_max);
            FloatSum {
                sum: sum[i],
                bound: g * abs[i] * (1.0 + gamma(n_max)) * (1.0 + 1e-12) + n_max as f64 * DROPPED,
            }
        })
        .collect()
}

/// `−Σ_{n<N} M(n)·(g_k(n+1) − g_k(n))` with `m[i] = M(i + 1)`.
pub(crate) fn abel_sum_float(k: u64, m: &[i64]) -> FloatSum {
    let n_top = m.len() as u64;
    debug_assert!(n_top < FLOAT_MAX_N);
    let gk = gamma(2 * k + 2);
    let mut sum = 0.0f64;
    let mut err = 0.0f64;
    let mut abs = 0.0f64;
    let mut dropped = 0.0f64;
    let eval = |n: u64| g_float(n, k);
    let mut g_prev = eval(1);
    for n in 1..=n_top {
        let g_next = eval(n + 1);
        let mn = m[(n - 1) as usize];
        let a = g_prev.unwrap_or(0.0);
        let b = g_next.unwrap_or(0.0);
        let missing = g_prev.is_none() as u8 + g_next.is_none() as u8;
        if missing > 0 {
            dropped += mn.unsigned_abs() as f64 * missing as f64;
        }
        let d = b - a;
        let t = -(mn as f64) * d;
        sum += t;
        abs += t.abs();
        err += mn.unsigned_abs() as f64 * (gk * (a + b) * (1.0 + gk) + 2.0 * UNIT * d.abs());
        g_prev = g_next;
    }
    let bound = (err + gamma(n_top) * abs) * (1.0 + gamma(n_top)) * (1.0 + 1e-12) + dropped * DROPPED;
    FloatSum { sum, bound }
}

/// Ball version of [`weighted_sum_float`] at `wp` bits.
pub(crate) fn weighted_sum_ball(k: u64, n_max: u64, wp: u32, weight: impl Fn(u64) -> i8) -> MpReal {
    let mut sum = MpReal::zero(wp);
    let cutoff = -(wp as f64) - (n_max as f64).log2() - 8.0;
    let mut skipped = Mag::ZERO;
    for n in 1..=n_max {
        let w = weight(n);
        if w == 0 {
            continue;
        }
        let t = match g_ball(n, k, wp, cutoff) {
            Ok(t) => t,
            Err(b) => {
                skipped = skipped.add(b);
                continue;
            }
        };
        sum = if w > 0 { sum.add(&t) } else { sum.sub(&t) };
    }
    sum.add_error(skipped)
}

/// `g_k(n)` as a ball, or an upper bound when `log2 g_k(n) < cutoff`.
fn g_ball(n: u64, k: u64, wp: u32, cutoff: f64) -> Result<MpReal, Mag> {
    if n == 1 {
        return Ok(if k == 0 { MpReal::one(wp) } else { MpReal::zero(wp) });
    }
    let nf = n as f64;
    // (1 − 1/n²)^k ≤ e^{−k/n²}
    let log2_upper = -(k as f64) / (nf * nf) * std::f64::consts::LOG2_E - 2.0 * nf.log2();
    if log2_upper < cutoff {
        return Err(Mag::pow2(log2_upper.ceil() as i64 + 1));
    }
    let n2 = MpReal::from_u64(n, 64).sqr();
    let x = n2.sub(&MpReal::one(64)).with_prec(wp).div(&n2);
    Ok(x.pow_u64(k).div(&n2))
}

/// Ball version of [`abel_sum_float`].
pub(crate) fn abel_sum_ball(k: u64, m: &[i64], wp: u32) -> MpReal {
    let n_top = m.len() as u64;
    let cutoff = -(wp as f64) - 2.0 * (n_top as f64 + 1.0).log2() - 8.0;
    let mut skipped = Mag::ZERO;
    let mut sum = MpReal::zero(wp);
    let mut eval = |n: u64, weight: u64| match g_ball(n, k, wp, cutoff) {
        Ok(v) => v,
        Err(b) => {
            skipped = skipped.add(b.mul_u64(weight.max(1)));
            MpReal::zero(wp)
        }
    };
    let mut g_prev = eval(1, m[0].unsigned_abs());
    for n in 1..=n_top {
        let mn = m[(n - 1) as usize];
        let after = m.get(n as usize).map_or(0, |v| v.unsigned_abs());
        let g_next = eval(n + 1, mn.unsigned_abs() + after);
        let d = g_next.sub(&g_prev);
        sum = sum.sub(&d.mul_i64(mn));
        g_prev = g_next;
    }
    sum.add_error(skipped)
}
