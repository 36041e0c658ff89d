//! The coefficients `c_k` by three methods, and the majorant `q_k`.
//!
//! * binomial: `c_k = Σ_{j≤k} (−1)^j C(k, j) / ζ(2j + 2)`, exact binomials
//!   against 1/ζ(2m) balls at enough working precision to absorb the
//!   cancellation;
//! * Möbius: `c_k = Σ_n μ(n)·g_k(n)` with `g_k(x) = x^{−2}(1 − x^{−2})^k`,
//!   truncated at `N` with tail at most `1/N`;
//! * Mertens: `c_k = −Σ_n M(n)·(g_k(n+1) − g_k(n))`, truncated at `n < N`
//!   with the tail bounded through `|M(n)| ≤ n`.
//!
//! Every record's `value` ball contains `c_k`; `error_bound` is its radius
//! (rounding plus truncation).

mod kernel;
pub mod sweep;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::config::{self, check_precision};
use crate::error::{Error, Result};
use crate::mobius::{sieve_mobius, MertensTable, MobiusTable, DEFAULT_SEGMENT};
use crate::mp::consts::pi;
use crate::mp::{gamma_ratio, Mag, MpReal};
use crate::zeta::inv_zeta_even;

pub use kernel::FLOAT_MAX_N;
pub use sweep::{ck_sweep, CoefficientCache, SweepParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Binomial,
    Mobius,
    Mertens,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Binomial => "binomial",
            Method::Mobius => "mobius",
            Method::Mertens => "mertens",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Method> {
        match s {
            "binomial" => Ok(Method::Binomial),
            "mobius" => Ok(Method::Mobius),
            "mertens" => Ok(Method::Mertens),
            _ => Err(Error::usage(format!(
                "unknown method {s:?} (expected binomial, mobius or mertens)"
            ))),
        }
    }
}

/// How the sum over `n` was evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    /// Exact binomials against ball-valued ζ values.
    #[default]
    Exact,
    /// Binary64 with an a-priori rounding bound.
    Float,
    /// Ball arithmetic throughout.
    Ball,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub k: u64,
    pub method: Method,
    /// A ball containing `c_k`.
    pub value: MpReal,
    /// Total error (rounding plus truncation); equals the radius of `value`.
    pub error_bound: Mag,
    /// Requested target precision.
    pub precision_bits: u32,
    /// Precision actually used for the sum.
    pub working_bits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_cutoff: Option<u64>,
    #[serde(default)]
    pub kernel: Kernel,
    pub wall_time_ms: u64,
}

impl CoefficientRecord {
    #[allow(clippy::too_many_arguments)]
    fn new(
        k: u64,
        method: Method,
        value: MpReal,
        precision_bits: u32,
        working_bits: u32,
        n_cutoff: Option<u64>,
        kernel: Kernel,
        started: Instant,
    ) -> CoefficientRecord {
        CoefficientRecord {
            k,
            method,
            error_bound: value.radius(),
            value,
            precision_bits,
            working_bits,
            n_cutoff,
            kernel,
            wall_time_ms: started.elapsed().as_millis() as u64,
        }
    }

    /// A record around a value computed elsewhere (synthetic inputs, imports).
    pub fn from_value(k: u64, method: Method, value: MpReal, precision_bits: u32) -> CoefficientRecord {
        CoefficientRecord {
            k,
            method,
            error_bound: value.radius(),
            working_bits: value.prec(),
            value,
            precision_bits,
            n_cutoff: None,
            kernel: Kernel::Exact,
            wall_time_ms: 0,
        }
    }

    /// Intervals `value.mid ± error_bound` intersect.
    pub fn overlaps(&self, other: &CoefficientRecord) -> bool {
        self.interval().overlaps(&other.interval())
    }

    /// `value.mid ± error_bound` as a ball.
    pub fn interval(&self) -> MpReal {
        self.value.mid().add_error(self.error_bound.max(self.value.radius()))
    }

    /// Restores `error_bound ≥ radius` after decimal parsing.
    pub(crate) fn normalized(mut self) -> CoefficientRecord {
        self.error_bound = self.error_bound.max(self.value.radius());
        self
    }
}

fn log2_ceil(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Working precision of the binomial method before retries.
pub fn binomial_working_precision(k: u64, target: u32, extra_guard: u32) -> u64 {
    target as u64 + k + log2_ceil(k + 1) as u64 + config::active().binomial_guard_bits as u64 + extra_guard as u64
}

fn binomial_sum(k: u64, wp: u32) -> Result<MpReal> {
    let mut sum = MpReal::zero(wp);
    let mut binom = BigInt::from(1);
    for j in 0..=k {
        let term = inv_zeta_even(j + 1, wp)?.mul_bigint(&binom);
        sum = if j % 2 == 0 { sum.add(&term) } else { sum.sub(&term) };
        binom = binom * (k - j) / (j + 1);
    }
    Ok(sum)
}

/// `c_k` by the binomial sum.
pub fn ck_binomial(k: u64, target_precision: u32) -> Result<CoefficientRecord> {
    ck_binomial_with_guard(k, target_precision, 0)
}

/// [`ck_binomial`] with `extra_guard` bits on top of the standard rule.
pub fn ck_binomial_with_guard(k: u64, target_precision: u32, extra_guard: u32) -> Result<CoefficientRecord> {
    check_precision(target_precision)?;
    let started = Instant::now();
    let cap = config::active().precision_cap_bits;
    let mut wp = binomial_working_precision(k, target_precision, extra_guard);
    let tol = Mag::pow2(-(target_precision as i64));
    loop {
        if wp > cap as u64 {
            return Err(Error::Resource {
                what: format!("ck_binomial(k = {k})"),
                required_bits: wp,
                cap_bits: cap as u64,
            });
        }
        let sum = binomial_sum(k, wp as u32)?;
        let value = sum.round(target_precision);
        let scale = value.mid_mag_down().max(tol);
        if value.radius() <= tol.mul(scale) {
            return Ok(CoefficientRecord::new(
                k,
                Method::Binomial,
                value,
                target_precision,
                wp as u32,
                None,
                Kernel::Exact,
                started,
            ));
        }
        wp += 32;
    }
}

fn check_cutoff(n: u64, what: &str) -> Result<()> {
    if n < 2 {
        return Err(Error::usage(format!("{what}: N must be at least 2, got {n}")));
    }
    Ok(())
}

fn tail_one_over(n: u64) -> Mag {
    Mag::from_u64(1).div(Mag::from_u64(n))
}

/// Picks the float kernel when `n_max` allows it.
fn default_kernel(n_max: u64) -> Kernel {
    if n_max <= config::active().hardware_kernel_max_n.min(FLOAT_MAX_N) {
        Kernel::Float
    } else {
        Kernel::Ball
    }
}

fn ball_precision(target: u32, n_max: u64) -> u32 {
    target + 16 + log2_ceil(n_max + 1)
}

/// `c_k` by the Möbius sum over `n ≤ N` (`N = 1` is the degenerate guard
/// case with error bound 1).
pub fn ck_mobius(k: u64, n: u64, target_precision: u32) -> Result<CoefficientRecord> {
    check_precision(target_precision)?;
    if n == 0 {
        return Err(Error::usage("ck_mobius: N must be at least 1"));
    }
    let table = sieve_mobius(1, n, DEFAULT_SEGMENT)?;
    ck_mobius_from_table(k, &table, target_precision, default_kernel(n))
}

/// Möbius method with μ supplied (the table must start at 1) and an
/// explicit kernel.
pub fn ck_mobius_from_table(
    k: u64,
    mu: &MobiusTable,
    target_precision: u32,
    kernel: Kernel,
) -> Result<CoefficientRecord> {
    check_precision(target_precision)?;
    if mu.lo != 1 {
        return Err(Error::usage("ck_mobius: the μ table must start at n = 1"));
    }
    let started = Instant::now();
    let n = mu.hi;
    let weight = |i: u64| mu.mu(i);
    let (sum, wp, kernel) = match kernel {
        Kernel::Float if n <= FLOAT_MAX_N => (kernel::weighted_sum_float(k, n, weight).to_ball(), 53, Kernel::Float),
        _ => {
            let wp = ball_precision(target_precision, n);
            (kernel::weighted_sum_ball(k, n, wp, weight), wp, Kernel::Ball)
        }
    };
    let value = sum.add_error(tail_one_over(n));
    Ok(CoefficientRecord::new(
        k,
        Method::Mobius,
        value.round(target_precision.max(64)),
        target_precision,
        wp,
        Some(n),
        kernel,
        started,
    ))
}

/// Möbius records for all `k` in `k_lo..=k_hi` from one pass over `n`.
pub fn ck_mobius_range(
    k_lo: u64,
    k_hi: u64,
    mu: &MobiusTable,
    target_precision: u32,
) -> Result<Vec<CoefficientRecord>> {
    check_precision(target_precision)?;
    if mu.lo != 1 || mu.hi > FLOAT_MAX_N {
        return Err(Error::usage(
            "ck_mobius_range needs a μ table over [1, N] with N ≤ 2^26",
        ));
    }
    if k_lo > k_hi {
        return Err(Error::usage(format!("empty k range {k_lo}..={k_hi}")));
    }
    let started = Instant::now();
    let n = mu.hi;
    let sums = kernel::weighted_sum_float_range(k_lo, k_hi, n, |i| mu.mu(i));
    Ok(sums
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let value = s.to_ball().add_error(tail_one_over(n));
            CoefficientRecord::new(
                k_lo + i as u64,
                Method::Mobius,
                value.round(target_precision.max(64)),
                target_precision,
                53,
                Some(n),
                Kernel::Float,
                started,
            )
        })
        .collect())
}

/// Upper bound on `Σ_{n≥N} n·|g_k(n+1) − g_k(n)|`.
pub fn mertens_tail_bound(k: u64, n: u64) -> Mag {
    let one_over_n = tail_one_over(n);
    let kp1 = k + 1;
    if (n as u128) * (n as u128) >= kp1 as u128 {
        // g is decreasing on [N, ∞): Σ n(g(n) − g(n+1)) = N·g(N) + Σ_{n>N} g(n).
        let nf = Mag::from_u64(n);
        let n2 = nf.mul(nf);
        let x = Mag::from_u64(1).sub_down(Mag::from_u64(1).div_down(n2));
        let x = if x > Mag::from_u64(1) { Mag::from_u64(1) } else { x };
        let g = x.pow(k).div(n2).mul(Mag::from_f64_up(1.0 + 1e-15));
        nf.mul(g).add(one_over_n)
    } else {
        // Rise to the maximum at n* = ⌈√(k+1)⌉, then fall:
        // ≤ n*·g_max + n*·g_max + 1/n* with g_max ≤ 1/(k+1).
        let n_star = Mag::from_u64(kp1).sqrt().add(Mag::from_u64(1));
        n_star.mul_2exp(1).div(Mag::from_u64(kp1)).add(one_over_n)
    }
}

/// `c_k` by Abel summation against `M(n)` for `n < N`.
pub fn ck_mertens(k: u64, n: u64, table: &MertensTable, target_precision: u32) -> Result<CoefficientRecord> {
    check_precision(target_precision)?;
    check_cutoff(n, "ck_mertens")?;
    if table.x_max < n {
        return Err(Error::usage(format!(
            "ck_mertens: table covers x ≤ {} but N = {n}",
            table.x_max
        )));
    }
    let m = table.range(1, n - 1)?;
    ck_mertens_from_values(k, &m, target_precision, default_kernel(n))
}

/// Mertens method with `m[i] = M(i + 1)` for `i + 1 < N`.
pub fn ck_mertens_from_values(k: u64, m: &[i64], target_precision: u32, kernel: Kernel) -> Result<CoefficientRecord> {
    check_precision(target_precision)?;
    if m.is_empty() {
        return Err(Error::usage("ck_mertens: N must be at least 2"));
    }
    let started = Instant::now();
    let n = m.len() as u64 + 1;
    let (sum, wp, kernel) = match kernel {
        Kernel::Float if n < FLOAT_MAX_N => (kernel::abel_sum_float(k, m).to_ball(), 53, Kernel::Float),
        _ => {
            let wp = ball_precision(target_precision, n);
            (kernel::abel_sum_ball(k, m, wp), wp, Kernel::Ball)
        }
    };
    let value = sum.add_error(mertens_tail_bound(k, n));
    Ok(CoefficientRecord::new(
        k,
        Method::Mertens,
        value.round(target_precision.max(64)),
        target_precision,
        wp,
        Some(n),
        kernel,
        started,
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct QkValue {
    pub k: u64,
    /// A ball containing `q_k` (tail included).
    pub value: MpReal,
    /// `√π·Γ(k+1)/Γ(k+3/2)`.
    pub main_term: MpReal,
    /// `∫_1^∞ x^{−2}(1 − x^{−2})^k dx = main_term / 2`.
    pub integral_term: MpReal,
    pub truncation_n: u64,
}

/// `q_k = Σ_n n^{−2}(1 − n^{−2})^k` truncated at `N` with tail `≤ 1/N`.
pub fn qk(k: u64, n: u64, target_precision: u32) -> Result<QkValue> {
    check_precision(target_precision)?;
    check_cutoff(n, "qk")?;
    let sum = if n <= config::active().hardware_kernel_max_n.min(FLOAT_MAX_N) {
        kernel::weighted_sum_float(k, n, |_| 1).to_ball()
    } else {
        kernel::weighted_sum_ball(k, n, ball_precision(target_precision, n), |_| 1)
    };
    // The tail is positive: widen by 1/(2N) around a midpoint shifted up by
    // the same amount.
    let half_tail = MpReal::one(64).div_u64(2 * n);
    let value = sum
        .add(&half_tail.mid())
        .add_error(half_tail.abs_upper())
        .round(target_precision.max(64));
    let main_term = qk_main_term(k, target_precision)?;
    Ok(QkValue {
        k,
        value,
        integral_term: main_term.mul_2exp(-1),
        main_term,
        truncation_n: n,
    })
}

/// `√π·Γ(k+1)/Γ(k+3/2)`.
pub fn qk_main_term(k: u64, precision: u32) -> Result<MpReal> {
    check_precision(precision)?;
    let wp = precision + 16;
    let a = MpReal::from_u64(k + 1, wp);
    let b = MpReal::from_u64(2 * k + 3, wp).mul_2exp(-1);
    Ok(pi(wp).sqrt().mul(&gamma_ratio(&a, &b, wp)?).round(precision))
}

#[derive(Clone, Debug, Serialize)]
pub struct VariationCheck {
    pub k: u64,
    /// Located maximizer `x²` (the calculus answer is `k + 1`).
    pub argmax_x2: f64,
    pub g_max: MpReal,
    /// `(1/(k+1))·(1 − 1/(k+1))^k`.
    pub formula: MpReal,
    pub residual: f64,
}

/// Maximizes `g_k(x) = x^{−2}(1 − x^{−2})^k` over `x ≥ 1` by golden-section
/// search in `t = x²` and compares with the closed form.
pub fn variation_max_check(k: u64, precision: u32) -> Result<VariationCheck> {
    check_precision(precision)?;
    if k == 0 {
        return Err(Error::usage("variation_max_check requires k ≥ 1"));
    }
    let wp = precision + 16;
    let one = MpReal::one(wp);
    // h(t) = t^{−1}(1 − 1/t)^k
    let h = |t: &MpReal| -> MpReal {
        let inv = one.div(t);
        one.sub(&inv).pow_u64(k).mul(&inv)
    };
    let phi = MpReal::from_u64(5, wp).sqrt().sub(&one).mul_2exp(-1);
    let mut a = one.clone();
    let mut b = MpReal::from_u64(4 * (k + 1), wp);
    let mut c = b.sub(&b.sub(&a).mul(&phi));
    let mut d = a.add(&b.sub(&a).mul(&phi));
    let mut hc = h(&c);
    let mut hd = h(&d);
    let tol = Mag::pow2(-((precision / 2) as i64) - 2).mul_u64(k + 1);
    while b.sub(&a).abs_upper() > tol {
        if hc.cmp_mid(&hd) == std::cmp::Ordering::Greater {
            b = d;
            d = c;
            hd = hc;
            c = b.sub(&b.sub(&a).mul(&phi));
            hc = h(&c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a.add(&b.sub(&a).mul(&phi));
            hd = h(&d);
        }
    }
    let (t, g_max) = if hc.cmp_mid(&hd) == std::cmp::Ordering::Greater {
        (c, hc)
    } else {
        (d, hd)
    };
    let kk = MpReal::from_u64(k + 1, wp);
    let formula = one.div(&kk).mul(&one.sub(&one.div(&kk)).pow_u64(k));
    let residual = g_max.sub(&formula).to_f64().abs();
    Ok(VariationCheck {
        k,
        argmax_x2: t.to_f64(),
        g_max: g_max.round(precision),
        formula: formula.round(precision),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::{mertens, MIN_SEGMENT};

    #[test]
    fn binomial_small_k() {
        let c0 = ck_binomial(0, 64).unwrap();
        assert!((c0.value.to_f64() - 6.0 / std::f64::consts::PI.powi(2)).abs() < 1e-16);
        let c1 = ck_binomial(1, 64).unwrap();
        assert!((c1.value.to_f64() - (0.6079271018540267 - 0.9239384029215904)).abs() < 1e-15);
        assert!(c1.error_bound >= c1.value.radius());
        assert!(c1.error_bound <= Mag::pow2(-64).mul(c1.value.abs_upper()));
    }

    #[test]
    fn binomial_resource_cap() {
        let e = ck_binomial(2_000_000, 64).unwrap_err();
        assert!(matches!(e, Error::Resource { .. }), "{e}");
    }

    #[test]
    fn mobius_guard_case() {
        let r = ck_mobius(0, 1, 64).unwrap();
        assert!(r.value.contains(&MpReal::one(64)));
        let r = ck_mobius(3, 1, 64).unwrap();
        assert!(r.value.mid_is_zero());
        assert!(r.error_bound >= Mag::from_u64(1));
    }

    #[test]
    fn mertens_two_term_unfolding() {
        let t = mertens(10, MIN_SEGMENT, 4).unwrap();
        for k in [1u64, 2, 5] {
            let r = ck_mertens(k, 2, &t, 64).unwrap();
            let expect = -0.25 * 0.75f64.powi(k as i32);
            assert!((r.value.to_f64() - expect).abs() < 1e-15, "k = {k}");
        }
        assert!(matches!(ck_mertens(1, 11, &t, 64), Err(Error::Usage(_))));
    }

    #[test]
    fn variation_small() {
        let v = variation_max_check(1, 64).unwrap();
        assert!(v.formula.overlaps(&MpReal::from_f64(0.25, 64)));
        assert!((v.argmax_x2 - 2.0).abs() < 1e-6);
        let v = variation_max_check(10, 64).unwrap();
        assert!(v.residual < 1e-12, "{}", v.residual);
    }

    #[test]
    fn tail_bound_covers_direct_sum() {
        for (k, n) in [(0u64, 5u64), (3, 10), (100, 5), (100, 40), (1000, 20)] {
            let mut direct = 0.0f64;
            let g = |x: f64| x.powi(-2) * (1.0 - x.powi(-2)).powi(k as i32);
            for m in n..200_000 {
                direct += m as f64 * (g(m as f64 + 1.0) - g(m as f64)).abs();
            }
            assert!(mertens_tail_bound(k, n).to_f64() >= direct, "k = {k}, N = {n}");
        }
    }
}
