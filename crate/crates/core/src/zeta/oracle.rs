//! ζ(s) for Re(s) > 1 by Euler–Maclaurin summation.
//!
//! ζ(s) = Σ_{n<N} n^{−s} + N^{1−s}/(s−1) + N^{−s}/2
//!        + Σ_{j=1}^{M} B_{2j}/(2j)! · (s)_{2j−1} · N^{−s−2j+1} + R,
//! |R| ≤ 4|(s)_{2M}| / (2π)^{2M} · N^{1−σ−2M} / (σ+2M−1).

use num_bigint::BigInt;

use super::bernoulli::bernoulli;
use crate::config::{self, check_precision};
use crate::error::{Error, Result};
use crate::mp::{Mag, MpComplex, MpReal};

enum Exponent {
    Integer(u64),
    General(MpComplex),
}

impl Exponent {
    /// `n^{−s}`.
    fn neg_pow(&self, n: u64, wp: u32) -> MpComplex {
        match self {
            Exponent::Integer(s) => {
                let p = BigInt::from(n).pow(*s as u32);
                MpComplex::from_real(MpReal::one(wp).div(&MpReal::from_bigint(&p, wp + 8)).round(wp))
            }
            Exponent::General(s) => {
                if n == 1 {
                    return MpComplex::one(wp);
                }
                let ln = MpReal::from_u64(n, wp).ln();
                s.mul_real(&ln).neg().exp()
            }
        }
    }
}

fn log2_rising_abs(sigma: f64, t: f64, len: u64) -> f64 {
    (0..len)
        .map(|i| ((sigma + i as f64).powi(2) + t * t).sqrt().log2())
        .sum()
}

/// Cheapest `(N, M)` whose remainder bound falls below `2^target`.
fn choose_parameters(sigma: f64, t: f64, target: f64) -> Option<(u64, u64)> {
    let max_m = config::active().zeta_em_max_terms;
    let log2_2pi = std::f64::consts::TAU.log2();
    let mut best: Option<(u64, u64)> = None;
    let mut n = 2u64;
    while n < 1 << 32 {
        let ln = (n as f64).log2();
        let mut rising = log2_rising_abs(sigma, t, 2);
        for m in 1..=max_m {
            if m > 1 {
                rising += ((sigma + (2 * m - 2) as f64).powi(2) + t * t).sqrt().log2()
                    + ((sigma + (2 * m - 1) as f64).powi(2) + t * t).sqrt().log2();
            }
            let b = 2.0 + rising - 2.0 * m as f64 * log2_2pi + (1.0 - sigma - 2.0 * m as f64) * ln
                - (sigma + 2.0 * m as f64 - 1.0).log2();
            if b < target {
                let cost = n + 4 * m;
                if best.is_none_or(|(bn, bm)| cost < bn + 4 * bm) {
                    best = Some((n, m));
                }
                break;
            }
        }
        if let Some((bn, bm)) = best {
            if n > bn + 4 * bm {
                break;
            }
        }
        n = n * 5 / 4 + 1;
    }
    best
}

/// Rigorous bound on `|(s)_{len}|`.
fn rising_abs_upper(s: &MpComplex, len: u64) -> Mag {
    let re = s.re.abs_upper();
    let im = s.im.abs_upper();
    let mut acc = Mag::from_u64(1);
    for i in 0..len {
        let r = re.add(Mag::from_u64(i));
        acc = acc.mul(r.mul(r).add(im.mul(im)).sqrt());
    }
    acc
}

/// ζ(s) for `Re(s) > 1`, radius at most `2^{4−precision}·|ζ(s)|`.
pub fn zeta_dirichlet_oracle(s: &MpComplex, precision: u32) -> Result<MpComplex> {
    check_precision(precision)?;
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::domain("zeta_dirichlet_oracle: non-finite argument"));
    }
    let one = MpReal::one(64);
    if !s.re.sub(&one).is_positive() {
        return Err(Error::domain(format!(
            "zeta_dirichlet_oracle requires Re(s) > 1, got Re(s) = {}",
            s.re
        )));
    }
    let (sigma, t) = s.to_f64();
    // |ζ(s)| ≥ 1/ζ(σ) ≥ (σ−1)/σ.
    let log2_lower = ((sigma - 1.0) / sigma).log2();
    let wp = precision + 12 + (sigma.abs().max(t.abs()).max(2.0).log2().ceil() as u32);
    let target = log2_lower - wp as f64 - 2.0;
    let (n_cut, m_terms) = choose_parameters(sigma, t, target).ok_or_else(|| Error::Resource {
        what: "Euler–Maclaurin zeta oracle".into(),
        required_bits: wp as u64,
        cap_bits: config::active().zeta_em_max_terms,
    })?;

    let exact = if s.im.is_zero() {
        s.re.exact_integer()
            .and_then(|v| u64::try_from(v).ok())
            .filter(|&v| v <= 1 << 16)
    } else {
        None
    };
    let exponent = match exact {
        Some(v) => Exponent::Integer(v),
        None => Exponent::General(s.with_prec(wp)),
    };
    let sw = s.with_prec(wp);

    let mut sum = MpComplex::zero(wp);
    for n in 1..n_cut {
        sum = sum.add(&exponent.neg_pow(n, wp));
    }
    let x = exponent.neg_pow(n_cut, wp);
    let nn = MpReal::from_u64(n_cut, wp);
    let s_minus_1 = sw.add_real(&MpReal::from_i64(-1, wp));
    sum = sum.add(&x.mul_real(&nn).div(&s_minus_1));
    sum = sum.add(&x.mul_2exp(-1));

    // poch = (s)_{2j−1}, npow = N^{−s−2j+1}, fact = (2j)!.
    let mut poch = sw.clone();
    let mut npow = x.mul_real(&nn.recip());
    let n2 = nn.sqr();
    let mut fact = BigInt::from(2);
    for j in 1..=m_terms {
        let b = bernoulli(2 * j)?;
        let c = MpReal::from_ratio(b.numer(), &(b.denom() * &fact), wp);
        sum = sum.add(&poch.mul(&npow).mul_real(&c));
        let a1 = sw.add_real(&MpReal::from_u64(2 * j - 1, 64));
        let a2 = sw.add_real(&MpReal::from_u64(2 * j, 64));
        poch = poch.mul(&a1).mul(&a2);
        npow = npow.mul_real(&n2.recip());
        fact *= BigInt::from((2 * j + 1) * (2 * j + 2));
    }

    let sig_lo = s.re.abs_lower().to_f64();
    let m = m_terms;
    let two_pi_pow = Mag::from_f64_down(std::f64::consts::TAU).pow_down(2 * m);
    let n_sigma = Mag::pow2((sig_lo * (n_cut as f64).log2() * (1.0 - 1e-12)).floor() as i64);
    let n_pow = Mag::from_u64(n_cut).pow_down(2 * m - 1).mul_down(n_sigma);
    let remainder = rising_abs_upper(s, 2 * m)
        .mul_2exp(2)
        .div(two_pi_pow)
        .div(n_pow)
        .div(Mag::from_f64_down(sig_lo + 2.0 * m as f64 - 1.0));
    Ok(sum.add_error(remainder).round(precision))
}

/// `1/ζ(s)` for `Re(s) > 1`.
pub fn inv_zeta_oracle(s: &MpComplex, precision: u32) -> Result<MpComplex> {
    Ok(MpComplex::one(precision + 8)
        .div(&zeta_dirichlet_oracle(s, precision + 8)?)
        .round(precision))
}
