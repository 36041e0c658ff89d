//! Exact Bernoulli numbers from the defining recurrence, memoized.

use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::config;
use crate::error::{Error, Result};

/// `B_0, B_2, B_4, …` in order; only ever grows.
static EVEN: RwLock<Vec<BigRational>> = RwLock::new(Vec::new());

/// `B_n = 1/2 − (1/(n+1)) Σ_{even j<n} C(n+1, j)·B_j` for even `n ≥ 2`,
/// accumulated over a common denominator.
fn next_even(known: &[BigRational]) -> BigRational {
    let n = 2 * known.len() as u64;
    if n == 0 {
        return BigRational::one();
    }
    let den = known.iter().fold(BigInt::one(), |acc, b| acc.lcm(b.denom()));
    let mut binom = BigInt::one();
    let mut sum = BigInt::zero();
    for j in 0..n {
        if j % 2 == 0 {
            let b = &known[(j / 2) as usize];
            sum += &binom * b.numer() * (&den / b.denom());
        }
        binom = binom * (n + 1 - j) / (j + 1);
    }
    BigRational::new(BigInt::one(), BigInt::from(2)) - BigRational::new(sum, den * BigInt::from(n + 1))
}

fn ensure(count: usize) {
    if EVEN.read().expect("bernoulli table poisoned").len() >= count {
        return;
    }
    let mut table = EVEN.write().expect("bernoulli table poisoned");
    while table.len() < count {
        let b = next_even(&table);
        table.push(b);
    }
}

/// `B_n` for even `n` (`B_0 = 1`, `B_2 = 1/6`, …).
pub fn bernoulli(n: u64) -> Result<BigRational> {
    if n % 2 == 1 {
        return Err(Error::usage(format!("bernoulli({n}): only even indices are supported")));
    }
    let max = config::active().bernoulli_max_n;
    if n > max {
        return Err(Error::usage(format!(
            "bernoulli({n}) exceeds the configured maximum index {max}"
        )));
    }
    let idx = (n / 2) as usize;
    ensure(idx + 1);
    Ok(EVEN.read().expect("bernoulli table poisoned")[idx].clone())
}

/// `Π_{p prime, (p−1) | n} p`, the denominator of `B_n` for even `n ≥ 2`
/// by von Staudt–Clausen.
pub fn von_staudt_denominator(n: u64) -> BigInt {
    let mut d = BigInt::one();
    for q in 1..=n {
        if !n.is_multiple_of(q) {
            continue;
        }
        let p = q + 1;
        if (2..).take_while(|f| f * f <= p).all(|f| p % f != 0) {
            d *= p;
        }
    }
    d
}

/// `r_m` with `ζ(2m) = r_m·π^{2m}`, i.e. `(−1)^{m+1} 2^{2m−1} B_{2m} / (2m)!`.
pub fn zeta_even_rational(m: u64) -> Result<BigRational> {
    if m == 0 {
        return Err(Error::usage("zeta_even_rational(0): m must be at least 1"));
    }
    let b = bernoulli(2 * m)?;
    let fact: BigInt = (1..=2 * m).map(BigInt::from).product();
    let r = b * BigRational::new(BigInt::one() << (2 * m - 1) as usize, fact);
    Ok(if m.is_multiple_of(2) { -r } else { r })
}
