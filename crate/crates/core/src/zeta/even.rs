//! ζ(2m) as `r_m·π^{2m}` or from the oracle, and a shared table of 1/ζ(2m).

use std::collections::HashMap;
use std::sync::RwLock;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::bernoulli::zeta_even_rational;
use super::oracle::zeta_dirichlet_oracle;
use crate::config::{self, check_precision};
use crate::error::{Error, Result};
use crate::mp::consts::pi;
use crate::mp::{MpComplex, MpReal};

#[derive(Clone, Debug, Serialize)]
pub struct ZetaEvenValue {
    pub m: u64,
    /// `r_m` with `ζ(2m) = r_m·π^{2m}`; absent when the value came from the
    /// Euler–Maclaurin oracle.
    #[serde(serialize_with = "serialize_rational")]
    pub rational_factor: Option<BigRational>,
    pub numeric: MpReal,
}

fn serialize_rational<S: serde::Serializer>(q: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_some(&q.to_string()),
        None => s.serialize_none(),
    }
}

fn compute(m: u64, precision: u32) -> Result<ZetaEvenValue> {
    if m <= config::active().zeta_exact_max_m {
        let r = zeta_even_rational(m)?;
        let wp = precision + 16 + (64 - m.leading_zeros());
        let numeric = MpReal::from_rational(&r, wp)
            .mul(&pi(wp).pow_u64(2 * m))
            .round(precision);
        Ok(ZetaEvenValue {
            m,
            rational_factor: Some(r),
            numeric,
        })
    } else {
        let s = MpComplex::from_real(MpReal::from_u64(2 * m, 64));
        let numeric = zeta_dirichlet_oracle(&s, precision + 4)?.re.round(precision);
        Ok(ZetaEvenValue {
            m,
            rational_factor: None,
            numeric,
        })
    }
}

/// ζ(2m) at `precision` bits.
pub fn zeta_even(m: u64, precision: u32) -> Result<ZetaEvenValue> {
    check_precision(precision)?;
    if m == 0 {
        return Err(Error::usage("zeta_even(0): m must be at least 1"));
    }
    compute(m, precision)
}

static INV_TABLE: RwLock<Option<HashMap<u64, MpReal>>> = RwLock::new(None);

fn padded(precision: u32) -> u32 {
    precision.next_multiple_of(128) + 64
}

fn lookup(m: u64, precision: u32) -> Option<MpReal> {
    let guard = INV_TABLE.read().expect("zeta table poisoned");
    guard
        .as_ref()
        .and_then(|t| t.get(&m))
        .filter(|v| v.prec() >= precision)
        .map(|v| v.round(precision))
}

fn store(entries: Vec<(u64, MpReal)>) {
    let mut guard = INV_TABLE.write().expect("zeta table poisoned");
    let table = guard.get_or_insert_with(HashMap::new);
    for (m, v) in entries {
        if table.get(&m).is_none_or(|old| old.prec() < v.prec()) {
            table.insert(m, v);
        }
    }
}

fn compute_inv(m: u64, precision: u32) -> Result<MpReal> {
    let z = compute(m, precision + 8)?.numeric;
    Ok(MpReal::one(precision + 8).div(&z).round(precision))
}

/// 1/ζ(2m), memoized at the highest precision requested so far.
pub fn inv_zeta_even(m: u64, precision: u32) -> Result<MpReal> {
    check_precision(precision)?;
    if m == 0 {
        return Err(Error::usage("inv_zeta_even(0): m must be at least 1"));
    }
    if let Some(v) = lookup(m, precision) {
        return Ok(v);
    }
    let wp = padded(precision);
    let v = compute_inv(m, wp)?;
    store(vec![(m, v.clone())]);
    Ok(v.round(precision))
}

/// Fills the 1/ζ(2m) table for `m = 1..=m_max` at `precision` bits in
/// parallel.
pub fn prefetch_inv_zeta_even(m_max: u64, precision: u32) -> Result<()> {
    check_precision(precision)?;
    let wp = padded(precision);
    let missing: Vec<u64> = (1..=m_max).filter(|&m| lookup(m, precision).is_none()).collect();
    // Largest m first: those are the expensive oracle evaluations.
    let computed = missing
        .par_iter()
        .rev()
        .map(|&m| compute_inv(m, wp).map(|v| (m, v)))
        .collect::<Result<Vec<_>>>()?;
    store(computed);
    Ok(())
}
